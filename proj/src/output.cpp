#include "vetsim/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "vetsim/errors.hpp"

namespace vetsim {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kMaxPlotPoints = 4000;

const std::vector<std::string> kTextColumns = {"regionUS", "regionSU", "eventFlags"};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (pos == std::string::npos) return out;
    start = pos + 1;
  }
}

std::string region_text(const std::optional<RegionLabel>& r) {
  return r ? std::string(to_string(*r)) : std::string("none");
}

std::string optional_text(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

// ---- SVG ---------------------------------------------------------------

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string coord(double v) { return fmt("%.2f", v); }

struct Series {
  std::string label;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

struct Band {
  double from = 0.0;
  double to = 0.0;
  std::string color;
  std::string label;
};

struct Panel {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  std::vector<Series> series;
  std::vector<Band> bands;
};

struct Range {
  double lo = 0.0;
  double hi = 1.0;
};

Range data_range(const std::vector<Series>& series, bool use_x) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& s : series) {
    for (double v : use_x ? s.x : s.y) {
      if (!std::isfinite(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!std::isfinite(lo)) return {0.0, 1.0};
  if (hi - lo < 1e-9) return {lo - 0.5, hi + 0.5};
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

double nice_step(double span) {
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double r = raw / mag;
  const double m = r < 1.5 ? 1.0 : r < 3.0 ? 2.0 : r < 7.0 ? 5.0 : 10.0;
  return m * mag;
}

constexpr double kWidth = 800.0;
constexpr double kPanelHeight = 360.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 170.0;
constexpr double kTop = 36.0;
constexpr double kBottom = 46.0;

void render_panel(std::ostringstream& out, const Panel& p, double y0) {
  const double px0 = kLeft, px1 = kWidth - kRight;
  const double py0 = y0 + kTop, py1 = y0 + kPanelHeight - kBottom;
  const Range xr = data_range(p.series, true);
  const Range yr = data_range(p.series, false);
  auto sx = [&](double x) { return px0 + (x - xr.lo) / (xr.hi - xr.lo) * (px1 - px0); };
  auto sy = [&](double y) { return py1 - (y - yr.lo) / (yr.hi - yr.lo) * (py1 - py0); };

  out << "<text x=\"" << coord((px0 + px1) / 2) << "\" y=\"" << coord(y0 + 22)
      << "\" text-anchor=\"middle\" font-size=\"15\">" << p.title << "</text>\n";

  for (const auto& b : p.bands) {
    const double a = std::clamp(sx(b.from), px0, px1), c = std::clamp(sx(b.to), px0, px1);
    if (c <= a) continue;
    out << "<rect x=\"" << coord(a) << "\" y=\"" << coord(py0) << "\" width=\"" << coord(c - a)
        << "\" height=\"" << coord(py1 - py0) << "\" fill=\"" << b.color
        << "\" fill-opacity=\"0.35\"/>\n";
  }

  out << "<rect x=\"" << coord(px0) << "\" y=\"" << coord(py0) << "\" width=\"" << coord(px1 - px0)
      << "\" height=\"" << coord(py1 - py0) << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int axis = 0; axis < 2; ++axis) {
    const Range r = axis == 0 ? xr : yr;
    const double step = nice_step(r.hi - r.lo);
    for (double v = std::ceil(r.lo / step) * step; v <= r.hi + 1e-12; v += step) {
      const double tick = std::abs(v) < step * 1e-9 ? 0.0 : v;
      const std::string label = fmt("%g", tick);
      if (axis == 0) {
        const double x = sx(tick);
        out << "<line x1=\"" << coord(x) << "\" y1=\"" << coord(py1) << "\" x2=\"" << coord(x)
            << "\" y2=\"" << coord(py1 + 5) << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << coord(x) << "\" y=\"" << coord(py1 + 18)
            << "\" text-anchor=\"middle\" font-size=\"11\">" << label << "</text>\n";
      } else {
        const double y = sy(tick);
        out << "<line x1=\"" << coord(px0 - 5) << "\" y1=\"" << coord(y) << "\" x2=\"" << coord(px0)
            << "\" y2=\"" << coord(y) << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << coord(px0 - 8) << "\" y=\"" << coord(y + 4)
            << "\" text-anchor=\"end\" font-size=\"11\">" << label << "</text>\n";
      }
    }
  }
  out << "<text x=\"" << coord((px0 + px1) / 2) << "\" y=\"" << coord(py1 + 38)
      << "\" text-anchor=\"middle\" font-size=\"12\">" << p.xlabel << "</text>\n"
      << "<text x=\"18\" y=\"" << coord((py0 + py1) / 2) << "\" text-anchor=\"middle\" font-size=\"12\" "
      << "transform=\"rotate(-90 18 " << coord((py0 + py1) / 2) << ")\">" << p.ylabel << "</text>\n";

  for (const auto& s : p.series) {
    const std::size_t n = std::min(s.x.size(), s.y.size());
    const std::size_t stride = std::max<std::size_t>(1, (n + kMaxPlotPoints - 1) / kMaxPlotPoints);
    std::string points;
    auto flush = [&] {
      if (!points.empty()) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\""
            << (s.dashed ? " stroke-dasharray=\"6 3\"" : "") << " points=\"" << points << "\"/>\n";
      }
      points.clear();
    };
    for (std::size_t i = 0; i < n; i += stride) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
        flush();
        continue;
      }
      if (!points.empty()) points += ' ';
      points += coord(sx(s.x[i])) + "," + coord(sy(s.y[i]));
    }
    flush();
  }

  double ly = py0 + 10;
  for (const auto& s : p.series) {
    out << "<line x1=\"" << coord(px1 + 12) << "\" y1=\"" << coord(ly) << "\" x2=\"" << coord(px1 + 36)
        << "\" y2=\"" << coord(ly) << "\" stroke=\"" << s.color << "\" stroke-width=\"2\""
        << (s.dashed ? " stroke-dasharray=\"6 3\"" : "") << "/>\n"
        << "<text x=\"" << coord(px1 + 42) << "\" y=\"" << coord(ly + 4) << "\" font-size=\"11\">"
        << s.label << "</text>\n";
    ly += 18;
  }
  std::vector<std::string> seen;
  for (const auto& b : p.bands) {
    if (std::find(seen.begin(), seen.end(), b.label) != seen.end()) continue;
    seen.push_back(b.label);
    out << "<rect x=\"" << coord(px1 + 12) << "\" y=\"" << coord(ly - 6) << "\" width=\"24\" height=\"12\" fill=\""
        << b.color << "\" fill-opacity=\"0.35\"/>\n"
        << "<text x=\"" << coord(px1 + 42) << "\" y=\"" << coord(ly + 4) << "\" font-size=\"11\">" << b.label
        << "</text>\n";
    ly += 18;
  }
}

std::string render(const std::vector<Panel>& panels) {
  std::ostringstream out;
  const double height = kPanelHeight * static_cast<double>(panels.size());
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << coord(kWidth)
      << "\" height=\"" << coord(height) << "\" viewBox=\"0 0 " << coord(kWidth) << " " << coord(height)
      << "\" font-family=\"sans-serif\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < panels.size(); ++i) {
    render_panel(out, panels[i], kPanelHeight * static_cast<double>(i));
  }
  out << "</svg>\n";
  return out.str();
}

std::vector<Band> standard_bands(const CsvTable& t) {
  std::vector<Band> bands;
  for (const auto& [a, b] : event_windows(t, "perturbation")) bands.push_back({a, b, "#f2c200", "perturbation"});
  for (const auto& [a, b] : event_windows(t, "dropoutUS")) bands.push_back({a, b, "#9aa7b8", "dropout U camera"});
  for (const auto& [a, b] : event_windows(t, "dropoutSU")) bands.push_back({a, b, "#c7a0c9", "dropout S camera"});
  return bands;
}

Series series(const CsvTable& t, const std::string& xcol, const std::string& ycol, std::string label,
              std::string color, bool dashed = false) {
  return {std::move(label), std::move(color), t.column(xcol), t.column(ycol), dashed};
}

// Commanded velocity as actually applied: the clipped sum of the logged
// sub-task and tether parts.
Series command_series(const CsvTable& t, const std::string& robot, const std::string& axis, double bound,
                      std::string color) {
  const auto& sub = t.column("u" + robot + "_sub_" + axis);
  const auto& xi = t.column("u" + robot + "_xi_" + axis);
  Series s{axis, std::move(color), t.column("t"), {}, false};
  s.y.resize(sub.size());
  for (std::size_t i = 0; i < sub.size(); ++i) s.y[i] = std::clamp(sub[i] + xi[i], -bound, bound);
  return s;
}

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

}  // namespace

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = [] {
    std::vector<std::string> c = {"t", "xU", "yU", "zU", "phiU", "thetaU", "psiU", "xS", "yS", "psiS"};
    for (const char* part : {"sub", "xi"}) {
      for (const char* ax : {"x", "y", "z", "phi", "theta", "psi"}) c.push_back(std::string("uU_") + part + "_" + ax);
    }
    for (const char* part : {"sub", "xi"}) {
      for (const char* ax : {"x", "y", "psi"}) c.push_back(std::string("uS_") + part + "_" + ax);
    }
    for (const char* tail :
         {"detectedUS", "detectedSU", "regionUS", "regionSU", "xiUS", "xiSU", "projDist", "eventFlags"}) {
      c.emplace_back(tail);
    }
    return c;
  }();
  return cols;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (v == 0.0) return "0";  // folds -0
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_csv(const TrajectoryLog& log, std::ostream& out) {
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& r : log.records) {
    std::vector<std::string> cells;
    cells.reserve(cols.size());
    const auto num = [&](double v) { cells.push_back(format_double(v)); };
    num(r.t);
    num(r.underwater.x);
    num(r.underwater.y);
    num(r.underwater.z);
    num(r.underwater.attitude.phi);
    num(r.underwater.attitude.theta);
    num(r.underwater.attitude.psi);
    num(r.surface.x);
    num(r.surface.y);
    num(r.surface.psi);
    for (Eigen::Index i = 0; i < 6; ++i) num(r.underwater_subtask.u[i]);
    for (Eigen::Index i = 0; i < 6; ++i) num(r.underwater_tether.u[i]);
    for (Eigen::Index i = 0; i < 3; ++i) num(r.surface_subtask.u[i]);
    for (Eigen::Index i = 0; i < 3; ++i) num(r.surface_tether.u[i]);
    cells.push_back(r.observation_us.detected ? "1" : "0");
    cells.push_back(r.observation_su.detected ? "1" : "0");
    cells.push_back(region_text(r.region_us));
    cells.push_back(region_text(r.region_su));
    cells.push_back(optional_text(r.xi_us));
    cells.push_back(optional_text(r.xi_su));
    num(projected_distance(r));
    std::string flags;
    for (std::size_t i = 0; i < r.events.size(); ++i) flags += (i ? ";" : "") + r.events[i];
    cells.push_back(flags);
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  }
}

std::string csv_string(const TrajectoryLog& log) {
  std::ostringstream out;
  write_csv(log, out);
  return out.str();
}

const std::vector<double>& CsvTable::column(const std::string& name) const {
  const auto it = numeric.find(name);
  if (it == numeric.end()) throw CsvParse("no numeric column '" + name + "'");
  return it->second;
}

CsvTable read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw CsvParse("CSV is empty, expected a header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line, ',');
  const auto& cols = csv_columns();
  if (header != cols) throw CsvParse("CSV header does not match the trajectory schema");

  CsvTable t;
  for (const auto& c : cols) {
    if (std::find(kTextColumns.begin(), kTextColumns.end(), c) == kTextColumns.end()) t.numeric[c];
  }
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != cols.size()) {
      throw CsvParse("row " + std::to_string(row) + " has " + std::to_string(cells.size()) + " cells, expected " +
                     std::to_string(cols.size()));
    }
    for (std::size_t i = 0; i < cols.size(); ++i) {
      const auto& name = cols[i];
      const auto& cell = cells[i];
      if (name == "regionUS") {
        t.region_us.push_back(cell);
      } else if (name == "regionSU") {
        t.region_su.push_back(cell);
      } else if (name == "eventFlags") {
        t.events.push_back(cell.empty() ? std::vector<std::string>{} : split(cell, ';'));
      } else if (cell.empty() || cell == "nan") {
        t.numeric[name].push_back(kNaN);
      } else {
        double v = 0.0;
        const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
          throw CsvParse("row " + std::to_string(row) + ": bad number '" + cell + "' in column " + name);
        }
        t.numeric[name].push_back(v);
      }
    }
  }
  return t;
}

Json summary_to_json(const RunSummary& s) {
  return {{"max_projected_distance", s.max_projected_distance},
          {"time_of_los_loss", optional_json(s.time_of_los_loss)},
          {"perturbation_end", optional_json(s.perturbation_end)},
          {"recovery_time_after_perturbation", optional_json(s.recovery_time_after_perturbation)},
          {"mission_success", s.mission_success},
          {"final_tether_state", optional_json(s.final_tether_state)},
          {"settling_time", optional_json(s.settling_time)}};
}

std::string_view to_string(PlotKind k) { return kPlotKinds[static_cast<int>(k)]; }

PlotKind parse_plot_kind(std::string_view s) {
  for (int i = 0; i < 4; ++i) {
    if (kPlotKinds[i] == s) return static_cast<PlotKind>(i);
  }
  throw ConfigInvalid("unknown plot kind '" + std::string(s) + "'");
}

std::vector<std::pair<double, double>> event_windows(const CsvTable& t, std::string_view name) {
  std::vector<std::pair<double, double>> out;
  const std::string start = std::string(name) + "_start", end = std::string(name) + "_end";
  const auto& time = t.column("t");
  std::optional<double> open;
  for (std::size_t i = 0; i < t.rows(); ++i) {
    for (const auto& e : t.events[i]) {
      if (e == start && !open) open = time[i];
      if (e == end && open) {
        out.emplace_back(*open, time[i]);
        open.reset();
      }
    }
  }
  if (open) out.emplace_back(*open, time.back());
  return out;
}

std::string plot_svg(const CsvTable& t, PlotKind kind) {
  switch (kind) {
    case PlotKind::TrajectoryXy: {
      Panel p{"Projected trajectories", "x [m]", "y [m]", {}, {}};
      p.series.push_back(series(t, "xU", "yU", "underwater", kPalette[0]));
      p.series.push_back(series(t, "xS", "yS", "surface", kPalette[1], true));
      return render({p});
    }
    case PlotKind::DistanceVsTime: {
      Panel p{"Projected distance", "t [s]", "distance [m]", {}, standard_bands(t)};
      p.series.push_back(series(t, "t", "projDist", "distance", kPalette[0]));
      return render({p});
    }
    case PlotKind::VelocityVsTime: {
      Panel u{"Underwater commanded velocity", "t [s]", "m/s, rad/s", {}, standard_bands(t)};
      const char* axes6[] = {"x", "y", "z", "phi", "theta", "psi"};
      for (int i = 0; i < 6; ++i) {
        u.series.push_back(command_series(t, "U", axes6[i], i < 3 ? 0.1 : 0.2, kPalette[i]));
      }
      Panel s{"Surface commanded velocity", "t [s]", "m/s, rad/s", {}, standard_bands(t)};
      const char* axes3[] = {"x", "y", "psi"};
      for (int i = 0; i < 3; ++i) {
        s.series.push_back(command_series(t, "S", axes3[i], i < 2 ? 0.1 : 0.2, kPalette[i]));
      }
      return render({u, s});
    }
    case PlotKind::TetherStateVsTime: {
      Panel p{"Tether state", "t [s]", "xi [px]", {}, standard_bands(t)};
      p.series.push_back(series(t, "t", "xiUS", "U camera", kPalette[0]));
      p.series.push_back(series(t, "t", "xiSU", "S camera", kPalette[1], true));
      return render({p});
    }
  }
  return render({});
}

std::string comparison_svg(const CsvTable& vet, const CsvTable& baseline) {
  Panel p{"Projected distance: VET vs baseline", "t [s]", "distance [m]", {}, {}};
  for (const auto& [a, b] : event_windows(vet, "perturbation")) p.bands.push_back({a, b, "#f2c200", "perturbation (VET)"});
  for (const auto& [a, b] : event_windows(baseline, "perturbation")) {
    p.bands.push_back({a, b, "#f28e2b", "perturbation (baseline)"});
  }
  for (const auto& [a, b] : event_windows(vet, "dropoutUS")) p.bands.push_back({a, b, "#9aa7b8", "dropout U camera"});
  p.series.push_back(series(vet, "t", "projDist", "VET", kPalette[0]));
  p.series.push_back(series(baseline, "t", "projDist", "baseline", kPalette[1], true));
  return render({p});
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f << content;
    f.flush();
    if (!f) {
      f.close();
      fs::remove(tmp);
      throw std::runtime_error("failed writing " + tmp.string());
    }
  }
  fs::rename(tmp, path);
}

}  // namespace vetsim
