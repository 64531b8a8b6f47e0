#pragma once

// File formats: trajectory CSV (write and read back), summary JSON and the
// built-in SVG plots.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vetsim/config_io.hpp"
#include "vetsim/metrics.hpp"
#include "vetsim/scenario.hpp"

namespace vetsim {

/// Fixed column order of the trajectory CSV.
const std::vector<std::string>& csv_columns();

void write_csv(const TrajectoryLog& log, std::ostream& out);
std::string csv_string(const TrajectoryLog& log);

/// A trajectory CSV read back: numeric columns (empty cells become NaN),
/// the two region columns as text and the event flags split per row.
struct CsvTable {
  std::map<std::string, std::vector<double>> numeric;
  std::vector<std::string> region_us;
  std::vector<std::string> region_su;
  std::vector<std::vector<std::string>> events;

  std::size_t rows() const { return events.size(); }
  const std::vector<double>& column(const std::string& name) const;
};

/// Throws CsvParse on a missing or reordered header, wrong cell counts or
/// unparseable numbers.
CsvTable read_csv(std::istream& in);

/// Shortest text that parses back to the same double.
std::string format_double(double v);

Json summary_to_json(const RunSummary& s);

enum class PlotKind { TrajectoryXy, DistanceVsTime, VelocityVsTime, TetherStateVsTime };

inline constexpr std::string_view kPlotKinds[] = {"trajectory_xy", "distance_vs_time",
                                                  "velocity_vs_time", "tether_state_vs_time"};

std::string_view to_string(PlotKind k);
/// Throws ConfigInvalid.
PlotKind parse_plot_kind(std::string_view s);

/// Time intervals between matching "<name>_start"/"<name>_end" event flags.
/// An interval still open at the end of the table closes at the last row.
std::vector<std::pair<double, double>> event_windows(const CsvTable& t, std::string_view name);

std::string plot_svg(const CsvTable& t, PlotKind kind);

/// Distance-vs-time for two runs of the same preset on shared axes.
std::string comparison_svg(const CsvTable& vet, const CsvTable& baseline);

/// Writes through a temporary file in the same directory and renames it
/// into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace vetsim
