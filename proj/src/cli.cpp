#include "vetsim/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include "vetsim/config_io.hpp"
#include "vetsim/errors.hpp"
#include "vetsim/metrics.hpp"
#include "vetsim/output.hpp"

namespace vetsim {
namespace {

namespace fs = std::filesystem;

constexpr int kExitConfig = 2;
constexpr int kExitSim = 3;

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw ConfigParse("cannot read " + p.string());
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

Json delta_json(const RunSummary& vet, const RunSummary& base) {
  auto diff = [](const std::optional<double>& a, const std::optional<double>& b) {
    return a && b ? Json(*a - *b) : Json(nullptr);
  };
  return {{"max_projected_distance", vet.max_projected_distance - base.max_projected_distance},
          {"recovery_time_after_perturbation",
           diff(vet.recovery_time_after_perturbation, base.recovery_time_after_perturbation)},
          {"settling_time", diff(vet.settling_time, base.settling_time)},
          {"mission_success", {{"vet", vet.mission_success}, {"baseline", base.mission_success}}}};
}

}  // namespace

ScenarioConfig resolve_config(const ConfigSources& sources) {
  Json partial = Json::object();
  if (sources.config_path) partial = parse_json_text(read_file(*sources.config_path));
  if (!partial.is_object()) throw ConfigInvalid("configuration must be a JSON object");
  if (sources.preset) partial["preset"] = *sources.preset;
  Json doc = resolve_document(partial);
  for (const auto& o : sources.overrides) apply_override(doc, o);
  if (sources.mode) doc["mode"] = *sources.mode;
  if (sources.seed) doc["seed"] = *sources.seed;
  ScenarioConfig c = config_from_json(doc);
  c.validate();
  return c;
}

OutputBundle write_run_outputs(const ScenarioConfig& config, const TrajectoryLog& log, const fs::path& out_dir) {
  OutputBundle b;
  b.trajectory_csv = out_dir / "trajectory.csv";
  b.summary_json = out_dir / "summary.json";
  b.config_echo = out_dir / "config.json";

  const std::string csv = csv_string(log);
  Json summary = Json::object();
  summary["name"] = config.name;
  summary["mode"] = std::string(to_string(config.mode));
  summary["seed"] = config.seed;
  summary["formation_threshold"] = config.formation_threshold;
  summary["records"] = log.records.size();
  summary["summary"] = summary_to_json(summarize(log, SummaryThresholds::for_config(config)));

  std::istringstream in(csv);
  const CsvTable table = read_csv(in);

  write_atomic(b.trajectory_csv, csv);
  write_atomic(b.summary_json, summary.dump(2) + "\n");
  write_atomic(b.config_echo, config_to_json(config).dump(2) + "\n");
  for (const auto kind : kPlotKinds) {
    const fs::path p = out_dir / (std::string(kind) + ".svg");
    write_atomic(p, plot_svg(table, parse_plot_kind(kind)));
    b.plots.push_back(p);
  }
  return b;
}

OutputBundle cmd_run(const ConfigSources& sources, const fs::path& out_dir) {
  const ScenarioConfig config = resolve_config(sources);
  const TrajectoryLog log = run(config);
  return write_run_outputs(config, log, out_dir);
}

fs::path cmd_compare(const ConfigSources& sources, const fs::path& out_dir) {
  ConfigSources vet_sources = sources;
  vet_sources.mode = "vet";
  ConfigSources base_sources = sources;
  base_sources.mode = "baseline";
  const ScenarioConfig vet_cfg = resolve_config(vet_sources);
  const ScenarioConfig base_cfg = resolve_config(base_sources);

  const TrajectoryLog vet_log = run(vet_cfg);
  const TrajectoryLog base_log = run(base_cfg);
  const OutputBundle vet_out = write_run_outputs(vet_cfg, vet_log, out_dir / "vet");
  const OutputBundle base_out = write_run_outputs(base_cfg, base_log, out_dir / "baseline");

  std::istringstream vin(csv_string(vet_log)), bin(csv_string(base_log));
  write_atomic(out_dir / "distance_comparison.svg", comparison_svg(read_csv(vin), read_csv(bin)));

  const RunSummary vs = summarize(vet_log, SummaryThresholds::for_config(vet_cfg));
  const RunSummary bs = summarize(base_log, SummaryThresholds::for_config(base_cfg));
  Json delta = Json::object();
  delta["name"] = vet_cfg.name;
  delta["seed"] = vet_cfg.seed;
  delta["formation_threshold"] = vet_cfg.formation_threshold;
  delta["vet"] = summary_to_json(vs);
  delta["baseline"] = summary_to_json(bs);
  delta["delta_vet_minus_baseline"] = delta_json(vs, bs);
  const fs::path path = out_dir / "compare_summary.json";
  write_atomic(path, delta.dump(2) + "\n");
  return path;
}

fs::path cmd_plot(const fs::path& csv, const std::string& kind, const std::optional<fs::path>& out) {
  const PlotKind k = parse_plot_kind(kind);
  std::ifstream in(csv, std::ios::binary);
  if (!in) throw CsvParse("cannot read " + csv.string());
  const CsvTable table = read_csv(in);
  const fs::path target = out ? *out : csv.parent_path() / (kind + ".svg");
  write_atomic(target, plot_svg(table, k));
  return target;
}

fs::path default_out_dir(const std::optional<std::string>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("VET_SIM_OUT"); env && *env) return env;
  return "vet_sim_out";
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Virtual elastic tether simulator for an underwater/surface robot pair"};
  app.require_subcommand(1);

  ConfigSources sources;
  std::string preset_name, config_file, mode;
  std::uint64_t seed = 0;
  std::string out_flag;

  auto add_config_flags = [&](CLI::App* cmd) {
    cmd->add_option("--preset", preset_name, "Embedded preset name");
    cmd->add_option("--config", config_file, "JSON configuration file");
    cmd->add_option("--set", sources.overrides, "Override key.path=value (repeatable)");
    cmd->add_option("--seed", seed, "Random seed");
    cmd->add_option("--out", out_flag, "Output directory");
  };

  CLI::App* run_cmd = app.add_subcommand("run", "Run one scenario and write its outputs");
  add_config_flags(run_cmd);
  run_cmd->add_option("--mode", mode, "vet or baseline");

  CLI::App* compare_cmd = app.add_subcommand("compare", "Run VET and baseline side by side");
  add_config_flags(compare_cmd);

  std::string csv_path, kind, plot_out;
  CLI::App* plot_cmd = app.add_subcommand("plot", "Render an SVG plot from a trajectory CSV");
  plot_cmd->add_option("--csv", csv_path, "Trajectory CSV")->required();
  plot_cmd->add_option("--kind", kind, "trajectory_xy|distance_vs_time|velocity_vs_time|tether_state_vs_time")
      ->required();
  plot_cmd->add_option("--out", plot_out, "Output SVG path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  auto finish_sources = [&](CLI::App* cmd) {
    if (cmd->count("--preset")) sources.preset = preset_name;
    if (cmd->count("--config")) sources.config_path = config_file;
    if (cmd->count("--seed")) sources.seed = seed;
    if (cmd->get_option_no_throw("--mode") && cmd->count("--mode")) sources.mode = mode;
  };

  try {
    if (run_cmd->parsed()) {
      finish_sources(run_cmd);
      const fs::path dir = default_out_dir(run_cmd->count("--out") ? std::optional(out_flag) : std::nullopt);
      const OutputBundle b = cmd_run(sources, dir);
      out << b.summary_json.string() << "\n";
    } else if (compare_cmd->parsed()) {
      finish_sources(compare_cmd);
      const fs::path dir =
          default_out_dir(compare_cmd->count("--out") ? std::optional(out_flag) : std::nullopt);
      out << cmd_compare(sources, dir).string() << "\n";
    } else if (plot_cmd->parsed()) {
      const auto target = plot_cmd->count("--out") ? std::optional<fs::path>(plot_out) : std::nullopt;
      out << cmd_plot(csv_path, kind, target).string() << "\n";
    }
  } catch (const ConfigParse& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ConfigInvalid& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const UnknownPreset& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidBounds& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const CsvParse& e) {
    err << "input error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "simulation error: " << e.what() << "\n";
    return kExitSim;
  }
  return 0;
}

}  // namespace vetsim
