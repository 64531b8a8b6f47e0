#pragma once

// Command layer behind the vet-sim executable: run, compare and plot.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vetsim/scenario.hpp"

namespace vetsim {

struct OutputBundle {
  std::filesystem::path trajectory_csv;
  std::filesystem::path summary_json;
  std::vector<std::filesystem::path> plots;
  std::filesystem::path config_echo;
};

struct ConfigSources {
  std::optional<std::string> preset;
  std::optional<std::filesystem::path> config_path;
  std::vector<std::string> overrides;  // "a.b=value"
  std::optional<std::string> mode;
  std::optional<std::uint64_t> seed;
};

/// preset -> config file -> overrides -> mode/seed flags, then strict parse
/// and validation. Throws ConfigParse / ConfigInvalid / UnknownPreset.
ScenarioConfig resolve_config(const ConfigSources& sources);

/// Writes trajectory.csv, summary.json, config.json and the four plots.
OutputBundle write_run_outputs(const ScenarioConfig& config, const TrajectoryLog& log,
                               const std::filesystem::path& out_dir);

OutputBundle cmd_run(const ConfigSources& sources, const std::filesystem::path& out_dir);

/// Runs the configuration in both controller modes with the same seed into
/// out_dir/vet and out_dir/baseline, plus a distance comparison plot and a
/// delta summary. Returns the path of the delta summary.
std::filesystem::path cmd_compare(const ConfigSources& sources, const std::filesystem::path& out_dir);

std::filesystem::path cmd_plot(const std::filesystem::path& csv, const std::string& kind,
                               const std::optional<std::filesystem::path>& out);

/// Output directory from the flag, else $VET_SIM_OUT, else ./vet_sim_out.
std::filesystem::path default_out_dir(const std::optional<std::string>& flag);

/// Entry point. Exit codes: 0 success, 2 configuration or input error,
/// 3 simulation or output failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace vetsim
