#pragma once

// World assembly and the fixed-step sense -> control -> actuate loop for the
// underwater/surface pair, plus the planners and the embedded presets.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "vetsim/control.hpp"
#include "vetsim/frames.hpp"
#include "vetsim/perception.hpp"
#include "vetsim/vehicle.hpp"

namespace vetsim {

/// Axis-aligned tank, water surface at z = 0 and floor at z = -depth.
struct Tank {
  double x_min = 0.0;
  double x_max = 4.88;
  double y_min = 0.0;
  double y_max = 3.66;
  double depth = 2.66;

  bool contains(double x, double y) const;
  bool contains(const Pose6& p) const;
  void validate() const;
  bool operator==(const Tank&) const = default;
};

struct SetpointPlanner {
  std::vector<SurfaceTarget> waypoints;
  double capture_radius = 0.15;
  double speed = 0.1;
  bool operator==(const SetpointPlanner&) const = default;
};

struct LawnmowerPlanner {
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;
  double lane_spacing = 0.5;
  double speed = 0.1;
  double capture_radius = 0.15;
  bool operator==(const LawnmowerPlanner&) const = default;
};

using PlannerSpec = std::variant<SetpointPlanner, LawnmowerPlanner>;

struct ScenarioConfig {
  std::string name = "custom";
  Tank tank;
  double dt = 0.02;
  double duration = 60.0;
  Pose6 underwater_initial;
  Pose3 surface_initial;
  VehicleParams underwater_params = underwater_defaults();
  VehicleParams surface_params = surface_defaults();
  CameraModel underwater_camera;
  CameraModel surface_camera;
  TagModel underwater_tag;
  TagModel surface_tag;
  PdGains underwater_pd;
  PdGains surface_pd;
  UnderwaterTarget underwater_target;
  VetGains vet;
  ControllerMode mode = ControllerMode::Vet;
  PlannerSpec planner;
  std::vector<Disturbance> perturbations;  // applied to the underwater vehicle
  DropoutModel underwater_dropout;         // U's camera looking at S's tag
  DropoutModel surface_dropout;            // S's camera looking at U's tag
  std::uint64_t seed = 0;
  double formation_threshold = 0.6;  // m, failure bound on the projected distance
  bool surface_mirrored_jacobian = false;

  /// Throws ConfigInvalid.
  void validate() const;
  bool operator==(const ScenarioConfig&) const = default;
};

/// Boustrophedon lanes along x, stacked in y, alternating direction.
/// Throws InvalidBounds.
std::vector<SurfaceTarget> lawnmower_path(const LawnmowerPlanner& plan);

/// Returns the active waypoint and advances `index` once the robot is within
/// capture_radius (xy) of it. The last waypoint is held indefinitely.
SurfaceTarget planner_step(const Pose3& current, const std::vector<SurfaceTarget>& waypoints,
                           double capture_radius, std::size_t& index);

std::vector<SurfaceTarget> planner_waypoints(const PlannerSpec& plan);
double planner_capture_radius(const PlannerSpec& plan);
double planner_speed(const PlannerSpec& plan);

struct TickRecord {
  double t = 0.0;
  Pose6 underwater;
  Pose3 surface;
  Vector underwater_velocity;
  Vector surface_velocity;
  ControlInput underwater_subtask;
  ControlInput underwater_tether;
  ControlInput underwater_command;
  ControlInput surface_subtask;
  ControlInput surface_tether;
  ControlInput surface_command;
  TagObservation observation_us;  // U's camera, S's tag
  TagObservation observation_su;  // S's camera, U's tag
  std::optional<RegionLabel> region_us;
  std::optional<RegionLabel> region_su;
  std::optional<double> xi_us;
  std::optional<double> xi_su;
  std::size_t waypoint_index = 0;
  bool final_waypoint_reached = false;
  bool perturbation_active = false;
  std::vector<std::string> events;
};

struct TrajectoryLog {
  std::vector<TickRecord> records;
  double dt = 0.0;
  std::size_t waypoint_count = 0;
  double u_max_linear = 0.1;
  double u_max_angular = 0.2;
  std::vector<std::pair<double, double>> perturbation_windows;  // as realised
};

/// Runs one scenario. Deterministic for a fixed config. Records are produced
/// at t = 0, dt, ..., duration, each holding the state at t and the commands
/// computed from it.
TrajectoryLog run(const ScenarioConfig& config);

inline constexpr std::string_view kPresetNames[] = {
    "nominal", "perturbation_sim", "navigation_sim", "perturbation_real", "navigation_real"};

/// Throws UnknownPreset.
ScenarioConfig preset(std::string_view name);

RigidTransform upward_camera_mount();
RigidTransform downward_camera_mount();

}  // namespace vetsim
