#pragma once

// Post-processing over a TrajectoryLog: formation distance, line-of-sight
// loss, perturbation recovery, mission success and command settling.

#include <optional>

#include "vetsim/frames.hpp"
#include "vetsim/scenario.hpp"

namespace vetsim {

/// Planar distance between the two robots; z is ignored.
double projected_distance(const Pose6& u, const Pose3& s);
double projected_distance(const TickRecord& r);

/// First t >= perturbation_end from which the distance stays below
/// threshold for `hold` seconds, measured from perturbation_end.
std::optional<double> recovery_time(const TrajectoryLog& log, double threshold,
                                    double perturbation_end, double hold = 2.0);

/// Final waypoint reached and distance below threshold for every record
/// after the transient. A mission without waypoints succeeds trivially.
bool mission_success(const TrajectoryLog& log, double threshold, double transient = 10.0);

/// First time either camera loses geometric sight of the partner's tag.
std::optional<double> time_of_los_loss(const TrajectoryLog& log);

/// First t after which the linear and angular command norms of both robots
/// stay below `fraction` of their bounds. Empty if the last record still exceeds it.
std::optional<double> settling_time(const TrajectoryLog& log, double fraction = 0.05);

/// Underwater pose recovered from the surface robot's localisation, its
/// camera mount and a camera -> tag estimate; the tag mount is inverted to
/// land on the underwater body frame.
Pose6 pose_from_observation(const RigidTransform& world_from_body_s,
                            const RigidTransform& body_from_camera_s,
                            const RigidTransform& camera_from_tag_su,
                            const RigidTransform& body_from_tag_u = RigidTransform::identity());

struct SummaryThresholds {
  double formation = 0.6;      // m
  double transient = 10.0;     // s
  double recovery_hold = 2.0;  // s
  double settle_fraction = 0.05;

  static SummaryThresholds for_config(const ScenarioConfig& c);
};

struct RunSummary {
  double max_projected_distance = 0.0;
  std::optional<double> time_of_los_loss;
  std::optional<double> perturbation_end;
  std::optional<double> recovery_time_after_perturbation;
  bool mission_success = false;
  std::optional<double> final_tether_state;  // U's xi at the last record, px
  std::optional<double> settling_time;

  bool operator==(const RunSummary&) const = default;
};

/// Throws EmptyLog for fewer than two records.
RunSummary summarize(const TrajectoryLog& log, const SummaryThresholds& thresholds);

}  // namespace vetsim
