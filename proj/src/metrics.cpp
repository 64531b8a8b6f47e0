#include "vetsim/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "vetsim/errors.hpp"

namespace vetsim {
namespace {

// Linear and angular parts of the command are compared as vectors.
bool within(const ControlInput& u, double lin, double ang, double fraction) {
  const bool six = u.u.size() == 6;
  const double l = six ? u.u.head<3>().norm() : u.u.head<2>().norm();
  const double a = six ? u.u.tail<3>().norm() : std::abs(u.u[2]);
  return l < fraction * lin && a < fraction * ang;
}

}  // namespace

double projected_distance(const Pose6& u, const Pose3& s) { return std::hypot(u.x - s.x, u.y - s.y); }

double projected_distance(const TickRecord& r) { return projected_distance(r.underwater, r.surface); }

std::optional<double> recovery_time(const TrajectoryLog& log, double threshold,
                                    double perturbation_end, double hold) {
  bool in_run = false;
  double run_start = 0.0;
  for (const auto& r : log.records) {
    if (r.t < perturbation_end) continue;
    if (projected_distance(r) < threshold) {
      if (!in_run) run_start = r.t;
      in_run = true;
      // Small epsilon so a hold that is an exact multiple of dt is not missed.
      if (r.t - run_start >= hold - 1e-9) return run_start - perturbation_end;
    } else {
      in_run = false;
    }
  }
  return std::nullopt;
}

bool mission_success(const TrajectoryLog& log, double threshold, double transient) {
  if (log.waypoint_count == 0) return true;
  if (log.records.empty() || !log.records.back().final_waypoint_reached) return false;
  return std::all_of(log.records.begin(), log.records.end(), [&](const TickRecord& r) {
    return r.t < transient || projected_distance(r) < threshold;
  });
}

std::optional<double> time_of_los_loss(const TrajectoryLog& log) {
  for (const auto& r : log.records) {
    if (!r.observation_us.visible || !r.observation_su.visible) return r.t;
  }
  return std::nullopt;
}

std::optional<double> settling_time(const TrajectoryLog& log, double fraction) {
  if (log.records.empty()) return std::nullopt;
  const double lin = log.u_max_linear, ang = log.u_max_angular;
  auto settled = [&](const TickRecord& r) {
    return within(r.underwater_command, lin, ang, fraction) &&
           within(r.surface_command, lin, ang, fraction);
  };
  const auto last_bad = std::find_if_not(log.records.rbegin(), log.records.rend(), settled);
  if (last_bad == log.records.rend()) return log.records.front().t;
  if (last_bad == log.records.rbegin()) return std::nullopt;
  return std::prev(last_bad)->t;
}

Pose6 pose_from_observation(const RigidTransform& world_from_body_s,
                            const RigidTransform& body_from_camera_s,
                            const RigidTransform& camera_from_tag_su,
                            const RigidTransform& body_from_tag_u) {
  const RigidTransform world_from_tag =
      compose(compose(world_from_body_s, body_from_camera_s), camera_from_tag_su);
  return transform_to_pose(compose(world_from_tag, invert(body_from_tag_u)));
}

SummaryThresholds SummaryThresholds::for_config(const ScenarioConfig& c) {
  SummaryThresholds t;
  t.formation = c.formation_threshold;
  return t;
}

RunSummary summarize(const TrajectoryLog& log, const SummaryThresholds& thresholds) {
  if (log.records.size() < 2) throw EmptyLog("summary needs at least two records");
  RunSummary s;
  for (const auto& r : log.records) {
    s.max_projected_distance = std::max(s.max_projected_distance, projected_distance(r));
  }
  s.time_of_los_loss = time_of_los_loss(log);
  if (!log.perturbation_windows.empty()) {
    s.perturbation_end = log.perturbation_windows.front().second;
    s.recovery_time_after_perturbation = recovery_time(log, thresholds.formation,
                                                       *s.perturbation_end, thresholds.recovery_hold);
  }
  s.mission_success = mission_success(log, thresholds.formation, thresholds.transient);
  s.final_tether_state = log.records.back().xi_us;
  s.settling_time = settling_time(log, thresholds.settle_fraction);
  return s;
}

}  // namespace vetsim
