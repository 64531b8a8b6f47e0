#include "vetsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vetsim/errors.hpp"

namespace vetsim {
namespace {

constexpr double kLaneEps = 1e-9;
constexpr double kMountOffset = 0.05;  // m, camera/tag height above (U) or below (S) the hull center

// Stream constants for the two dropout generators.
constexpr std::uint64_t kStreamUs = 0x5553'0000'0000'0001ULL;
constexpr std::uint64_t kStreamSu = 0x5355'0000'0000'0002ULL;

std::string label(const std::optional<RegionLabel>& r) {
  return r ? std::string(to_string(*r)) : std::string("lost");
}

struct PerturbationState {
  Disturbance d;
  std::optional<std::pair<double, double>> window;
  bool active = false;
};

bool crossed(double y0, double y, double trigger) {
  if (y == trigger) return true;
  return (y0 < trigger) != (y < trigger);
}

// Soft wall: clamp the position and cancel the world-frame velocity normal to
// the wall that was hit. Returns true when anything was clamped.
bool clamp_axis(double& pos, double lo, double hi, int axis, Vec3& world_velocity) {
  if (pos < lo) {
    pos = lo;
    world_velocity[axis] = std::max(world_velocity[axis], 0.0);
    return true;
  }
  if (pos > hi) {
    pos = hi;
    world_velocity[axis] = std::min(world_velocity[axis], 0.0);
    return true;
  }
  return false;
}

bool clamp_underwater(UnderwaterState& s, const Tank& tank) {
  const Mat3 r = rotation_body_to_world(s.pose.attitude);
  Vec3 v = r * s.nu.head<3>();
  bool hit = clamp_axis(s.pose.x, tank.x_min, tank.x_max, 0, v);
  hit |= clamp_axis(s.pose.y, tank.y_min, tank.y_max, 1, v);
  hit |= clamp_axis(s.pose.z, -tank.depth, 0.0, 2, v);
  if (hit) s.nu.head<3>() = r.transpose() * v;
  return hit;
}

bool clamp_surface(SurfaceState& s, const Tank& tank) {
  const double c = std::cos(s.pose.psi), sn = std::sin(s.pose.psi);
  Vec3 v(c * s.nu[0] - sn * s.nu[1], sn * s.nu[0] + c * s.nu[1], 0.0);
  bool hit = clamp_axis(s.pose.x, tank.x_min, tank.x_max, 0, v);
  hit |= clamp_axis(s.pose.y, tank.y_min, tank.y_max, 1, v);
  if (hit) {
    s.nu[0] = c * v.x() + sn * v.y();
    s.nu[1] = -sn * v.x() + c * v.y();
  }
  return hit;
}

std::optional<double> xi_of(const TagObservation& obs, const CameraModel& cam) {
  if (!obs.detected) return std::nullopt;
  return tether_state(obs, cam).xi;
}

std::optional<RegionLabel> region_of(const TagObservation& obs, const CameraModel& cam) {
  if (!obs.detected) return std::nullopt;
  const TagGeometry g = tag_geometry(obs);
  return classify_region(g.center, g.side, g.diagonal, cam);
}

void check_waypoints(const std::vector<SurfaceTarget>& wps, const Tank& tank) {
  for (const auto& w : wps) {
    if (!tank.contains(w.x, w.y)) throw ConfigInvalid("waypoint outside the tank");
  }
}

}  // namespace

bool Tank::contains(double x, double y) const {
  return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
}

bool Tank::contains(const Pose6& p) const {
  return contains(p.x, p.y) && p.z <= 0.0 && p.z >= -depth;
}

void Tank::validate() const {
  if (!(x_max > x_min) || !(y_max > y_min) || !(depth > 0.0)) {
    throw ConfigInvalid("tank dimensions must be positive");
  }
}

void ScenarioConfig::validate() const {
  tank.validate();
  if (!(dt > 0.0 && dt <= kMaxStep)) throw ConfigInvalid("dt must lie in (0, 0.1]");
  if (!(duration >= 0.0) || !std::isfinite(duration)) throw ConfigInvalid("duration must be >= 0");
  if (!tank.contains(underwater_initial)) throw ConfigInvalid("underwater start outside the tank");
  if (!tank.contains(surface_initial.x, surface_initial.y)) {
    throw ConfigInvalid("surface start outside the tank");
  }
  underwater_params.validate();
  surface_params.validate();
  if (underwater_params.dof() != 6) throw ConfigInvalid("underwater vehicle must have 6 DoF");
  if (surface_params.dof() != 3) throw ConfigInvalid("surface vehicle must have 3 DoF");
  underwater_camera.validate();
  surface_camera.validate();
  underwater_tag.validate();
  surface_tag.validate();
  underwater_pd.validate(RobotKind::Underwater);
  surface_pd.validate(RobotKind::Surface);
  vet.validate();
  underwater_dropout.validate();
  surface_dropout.validate();
  if (!(formation_threshold > 0.0)) throw ConfigInvalid("formation threshold must be positive");
  for (const auto& d : perturbations) {
    if (!(d.t_end >= d.t_start)) throw ConfigInvalid("perturbation ends before it starts");
    if (!d.force.allFinite() || !d.torque.allFinite()) {
      throw ConfigInvalid("perturbation must be finite");
    }
  }
  if (const auto* sp = std::get_if<SetpointPlanner>(&planner)) {
    if (!(sp->capture_radius > 0.0) || !(sp->speed > 0.0)) {
      throw ConfigInvalid("planner capture radius and speed must be positive");
    }
    check_waypoints(sp->waypoints, tank);
  } else {
    const auto& lm = std::get<LawnmowerPlanner>(planner);
    if (!(lm.capture_radius > 0.0) || !(lm.speed > 0.0)) {
      throw ConfigInvalid("planner capture radius and speed must be positive");
    }
    try {
      check_waypoints(lawnmower_path(lm), tank);
    } catch (const InvalidBounds& e) {
      throw ConfigInvalid(e.what());
    }
  }
}

std::vector<SurfaceTarget> lawnmower_path(const LawnmowerPlanner& plan) {
  if (!(plan.lane_spacing > 0.0)) throw InvalidBounds("lane spacing must be positive");
  if (!(plan.x_max > plan.x_min) || !(plan.y_max >= plan.y_min) || !std::isfinite(plan.x_max) ||
      !std::isfinite(plan.y_max) || !std::isfinite(plan.x_min) || !std::isfinite(plan.y_min)) {
    throw InvalidBounds("lawnmower bounds are empty or not finite");
  }
  const auto lanes =
      static_cast<std::size_t>(std::floor((plan.y_max - plan.y_min) / plan.lane_spacing + kLaneEps)) + 1;
  std::vector<SurfaceTarget> out;
  out.reserve(2 * lanes);
  for (std::size_t i = 0; i < lanes; ++i) {
    const double y = plan.y_min + static_cast<double>(i) * plan.lane_spacing;
    if (i % 2 == 0) {
      out.push_back({plan.x_min, y, 0.0});
      out.push_back({plan.x_max, y, 0.0});
    } else {
      out.push_back({plan.x_max, y, kPi});
      out.push_back({plan.x_min, y, kPi});
    }
  }
  return out;
}

SurfaceTarget planner_step(const Pose3& current, const std::vector<SurfaceTarget>& waypoints,
                           double capture_radius, std::size_t& index) {
  if (waypoints.empty()) return {current.x, current.y, current.psi};
  if (index >= waypoints.size()) index = waypoints.size() - 1;
  const auto& w = waypoints[index];
  if (index + 1 < waypoints.size() &&
      std::hypot(w.x - current.x, w.y - current.y) < capture_radius) {
    ++index;
  }
  return waypoints[index];
}

std::vector<SurfaceTarget> planner_waypoints(const PlannerSpec& plan) {
  if (const auto* sp = std::get_if<SetpointPlanner>(&plan)) return sp->waypoints;
  return lawnmower_path(std::get<LawnmowerPlanner>(plan));
}

double planner_capture_radius(const PlannerSpec& plan) {
  return std::visit([](const auto& p) { return p.capture_radius; }, plan);
}

double planner_speed(const PlannerSpec& plan) {
  return std::visit([](const auto& p) { return p.speed; }, plan);
}

TrajectoryLog run(const ScenarioConfig& config) {
  config.validate();
  const auto waypoints = planner_waypoints(config.planner);
  const double capture = planner_capture_radius(config.planner);

  UnderwaterController u_ctrl(config.mode, config.underwater_pd, config.underwater_target,
                              config.vet, config.underwater_camera, config.underwater_params);
  SurfaceController s_ctrl(config.mode, config.surface_pd, config.vet, config.surface_camera,
                           config.surface_params, planner_speed(config.planner));

  UnderwaterState u{config.underwater_initial, Vector::Zero(6)};
  SurfaceState s{config.surface_initial, Vector::Zero(3)};
  DropoutRng rng_us(config.seed ^ kStreamUs);
  DropoutRng rng_su(config.seed ^ kStreamSu);

  std::vector<PerturbationState> perturbations;
  for (const auto& d : config.perturbations) {
    PerturbationState p{d, std::nullopt, false};
    if (!d.trigger_y) p.window = std::make_pair(d.t_start, d.t_end);
    perturbations.push_back(p);
  }

  TrajectoryLog log;
  log.dt = config.dt;
  log.waypoint_count = waypoints.size();
  log.u_max_linear = config.vet.u_max_x;
  log.u_max_angular = config.underwater_params.velocity_bound_angular;

  const auto steps = static_cast<long long>(std::llround(config.duration / config.dt));
  log.records.reserve(static_cast<std::size_t>(steps + 1));

  std::size_t wp_index = 0;
  bool reached = waypoints.empty();
  std::optional<RegionLabel> prev_region_us, prev_region_su;
  bool prev_drop_us = false, prev_drop_su = false, prev_perturbed = false;
  std::vector<std::string> pending;
  const double y0 = config.underwater_initial.y;

  for (long long k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * config.dt;
    TickRecord rec;
    rec.t = t;
    rec.events = std::move(pending);
    pending.clear();

    const RigidTransform world_u = pose_to_transform(u.pose);
    const RigidTransform world_s = pose_to_transform(s.pose);
    TagObservation obs_us =
        project_tag(world_u, world_s, config.underwater_camera, config.surface_tag, t);
    TagObservation obs_su =
        project_tag(world_s, world_u, config.surface_camera, config.underwater_tag, t);
    obs_us = apply_dropout(obs_us, config.underwater_dropout, t, rng_us);
    obs_su = apply_dropout(obs_su, config.surface_dropout, t, rng_su);

    const bool drop_us = config.underwater_dropout.in_window(t);
    const bool drop_su = config.surface_dropout.in_window(t);
    if (drop_us != prev_drop_us) rec.events.push_back(drop_us ? "dropoutUS_start" : "dropoutUS_end");
    if (drop_su != prev_drop_su) rec.events.push_back(drop_su ? "dropoutSU_start" : "dropoutSU_end");
    prev_drop_us = drop_us;
    prev_drop_su = drop_su;

    const auto u_rates = world_rates(u);
    const UnderwaterMeasurement um{u.pose.z,   u.pose.attitude.phi, u.pose.attitude.theta,
                                   u_rates[2], u_rates[3],          u_rates[4]};
    const SurfaceMeasurement sm{s.pose, world_rates(s, config.surface_mirrored_jacobian)};

    const SurfaceTarget target = planner_step(s.pose, waypoints, capture, wp_index);
    if (!reached && wp_index + 1 == waypoints.size() &&
        std::hypot(target.x - s.pose.x, target.y - s.pose.y) < capture) {
      reached = true;
      rec.events.push_back("final_waypoint_reached");
    }

    const ControllerOutput uo = u_ctrl.update(um, obs_us);
    const ControllerOutput so = s_ctrl.update(sm, target, obs_su);

    rec.underwater = u.pose;
    rec.surface = s.pose;
    rec.underwater_velocity = u.nu;
    rec.surface_velocity = s.nu;
    rec.underwater_subtask = uo.subtask;
    rec.underwater_tether = uo.tether;
    rec.underwater_command = uo.command;
    rec.surface_subtask = so.subtask;
    rec.surface_tether = so.tether;
    rec.surface_command = so.command;
    rec.observation_us = obs_us;
    rec.observation_su = obs_su;
    rec.region_us = region_of(obs_us, config.underwater_camera);
    rec.region_su = region_of(obs_su, config.surface_camera);
    rec.xi_us = xi_of(obs_us, config.underwater_camera);
    rec.xi_su = xi_of(obs_su, config.surface_camera);
    rec.waypoint_index = wp_index;
    rec.final_waypoint_reached = reached;

    if (k == 0 || rec.region_us != prev_region_us) rec.events.push_back("regionUS=" + label(rec.region_us));
    if (k == 0 || rec.region_su != prev_region_su) rec.events.push_back("regionSU=" + label(rec.region_su));
    prev_region_us = rec.region_us;
    prev_region_su = rec.region_su;

    WorldWrench disturbance{Vec3::Zero(), Vec3::Zero()};
    bool perturbed = false;
    for (auto& p : perturbations) {
      if (!p.window && crossed(y0, u.pose.y, *p.d.trigger_y)) {
        p.window = std::make_pair(t, t + (p.d.t_end - p.d.t_start));
        log.perturbation_windows.push_back(*p.window);
      }
      p.active = p.window && t >= p.window->first && t < p.window->second;
      if (p.active) {
        disturbance.force += p.d.force;
        disturbance.torque += p.d.torque;
        perturbed = true;
      }
    }
    if (perturbed != prev_perturbed) {
      rec.events.push_back(perturbed ? "perturbation_start" : "perturbation_end");
    }
    prev_perturbed = perturbed;
    rec.perturbation_active = perturbed;

    log.records.push_back(std::move(rec));
    if (k == steps) break;

    const Wrench tau_u = allocate_thrust(uo.command, config.underwater_params);
    const Wrench tau_s = allocate_thrust(so.command, config.surface_params);
    u = step(u, tau_u, disturbance, config.dt, config.underwater_params);
    s = step(s, tau_s, WorldWrench{Vec3::Zero(), Vec3::Zero()}, config.dt, config.surface_params,
             config.surface_mirrored_jacobian);
    if (clamp_underwater(u, config.tank)) pending.push_back("wall_U");
    if (clamp_surface(s, config.tank)) pending.push_back("wall_S");
  }

  for (const auto& p : perturbations) {
    if (p.window && !p.d.trigger_y) log.perturbation_windows.push_back(*p.window);
  }
  std::sort(log.perturbation_windows.begin(), log.perturbation_windows.end());
  return log;
}

RigidTransform upward_camera_mount() { return RigidTransform::from_translation({0.0, 0.0, kMountOffset}); }

RigidTransform downward_camera_mount() {
  return RigidTransform::from_rpy({0.0, 0.0, -kMountOffset}, kPi, 0.0, 0.0);
}

namespace {

Tank sim_tank() { return {-1.2, 3.68, -0.5, 3.16, 2.66}; }
Tank real_tank() { return {-1.2, 3.68, -3.16, 0.5, 2.66}; }

ScenarioConfig base_config(std::string name, bool real) {
  ScenarioConfig c;
  c.name = std::move(name);
  c.tank = real ? real_tank() : sim_tank();
  c.underwater_camera.mount = upward_camera_mount();
  c.underwater_tag.mount = upward_camera_mount();
  c.surface_camera.mount = downward_camera_mount();
  c.surface_tag.mount = downward_camera_mount();
  c.underwater_pd = underwater_pd_gains(0.5, 0.15);
  c.surface_pd = real ? surface_pd_gains(1.0, 0.5) : surface_pd_gains(5.0, 5.0);
  c.vet.k_safe_p = real ? 0.35 : 0.5;
  c.vet.k_elastic_p = 1.0;
  c.vet.k_elastic_d = 0.15;
  c.formation_threshold = real ? 0.3 : 0.6;
  c.underwater_target = {-1.0, 0.0, 0.0};
  return c;
}

Pose6 underwater_at(double x, double y) { return {x, y, -1.0, {}}; }

}  // namespace

ScenarioConfig preset(std::string_view name) {
  if (name == "nominal") {
    ScenarioConfig c = base_config("nominal", false);
    c.duration = 60.0;
    c.underwater_initial = underwater_at(0.0, 0.0);
    c.surface_initial = {0.0, 0.0, 0.0};
    c.planner = SetpointPlanner{{{1.0, 1.0, -1.57}}, 0.15, 0.1};
    return c;
  }
  if (name == "perturbation_sim") {
    ScenarioConfig c = base_config("perturbation_sim", false);
    c.duration = 90.0;
    c.underwater_initial = underwater_at(0.1, 0.0);
    c.surface_initial = {0.1, 0.0, 0.0};
    c.planner = SetpointPlanner{{{0.1, 3.0, 0.0}}, 0.15, 0.1};
    c.perturbations.push_back({Vec3(-8.0, 0.0, 0.0), Vec3::Zero(), 0.0, 3.0, 0.75});
    return c;
  }
  if (name == "navigation_sim") {
    ScenarioConfig c = base_config("navigation_sim", false);
    c.duration = 900.0;
    c.underwater_initial = underwater_at(1.1, -0.25);
    c.surface_initial = {1.1, -0.25, 0.0};
    c.planner = LawnmowerPlanner{-0.6, 3.0, -0.25, 2.15, 0.6, 0.1, 0.15};
    return c;
  }
  if (name == "perturbation_real") {
    ScenarioConfig c = base_config("perturbation_real", true);
    c.duration = 90.0;
    c.underwater_initial = underwater_at(0.2, -0.5);
    c.surface_initial = {0.2, -0.5, 0.0};
    c.planner = SetpointPlanner{{{1.0, -2.5, 0.0}}, 0.15, 0.1};
    c.perturbations.push_back({Vec3(-8.0, 0.0, 0.0), Vec3::Zero(), 0.0, 3.0, -1.0});
    return c;
  }
  if (name == "navigation_real") {
    ScenarioConfig c = base_config("navigation_real", true);
    c.duration = 600.0;
    c.underwater_initial = underwater_at(0.2, -2.2);
    c.surface_initial = {0.2, -2.2, 0.0};
    c.planner = LawnmowerPlanner{0.2, 3.2, -2.2, -0.4, 0.6, 0.1, 0.15};
    c.underwater_dropout.windows = {{71.0, 77.0}, {85.0, 89.0}};
    c.underwater_dropout.random_rate = 0.02;
    return c;
  }
  throw UnknownPreset("unknown preset '" + std::string(name) + "'");
}

}  // namespace vetsim
