#include "vetsim/control.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "vetsim/errors.hpp"

namespace vetsim {
namespace {

// A held command is dropped entirely after this many half-lives.
constexpr double kHoldHalfLives = 4.0;

void require_size(const Vector& v, Eigen::Index n, const char* what) {
  if (v.size() != n) {
    throw ConfigInvalid(std::string(what) + " must have " + std::to_string(n) + " entries");
  }
}

Eigen::Vector2d clamp_xy(const Eigen::Vector2d& u, const VetGains& g) {
  return {std::clamp(u.x(), -g.u_max_x, g.u_max_x), std::clamp(u.y(), -g.u_max_y, g.u_max_y)};
}

}  // namespace

std::string_view to_string(ControllerMode m) { return m == ControllerMode::Vet ? "vet" : "baseline"; }

ControllerMode parse_controller_mode(std::string_view s) {
  if (s == "vet") return ControllerMode::Vet;
  if (s == "baseline") return ControllerMode::Baseline;
  throw ConfigInvalid("controller mode must be 'vet' or 'baseline', got '" + std::string(s) + "'");
}

void PdGains::validate(RobotKind kind) const {
  const Eigen::Index n = kind == RobotKind::Underwater ? 6 : 3;
  require_size(kp, n, "kp");
  require_size(kd, n, "kd");
  if ((kp.array() < 0.0).any() || (kd.array() < 0.0).any() || !kp.allFinite() || !kd.allFinite()) {
    throw ConfigInvalid("PD gains must be finite and non-negative");
  }
  if (kind == RobotKind::Underwater) {
    for (int i : {0, 1, 5}) {
      if (kp[i] != 0.0 || kd[i] != 0.0) {
        throw ConfigInvalid("underwater PD gains on x, y and yaw must be zero");
      }
    }
  }
}

PdGains underwater_pd_gains(double kp, double kd) {
  PdGains g;
  g.kp = Vector::Zero(6);
  g.kd = Vector::Zero(6);
  for (int i : {2, 3, 4}) {
    g.kp[i] = kp;
    g.kd[i] = kd;
  }
  return g;
}

PdGains surface_pd_gains(double kp, double kd) {
  return {Vector::Constant(3, kp), Vector::Constant(3, kd)};
}

void VetGains::validate() const {
  if (!(k_safe_p >= 0.0) || !(k_elastic_d >= 0.0) || !(k_psi >= 0.0)) {
    throw ConfigInvalid("VET gains must be non-negative");
  }
  if (!(k_safe_p < k_elastic_p)) throw ConfigInvalid("VET safe gain must be below the elastic gain");
  if (!(u_max_x > 0.0) || !(u_max_y > 0.0)) throw ConfigInvalid("VET u_max must be positive");
  if (!(derivative_time_constant >= 0.0) || !(hold_half_life > 0.0)) {
    throw ConfigInvalid("VET filter constants must be positive");
  }
}

ControlInput subtask_control_underwater(const UnderwaterMeasurement& m,
                                        const UnderwaterTarget& target, const PdGains& gains) {
  Vector e = Vector::Zero(6);
  Vector de = Vector::Zero(6);
  e[2] = target.z - m.z;
  e[3] = wrap_angle(target.phi - m.phi);
  e[4] = wrap_angle(target.theta - m.theta);
  de[2] = -m.z_rate;
  de[3] = -m.phi_rate;
  de[4] = -m.theta_rate;

  ControlInput out{gains.kp.cwiseProduct(e) + gains.kd.cwiseProduct(de)};
  out.u[0] = out.u[1] = out.u[5] = 0.0;
  return out;
}

ControlInput subtask_control_surface(const SurfaceMeasurement& m, const SurfaceTarget& target,
                                     const PdGains& gains) {
  const double c = std::cos(m.pose.psi), s = std::sin(m.pose.psi);
  const double ex = target.x - m.pose.x, ey = target.y - m.pose.y;
  const double vx = -m.rates.x(), vy = -m.rates.y();

  Vector e(3), de(3);
  e << c * ex + s * ey, -s * ex + c * ey, wrap_angle(target.psi - m.pose.psi);
  de << c * vx + s * vy, -s * vx + c * vy, -m.rates.z();
  return {gains.kp.cwiseProduct(e) + gains.kd.cwiseProduct(de)};
}

Eigen::Vector2d normalized_offset(const ImagePoint& center, const CameraModel& cam) {
  return {(center.x - cam.width / 2.0) / (cam.width / 2.0),
          (center.y - cam.height / 2.0) / (cam.height / 2.0)};
}

VetCommand vet_law(const TagObservation& obs, VetMemory& memory, const VetGains& gains,
                   const CameraModel& cam) {
  VetCommand cmd;
  if (!obs.detected) {
    const double elapsed = std::max(0.0, obs.timestamp - memory.last_detection_time);
    const double factor = elapsed >= kHoldHalfLives * gains.hold_half_life
                              ? 0.0
                              : std::exp2(-elapsed / gains.hold_half_life);
    cmd.u = memory.last_command * factor;
    cmd.region = memory.last_region;
    cmd.detected = false;
    memory.has_previous = false;
    return cmd;
  }

  const TagGeometry g = tag_geometry(obs);
  const Eigen::Vector2d e = normalized_offset(g.center, cam);

  if (memory.has_previous && obs.timestamp > memory.previous_time) {
    const double dt = obs.timestamp - memory.previous_time;
    const Eigen::Vector2d raw = (e - memory.previous_error) / dt;
    const double alpha = dt / (gains.derivative_time_constant + dt);
    memory.error_rate += alpha * (raw - memory.error_rate);
  } else {
    memory.error_rate.setZero();
  }

  const RegionLabel region = classify_region(g.center, g.side, g.diagonal, cam);
  Eigen::Vector2d uxy = Eigen::Vector2d::Zero();
  switch (region) {
    case RegionLabel::Safe:
      uxy = gains.k_safe_p * e;
      break;
    case RegionLabel::Elastic:
      uxy = gains.k_elastic_p * e + gains.k_elastic_d * memory.error_rate;
      break;
    case RegionLabel::Danger: {
      const double n = e.norm();
      if (n > 0.0) uxy = {gains.u_max_x * e.x() / n, gains.u_max_y * e.y() / n};
      break;
    }
  }
  uxy = clamp_xy(uxy, gains);

  cmd.u << uxy, gains.k_psi * obs.camera_yaw;
  cmd.region = region;
  cmd.detected = true;

  memory.has_previous = true;
  memory.previous_error = e;
  memory.previous_time = obs.timestamp;
  memory.last_command = cmd.u;
  memory.last_region = region;
  memory.last_detection_time = obs.timestamp;
  return cmd;
}

BaselineCommand baseline_ibvs(const TagObservation& obs, const VetGains& gains,
                              const CameraModel& cam) {
  BaselineCommand out;
  out.follower.detected = obs.detected;
  if (!obs.detected) return out;
  const TagGeometry g = tag_geometry(obs);
  const Eigen::Vector2d uxy = clamp_xy(gains.k_elastic_p * normalized_offset(g.center, cam), gains);
  out.follower.u << uxy, gains.k_psi * obs.camera_yaw;
  out.follower.region = classify_region(g.center, g.side, g.diagonal, cam);
  return out;
}

ControlInput camera_to_body(const VetCommand& cmd, const RigidTransform& camera_mount,
                            RobotKind kind) {
  const Vec3 lin = camera_mount.rotation * Vec3(cmd.u.x(), cmd.u.y(), 0.0);
  const Vec3 ang = camera_mount.rotation * Vec3(0.0, 0.0, cmd.u.z());
  if (kind == RobotKind::Underwater) {
    Vector u = Vector::Zero(6);
    u[0] = lin.x();
    u[1] = lin.y();
    u[5] = ang.z();
    return {u};
  }
  Vector u(3);
  u << lin.x(), lin.y(), ang.z();
  return {u};
}

double check_connectivity(const RigidTransform& world_from_underwater,
                          const RigidTransform& underwater_camera_mount,
                          const RigidTransform& underwater_tag_mount,
                          const RigidTransform& world_from_surface,
                          const RigidTransform& surface_camera_mount,
                          const RigidTransform& surface_tag_mount) {
  const Vec3 lhs = world_from_underwater.rotation *
                   (underwater_camera_mount.translation - underwater_tag_mount.translation);
  const Vec3 rhs = world_from_surface.rotation *
                   (surface_camera_mount.translation - surface_tag_mount.translation);
  return (lhs + rhs).norm();
}

ControlInput combined_control(const ControlInput& subtask, const ControlInput& tether,
                              const VehicleParams& params) {
  if (subtask.u.size() != tether.u.size()) {
    throw DimensionMismatch("sub-task and tether commands differ in size");
  }
  const ControlInput clipped = saturate(subtask, params);
  return saturate(ControlInput{clipped.u + tether.u}, params);
}

UnderwaterController::UnderwaterController(ControllerMode mode, PdGains pd,
                                           UnderwaterTarget target, VetGains vet,
                                           CameraModel camera, VehicleParams params)
    : mode_(mode),
      pd_(std::move(pd)),
      target_(target),
      vet_(vet),
      camera_(std::move(camera)),
      params_(std::move(params)) {}

ControllerOutput UnderwaterController::update(const UnderwaterMeasurement& m,
                                              const TagObservation& obs) {
  ControllerOutput out;
  out.subtask = saturate(subtask_control_underwater(m, target_, pd_), params_);
  out.camera_command = mode_ == ControllerMode::Vet ? vet_law(obs, memory_, vet_, camera_)
                                                    : baseline_ibvs(obs, vet_, camera_).follower;
  out.tether = camera_to_body(out.camera_command, camera_.mount, RobotKind::Underwater);
  out.command = combined_control(out.subtask, out.tether, params_);
  return out;
}

SurfaceController::SurfaceController(ControllerMode mode, PdGains pd, VetGains vet,
                                     CameraModel camera, VehicleParams params,
                                     double cruise_speed)
    : mode_(mode),
      pd_(std::move(pd)),
      vet_(vet),
      camera_(std::move(camera)),
      params_(std::move(params)),
      cruise_speed_(cruise_speed) {}

ControllerOutput SurfaceController::update(const SurfaceMeasurement& m,
                                           const SurfaceTarget& target,
                                           const TagObservation& obs) {
  ControllerOutput out;
  out.subtask = saturate(subtask_control_surface(m, target, pd_), params_);
  auto lin = out.subtask.u.head<2>();
  if (lin.norm() > cruise_speed_) lin *= cruise_speed_ / lin.norm();

  if (mode_ == ControllerMode::Vet) {
    out.camera_command = vet_law(obs, memory_, vet_, camera_);
    out.tether = camera_to_body(out.camera_command, camera_.mount, RobotKind::Surface);
  } else {
    out.camera_command = VetCommand{};
    out.camera_command.detected = obs.detected;
    out.tether = ControlInput::zero(3);
  }
  out.command = combined_control(out.subtask, out.tether, params_);
  return out;
}

}  // namespace vetsim
