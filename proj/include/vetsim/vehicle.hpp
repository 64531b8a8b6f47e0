#pragma once

// Rigid-body dynamics for the underwater (6-DoF) and surface (3-DoF)
// vehicles: M nu_dot + (C(nu) + D(nu)) nu = tau, with tau = Lambda_K u and a
// fixed-step semi-implicit Euler integrator.

#include <Eigen/Core>
#include <optional>

#include "vetsim/frames.hpp"

namespace vetsim {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Body-frame velocity. 6 entries (vx, vy, vz, vphi, vtheta, vpsi) for the
/// underwater vehicle, 3 (vx, vy, vpsi) for the surface vehicle.
using BodyVelocity = Vector;

/// Body-frame force/moment vector with the same layout as BodyVelocity.
using Wrench = Vector;

struct VehicleParams {
  Vector mass;               // diagonal of M (kg, kg m^2)
  Vector damping_linear;     // linear part of D(nu)
  Vector damping_quadratic;  // quadratic part of D(nu)
  Vector thrust_gain;        // diagonal of Lambda_K
  double velocity_bound_linear = 0.1;   // command limit, m/s
  double velocity_bound_angular = 0.2;  // command limit, rad/s
  double speed_bound = 0.1;             // M: bound on the linear speed norm

  int dof() const { return static_cast<int>(mass.size()); }
  /// Throws ConfigInvalid on inconsistent sizes or non-physical entries.
  void validate() const;

  bool operator==(const VehicleParams&) const = default;
};

VehicleParams underwater_defaults();
VehicleParams surface_defaults();

/// Velocity-scaled command. Linear components first, then angular.
struct ControlInput {
  Vector u;

  static ControlInput zero(int dof) { return {Vector::Zero(dof)}; }
  bool operator==(const ControlInput&) const = default;
};

/// World-frame force/torque acting over [t_start, t_end]. When trigger_y is
/// set the window is re-anchored to the first time the underwater vehicle
/// crosses that y coordinate (the window length is preserved).
struct Disturbance {
  Vec3 force = Vec3::Zero();
  Vec3 torque = Vec3::Zero();
  double t_start = 0.0;
  double t_end = 0.0;
  std::optional<double> trigger_y;

  bool operator==(const Disturbance&) const = default;
};

Wrench allocate_thrust(const ControlInput& u, const VehicleParams& params);

/// Rigid-body Coriolis/centripetal matrix for a diagonal mass matrix.
Matrix coriolis_matrix(const BodyVelocity& nu, const VehicleParams& params);

/// D(nu) nu with D(nu) = diag(d_lin) + diag(d_quad |nu_i|).
Vector damping_force(const BodyVelocity& nu, const VehicleParams& params);

/// Clips linear components to +-velocity_bound_linear and angular components
/// to +-velocity_bound_angular.
ControlInput saturate(const ControlInput& u, const VehicleParams& params);

/// Kinetic energy 1/2 nu^T M nu.
double kinetic_energy(const BodyVelocity& nu, const VehicleParams& params);

struct UnderwaterState {
  Pose6 pose;
  BodyVelocity nu = BodyVelocity::Zero(6);
};

struct SurfaceState {
  Pose3 pose;
  BodyVelocity nu = BodyVelocity::Zero(3);
};

struct WorldWrench {
  Vec3 force = Vec3::Zero();
  Vec3 torque = Vec3::Zero();
};

inline constexpr double kMaxStep = 0.1;

/// Advances the underwater vehicle by dt. The disturbance is given in the
/// world frame and rotated into the body frame. Throws GimbalSingularity.
UnderwaterState step(const UnderwaterState& s, const Wrench& tau, const WorldWrench& w,
                     double dt, const VehicleParams& params);

/// Surface vehicle variant; only the planar force and the yaw torque of the
/// disturbance act on it.
SurfaceState step(const SurfaceState& s, const Wrench& tau, const WorldWrench& w, double dt,
                  const VehicleParams& params, bool mirrored_convention = false);

/// World-frame rates of the pose coordinates, used as measured derivatives.
Eigen::Matrix<double, 6, 1> world_rates(const UnderwaterState& s);
Eigen::Vector3d world_rates(const SurfaceState& s, bool mirrored_convention = false);

}  // namespace vetsim
