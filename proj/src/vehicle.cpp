#include "vetsim/vehicle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vetsim/errors.hpp"

namespace vetsim {
namespace {

Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(),
      v.z(), 0.0, -v.x(),
      -v.y(), v.x(), 0.0;
  return s;
}

void require_dof(const Vector& v, const VehicleParams& params, const char* what) {
  if (v.size() != params.dof()) {
    throw DimensionMismatch(std::string(what) + " has " + std::to_string(v.size()) +
                            " entries, vehicle has " + std::to_string(params.dof()) + " DoF");
  }
}

// Indices of the angular components for a given DoF count.
bool is_angular(int dof, int i) { return dof == 6 ? i >= 3 : i == 2; }

// Semi-implicit velocity update. Damping is taken implicitly (linearised at
// nu) so stiff damping never flips the sign of a velocity component.
BodyVelocity integrate_velocity(const BodyVelocity& nu, const Wrench& forcing, double dt,
                                const VehicleParams& p) {
  const Vector coriolis = coriolis_matrix(nu, p) * nu;
  BodyVelocity next(nu.size());
  for (Eigen::Index i = 0; i < nu.size(); ++i) {
    const double d = p.damping_linear[i] + p.damping_quadratic[i] * std::abs(nu[i]);
    next[i] = (p.mass[i] * nu[i] + dt * (forcing[i] - coriolis[i])) / (p.mass[i] + dt * d);
  }
  return next;
}

void clamp_speed(BodyVelocity& nu, int linear_count, double bound) {
  auto lin = nu.head(linear_count);
  const double n = lin.norm();
  if (n > bound) lin *= bound / n;
}

void check_dt(double dt) {
  if (!(dt > 0.0 && dt <= kMaxStep)) {
    throw ConfigInvalid("dt must lie in (0, 0.1], got " + std::to_string(dt));
  }
}

}  // namespace

void VehicleParams::validate() const {
  const auto n = mass.size();
  if (n != 3 && n != 6) throw ConfigInvalid("vehicle must have 3 or 6 DoF");
  if (damping_linear.size() != n || damping_quadratic.size() != n || thrust_gain.size() != n) {
    throw ConfigInvalid("vehicle parameter vectors differ in length");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(mass[i] > 0.0)) throw ConfigInvalid("mass entries must be positive");
    if (!(thrust_gain[i] > 0.0)) throw ConfigInvalid("thrust gains must be positive");
    if (!(damping_linear[i] >= 0.0) || !(damping_quadratic[i] >= 0.0)) {
      throw ConfigInvalid("damping entries must be non-negative");
    }
  }
  if (!(velocity_bound_linear > 0.0) || !(velocity_bound_angular > 0.0) || !(speed_bound > 0.0)) {
    throw ConfigInvalid("velocity bounds must be positive");
  }
}

// Thrust gains are set to d_lin + d_quad * bound so that a full command
// settles at the command value.
VehicleParams underwater_defaults() {
  VehicleParams p;
  p.mass.resize(6);
  p.mass << 11.5, 11.5, 11.5, 0.16, 0.16, 0.16;
  p.damping_linear.resize(6);
  p.damping_linear << 4.0, 4.0, 4.0, 0.07, 0.07, 0.07;
  p.damping_quadratic.resize(6);
  p.damping_quadratic << 18.0, 18.0, 18.0, 1.55, 1.55, 1.55;
  p.velocity_bound_linear = 0.1;
  p.velocity_bound_angular = 0.2;
  p.speed_bound = 0.1;
  p.thrust_gain.resize(6);
  for (int i = 0; i < 6; ++i) {
    const double bound = i < 3 ? p.velocity_bound_linear : p.velocity_bound_angular;
    p.thrust_gain[i] = p.damping_linear[i] + p.damping_quadratic[i] * bound;
  }
  return p;
}

VehicleParams surface_defaults() {
  VehicleParams p;
  p.mass.resize(3);
  p.mass << 14.0, 14.0, 0.25;
  p.damping_linear.resize(3);
  p.damping_linear << 5.0, 5.0, 0.1;
  p.damping_quadratic.resize(3);
  p.damping_quadratic << 20.0, 20.0, 2.0;
  p.velocity_bound_linear = 0.1;
  p.velocity_bound_angular = 0.2;
  p.speed_bound = 0.1;
  p.thrust_gain.resize(3);
  for (int i = 0; i < 3; ++i) {
    const double bound = i < 2 ? p.velocity_bound_linear : p.velocity_bound_angular;
    p.thrust_gain[i] = p.damping_linear[i] + p.damping_quadratic[i] * bound;
  }
  return p;
}

Wrench allocate_thrust(const ControlInput& u, const VehicleParams& params) {
  require_dof(u.u, params, "control input");
  return params.thrust_gain.cwiseProduct(u.u);
}

Matrix coriolis_matrix(const BodyVelocity& nu, const VehicleParams& params) {
  require_dof(nu, params, "velocity");
  const Vector& m = params.mass;
  if (params.dof() == 3) {
    Matrix c = Matrix::Zero(3, 3);
    c(0, 2) = -m[1] * nu[1];
    c(1, 2) = m[0] * nu[0];
    c(2, 0) = m[1] * nu[1];
    c(2, 1) = -m[0] * nu[0];
    return c;
  }
  const Vec3 p1 = m.head<3>().cwiseProduct(nu.head<3>());
  const Vec3 p2 = m.tail<3>().cwiseProduct(nu.tail<3>());
  Matrix c = Matrix::Zero(6, 6);
  c.block<3, 3>(0, 3) = -skew(p1);
  c.block<3, 3>(3, 0) = -skew(p1);
  c.block<3, 3>(3, 3) = -skew(p2);
  return c;
}

Vector damping_force(const BodyVelocity& nu, const VehicleParams& params) {
  require_dof(nu, params, "velocity");
  Vector f(nu.size());
  for (Eigen::Index i = 0; i < nu.size(); ++i) {
    f[i] = (params.damping_linear[i] + params.damping_quadratic[i] * std::abs(nu[i])) * nu[i];
  }
  return f;
}

ControlInput saturate(const ControlInput& u, const VehicleParams& params) {
  require_dof(u.u, params, "control input");
  ControlInput out = u;
  const int dof = params.dof();
  for (int i = 0; i < dof; ++i) {
    const double b = is_angular(dof, i) ? params.velocity_bound_angular : params.velocity_bound_linear;
    out.u[i] = std::clamp(u.u[i], -b, b);
  }
  return out;
}

double kinetic_energy(const BodyVelocity& nu, const VehicleParams& params) {
  require_dof(nu, params, "velocity");
  return 0.5 * nu.dot(params.mass.cwiseProduct(nu));
}

UnderwaterState step(const UnderwaterState& s, const Wrench& tau, const WorldWrench& w,
                     double dt, const VehicleParams& params) {
  check_dt(dt);
  if (params.dof() != 6) throw DimensionMismatch("underwater step needs a 6-DoF parameter set");
  require_dof(tau, params, "wrench");
  require_dof(s.nu, params, "velocity");

  const Mat3 r = rotation_body_to_world(s.pose.attitude);
  const Mat3 t = euler_rate_transform(s.pose.attitude);

  Wrench forcing = tau;
  forcing.head<3>() += r.transpose() * w.force;
  forcing.tail<3>() += r.transpose() * w.torque;

  UnderwaterState out;
  out.nu = integrate_velocity(s.nu, forcing, dt, params);
  clamp_speed(out.nu, 3, params.speed_bound);

  const Vec3 dpos = r * out.nu.head<3>();
  const Vec3 datt = t * out.nu.tail<3>();
  out.pose.x = s.pose.x + dt * dpos.x();
  out.pose.y = s.pose.y + dt * dpos.y();
  out.pose.z = s.pose.z + dt * dpos.z();
  out.pose.attitude.phi = wrap_angle(s.pose.attitude.phi + dt * datt.x());
  out.pose.attitude.theta = wrap_angle(s.pose.attitude.theta + dt * datt.y());
  out.pose.attitude.psi = wrap_angle(s.pose.attitude.psi + dt * datt.z());
  return out;
}

SurfaceState step(const SurfaceState& s, const Wrench& tau, const WorldWrench& w, double dt,
                  const VehicleParams& params, bool mirrored_convention) {
  check_dt(dt);
  if (params.dof() != 3) throw DimensionMismatch("surface step needs a 3-DoF parameter set");
  require_dof(tau, params, "wrench");
  require_dof(s.nu, params, "velocity");

  const double c = std::cos(s.pose.psi), sn = std::sin(s.pose.psi);
  Wrench forcing = tau;
  forcing[0] += c * w.force.x() + sn * w.force.y();
  forcing[1] += -sn * w.force.x() + c * w.force.y();
  forcing[2] += w.torque.z();

  SurfaceState out;
  out.nu = integrate_velocity(s.nu, forcing, dt, params);
  clamp_speed(out.nu, 2, params.speed_bound);

  const Vec3 rates = surface_jacobian(s.pose.psi, mirrored_convention) * out.nu;
  out.pose.x = s.pose.x + dt * rates.x();
  out.pose.y = s.pose.y + dt * rates.y();
  out.pose.psi = wrap_angle(s.pose.psi + dt * rates.z());
  return out;
}

Eigen::Matrix<double, 6, 1> world_rates(const UnderwaterState& s) {
  Eigen::Matrix<double, 6, 1> r;
  r.head<3>() = rotation_body_to_world(s.pose.attitude) * s.nu.head<3>();
  r.tail<3>() = euler_rate_transform(s.pose.attitude) * s.nu.tail<3>();
  return r;
}

Eigen::Vector3d world_rates(const SurfaceState& s, bool mirrored_convention) {
  return surface_jacobian(s.pose.psi, mirrored_convention) * s.nu;
}

}  // namespace vetsim
