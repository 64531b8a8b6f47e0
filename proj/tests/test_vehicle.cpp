#include <doctest.h>

#include <random>

#include "vetsim/errors.hpp"
#include "vetsim/vehicle.hpp"

using namespace vetsim;

namespace {

VehicleParams plain6(double mass, double dlin, double dquad, double gain) {
  VehicleParams p;
  p.mass = Vector::Constant(6, mass);
  p.damping_linear = Vector::Constant(6, dlin);
  p.damping_quadratic = Vector::Constant(6, dquad);
  p.thrust_gain = Vector::Constant(6, gain);
  return p;
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

const WorldWrench kNoWrench{Vec3::Zero(), Vec3::Zero()};

}  // namespace

TEST_CASE("default parameters are valid and thrust gains settle at the command") {
  for (const auto& p : {underwater_defaults(), surface_defaults()}) {
    CHECK_NOTHROW(p.validate());
    const int n = p.dof();
    for (int i = 0; i < n; ++i) {
      const bool angular = n == 6 ? i >= 3 : i == 2;
      const double bound = angular ? p.velocity_bound_angular : p.velocity_bound_linear;
      // Steady state of m v' = gain * bound - (d_lin + d_quad v) v is v = bound.
      const double residual = p.thrust_gain[i] * bound - (p.damping_linear[i] + p.damping_quadratic[i] * bound) * bound;
      CHECK(residual == doctest::Approx(0.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("validate rejects non-physical parameters") {
  VehicleParams p = underwater_defaults();
  p.mass[0] = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigInvalid);
  p = underwater_defaults();
  p.damping_linear[2] = -1.0;
  CHECK_THROWS_AS(p.validate(), ConfigInvalid);
  p = underwater_defaults();
  p.thrust_gain.resize(3);
  CHECK_THROWS_AS(p.validate(), ConfigInvalid);
}

TEST_CASE("allocate_thrust examples") {
  VehicleParams p = plain6(1.0, 0.0, 0.0, 1.0);
  CHECK(allocate_thrust({vec({1, 0, 0, 0, 0, 0})}, p) == vec({1, 0, 0, 0, 0, 0}));
  p.thrust_gain = vec({2, 2, 2, 1, 1, 1});
  const Wrench t = allocate_thrust({vec({0.1, 0, 0, 0, 0, 0.2})}, p);
  CHECK(t[0] == doctest::Approx(0.2));
  CHECK(t[5] == doctest::Approx(0.2));
  CHECK(allocate_thrust(ControlInput::zero(6), p).isZero());
  CHECK_THROWS_AS(allocate_thrust(ControlInput::zero(3), p), DimensionMismatch);
}

TEST_CASE("coriolis matrix is energy-neutral") {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> v(-2.0, 2.0);
  for (const auto& p : {underwater_defaults(), surface_defaults()}) {
    CHECK(coriolis_matrix(Vector::Zero(p.dof()), p).isZero());
    for (int i = 0; i < 1000; ++i) {
      Vector nu(p.dof());
      for (auto& x : nu) x = v(rng);
      CHECK(std::abs(nu.dot(coriolis_matrix(nu, p) * nu)) < 1e-10);
    }
  }
}

TEST_CASE("surface coriolis has yaw coupling terms only") {
  const VehicleParams p = surface_defaults();
  const Vector nu = vec({0.3, -0.2, 0.1});
  const Matrix c = coriolis_matrix(nu, p);
  // Hand-written planar rigid-body form for diagonal M.
  Matrix expect = Matrix::Zero(3, 3);
  expect(0, 2) = -p.mass[1] * nu[1];
  expect(1, 2) = p.mass[0] * nu[0];
  expect(2, 0) = p.mass[1] * nu[1];
  expect(2, 1) = -p.mass[0] * nu[0];
  CHECK((c - expect).norm() < 1e-15);
  CHECK(c(0, 0) == 0.0);
  CHECK(c(0, 1) == 0.0);
  CHECK(c(1, 0) == 0.0);
}

TEST_CASE("damping_force examples") {
  VehicleParams p = plain6(1.0, 1.0, 0.0, 1.0);
  CHECK(damping_force(Vector::Zero(6), p).isZero());
  CHECK(damping_force(vec({0.5, 0, 0, 0, 0, 0}), p)[0] == doctest::Approx(0.5));
  p = plain6(1.0, 0.0, 2.0, 1.0);
  CHECK(damping_force(vec({0.5, 0, 0, 0, 0, 0}), p)[0] == doctest::Approx(0.5));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> v(-1.0, 1.0);
  const VehicleParams d = underwater_defaults();
  for (int i = 0; i < 200; ++i) {
    Vector nu(6);
    for (auto& x : nu) x = v(rng);
    CHECK(nu.dot(damping_force(nu, d)) >= 0.0);
  }
}

TEST_CASE("saturate clips per axis and is idempotent") {
  const VehicleParams p = underwater_defaults();
  const ControlInput u{vec({0.5, 0.05, -3.0, 0.1, 0.3, -1.0})};
  const ControlInput s = saturate(u, p);
  CHECK(s.u[0] == 0.1);
  CHECK(s.u[1] == 0.05);
  CHECK(s.u[2] == -0.1);
  CHECK(s.u[3] == 0.1);
  CHECK(s.u[4] == 0.2);
  CHECK(s.u[5] == -0.2);
  CHECK(saturate(s, p) == s);
  const ControlInput surf = saturate({vec({0.5, -0.5, -1.0})}, surface_defaults());
  CHECK(surf.u == vec({0.1, -0.1, -0.2}));
}

TEST_CASE("step: equilibrium, kinematics and argument checks") {
  const VehicleParams p = underwater_defaults();
  const UnderwaterState s0{{0.2, -0.3, -1.0, {0.0, 0.0, 0.4}}, Vector::Zero(6)};
  const UnderwaterState s1 = step(s0, Vector::Zero(6), kNoWrench, 0.02, p);
  CHECK(s1.pose == s0.pose);
  CHECK(s1.nu.isZero());

  VehicleParams free = plain6(1.0, 0.0, 0.0, 1.0);
  free.speed_bound = 1.0;
  const UnderwaterState moving{{0.0, 0.0, -1.0, {}}, vec({0, 0, 0.1, 0, 0, 0})};
  const UnderwaterState m1 = step(moving, Vector::Zero(6), kNoWrench, 0.02, free);
  CHECK(m1.pose.z == doctest::Approx(-1.0 + 0.002).epsilon(1e-12));

  CHECK_THROWS_AS(step(s0, Vector::Zero(6), kNoWrench, 0.0, p), ConfigInvalid);
  CHECK_THROWS_AS(step(s0, Vector::Zero(6), kNoWrench, 0.2, p), ConfigInvalid);
  CHECK_THROWS_AS(step(s0, Vector::Zero(3), kNoWrench, 0.02, p), DimensionMismatch);

  const UnderwaterState singular{{0, 0, -1, {0.0, kPi / 2.0, 0.0}}, Vector::Zero(6)};
  CHECK_THROWS_AS(step(singular, Vector::Zero(6), kNoWrench, 0.02, p), GimbalSingularity);
}

TEST_CASE("constant surge force converges to F/d under linear damping") {
  VehicleParams p = plain6(11.5, 4.0, 0.0, 1.0);
  p.speed_bound = 10.0;
  const double force = 0.4;
  UnderwaterState s{{0, 0, -1, {}}, Vector::Zero(6)};
  for (int k = 0; k < 5000; ++k) s = step(s, vec({force, 0, 0, 0, 0, 0}), kNoWrench, 0.02, p);
  CHECK(s.nu[0] == doctest::Approx(force / 4.0).epsilon(0.01));
}

TEST_CASE("passivity: kinetic energy never grows without input") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> lin(-0.1, 0.1), ang(-0.2, 0.2), dtd(0.005, 0.1);
  const VehicleParams pu = underwater_defaults();
  const VehicleParams ps = surface_defaults();
  for (int trial = 0; trial < 200; ++trial) {
    UnderwaterState u{{0, 0, -1, {ang(rng), ang(rng), ang(rng)}},
                      vec({lin(rng), lin(rng), lin(rng), ang(rng), ang(rng), ang(rng)})};
    SurfaceState s{{0, 0, ang(rng)}, vec({lin(rng), lin(rng), ang(rng)})};
    const double dt = dtd(rng);
    for (int k = 0; k < 100; ++k) {
      const double eu = kinetic_energy(u.nu, pu), es = kinetic_energy(s.nu, ps);
      u = step(u, Vector::Zero(6), kNoWrench, dt, pu);
      s = step(s, Vector::Zero(3), kNoWrench, dt, ps);
      CHECK(kinetic_energy(u.nu, pu) <= eu + 1e-12);
      CHECK(kinetic_energy(s.nu, ps) <= es + 1e-12);
    }
  }
}

TEST_CASE("linear speed norm never exceeds the bound") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> f(-50.0, 50.0);
  const VehicleParams pu = underwater_defaults();
  const VehicleParams ps = surface_defaults();
  UnderwaterState u{{0, 0, -1, {}}, Vector::Zero(6)};
  SurfaceState s{{0, 0, 0}, Vector::Zero(3)};
  bool reached = false;
  for (int k = 0; k < 2000; ++k) {
    const Wrench tu = vec({f(rng), f(rng), f(rng), 0.1 * f(rng), 0.1 * f(rng), 0.1 * f(rng)});
    u = step(u, tu, {Vec3(f(rng), f(rng), f(rng)), Vec3::Zero()}, 0.02, pu);
    s = step(s, vec({f(rng), f(rng), 0.1 * f(rng)}), kNoWrench, 0.02, ps);
    CHECK(u.nu.head<3>().norm() <= pu.speed_bound * (1.0 + 1e-12));
    CHECK(s.nu.head<2>().norm() <= ps.speed_bound * (1.0 + 1e-12));
    reached = reached || u.nu.head<3>().norm() > pu.speed_bound * (1.0 - 1e-9);
  }
  CHECK(reached);
}

TEST_CASE("surface step moves along the heading") {
  const VehicleParams p = surface_defaults();
  SurfaceState s{{0, 0, kPi / 2.0}, Vector::Zero(3)};
  for (int k = 0; k < 500; ++k) s = step(s, allocate_thrust({vec({0.1, 0, 0})}, p), kNoWrench, 0.02, p);
  CHECK(s.pose.y > 0.5);
  CHECK(std::abs(s.pose.x) < 1e-9);
  CHECK(s.nu[0] == doctest::Approx(0.1).epsilon(0.01));
}

TEST_CASE("world disturbance is rotated into the body frame") {
  const VehicleParams p = surface_defaults();
  SurfaceState s{{0, 0, kPi / 2.0}, Vector::Zero(3)};
  s = step(s, Vector::Zero(3), {Vec3(1.0, 0.0, 0.0), Vec3::Zero()}, 0.02, p);
  // World +x is body -y when the heading is +90 deg.
  CHECK(s.nu[1] < 0.0);
  CHECK(std::abs(s.nu[0]) < 1e-12);
}
