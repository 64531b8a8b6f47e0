#include <doctest.h>

#include <random>

#include "vetsim/errors.hpp"
#include "vetsim/metrics.hpp"
#include "vetsim/scenario.hpp"

using namespace vetsim;

namespace {

// Log whose projected distance follows `dist(t)`, sampled every dt.
template <class F>
TrajectoryLog synthetic(double duration, double dt, F dist) {
  TrajectoryLog log;
  log.dt = dt;
  const auto n = static_cast<int>(std::llround(duration / dt));
  for (int k = 0; k <= n; ++k) {
    TickRecord r;
    r.t = k * dt;
    r.underwater = {dist(r.t), 0.0, -1.0, {}};
    r.surface = {0.0, 0.0, 0.0};
    r.underwater_command = ControlInput::zero(6);
    r.surface_command = ControlInput::zero(3);
    r.observation_us.visible = r.observation_su.visible = true;
    log.records.push_back(r);
  }
  return log;
}

}  // namespace

TEST_CASE("projected_distance examples") {
  CHECK(projected_distance(Pose6{3, 4, -1, {}}, Pose3{0, 0, 0}) == doctest::Approx(5.0));
  CHECK(projected_distance(Pose6{1, 1, -2.5, {0.3, 0.2, 1.0}}, Pose3{1, 1, -0.7}) == 0.0);
}

TEST_CASE("projected_distance is a metric on the horizontal plane") {
  std::mt19937_64 rng(40);
  std::uniform_real_distribution<double> c(-5.0, 5.0);
  const auto d = [](double ax, double ay, double bx, double by) {
    return projected_distance(Pose6{ax, ay, -1, {}}, Pose3{bx, by, 0});
  };
  for (int i = 0; i < 5000; ++i) {
    const double ax = c(rng), ay = c(rng), bx = c(rng), by = c(rng), cx = c(rng), cy = c(rng);
    CHECK(d(ax, ay, bx, by) >= 0.0);
    CHECK(d(ax, ay, bx, by) == doctest::Approx(d(bx, by, ax, ay)));
    CHECK(d(ax, ay, cx, cy) <= d(ax, ay, bx, by) + d(bx, by, cx, cy) + 1e-12);
    CHECK(d(ax, ay, ax, ay) == 0.0);
  }
}

TEST_CASE("recovery_time examples") {
  const TrajectoryLog calm = synthetic(10.0, 0.02, [](double) { return 0.1; });
  CHECK(recovery_time(calm, 0.6, 3.0).value() == doctest::Approx(0.0));

  const TrajectoryLog lost = synthetic(20.0, 0.02, [](double t) { return t < 3.0 ? 0.1 : 1.5; });
  CHECK_FALSE(recovery_time(lost, 0.6, 3.0).has_value());

  // Above threshold until t = 5.5, perturbation ends at 4.
  const TrajectoryLog back = synthetic(20.0, 0.02, [](double t) { return t < 5.49 ? 0.9 : 0.2; });
  CHECK(recovery_time(back, 0.6, 4.0).value() == doctest::Approx(1.5));

  // A brief dip shorter than the hold does not count.
  const TrajectoryLog dip = synthetic(20.0, 0.02, [](double t) {
    return (t > 5.0 && t < 5.5) || t > 8.99 ? 0.2 : 0.9;
  });
  CHECK(recovery_time(dip, 0.6, 4.0).value() == doctest::Approx(5.0));
}

TEST_CASE("mission_success") {
  TrajectoryLog none = synthetic(20.0, 0.1, [](double) { return 5.0; });
  none.waypoint_count = 0;
  CHECK(mission_success(none, 0.6));

  TrajectoryLog ok = synthetic(20.0, 0.1, [](double t) { return t < 10.0 ? 2.0 : 0.2; });
  ok.waypoint_count = 3;
  CHECK_FALSE(mission_success(ok, 0.6));  // final waypoint never reached
  ok.records.back().final_waypoint_reached = true;
  CHECK(mission_success(ok, 0.6));
  CHECK_FALSE(mission_success(ok, 0.6, 5.0));
  ok.records[150].underwater.x = 0.7;
  CHECK_FALSE(mission_success(ok, 0.6));
}

TEST_CASE("time_of_los_loss and settling_time") {
  TrajectoryLog log = synthetic(10.0, 0.1, [](double) { return 0.0; });
  CHECK_FALSE(time_of_los_loss(log).has_value());
  log.records[42].observation_su.visible = false;
  CHECK(time_of_los_loss(log).value() == doctest::Approx(4.2));

  CHECK(settling_time(log).value() == 0.0);
  log.records[30].surface_command.u[0] = 0.006;
  CHECK(settling_time(log).value() == doctest::Approx(3.1));
  log.records.back().underwater_command.u[5] = 0.05;
  CHECK_FALSE(settling_time(log).has_value());
}

TEST_CASE("summarize is pure and rejects empty logs") {
  TrajectoryLog log = synthetic(20.0, 0.02, [](double t) { return t < 5.0 ? 0.1 : t < 7.99 ? 1.0 : 0.3; });
  log.perturbation_windows = {{4.0, 6.0}};
  const TrajectoryLog copy = log;
  const RunSummary a = summarize(log, {});
  const RunSummary b = summarize(log, {});
  CHECK(a == b);
  CHECK(log.records.size() == copy.records.size());
  CHECK(a.max_projected_distance == doctest::Approx(1.0));
  CHECK(a.perturbation_end.value() == 6.0);
  CHECK(a.recovery_time_after_perturbation.value() == doctest::Approx(2.0));

  TrajectoryLog one = synthetic(0.0, 0.02, [](double) { return 0.0; });
  CHECK_THROWS_AS(summarize(one, {}), EmptyLog);
  CHECK_THROWS_AS(summarize(TrajectoryLog{}, {}), EmptyLog);
}

TEST_CASE("pose_from_observation examples") {
  const RigidTransform id = RigidTransform::identity();
  const Pose6 p = pose_from_observation(id, id, id);
  CHECK(p.x == 0.0);
  CHECK(p.z == 0.0);

  const Pose6 chain = pose_from_observation(RigidTransform::from_translation({1, 2, 0}),
                                            RigidTransform::from_translation({0, 0, -0.05}),
                                            RigidTransform::from_translation({0.1, 0, 0.9}),
                                            RigidTransform::from_translation({0, 0, 0.05}));
  CHECK(chain.x == doctest::Approx(1.1));
  CHECK(chain.y == doctest::Approx(2.0));
  CHECK(chain.z == doctest::Approx(0.8));
}

TEST_CASE("pose_from_observation recovers the simulated pose through the estimator") {
  CameraModel cam;
  cam.mount = downward_camera_mount();
  TagModel tag;
  tag.mount = upward_camera_mount();
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> off(-0.2, 0.2), depth(-1.5, -0.6), ang(-0.2, 0.2), yaw(-kPi, kPi);
  int tested = 0;
  for (int i = 0; i < 1000; ++i) {
    const Pose3 s{off(rng), off(rng), yaw(rng)};
    const Pose6 u{s.x + off(rng), s.y + off(rng), depth(rng), {ang(rng), ang(rng), yaw(rng)}};
    const RigidTransform ws = pose_to_transform(s);
    const TagObservation obs = project_tag(ws, pose_to_transform(u), cam, tag, 0.0);
    if (!obs.detected) continue;
    ++tested;
    const RigidTransform camera_from_tag = estimate_tag_pose(obs, cam, tag);
    const Pose6 est = pose_from_observation(ws, cam.mount, camera_from_tag, tag.mount);
    CHECK(std::abs(est.x - u.x) < 1e-6);
    CHECK(std::abs(est.y - u.y) < 1e-6);
    CHECK(std::abs(est.z - u.z) < 1e-6);
    CHECK(std::abs(wrap_angle(est.attitude.phi - u.attitude.phi)) < 1e-6);
    CHECK(std::abs(wrap_angle(est.attitude.theta - u.attitude.theta)) < 1e-6);
    CHECK(std::abs(wrap_angle(est.attitude.psi - u.attitude.psi)) < 1e-6);
  }
  CHECK(tested > 500);
}
