#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "vetsim/errors.hpp"
#include "vetsim/output.hpp"
#include "vetsim/scenario.hpp"

using namespace vetsim;

namespace {

ScenarioConfig short_run(std::string_view name, double duration) {
  ScenarioConfig c = preset(name);
  c.duration = duration;
  return c;
}

bool has_event(const TrajectoryLog& log, const std::string& name, double* when = nullptr) {
  for (const auto& r : log.records) {
    if (std::find(r.events.begin(), r.events.end(), name) != r.events.end()) {
      if (when) *when = r.t;
      return true;
    }
  }
  return false;
}

}  // namespace

TEST_CASE("lawnmower_path examples") {
  const auto two = lawnmower_path({0.0, 2.0, 0.0, 1.0, 1.0, 0.1, 0.15});
  REQUIRE(two.size() == 4);
  CHECK(two[0].x == 0.0);
  CHECK(two[1].x == 2.0);
  CHECK(two[2].x == 2.0);
  CHECK(two[2].y == 1.0);
  CHECK(two[3].x == 0.0);
  CHECK(two[1].psi == 0.0);
  CHECK(two[3].psi == doctest::Approx(kPi));

  CHECK(lawnmower_path({0.0, 2.0, 0.0, 1.0, 5.0, 0.1, 0.15}).size() == 2);

  const auto area = lawnmower_path({0.0, 3.6, 0.0, 2.4, 0.6, 0.1, 0.15});
  CHECK(area.size() == 10);
  CHECK(area.back().y == doctest::Approx(2.4));

  CHECK_THROWS_AS(lawnmower_path({0.0, 2.0, 0.0, 1.0, 0.0, 0.1, 0.15}), InvalidBounds);
  CHECK_THROWS_AS(lawnmower_path({2.0, 0.0, 0.0, 1.0, 0.5, 0.1, 0.15}), InvalidBounds);
}

TEST_CASE("lawnmower lane count follows floor(extent / spacing) + 1") {
  for (double extent : {0.3, 1.0, 2.4, 2.5, 3.1}) {
    for (double spacing : {0.25, 0.6, 0.7, 1.3}) {
      const auto wps = lawnmower_path({0.0, 1.0, 0.0, extent, spacing, 0.1, 0.15});
      const auto lanes = static_cast<std::size_t>(std::floor(extent / spacing + 1e-9)) + 1;
      CHECK(wps.size() == 2 * lanes);
      for (std::size_t i = 0; i + 1 < wps.size(); i += 2) {
        CHECK(wps[i].y == wps[i + 1].y);  // each lane is straight
        CHECK(wps[i].x != wps[i + 1].x);
      }
    }
  }
}

TEST_CASE("planner_step advances within the capture radius and holds the last waypoint") {
  const std::vector<SurfaceTarget> wps{{1.0, 0.0, 0.0}, {1.0, 1.0, 0.0}};
  std::size_t i = 0;
  CHECK(planner_step({0.0, 0.0, 0.0}, wps, 0.15, i).x == 1.0);
  CHECK(i == 0);
  CHECK(planner_step({0.9, 0.0, 0.0}, wps, 0.15, i).y == 1.0);
  CHECK(i == 1);
  planner_step({1.0, 1.0, 0.0}, wps, 0.15, i);
  CHECK(i == 1);
  std::size_t j = 0;
  const SurfaceTarget hold = planner_step({0.3, 0.2, 0.1}, {}, 0.15, j);
  CHECK(hold.x == 0.3);
  CHECK(hold.psi == 0.1);
}

TEST_CASE("run: zero duration gives one record, N steps give N + 1") {
  const TrajectoryLog zero = run(short_run("nominal", 0.0));
  CHECK(zero.records.size() == 1);
  CHECK(zero.records[0].t == 0.0);

  const TrajectoryLog ten = run(short_run("nominal", 2.0));
  REQUIRE(ten.records.size() == 101);
  for (std::size_t k = 0; k < ten.records.size(); ++k) {
    CHECK(ten.records[k].t == static_cast<double>(k) * 0.02);
  }
}

TEST_CASE("run is deterministic for a fixed config and seed") {
  ScenarioConfig c = short_run("navigation_real", 90.0);
  c.seed = 42;
  const std::string a = csv_string(run(c));
  CHECK(a == csv_string(run(c)));
  c.seed = 43;
  CHECK(a != csv_string(run(c)));
}

TEST_CASE("events are timestamped where they happen") {
  const TrajectoryLog log = run(short_run("navigation_real", 90.0));
  double t = 0.0;
  REQUIRE(has_event(log, "dropoutUS_start", &t));
  CHECK(t == doctest::Approx(71.0));
  REQUIRE(has_event(log, "dropoutUS_end", &t));
  CHECK(t > 77.0 - 1e-9);  // first tick past the closed window
  CHECK(t <= 77.0 + log.dt + 1e-9);
  int starts = 0;
  for (const auto& r : log.records) starts += static_cast<int>(std::count(r.events.begin(), r.events.end(), "dropoutUS_start"));
  CHECK(starts == 2);
  CHECK(has_event(log, "regionUS=lost"));
  CHECK(has_event(log, "regionUS=safe"));

  const TrajectoryLog p = run(short_run("perturbation_sim", 30.0));
  REQUIRE(p.perturbation_windows.size() == 1);
  REQUIRE(has_event(p, "perturbation_start", &t));
  CHECK(t == doctest::Approx(p.perturbation_windows[0].first));
  REQUIRE(has_event(p, "perturbation_end", &t));
  // First tick at or after the window end.
  CHECK(t >= p.perturbation_windows[0].second - 1e-9);
  CHECK(t < p.perturbation_windows[0].second + p.dt + 1e-9);
  CHECK(p.records.front().underwater.y < 0.75);
}

TEST_CASE("nominal run stays inside the tank") {
  const ScenarioConfig c = preset("nominal");
  const TrajectoryLog log = run(c);
  for (const auto& r : log.records) {
    CHECK(c.tank.contains(r.underwater));
    CHECK(c.tank.contains(r.surface.x, r.surface.y));
  }
  CHECK(log.records.back().final_waypoint_reached);
}

TEST_CASE("soft walls clamp and are logged") {
  ScenarioConfig c = short_run("nominal", 20.0);
  c.tank.x_min = -0.3;
  c.perturbations = {{Vec3(-8.0, 0.0, 0.0), Vec3::Zero(), 0.0, 20.0, std::nullopt}};
  const TrajectoryLog log = run(c);
  for (const auto& r : log.records) CHECK(c.tank.contains(r.underwater));
  double t = 0.0;
  REQUIRE(has_event(log, "wall_U", &t));
  CHECK(t > 2.0);
  CHECK(log.records.back().underwater.x == doctest::Approx(-0.3));
}

TEST_CASE("presets") {
  for (auto name : kPresetNames) {
    const ScenarioConfig c = preset(name);
    CHECK(c.name == name);
    CHECK_NOTHROW(c.validate());
    CHECK(c.dt == 0.02);
  }
  CHECK_THROWS_AS(preset("exp4"), UnknownPreset);

  const ScenarioConfig n = preset("nominal");
  CHECK(n.underwater_initial == Pose6{0, 0, -1, {0, 0, 0}});
  CHECK(n.surface_initial == Pose3{0, 0, 0});
  const auto& sp = std::get<SetpointPlanner>(n.planner);
  REQUIRE(sp.waypoints.size() == 1);
  CHECK(sp.waypoints[0].x == 1.0);
  CHECK(sp.waypoints[0].y == 1.0);
  CHECK(sp.waypoints[0].psi == -1.57);
  CHECK(n.underwater_target.z == -1.0);

  const ScenarioConfig r = preset("perturbation_real");
  CHECK(r.formation_threshold == 0.3);
  CHECK(r.surface_pd.kp[0] == 1.0);
  CHECK(r.surface_pd.kd[0] == 0.5);
  CHECK(preset("perturbation_sim").formation_threshold == 0.6);

  const auto p = preset("perturbation_sim").perturbations;
  REQUIRE(p.size() == 1);
  CHECK(p[0].force.x() < 0.0);
  CHECK(p[0].trigger_y.value() == 0.75);

  CHECK(preset("navigation_real").underwater_dropout.windows.size() == 2);
  CHECK(lawnmower_path(std::get<LawnmowerPlanner>(preset("navigation_sim").planner)).size() == 10);
}

TEST_CASE("validate rejects bad configs") {
  ScenarioConfig c = preset("nominal");
  c.dt = 0.2;
  CHECK_THROWS_AS(c.validate(), ConfigInvalid);
  c = preset("nominal");
  c.surface_initial.x = 10.0;
  CHECK_THROWS_AS(c.validate(), ConfigInvalid);
  c = preset("nominal");
  c.planner = SetpointPlanner{{{20.0, 0.0, 0.0}}, 0.15, 0.1};
  CHECK_THROWS_AS(c.validate(), ConfigInvalid);
  c = preset("nominal");
  c.planner = LawnmowerPlanner{0.0, 1.0, 0.0, 1.0, 0.0, 0.1, 0.15};
  CHECK_THROWS_AS(run(c), ConfigInvalid);
}
