#include <doctest.h>

#include <cmath>

#include "catmanip/catbc.hpp"
#include "catmanip/errors.hpp"
#include "catmanip/success.hpp"

using namespace catmanip;
using attention::SdfPrimitive;
using attention::SdfScene;
using catbc::ControlParams;
using catbc::DisturbanceModel;
using catbc::Plant;
using catbc::RunResult;
using catbc::TrackerModel;
using demo::Trajectory;
using geom::Pose;
using geom::Vec3;
using nunocs::SymmetryGroup;

namespace {

SdfScene floor_scene() {
  SdfScene scene;
  scene.primitives.push_back(SdfPrimitive::plane(Pose::identity(), "floor"));
  return scene;
}

geom::PointCloud point_model() {
  geom::PointCloud cloud;
  cloud.points = {Vec3::Zero()};
  return cloud;
}

Trajectory descent(std::initializer_list<double> heights) {
  Trajectory traj;
  int i = 0;
  for (double z : heights) {
    traj.waypoints.push_back({double(i++), Pose::from_translation(Vec3(0, 0, z))});
  }
  return traj;
}

double pose_gap(const Pose& a, const Pose& b) {
  return geom::rotation_distance(a, b) + geom::translation_distance(a, b);
}

bool same_pose_bits(const Pose& a, const Pose& b) {
  return a.translation == b.translation &&
         a.rotation.coeffs() == b.rotation.coeffs();
}

}  // namespace

TEST_CASE("with no noise and no latency, closed and open loop run identically") {
  const Trajectory target = descent({0.04, 0.03, 0.02, 0.01});
  const Pose start = Pose::from_translation(Vec3(0.01, -0.005, 0.05));
  Plant closed_plant(floor_scene(), point_model(), start, 11);
  Plant open_plant(floor_scene(), point_model(), start, 11);

  const RunResult closed =
      catbc::run_catbc(target, closed_plant, TrackerModel{0.0, 0.0, 0},
                       SymmetryGroup::identity_only());
  const RunResult open = catbc::run_open_loop(target, open_plant,
                                              SymmetryGroup::identity_only());

  CHECK(closed.reached_goal);
  CHECK(open.reached_goal);
  REQUIRE(closed.trace.size() == open.trace.size());
  for (std::size_t i = 0; i < closed.trace.size(); ++i) {
    CHECK(pose_gap(closed.trace[i].true_pose, open.trace[i].true_pose) < 1e-9);
    CHECK(pose_gap(closed.trace[i].believed_pose, open.trace[i].believed_pose) <
          1e-9);
    CHECK(closed.trace[i].subgoal == open.trace[i].subgoal);
  }
}

TEST_CASE("noiseless closed loop walks the whole trajectory into tolerance") {
  const Trajectory target = descent({0.05, 0.04, 0.03, 0.02, 0.01});
  Plant plant(floor_scene(), point_model(),
              Pose::from_translation(Vec3(0, 0, 0.06)), 12);
  const ControlParams params;
  const RunResult res = catbc::run_catbc(target, plant, TrackerModel{},
                                         SymmetryGroup::identity_only(), params);

  CHECK(res.reached_goal);
  CHECK(!res.timed_out);
  CHECK(res.subgoals_total == 5);
  CHECK(res.subgoals_reached == 5);
  CHECK(geom::translation_distance(res.final_true_pose,
                                   target.back_pose()) <= params.goal_tol_trans);
  CHECK(geom::rotation_distance(res.final_true_pose, target.back_pose()) <=
        params.goal_tol_rot);
  CHECK(res.ticks == static_cast<long>(res.trace.size()));

  // Ticks count up from zero; subgoal indices never go backwards.
  for (std::size_t i = 0; i < res.trace.size(); ++i) {
    CHECK(res.trace[i].tick == static_cast<long>(i));
    if (i > 0) CHECK(res.trace[i].subgoal >= res.trace[i - 1].subgoal);
  }
}

TEST_CASE("closed loop corrects an unobserved grasp slip; open loop carries it") {
  const Trajectory target = descent({0.05, 0.04, 0.03, 0.02, 0.01});
  const Pose start = Pose::from_translation(Vec3(0, 0, 0.06));
  DisturbanceModel disturbance;
  disturbance.grasp_slip_sigma_trans = 0.002;
  disturbance.grasp_slip_sigma_rot = 3.0 * M_PI / 180.0;
  const ControlParams params;

  Plant closed_plant(floor_scene(), point_model(), start, 301, disturbance);
  const RunResult closed =
      catbc::run_catbc(target, closed_plant, TrackerModel{0.0, 0.0, 1},
                       SymmetryGroup::identity_only(), params);
  CHECK(closed.reached_goal);
  CHECK(closed.grasp_slip.translation.norm() > 0.0);
  CHECK(geom::translation_distance(closed.final_true_pose, target.back_pose()) <=
        params.goal_tol_trans);
  CHECK(geom::rotation_distance(closed.final_true_pose, target.back_pose()) <=
        params.goal_tol_rot);

  Plant open_plant(floor_scene(), point_model(), start, 301, disturbance);
  const RunResult open = catbc::run_open_loop(target, open_plant,
                                              SymmetryGroup::identity_only(),
                                              params);
  // Same seed, same draw.
  CHECK(same_pose_bits(open.grasp_slip, closed.grasp_slip));
  // The controller believes it converged...
  CHECK(open.reached_goal);
  CHECK(geom::translation_distance(open.final_believed_pose,
                                   target.back_pose()) <= params.goal_tol_trans);
  // ...but in free space the slip survives verbatim on the true pose.
  CHECK(pose_gap(open.final_true_pose,
                 compose(open.final_believed_pose, open.grasp_slip)) < 1e-9);
  CHECK(geom::translation_distance(open.final_true_pose, target.back_pose()) >
        params.goal_tol_trans);
}

TEST_CASE("a mid-run push delays the closed loop but does not defeat it") {
  const Trajectory target = descent({0.05, 0.04, 0.03, 0.02, 0.01});
  const Pose start = Pose::from_translation(Vec3(0, 0, 0.06));
  const ControlParams params;

  Plant quiet(floor_scene(), point_model(), start, 13);
  const RunResult baseline = catbc::run_catbc(
      target, quiet, TrackerModel{0.0, 0.0, 1}, SymmetryGroup::identity_only(),
      params);
  REQUIRE(baseline.reached_goal);

  DisturbanceModel disturbance;
  disturbance.pushes.push_back({15, Vec3(0.005, 0, 0)});
  Plant pushed(floor_scene(), point_model(), start, 13, disturbance);
  const RunResult res = catbc::run_catbc(target, pushed,
                                         TrackerModel{0.0, 0.0, 1},
                                         SymmetryGroup::identity_only(), params);
  CHECK(res.reached_goal);
  // The push lands during the step recorded at trace[15]: the true pose is
  // knocked 5 mm off the (otherwise exactly centered) descent line, and the
  // loop still pulls it back onto the goal.
  REQUIRE(res.trace.size() > 15);
  REQUIRE(baseline.trace.size() > 15);
  CHECK(baseline.trace[15].true_pose.translation.x() == 0.0);
  CHECK(std::abs(res.trace[15].true_pose.translation.x() - 0.005) < 1e-12);
  CHECK(geom::translation_distance(res.final_true_pose, target.back_pose()) <=
        params.goal_tol_trans);
}

TEST_CASE("tracker latency delays the belief by exactly its tick count") {
  Trajectory target;
  target.waypoints.push_back({0.0, Pose::from_translation(Vec3(0, 0, 0.4))});
  const Pose start = Pose::from_translation(Vec3(0, 0, 0.5));
  const int latency = 3;

  Plant plant(floor_scene(), point_model(), start, 14);
  ControlParams params;
  params.timeout_ticks = 40;
  const RunResult res =
      catbc::run_catbc(target, plant, TrackerModel{0.0, 0.0, latency},
                       SymmetryGroup::identity_only(), params);

  REQUIRE(res.trace.size() >= 10);
  for (std::size_t s = 0; s < res.trace.size(); ++s) {
    if (s < static_cast<std::size_t>(latency) + 1) {
      CHECK(same_pose_bits(res.trace[s].believed_pose, start));
    } else {
      CHECK(same_pose_bits(res.trace[s].believed_pose,
                           res.trace[s - latency - 1].true_pose));
    }
  }
}

TEST_CASE("timeout: an unreachable target stops at the tick budget") {
  Trajectory target;
  target.waypoints.push_back({0.0, Pose::from_translation(Vec3(10.0, 0, 0.5))});
  Plant plant(floor_scene(), point_model(),
              Pose::from_translation(Vec3(0, 0, 0.5)), 15);
  ControlParams params;
  params.timeout_ticks = 20;
  const RunResult res = catbc::run_catbc(target, plant, TrackerModel{},
                                         SymmetryGroup::identity_only(), params);
  CHECK(!res.reached_goal);
  CHECK(res.timed_out);
  CHECK(res.ticks == 20);
  CHECK(res.trace.size() == 20);
  CHECK(res.subgoals_reached == 0);

  // Default budget: 50 ticks per subgoal.
  Plant plant2(floor_scene(), point_model(),
               Pose::from_translation(Vec3(0, 0, 0.5)), 16);
  const RunResult res2 = catbc::run_catbc(target, plant2, TrackerModel{},
                                          SymmetryGroup::identity_only());
  CHECK(res2.timed_out);
  CHECK(res2.ticks == 50);
}

TEST_CASE("an always-infeasible predicate surfaces as NoFeasibleSubgoal") {
  Trajectory target;
  target.waypoints.push_back({0.0, Pose::from_translation(Vec3(0, 0, 0.4))});
  Plant plant(floor_scene(), point_model(),
              Pose::from_translation(Vec3(0, 0, 0.5)), 17);
  CHECK_THROWS_AS(
      catbc::run_catbc(target, plant, TrackerModel{},
                       SymmetryGroup::identity_only(), ControlParams{},
                       [](const Pose&) { return false; }),
      NoFeasibleSubgoal);
}

TEST_CASE("transport_to_keypose lifts over obstacles and ends on the keypose") {
  const Pose start = Pose::from_translation(Vec3(-0.1, 0, 0.02));
  const Pose keypose = Pose::from_translation(Vec3(0.1, 0, 0.02));

  SdfScene clear = floor_scene();
  const Trajectory direct =
      catbc::transport_to_keypose(start, keypose, clear, point_model());
  REQUIRE(direct.size() > 10);
  CHECK(pose_gap(direct.front_pose(), start) < 1e-12);
  CHECK(pose_gap(direct.back_pose(), keypose) < 1e-12);
  for (std::size_t i = 1; i < direct.size(); ++i) {
    CHECK(direct.waypoints[i].t > direct.waypoints[i - 1].t);
  }

  // A low wall between start and keypose: the lift clears it...
  SdfScene walled = floor_scene();
  walled.primitives.push_back(SdfPrimitive::box(
      Pose::from_translation(Vec3(0, 0, 0.05)), Vec3(0.01, 0.2, 0.05)));
  const Trajectory over =
      catbc::transport_to_keypose(start, keypose, walled, point_model());
  for (const auto& wp : over.waypoints) {
    CHECK(walled.min_distance(point_model(), wp.pose) > 0.0);
  }

  // ...but a wall taller than the lift height blocks the path.
  SdfScene tall = floor_scene();
  tall.primitives.push_back(SdfPrimitive::box(
      Pose::from_translation(Vec3(0, 0, 0.25)), Vec3(0.01, 0.2, 0.25)));
  CHECK_THROWS_AS(
      catbc::transport_to_keypose(start, keypose, tall, point_model()),
      PathBlocked);

  CHECK_THROWS_AS(catbc::transport_to_keypose(start, keypose, clear,
                                              point_model(), -0.1),
                  DegenerateInput);
  CHECK_THROWS_AS(catbc::transport_to_keypose(start, keypose, clear,
                                              point_model(), 0.15, 0.0),
                  DegenerateInput);
}

TEST_CASE("standing checker: success, each failure mode, boundary support") {
  catbc::StandingGeometry geo;
  geo.platform_radius = 0.011;
  geo.platform_top_z = 0.0;
  geo.base_radius = 0.007;
  geo.half_height = 0.024;

  const Pose upright = Pose::from_translation(Vec3(0.001, 0, 0.024));
  auto rep = catbc::check_standing(upright, geo);
  CHECK(rep.success);
  CHECK(rep.reason.empty());

  // A small tilt changes the resting height of the center.
  const double tilt = 4.0 * M_PI / 180.0;
  const Pose leaning(geom::quat_from_axis_angle(Vec3::UnitX(), tilt),
                     Vec3(0, 0, 0.024 * std::cos(tilt)));
  CHECK(catbc::check_standing(leaning, geo).success);

  const Pose fallen(geom::quat_from_axis_angle(Vec3::UnitX(), M_PI / 2),
                    Vec3(0, 0, 0.007));
  CHECK(!catbc::check_standing(fallen, geo).success);
  CHECK(catbc::check_standing(fallen, geo).reason.find("tilt") !=
        std::string::npos);

  const Pose floating = Pose::from_translation(Vec3(0, 0, 0.029));
  CHECK(!catbc::check_standing(floating, geo).success);
  CHECK(catbc::check_standing(floating, geo).reason ==
        "base not resting at platform height");

  const Pose overhang = Pose::from_translation(Vec3(0.006, 0, 0.024));
  CHECK(catbc::check_standing(overhang, geo).reason ==
        "base circle overhangs the platform edge");

  // Base circle exactly flush with the platform edge still counts.
  const Pose flush = Pose::from_translation(Vec3(0.004, 0, 0.024));
  CHECK(catbc::check_standing(flush, geo).success);

  catbc::StandingGeometry bad = geo;
  bad.base_radius = 0.0;
  CHECK_THROWS_AS(catbc::check_standing(upright, bad), InvalidGeometry);
}

TEST_CASE("insertion checker: engagement, clearance budget, boundaries") {
  catbc::InsertionGeometry geo;
  geo.hole_radius = 0.0055;
  geo.shaft_radius = 0.005;
  geo.hole_half_length = 0.004;
  geo.required_engage = 0.005;
  geo.shaft_base_z = 0.0;
  geo.shaft_top_z = 0.02;

  CHECK(catbc::check_insertion(Pose::from_translation(Vec3(0, 0, 0.004)), geo)
            .success);

  // Offset exactly equal to the clearance sits on the success boundary.
  CHECK(catbc::check_insertion(Pose::from_translation(Vec3(0.0005, 0, 0.004)),
                               geo)
            .success);
  CHECK(catbc::check_insertion(Pose::from_translation(Vec3(0.0006, 0, 0.004)),
                               geo)
            .reason == "lateral offset plus tilt exceeds clearance");

  CHECK(catbc::check_insertion(Pose::from_translation(Vec3(0, 0, 0.024)), geo)
            .reason == "axial engagement too shallow");

  // Tilt spends clearance budget: 3 deg costs required_engage * sin(3 deg).
  const double tilt = 3.0 * M_PI / 180.0;
  const Pose tilted_ok(geom::quat_from_axis_angle(Vec3::UnitY(), tilt),
                       Vec3(0.0002, 0, 0.004));
  CHECK(catbc::check_insertion(tilted_ok, geo).success);
  const Pose tilted_out(geom::quat_from_axis_angle(Vec3::UnitY(), tilt),
                        Vec3(0.0003, 0, 0.004));
  CHECK(catbc::check_insertion(tilted_out, geo).reason ==
        "lateral offset plus tilt exceeds clearance");

  catbc::InsertionGeometry swapped = geo;
  swapped.shaft_radius = 0.006;
  CHECK_THROWS_AS(catbc::check_insertion(Pose::identity(), swapped),
                  InvalidGeometry);
  catbc::InsertionGeometry flat = geo;
  flat.hole_half_length = 0.0;
  CHECK_THROWS_AS(catbc::check_insertion(Pose::identity(), flat),
                  InvalidGeometry);
}

TEST_CASE("assembly checker: spring compression at wall clearance is mandatory") {
  catbc::AssemblyGeometry geo;
  geo.wall_x = 0.0;
  geo.wall_top_z = 0.01;
  geo.inner_length = 0.05;
  geo.spring_natural = 0.016;
  geo.object_length = 0.046;
  geo.neg_end_local = Vec3(0, 0, -0.023);
  geo.pos_end_local = Vec3(0, 0, 0.023);

  const geom::Quat lying = geom::quat_from_axis_angle(Vec3::UnitY(), M_PI / 2);
  auto tick_at = [&](double cx, double cz) {
    catbc::TickTrace t;
    t.true_pose = Pose(lying, Vec3(cx, 0, cz));
    return t;
  };

  // Approach high, press the spring to 3 mm while dropping in, settle captive.
  std::vector<catbc::TickTrace> good = {tick_at(0.030, 0.050),
                                        tick_at(0.026, 0.005)};
  const Pose settled(lying, Vec3(0.026, 0, 0.005));
  auto rep = catbc::check_assembly(good, settled, geo);
  CHECK(rep.success);

  // Never dropping below the wall top means never entering the slot.
  std::vector<catbc::TickTrace> high = {tick_at(0.030, 0.050),
                                        tick_at(0.026, 0.030)};
  CHECK(catbc::check_assembly(high, settled, geo).reason ==
        "positive end never entered the slot");

  // A shorter object can clear the wall without pressing the spring enough.
  catbc::AssemblyGeometry short_geo = geo;
  short_geo.object_length = 0.030;
  short_geo.neg_end_local = Vec3(0, 0, -0.015);
  short_geo.pos_end_local = Vec3(0, 0, 0.015);
  std::vector<catbc::TickTrace> lazy = {tick_at(0.030, 0.005)};
  CHECK(catbc::check_assembly(lazy, Pose(lying, Vec3(0.030, 0, 0.005)),
                              short_geo)
            .reason == "spring not pressed to half length at wall clearance");

  // Cleared correctly but released too far: the spring lets go of the object.
  std::vector<catbc::TickTrace> loose = {tick_at(0.019, 0.005)};
  CHECK(catbc::check_assembly(loose, Pose(lying, Vec3(0.032, 0, 0.005)),
                              short_geo)
            .reason == "spring fully extended: object not captive");

  catbc::AssemblyGeometry bad = geo;
  bad.object_length = 0.0;
  CHECK_THROWS_AS(catbc::check_assembly(good, settled, bad), InvalidGeometry);
}
