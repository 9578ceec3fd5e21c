#include "catmanip/catbc.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "catmanip/demo.hpp"
#include "catmanip/errors.hpp"

namespace catmanip::catbc {

namespace {

bool within_tolerance(const geom::Pose& a, const geom::Pose& b,
                      const ControlParams& params) {
  return geom::translation_distance(a, b) <= params.goal_tol_trans &&
         geom::rotation_distance(a, b) <= params.goal_tol_rot;
}

geom::Pose add_tracker_noise(const geom::Pose& pose, const TrackerModel& tracker,
                             Rng& rng) {
  if (tracker.sigma_trans <= 0.0 && tracker.sigma_rot <= 0.0) return pose;
  const geom::Vec3 dt = rng.normal3(tracker.sigma_trans);
  const geom::Vec3 axis = rng.unit_vector();
  const double angle = rng.normal(0.0, tracker.sigma_rot);
  return geom::Pose(pose.rotation * geom::quat_from_axis_angle(axis, angle),
                    pose.translation + dt);
}

// Proportional gain on the residual error. With a one-tick estimate delay
// the error obeys e(t+1) = e(t) - g*e(t-1); any g < 1 is stable, g = 0.5
// damps at |lambda| = sqrt(0.5) per tick while leaving saturated (step-capped)
// motion at full speed. g = 1 would orbit a period-6 limit cycle forever.
constexpr double kGain = 0.5;

// Capped step from `believed` toward `selected`, returned as the commanded
// absolute pose.
geom::Pose capped_command(const geom::Pose& believed, const geom::Pose& selected,
                          const ControlParams& params) {
  const double dt = geom::translation_distance(believed, selected);
  const double dr = geom::rotation_distance(believed, selected);
  double s = kGain;
  if (dt * s > params.max_step_trans) s = params.max_step_trans / dt;
  if (dr * s > params.max_step_rot) s = std::min(s, params.max_step_rot / dr);
  return geom::interpolate(believed, selected, s);
}

enum class BeliefSource { Tracker, Kinematic };

RunResult run_policy(const Trajectory& target, Plant& plant,
                     const TrackerModel& tracker, const SymmetryGroup& symmetry,
                     const ControlParams& params, const FeasiblePredicate& feasible,
                     BeliefSource belief_source) {
  target.validate();
  const std::size_t n = target.size();
  const long timeout = params.timeout_ticks > 0
                           ? params.timeout_ticks
                           : 50 * static_cast<long>(n);

  RunResult res;
  res.subgoals_total = static_cast<int>(n);

  // The kinematic belief is frozen at the last estimate before grasping; the
  // tracker instead observes the slipped pose from the first tick on.
  geom::Pose kinematic_belief = plant.true_pose();
  res.grasp_slip = plant.apply_grasp_slip();

  const std::size_t latency =
      belief_source == BeliefSource::Tracker
          ? static_cast<std::size_t>(std::max(0, tracker.latency_ticks))
          : 0;
  std::deque<geom::Pose> history(latency + 1, plant.true_pose());

  std::size_t k = 0;
  for (long step = 0; step < timeout; ++step) {
    geom::Pose believed =
        belief_source == BeliefSource::Tracker
            ? add_tracker_noise(history.front(), tracker, plant.rng())
            : kinematic_belief;

    geom::Pose selected =
        demo::select_symmetric_subgoal(believed, target.waypoints[k].pose,
                                       symmetry, feasible);
    while (k + 1 < n && within_tolerance(believed, selected, params)) {
      ++k;
      selected = demo::select_symmetric_subgoal(believed, target.waypoints[k].pose,
                                                symmetry, feasible);
    }
    // The terminal subgoal is held to half tolerance: the estimate is one
    // tick stale, so declaring at the full tolerance could leave the true
    // pose just outside it.
    if (k + 1 == n &&
        geom::translation_distance(believed, selected) <= 0.5 * params.goal_tol_trans &&
        geom::rotation_distance(believed, selected) <= 0.5 * params.goal_tol_rot) {
      res.reached_goal = true;
      res.final_believed_pose = believed;
      break;
    }

    const geom::Pose commanded = capped_command(believed, selected, params);
    const geom::Pose increment = compose(commanded, believed.inverse());
    plant.step_to(compose(increment, plant.true_pose()));
    if (belief_source == BeliefSource::Kinematic) kinematic_belief = commanded;
    history.push_back(plant.true_pose());
    history.pop_front();

    TickTrace trace;
    trace.tick = plant.tick() - 1;
    trace.subgoal = static_cast<int>(k);
    trace.true_pose = plant.true_pose();
    trace.believed_pose = believed;
    trace.contact = plant.last_contact();
    res.trace.push_back(trace);
    res.ticks = step + 1;
    res.final_believed_pose = believed;
  }

  res.timed_out = !res.reached_goal;
  res.subgoals_reached = static_cast<int>(k) + (res.reached_goal ? 1 : 0);
  res.final_true_pose = plant.true_pose();
  return res;
}

}  // namespace

RunResult run_catbc(const Trajectory& target, Plant& plant,
                    const TrackerModel& tracker, const SymmetryGroup& symmetry,
                    const ControlParams& params, const FeasiblePredicate& feasible) {
  return run_policy(target, plant, tracker, symmetry, params, feasible,
                    BeliefSource::Tracker);
}

RunResult run_open_loop(const Trajectory& target, Plant& plant,
                        const SymmetryGroup& symmetry, const ControlParams& params,
                        const FeasiblePredicate& feasible) {
  return run_policy(target, plant, TrackerModel{}, symmetry, params, feasible,
                    BeliefSource::Kinematic);
}

Trajectory transport_to_keypose(const geom::Pose& start, const geom::Pose& keypose,
                                const attention::SdfScene& scene,
                                const geom::PointCloud& model, double lift_height,
                                double sample_step) {
  if (lift_height < 0.0 || sample_step <= 0.0) {
    throw DegenerateInput("transport parameters must be positive");
  }
  const geom::Vec3 lift(0.0, 0.0, lift_height);
  const geom::Pose corners[4] = {
      start,
      geom::Pose(start.rotation, start.translation + lift),
      geom::Pose(keypose.rotation, keypose.translation + lift),
      keypose,
  };

  Trajectory traj;
  traj.frame = "receptacle";
  double t = 0.0;
  const double dt = 0.1;
  for (int seg = 0; seg < 3; ++seg) {
    const geom::Pose& a = corners[seg];
    const geom::Pose& b = corners[seg + 1];
    const double span = std::max(geom::translation_distance(a, b),
                                 geom::rotation_distance(a, b) * 0.05);
    const int steps = std::max(1, static_cast<int>(std::ceil(span / sample_step)));
    for (int i = seg == 0 ? 0 : 1; i <= steps; ++i) {
      const geom::Pose sample = geom::interpolate(a, b, double(i) / steps);
      if (scene.min_distance(model, sample) <= 0.0) {
        throw PathBlocked("transport segment " + std::to_string(seg) +
                          " collides with the scene");
      }
      traj.waypoints.push_back({t, sample});
      t += dt;
    }
  }
  traj.validate();
  return traj;
}

}  // namespace catmanip::catbc
