#pragma once

#include <functional>

#include "catmanip/plant.hpp"
#include "catmanip/trajectory.hpp"
#include "catmanip/nunocs.hpp"

namespace catmanip::catbc {

using demo::Trajectory;
using nunocs::SymmetryGroup;

struct ControlParams {
  double goal_tol_trans = 0.0005;                     // meters
  double goal_tol_rot = 0.5 * M_PI / 180.0;           // radians
  double max_step_trans = 0.001;                      // meters per tick
  double max_step_rot = 1.0 * M_PI / 180.0;           // radians per tick
  long timeout_ticks = 0;  // 0 selects 50 ticks per subgoal
};

struct TickTrace {
  long tick = 0;
  int subgoal = 0;
  geom::Pose true_pose;
  geom::Pose believed_pose;
  bool contact = false;
};

struct RunResult {
  bool reached_goal = false;
  bool timed_out = false;
  long ticks = 0;
  int subgoals_total = 0;
  int subgoals_reached = 0;
  geom::Pose grasp_slip;
  geom::Pose final_true_pose;
  geom::Pose final_believed_pose;
  std::vector<TickTrace> trace;
};

using FeasiblePredicate = std::function<bool(const geom::Pose&)>;

// Closed-loop execution: each tick reads the (delayed, noisy) tracked pose,
// picks the nearest symmetry-equivalent of the current subgoal, commands a
// capped world-frame increment toward it, and advances when the believed pose
// is within tolerance. Grasp slip is applied once at the start and is visible
// to the tracker.
RunResult run_catbc(const Trajectory& target, Plant& plant,
                    const TrackerModel& tracker, const SymmetryGroup& symmetry,
                    const ControlParams& params = {},
                    const FeasiblePredicate& feasible = nullptr);

// Open-loop variant: the believed pose is the commanded kinematic pose, so
// the grasp slip (applied after the last pose estimate) goes unobserved and
// is carried to the end.
RunResult run_open_loop(const Trajectory& target, Plant& plant,
                        const SymmetryGroup& symmetry,
                        const ControlParams& params = {},
                        const FeasiblePredicate& feasible = nullptr);

// Collision-checked transfer motion: lift straight up, translate (and rotate)
// at height, descend onto the keypose. Every sample along the path must stay
// strictly outside the scene; PathBlocked otherwise. Returns the sampled
// trajectory ending exactly at `keypose`.
Trajectory transport_to_keypose(const geom::Pose& start, const geom::Pose& keypose,
                                const attention::SdfScene& scene,
                                const geom::PointCloud& model,
                                double lift_height = 0.15,
                                double sample_step = 0.001);

}  // namespace catmanip::catbc
