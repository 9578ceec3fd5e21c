#pragma once

#include <filesystem>
#include <functional>

#include "catmanip/nunocs.hpp"
#include "catmanip/sdf.hpp"
#include "catmanip/trajectory.hpp"

namespace catmanip::demo {

using attention::SdfScene;
using geom::PointCloud;
using nunocs::SymmetryGroup;

// Raw recording of one human demonstration, as a perception system would
// produce it: everything is expressed in the camera frame, and the object
// motion is stored as relative transforms against the first frame.
struct DemoLog {
  Pose initial_pose;            // object in camera frame at the first frame
  Pose receptacle_pose;         // receptacle in camera frame
  Pose camera_to_robot;         // camera frame -> robot base frame
  std::vector<Waypoint> relative_motions;  // pose = motion since frame 0
};

// JSON-lines: a header record carrying the three poses, then one record per
// frame {"t": ..., "q": [w,x,y,z], "p": [x,y,z]} holding the relative motion.
void save_demo_log(const std::filesystem::path& path, const DemoLog& log);
DemoLog load_demo_log(const std::filesystem::path& path);

// Object trajectory in the receptacle frame: each relative motion is composed
// onto the initial pose and the result re-expressed relative to the
// receptacle. The camera-to-robot extrinsic participates in the chain (and
// cancels exactly, which is checked by tests). The first relative motion must
// be the identity within 1e-9.
Trajectory parse_demo(const DemoLog& log);

// Inverse of parse_demo: fabricate the camera-frame log a recording of this
// receptacle-frame trajectory would have produced.
DemoLog synth_demo_log(const Trajectory& traj, const Pose& receptacle_in_camera,
                       const Pose& camera_to_robot);

// First waypoint whose closest model point comes within `threshold` meters of
// the scene surface; the last index if none does. The tail from this index on
// is the contact-rich part worth transferring.
int detect_keypose(const Trajectory& traj, const PointCloud& model,
                   const SdfScene& scene, double threshold = 0.05);

// Greedy sparsification: keep the first waypoint, then any waypoint at least
// `min_translation` meters or `min_rotation` radians from the last kept one,
// and always the final waypoint.
Trajectory discretize(const Trajectory& traj, double min_translation = 0.002,
                      double min_rotation = 2.0 * M_PI / 180.0);

// Picks, among the symmetry-equivalent poses of `subgoal` (group elements
// right-composed in the object's model frame), the candidate closest to
// `current` (rotation geodesic first, then translation, then group index)
// that satisfies `feasible`. Throws NoFeasibleSubgoal when none passes.
Pose select_symmetric_subgoal(const Pose& current, const Pose& subgoal,
                              const SymmetryGroup& symmetry,
                              const std::function<bool(const Pose&)>& feasible);

}  // namespace catmanip::demo
