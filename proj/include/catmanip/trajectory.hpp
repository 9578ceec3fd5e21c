#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "catmanip/pose.hpp"

namespace catmanip::demo {

using geom::Pose;
using geom::Quat;
using geom::Vec3;

struct Waypoint {
  double t = 0.0;  // seconds
  Pose pose;
};

// Timestamped object poses in a single named frame. Timestamps are strictly
// increasing.
struct Trajectory {
  std::vector<Waypoint> waypoints;
  std::string frame = "receptacle";

  std::size_t size() const { return waypoints.size(); }
  bool empty() const { return waypoints.empty(); }
  const Pose& front_pose() const { return waypoints.front().pose; }
  const Pose& back_pose() const { return waypoints.back().pose; }

  void validate() const;  // throws EmptyTrajectory / DegenerateInput
};

// JSON-lines: one object per line, {"t": seconds, "q": [w,x,y,z], "p": [x,y,z]}
// with translations in meters.
void save_trajectory(const std::filesystem::path& path, const Trajectory& traj);
Trajectory load_trajectory(const std::filesystem::path& path);

}  // namespace catmanip::demo
