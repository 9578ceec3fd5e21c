#include "catmanip/trajectory.hpp"

#include <fstream>
#include <json.hpp>

#include "catmanip/errors.hpp"

namespace catmanip::demo {

using nlohmann::json;

void Trajectory::validate() const {
  if (waypoints.empty()) throw EmptyTrajectory("trajectory has no waypoints");
  for (std::size_t i = 0; i < waypoints.size(); ++i) {
    if (!std::isfinite(waypoints[i].t) || !waypoints[i].pose.is_finite()) {
      throw DegenerateInput("non-finite trajectory entry");
    }
    if (i > 0 && waypoints[i].t <= waypoints[i - 1].t) {
      throw DegenerateInput("trajectory timestamps must strictly increase");
    }
  }
}

namespace {

json pose_to_json(double t, const Pose& pose) {
  return json{{"t", t},
              {"q", {pose.rotation.w(), pose.rotation.x(), pose.rotation.y(),
                     pose.rotation.z()}},
              {"p", {pose.translation.x(), pose.translation.y(),
                     pose.translation.z()}}};
}

Pose pose_from_json(const json& rec) {
  const auto& q = rec.at("q");
  const auto& p = rec.at("p");
  if (q.size() != 4 || p.size() != 3) {
    throw Io("trajectory record with malformed q/p");
  }
  return Pose(Quat(q[0].get<double>(), q[1].get<double>(), q[2].get<double>(),
                   q[3].get<double>()),
              Vec3(p[0].get<double>(), p[1].get<double>(), p[2].get<double>()));
}

}  // namespace

void save_trajectory(const std::filesystem::path& path, const Trajectory& traj) {
  traj.validate();
  std::ofstream out(path);
  if (!out) throw Io("cannot write " + path.string());
  for (const Waypoint& wp : traj.waypoints) {
    out << pose_to_json(wp.t, wp.pose).dump() << '\n';
  }
  if (!out) throw Io("write failed: " + path.string());
}

Trajectory load_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifact("cannot open " + path.string());
  Trajectory traj;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw Io("malformed trajectory line in " + path.string() + ": " + e.what());
    }
    Waypoint wp;
    wp.t = rec.at("t").get<double>();
    wp.pose = pose_from_json(rec);
    traj.waypoints.push_back(wp);
  }
  traj.validate();
  return traj;
}

}  // namespace catmanip::demo
