#include "catmanip/demo.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>

#include "catmanip/errors.hpp"

namespace catmanip::demo {

using nlohmann::json;

namespace {

json pose_fields(const Pose& pose) {
  return json{{"q", {pose.rotation.w(), pose.rotation.x(), pose.rotation.y(),
                     pose.rotation.z()}},
              {"p", {pose.translation.x(), pose.translation.y(),
                     pose.translation.z()}}};
}

Pose pose_from_fields(const json& rec) {
  const auto& q = rec.at("q");
  const auto& p = rec.at("p");
  if (q.size() != 4 || p.size() != 3) throw Io("malformed pose fields");
  return Pose(Quat(q[0].get<double>(), q[1].get<double>(), q[2].get<double>(),
                   q[3].get<double>()),
              Vec3(p[0].get<double>(), p[1].get<double>(), p[2].get<double>()));
}

}  // namespace

void save_demo_log(const std::filesystem::path& path, const DemoLog& log) {
  if (log.relative_motions.empty()) {
    throw EmptyTrajectory("demo log has no frames");
  }
  std::ofstream out(path);
  if (!out) throw Io("cannot write " + path.string());
  json header{{"type", "header"},
              {"initial", pose_fields(log.initial_pose)},
              {"receptacle", pose_fields(log.receptacle_pose)},
              {"camera_to_robot", pose_fields(log.camera_to_robot)}};
  out << header.dump() << '\n';
  for (const Waypoint& wp : log.relative_motions) {
    json rec = pose_fields(wp.pose);
    rec["t"] = wp.t;
    out << rec.dump() << '\n';
  }
  if (!out) throw Io("write failed: " + path.string());
}

DemoLog load_demo_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifact("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Io("empty demo log: " + path.string());
  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    throw Io("malformed demo log header: " + std::string(e.what()));
  }
  if (header.value("type", "") != "header") {
    throw Io("demo log must start with a header record: " + path.string());
  }
  DemoLog log;
  log.initial_pose = pose_from_fields(header.at("initial"));
  log.receptacle_pose = pose_from_fields(header.at("receptacle"));
  log.camera_to_robot = pose_from_fields(header.at("camera_to_robot"));
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw Io("malformed demo log frame: " + std::string(e.what()));
    }
    Waypoint wp;
    wp.t = rec.at("t").get<double>();
    wp.pose = pose_from_fields(rec);
    log.relative_motions.push_back(wp);
  }
  if (log.relative_motions.empty()) {
    throw EmptyTrajectory("demo log has no frames: " + path.string());
  }
  return log;
}

Trajectory parse_demo(const DemoLog& log) {
  if (log.relative_motions.empty()) {
    throw EmptyTrajectory("demo log has no frames");
  }
  if (!log.initial_pose.is_finite() || !log.receptacle_pose.is_finite() ||
      !log.camera_to_robot.is_finite()) {
    throw FrameChainError("non-finite pose in demo log header");
  }
  const Waypoint& first = log.relative_motions.front();
  if (geom::rotation_distance(first.pose, Pose::identity()) > 1e-9 ||
      first.pose.translation.norm() > 1e-9) {
    throw FrameChainError("first relative motion is not the identity");
  }

  // Chain: camera -> robot, then re-express relative to the receptacle. The
  // extrinsic appears on both sides of the chain and cancels.
  const Pose receptacle_in_robot = compose(log.camera_to_robot, log.receptacle_pose);
  const Pose robot_to_receptacle = receptacle_in_robot.inverse();

  Trajectory traj;
  traj.frame = "receptacle";
  traj.waypoints.reserve(log.relative_motions.size());
  for (const Waypoint& wp : log.relative_motions) {
    if (!wp.pose.is_finite()) throw FrameChainError("non-finite relative motion");
    const Pose in_camera = compose(wp.pose, log.initial_pose);
    const Pose in_robot = compose(log.camera_to_robot, in_camera);
    Waypoint out;
    out.t = wp.t;
    out.pose = compose(robot_to_receptacle, in_robot);
    traj.waypoints.push_back(out);
  }
  traj.validate();
  return traj;
}

DemoLog synth_demo_log(const Trajectory& traj, const Pose& receptacle_in_camera,
                       const Pose& camera_to_robot) {
  traj.validate();
  DemoLog log;
  log.receptacle_pose = receptacle_in_camera;
  log.camera_to_robot = camera_to_robot;
  log.initial_pose = compose(receptacle_in_camera, traj.front_pose());
  const Pose initial_inv = log.initial_pose.inverse();
  log.relative_motions.reserve(traj.size());
  for (const Waypoint& wp : traj.waypoints) {
    const Pose in_camera = compose(receptacle_in_camera, wp.pose);
    Waypoint rel;
    rel.t = wp.t;
    rel.pose = compose(in_camera, initial_inv);
    log.relative_motions.push_back(rel);
  }
  return log;
}

int detect_keypose(const Trajectory& traj, const PointCloud& model,
                   const SdfScene& scene, double threshold) {
  traj.validate();
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (scene.min_distance(model, traj.waypoints[i].pose) <= threshold) {
      return static_cast<int>(i);
    }
  }
  return static_cast<int>(traj.size()) - 1;
}

Trajectory discretize(const Trajectory& traj, double min_translation,
                      double min_rotation) {
  traj.validate();
  Trajectory out;
  out.frame = traj.frame;
  out.waypoints.push_back(traj.waypoints.front());
  for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
    const Pose& last = out.waypoints.back().pose;
    const Pose& cur = traj.waypoints[i].pose;
    if (geom::translation_distance(last, cur) >= min_translation ||
        geom::rotation_distance(last, cur) >= min_rotation) {
      out.waypoints.push_back(traj.waypoints[i]);
    }
  }
  if (traj.size() > 1) out.waypoints.push_back(traj.waypoints.back());
  return out;
}

Pose select_symmetric_subgoal(const Pose& current, const Pose& subgoal,
                              const SymmetryGroup& symmetry,
                              const std::function<bool(const Pose&)>& feasible) {
  if (symmetry.rotations.empty()) {
    throw DegenerateInput("symmetry group must contain at least the identity");
  }
  struct Candidate {
    double rot = 0.0, trans = 0.0;
    std::size_t k = 0;
    Pose pose;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(symmetry.size());
  for (std::size_t k = 0; k < symmetry.size(); ++k) {
    Candidate c;
    c.k = k;
    c.pose = compose(subgoal, symmetry.pose_element(k));
    c.rot = geom::rotation_distance(current, c.pose);
    c.trans = geom::translation_distance(current, c.pose);
    candidates.push_back(c);
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              if (a.rot != b.rot) return a.rot < b.rot;
              if (a.trans != b.trans) return a.trans < b.trans;
              return a.k < b.k;
            });
  for (const Candidate& c : candidates) {
    if (!feasible || feasible(c.pose)) return c.pose;
  }
  throw NoFeasibleSubgoal("no symmetry-equivalent subgoal is feasible");
}

}  // namespace catmanip::demo
