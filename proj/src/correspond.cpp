#include "catmanip/correspond.hpp"

#include <fstream>
#include <sstream>

#include "catmanip/errors.hpp"
#include "catmanip/kdtree.hpp"

namespace catmanip::correspond {

DenseCorrespondence build_correspondence(const nunocs::NunocsCloud& demo,
                                         const nunocs::NunocsCloud& novel) {
  if (demo.empty()) throw EmptyCloud("correspondence from empty demo cloud");
  if (novel.empty()) throw EmptyCloud("correspondence onto empty novel cloud");

  PointCloud novel_pts;
  novel_pts.points = novel.coords;
  const geom::KdTree tree(novel_pts);

  DenseCorrespondence corr;
  corr.demo_to_novel.reserve(demo.size());
  corr.residuals.reserve(demo.size());
  corr.novel_to_demo.resize(novel.size());
  for (std::size_t i = 0; i < demo.size(); ++i) {
    const geom::NearestResult nn = tree.nearest(demo.coords[i]);
    corr.demo_to_novel.push_back(nn.index);
    corr.residuals.push_back(nn.distance);
    corr.novel_to_demo[nn.index].push_back(static_cast<int>(i));
  }
  return corr;
}

void save_correspondence(const std::filesystem::path& path,
                         const DenseCorrespondence& corr) {
  std::ofstream out(path);
  if (!out) throw Io("cannot write " + path.string());
  out.precision(17);
  out << "demo_idx,novel_idx,residual\n";
  for (std::size_t i = 0; i < corr.size(); ++i) {
    out << i << ',' << corr.demo_to_novel[i] << ',' << corr.residuals[i] << '\n';
  }
  if (!out) throw Io("write failed: " + path.string());
}

DenseCorrespondence load_correspondence(const std::filesystem::path& path,
                                        std::size_t novel_size) {
  std::ifstream in(path);
  if (!in) throw MissingArtifact("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("demo_idx", 0) != 0) {
    throw Io("correspondence CSV missing header: " + path.string());
  }
  DenseCorrespondence corr;
  corr.novel_to_demo.resize(novel_size);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string demo_s, novel_s, res_s;
    if (!std::getline(ss, demo_s, ',') || !std::getline(ss, novel_s, ',') ||
        !std::getline(ss, res_s)) {
      throw Io("malformed correspondence row in " + path.string());
    }
    const std::size_t i = std::stoull(demo_s);
    const int j = std::stoi(novel_s);
    if (i != corr.demo_to_novel.size()) {
      throw Io("correspondence rows out of order in " + path.string());
    }
    if (j < 0 || static_cast<std::size_t>(j) >= novel_size) {
      throw SizeMismatch("correspondence index out of range in " + path.string());
    }
    corr.demo_to_novel.push_back(j);
    corr.residuals.push_back(std::stod(res_s));
    corr.novel_to_demo[j].push_back(static_cast<int>(i));
  }
  if (corr.demo_to_novel.empty()) {
    throw Io("correspondence CSV has no rows: " + path.string());
  }
  return corr;
}

demo::Trajectory reproject_trajectory(const demo::Trajectory& demo_traj,
                                      const PointCloud& demo_model,
                                      const PointCloud& novel_model,
                                      const DenseCorrespondence& corr,
                                      const attention::SdfScene& scene,
                                      const ReprojectParams& params) {
  demo_traj.validate();
  if (demo_model.size() != corr.size()) {
    throw SizeMismatch("correspondence does not cover the demo model");
  }
  if (novel_model.empty()) throw EmptyCloud("reproject onto empty novel cloud");

  // Orientation adjustment between the two instances' canonical frames.
  const Quat delta_r = params.demo_canonical_rotation *
                       params.novel_canonical_rotation.conjugate();

  const Vec3 demo_centroid = demo_model.centroid();
  const Vec3 novel_centroid = novel_model.centroid();

  demo::Trajectory out;
  out.frame = demo_traj.frame;
  out.waypoints.reserve(demo_traj.size());
  for (const demo::Waypoint& wp : demo_traj.waypoints) {
    Vec3 demo_anchor, novel_anchor;
    if (params.mode == ReprojectMode::Anchored) {
      const attention::AttentionMap map =
          attention::attention_heatmap(demo_model, wp.pose, scene, wp.t);
      demo_anchor = demo_model.points[map.anchor_index];
      const int j = corr.demo_to_novel[map.anchor_index];
      if (j < 0 || static_cast<std::size_t>(j) >= novel_model.size()) {
        throw SizeMismatch("correspondence maps anchor out of range");
      }
      novel_anchor = novel_model.points[j];
    } else {
      demo_anchor = demo_centroid;
      novel_anchor = novel_centroid;
    }

    const Quat rot = wp.pose.rotation * delta_r;
    // The mapped anchor is pinned to the demo anchor's world position.
    const Vec3 anchor_world = wp.pose.apply(demo_anchor);
    demo::Waypoint nwp;
    nwp.t = wp.t;
    nwp.pose = Pose(rot, anchor_world - rot * novel_anchor);
    out.waypoints.push_back(nwp);
  }
  return out;
}

}  // namespace catmanip::correspond
