#pragma once

#include <filesystem>
#include <vector>

#include "catmanip/pose.hpp"

namespace catmanip::geom {

// Axis-aligned bounding box.
struct Aabb {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  Vec3 extent() const { return max - min; }
  Vec3 center() const { return 0.5 * (min + max); }
  bool contains(const Vec3& p, double tol = 0.0) const {
    return (p.array() >= min.array() - tol).all() &&
           (p.array() <= max.array() + tol).all();
  }
};

// Unordered set of 3D points. `source_indices` optionally records where each
// point came from (e.g. the vertex or sample id in a source mesh); either
// empty or the same length as `points`.
struct PointCloud {
  std::vector<Vec3> points;
  std::vector<int> source_indices;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }

  PointCloud transformed(const Pose& pose) const;
  Vec3 centroid() const;  // throws EmptyCloud
};

Aabb bounding_box(const PointCloud& cloud);  // throws EmptyCloud

// Loaders accept ASCII PLY and whitespace XYZ, dispatched on extension.
// Non-finite coordinates are rejected.
PointCloud load_point_cloud(const std::filesystem::path& path);
void save_point_cloud(const std::filesystem::path& path, const PointCloud& cloud);

}  // namespace catmanip::geom
