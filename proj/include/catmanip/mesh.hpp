#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <vector>

#include "catmanip/cloud.hpp"
#include "catmanip/pose.hpp"

namespace catmanip {
class Rng;
}

namespace catmanip::geom {

// Indexed triangle mesh. Faces reference vertices by 0-based index.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;

  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t face_count() const { return faces.size(); }

  TriangleMesh transformed(const Pose& pose) const;
  // Per-axis scaling about a fixed point (vertices only; topology unchanged).
  TriangleMesh scaled_about(const Vec3& center, const Vec3& factors) const;

  PointCloud vertex_cloud() const;
  double face_area(std::size_t f) const;
  double total_area() const;
};

Aabb bounding_box(const TriangleMesh& mesh);  // throws EmptyCloud

// OBJ subset: `v` and `f` records only (1-based indices, optional /vt/vn
// suffixes ignored). Zero-area faces and out-of-range indices are rejected.
TriangleMesh load_obj(const std::filesystem::path& path);
void save_obj(const std::filesystem::path& path, const TriangleMesh& mesh);

// Area-weighted uniform samples on the surface; source_indices hold the face
// index of each sample. Deterministic given the Rng state.
PointCloud sample_surface(const TriangleMesh& mesh, std::size_t count, Rng& rng);

struct RayHit {
  double t = 0.0;      // distance along the (unit) ray direction
  int face = -1;
  Vec3 point = Vec3::Zero();
};

// Closest intersection with t > tmin, or nullopt. Ties in t keep the lower
// face index. Moeller-Trumbore per triangle.
std::optional<RayHit> ray_cast(const TriangleMesh& mesh, const Vec3& origin,
                               const Vec3& dir, double tmin = 1e-9);

// Ray / axis-aligned box slab test; used to skip whole meshes per ray.
bool ray_intersects_aabb(const Vec3& origin, const Vec3& dir, const Aabb& box);

}  // namespace catmanip::geom
