#include "catmanip/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "catmanip/errors.hpp"
#include "catmanip/rng.hpp"

namespace catmanip::geom {

namespace {
constexpr double kMinFaceArea = 1e-16;  // m^2; below this a face is degenerate
}

TriangleMesh TriangleMesh::transformed(const Pose& pose) const {
  TriangleMesh out;
  out.vertices.reserve(vertices.size());
  for (const Vec3& v : vertices) out.vertices.push_back(pose.apply(v));
  out.faces = faces;
  return out;
}

TriangleMesh TriangleMesh::scaled_about(const Vec3& center, const Vec3& factors) const {
  if ((factors.array() <= 0.0).any()) {
    throw DegenerateInput("scale factors must be positive");
  }
  TriangleMesh out;
  out.vertices.reserve(vertices.size());
  for (const Vec3& v : vertices) {
    out.vertices.push_back(center + (v - center).cwiseProduct(factors));
  }
  out.faces = faces;
  return out;
}

PointCloud TriangleMesh::vertex_cloud() const {
  PointCloud cloud;
  cloud.points = vertices;
  cloud.source_indices.resize(vertices.size());
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    cloud.source_indices[i] = static_cast<int>(i);
  }
  return cloud;
}

double TriangleMesh::face_area(std::size_t f) const {
  const auto& tri = faces[f];
  const Vec3 e1 = vertices[tri[1]] - vertices[tri[0]];
  const Vec3 e2 = vertices[tri[2]] - vertices[tri[0]];
  return 0.5 * e1.cross(e2).norm();
}

double TriangleMesh::total_area() const {
  double area = 0.0;
  for (std::size_t f = 0; f < faces.size(); ++f) area += face_area(f);
  return area;
}

Aabb bounding_box(const TriangleMesh& mesh) {
  if (mesh.vertices.empty()) throw EmptyCloud("bounding box of empty mesh");
  Aabb box;
  box.min = box.max = mesh.vertices.front();
  for (const Vec3& v : mesh.vertices) {
    box.min = box.min.cwiseMin(v);
    box.max = box.max.cwiseMax(v);
  }
  return box;
}

namespace {

// Parses the vertex index out of an OBJ face token ("7", "7/1", "7//2", ...).
int parse_face_index(const std::string& token, std::size_t vertex_count,
                     const std::filesystem::path& path) {
  const std::size_t slash = token.find('/');
  const std::string head = slash == std::string::npos ? token : token.substr(0, slash);
  int idx = 0;
  try {
    idx = std::stoi(head);
  } catch (const std::exception&) {
    throw Io("malformed face index '" + token + "' in " + path.string());
  }
  if (idx < 0) idx = static_cast<int>(vertex_count) + idx + 1;  // relative index
  if (idx < 1 || static_cast<std::size_t>(idx) > vertex_count) {
    throw Io("face index out of range in " + path.string());
  }
  return idx - 1;
}

}  // namespace

TriangleMesh load_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifact("cannot open " + path.string());
  TriangleMesh mesh;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag)) continue;
    if (tag == "v") {
      double x, y, z;
      if (!(ss >> x >> y >> z)) throw Io("malformed vertex in " + path.string());
      if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
        throw Io("non-finite vertex in " + path.string());
      }
      mesh.vertices.emplace_back(x, y, z);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string token;
      while (ss >> token) {
        idx.push_back(parse_face_index(token, mesh.vertices.size(), path));
      }
      if (idx.size() < 3) throw Io("face with fewer than 3 vertices in " + path.string());
      // Fan-triangulate polygons.
      for (std::size_t k = 2; k < idx.size(); ++k) {
        mesh.faces.push_back({idx[0], idx[k - 1], idx[k]});
      }
    }
    // All other record types (vt, vn, usemtl, ...) are ignored.
  }
  if (mesh.vertices.empty()) throw Io("OBJ has no vertices: " + path.string());
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    if (mesh.face_area(f) < kMinFaceArea) {
      throw DegenerateInput("zero-area face in " + path.string());
    }
  }
  return mesh;
}

void save_obj(const std::filesystem::path& path, const TriangleMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw Io("cannot write " + path.string());
  out.precision(17);
  for (const Vec3& v : mesh.vertices) {
    out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  }
  for (const auto& f : mesh.faces) {
    out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
  }
  if (!out) throw Io("write failed: " + path.string());
}

PointCloud sample_surface(const TriangleMesh& mesh, std::size_t count, Rng& rng) {
  if (mesh.faces.empty()) throw DegenerateInput("cannot sample mesh without faces");
  std::vector<double> cumulative(mesh.faces.size());
  double total = 0.0;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    total += mesh.face_area(f);
    cumulative[f] = total;
  }
  if (total <= 0.0) throw DegenerateInput("mesh has zero surface area");

  PointCloud cloud;
  cloud.points.reserve(count);
  cloud.source_indices.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double pick = rng.uniform() * total;
    const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), pick);
    const std::size_t f = std::min<std::size_t>(
        static_cast<std::size_t>(it - cumulative.begin()), mesh.faces.size() - 1);
    const auto& tri = mesh.faces[f];
    double u = rng.uniform(), v = rng.uniform();
    if (u + v > 1.0) {
      u = 1.0 - u;
      v = 1.0 - v;
    }
    cloud.points.push_back(mesh.vertices[tri[0]] +
                           u * (mesh.vertices[tri[1]] - mesh.vertices[tri[0]]) +
                           v * (mesh.vertices[tri[2]] - mesh.vertices[tri[0]]));
    cloud.source_indices.push_back(static_cast<int>(f));
  }
  return cloud;
}

std::optional<RayHit> ray_cast(const TriangleMesh& mesh, const Vec3& origin,
                               const Vec3& dir, double tmin) {
  std::optional<RayHit> best;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& tri = mesh.faces[f];
    const Vec3& v0 = mesh.vertices[tri[0]];
    const Vec3 e1 = mesh.vertices[tri[1]] - v0;
    const Vec3 e2 = mesh.vertices[tri[2]] - v0;
    const Vec3 pvec = dir.cross(e2);
    const double det = e1.dot(pvec);
    if (std::abs(det) < 1e-14) continue;  // parallel
    const double inv_det = 1.0 / det;
    const Vec3 tvec = origin - v0;
    const double u = tvec.dot(pvec) * inv_det;
    if (u < 0.0 || u > 1.0) continue;
    const Vec3 qvec = tvec.cross(e1);
    const double v = dir.dot(qvec) * inv_det;
    if (v < 0.0 || u + v > 1.0) continue;
    const double t = e2.dot(qvec) * inv_det;
    if (t <= tmin) continue;
    if (!best || t < best->t) {
      best = RayHit{t, static_cast<int>(f), origin + t * dir};
    }
  }
  return best;
}

bool ray_intersects_aabb(const Vec3& origin, const Vec3& dir, const Aabb& box) {
  double t0 = 0.0, t1 = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    if (std::abs(dir[a]) < 1e-15) {
      if (origin[a] < box.min[a] || origin[a] > box.max[a]) return false;
      continue;
    }
    double lo = (box.min[a] - origin[a]) / dir[a];
    double hi = (box.max[a] - origin[a]) / dir[a];
    if (lo > hi) std::swap(lo, hi);
    t0 = std::max(t0, lo);
    t1 = std::min(t1, hi);
    if (t0 > t1) return false;
  }
  return true;
}

}  // namespace catmanip::geom
