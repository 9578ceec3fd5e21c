#include "catmanip/cloud.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "catmanip/errors.hpp"

namespace catmanip::geom {

PointCloud PointCloud::transformed(const Pose& pose) const {
  PointCloud out;
  out.points.reserve(points.size());
  for (const Vec3& p : points) out.points.push_back(pose.apply(p));
  out.source_indices = source_indices;
  return out;
}

Vec3 PointCloud::centroid() const {
  if (points.empty()) throw EmptyCloud("centroid of empty cloud");
  Vec3 sum = Vec3::Zero();
  for (const Vec3& p : points) sum += p;
  return sum / static_cast<double>(points.size());
}

Aabb bounding_box(const PointCloud& cloud) {
  if (cloud.empty()) throw EmptyCloud("bounding box of empty cloud");
  Aabb box;
  box.min = box.max = cloud.points.front();
  for (const Vec3& p : cloud.points) {
    box.min = box.min.cwiseMin(p);
    box.max = box.max.cwiseMax(p);
  }
  return box;
}

namespace {

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext;
}

void push_checked(PointCloud& cloud, double x, double y, double z,
                  const std::filesystem::path& path) {
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
    throw Io("non-finite coordinate in " + path.string());
  }
  cloud.points.emplace_back(x, y, z);
}

PointCloud load_xyz(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifact("cannot open " + path.string());
  PointCloud cloud;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    double x, y, z;
    if (!(ss >> x >> y >> z)) {
      // Skip blank lines; anything else malformed is an error.
      std::string tok;
      std::istringstream probe(line);
      if (probe >> tok) throw Io("malformed XYZ line in " + path.string());
      continue;
    }
    push_checked(cloud, x, y, z, path);
  }
  return cloud;
}

PointCloud load_ply(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifact("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("ply", 0) != 0) {
    throw Io("not a PLY file: " + path.string());
  }
  std::size_t vertex_count = 0;
  bool ascii = false;
  std::vector<std::string> vertex_props;
  std::string element;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string tok;
    ss >> tok;
    if (tok == "format") {
      std::string fmt;
      ss >> fmt;
      ascii = fmt == "ascii";
    } else if (tok == "element") {
      std::string count;
      ss >> element >> count;
      if (element == "vertex") vertex_count = std::stoull(count);
    } else if (tok == "property" && element == "vertex") {
      std::string type, name;
      ss >> type >> name;
      vertex_props.push_back(name);
    } else if (tok == "end_header") {
      break;
    }
  }
  if (!ascii) throw Io("only ASCII PLY is supported: " + path.string());
  auto index_of = [&](const std::string& name) {
    const auto it = std::find(vertex_props.begin(), vertex_props.end(), name);
    if (it == vertex_props.end())
      throw Io("PLY missing vertex property " + name + ": " + path.string());
    return static_cast<std::size_t>(it - vertex_props.begin());
  };
  const std::size_t ix = index_of("x"), iy = index_of("y"), iz = index_of("z");

  PointCloud cloud;
  cloud.points.reserve(vertex_count);
  for (std::size_t v = 0; v < vertex_count; ++v) {
    if (!std::getline(in, line)) throw Io("truncated PLY: " + path.string());
    std::istringstream ss(line);
    std::vector<double> vals(vertex_props.size());
    for (double& d : vals) {
      if (!(ss >> d)) throw Io("malformed PLY vertex: " + path.string());
    }
    push_checked(cloud, vals[ix], vals[iy], vals[iz], path);
  }
  return cloud;
}

}  // namespace

PointCloud load_point_cloud(const std::filesystem::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".ply") return load_ply(path);
  if (ext == ".xyz" || ext == ".txt") return load_xyz(path);
  throw Io("unsupported point cloud extension: " + path.string());
}

void save_point_cloud(const std::filesystem::path& path, const PointCloud& cloud) {
  std::ofstream out(path);
  if (!out) throw Io("cannot write " + path.string());
  out.precision(17);
  const std::string ext = lower_extension(path);
  if (ext == ".ply") {
    out << "ply\nformat ascii 1.0\nelement vertex " << cloud.size()
        << "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
  } else if (ext != ".xyz" && ext != ".txt") {
    throw Io("unsupported point cloud extension: " + path.string());
  }
  for (const Vec3& p : cloud.points) {
    out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  }
  if (!out) throw Io("write failed: " + path.string());
}

}  // namespace catmanip::geom
