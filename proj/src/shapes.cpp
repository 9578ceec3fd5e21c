#include "catmanip/shapes.hpp"

#include <cmath>

#include "catmanip/errors.hpp"

namespace catmanip::simgen {

namespace {

void add_ring(std::vector<Vec3>& v, double radius, double z, int segments,
              double phase = 0.0) {
  for (int i = 0; i < segments; ++i) {
    const double a = phase + 2.0 * M_PI * i / segments;
    v.emplace_back(radius * std::cos(a), radius * std::sin(a), z);
  }
}

void ring_points(PointCloud& cloud, double radius, double z, int segments) {
  for (int i = 0; i < segments; ++i) {
    const double a = 2.0 * M_PI * i / segments;
    cloud.points.emplace_back(radius * std::cos(a), radius * std::sin(a), z);
  }
}

}  // namespace

TriangleMesh make_cylinder_mesh(double radius, double half_height, int segments) {
  if (radius <= 0.0 || half_height <= 0.0 || segments < 3) {
    throw InvalidGeometry("cylinder dimensions must be positive");
  }
  TriangleMesh mesh;
  add_ring(mesh.vertices, radius, -half_height, segments);
  add_ring(mesh.vertices, radius, half_height, segments);
  const int bottom_center = static_cast<int>(mesh.vertices.size());
  mesh.vertices.emplace_back(0.0, 0.0, -half_height);
  const int top_center = bottom_center + 1;
  mesh.vertices.emplace_back(0.0, 0.0, half_height);

  for (int i = 0; i < segments; ++i) {
    const int j = (i + 1) % segments;
    // side quad (two triangles, outward facing)
    mesh.faces.push_back({i, j, segments + i});
    mesh.faces.push_back({j, segments + j, segments + i});
    // caps
    mesh.faces.push_back({bottom_center, j, i});
    mesh.faces.push_back({top_center, segments + i, segments + j});
  }
  return mesh;
}

TriangleMesh make_box_mesh(const Vec3& half_extents) {
  if ((half_extents.array() <= 0.0).any()) {
    throw InvalidGeometry("box half extents must be positive");
  }
  TriangleMesh mesh;
  for (int corner = 0; corner < 8; ++corner) {
    mesh.vertices.emplace_back((corner & 1 ? 1 : -1) * half_extents.x(),
                               (corner & 2 ? 1 : -1) * half_extents.y(),
                               (corner & 4 ? 1 : -1) * half_extents.z());
  }
  const int quads[6][4] = {{0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4},
                           {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}};
  for (const auto& q : quads) {
    mesh.faces.push_back({q[0], q[1], q[2]});
    mesh.faces.push_back({q[0], q[2], q[3]});
  }
  return mesh;
}

TriangleMesh make_annulus_mesh(double outer_radius, double inner_radius,
                               double half_height, int segments) {
  if (inner_radius <= 0.0 || outer_radius <= inner_radius || half_height <= 0.0 ||
      segments < 3) {
    throw InvalidGeometry("annulus needs 0 < inner < outer radius");
  }
  TriangleMesh mesh;
  add_ring(mesh.vertices, outer_radius, -half_height, segments);  // 0
  add_ring(mesh.vertices, outer_radius, half_height, segments);   // 1
  add_ring(mesh.vertices, inner_radius, -half_height, segments);  // 2
  add_ring(mesh.vertices, inner_radius, half_height, segments);   // 3
  auto at = [&](int ring, int i) { return ring * segments + i % segments; };
  for (int i = 0; i < segments; ++i) {
    const int j = i + 1;
    // outer wall
    mesh.faces.push_back({at(0, i), at(0, j), at(1, i)});
    mesh.faces.push_back({at(0, j), at(1, j), at(1, i)});
    // inner wall (faces the bore)
    mesh.faces.push_back({at(2, i), at(3, i), at(2, j)});
    mesh.faces.push_back({at(2, j), at(3, i), at(3, j)});
    // bottom annulus
    mesh.faces.push_back({at(2, i), at(0, j), at(0, i)});
    mesh.faces.push_back({at(2, i), at(2, j), at(0, j)});
    // top annulus
    mesh.faces.push_back({at(3, i), at(1, i), at(1, j)});
    mesh.faces.push_back({at(3, i), at(1, j), at(3, j)});
  }
  return mesh;
}

PointCloud cylinder_cloud(double radius, double half_height) {
  if (radius <= 0.0 || half_height <= 0.0) {
    throw InvalidGeometry("cylinder dimensions must be positive");
  }
  PointCloud cloud;
  // Index 0: bottom face center (the tie-break anchor when resting flat).
  cloud.points.emplace_back(0.0, 0.0, -half_height);
  // Bottom face interior rings, then the dense bottom edge.
  for (double frac : {0.35, 0.7}) {
    ring_points(cloud, frac * radius, -half_height, 24);
  }
  ring_points(cloud, radius, -half_height, 72);
  // Side wall at several heights.
  for (double frac : {-0.6, -0.2, 0.2, 0.6}) {
    ring_points(cloud, radius, frac * half_height, 36);
  }
  // Top face mirrors the bottom exactly so the cloud centroid sits at the
  // geometric center (the centroid-frame diagnostics rely on this).
  ring_points(cloud, radius, half_height, 72);
  for (double frac : {0.35, 0.7}) {
    ring_points(cloud, frac * radius, half_height, 24);
  }
  cloud.points.emplace_back(0.0, 0.0, half_height);
  return cloud;
}

PointCloud annulus_cloud(double outer_radius, double inner_radius,
                         double half_height) {
  if (inner_radius <= 0.0 || outer_radius <= inner_radius || half_height <= 0.0) {
    throw InvalidGeometry("annulus needs 0 < inner < outer radius");
  }
  PointCloud cloud;
  const double z0 = -half_height, z1 = half_height;
  // Index 0 onward: bottom-face ring at 3/4 outer radius. The same physical
  // radius exists on every category variant (bores differ, outer walls
  // match), so attention anchored here maps across instances without a
  // lateral shift.
  ring_points(cloud, 0.75 * outer_radius, z0, 36);
  // Dense bottom inner edge: the points that meet a shaft first.
  ring_points(cloud, inner_radius, z0, 180);
  // Inner bore wall.
  for (double frac : {-0.5, 0.0, 0.5}) {
    ring_points(cloud, inner_radius, frac * half_height, 60);
  }
  ring_points(cloud, inner_radius, z1, 60);
  // Remaining bottom face ring and outer edge.
  const double mid = 0.5 * (inner_radius + 0.75 * outer_radius);
  ring_points(cloud, mid, z0, 36);
  ring_points(cloud, outer_radius, z0, 48);
  // Outer wall and top face.
  for (double frac : {-0.4, 0.4}) {
    ring_points(cloud, outer_radius, frac * half_height, 36);
  }
  ring_points(cloud, outer_radius, z1, 36);
  ring_points(cloud, 0.75 * outer_radius, z1, 24);
  ring_points(cloud, inner_radius, z1, 24);
  return cloud;
}

nunocs::CategoryDb make_battery_category(int variants) {
  if (variants < 1) throw DegenerateInput("need at least one variant");
  nunocs::CategoryDb db;
  db.category = "battery";
  db.z_step_deg = 5.0;
  for (int i = 0; i < variants; ++i) {
    const double radius = 0.006 + 0.001 * i;       // 6..9 mm
    const double half_height = 0.020 + 0.004 * i;  // 40..64 mm tall
    nunocs::CategoryModel model;
    model.id = "battery_" + std::to_string(i);
    model.mesh = make_cylinder_mesh(radius, half_height);
    db.models.push_back(std::move(model));
  }
  return db;
}

nunocs::CategoryDb make_gear_category(int variants) {
  if (variants < 1) throw DegenerateInput("need at least one variant");
  nunocs::CategoryDb db;
  db.category = "gear";
  db.z_step_deg = 5.0;
  for (int i = 0; i < variants; ++i) {
    const double outer = 0.015 + 0.002 * i;   // 15..21 mm
    const double inner = 0.004 + 0.0015 * i;  // 4..8.5 mm bores
    const double half_height = 0.003 + 0.001 * i;
    nunocs::CategoryModel model;
    model.id = "gear_" + std::to_string(i);
    model.mesh = make_annulus_mesh(outer, inner, half_height);
    db.models.push_back(std::move(model));
  }
  return db;
}

}  // namespace catmanip::simgen
