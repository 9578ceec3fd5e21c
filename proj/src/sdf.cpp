#include "catmanip/sdf.hpp"

#include <cmath>
#include <limits>

#include "catmanip/errors.hpp"

namespace catmanip::attention {

SdfPrimitive SdfPrimitive::plane(const Pose& pose, std::string name) {
  SdfPrimitive p;
  p.kind = PrimitiveKind::Plane;
  p.pose = pose;
  p.name = std::move(name);
  return p;
}

SdfPrimitive SdfPrimitive::box(const Pose& pose, const Vec3& half_extents,
                               std::string name) {
  if ((half_extents.array() <= 0.0).any()) {
    throw InvalidGeometry("box half extents must be positive");
  }
  SdfPrimitive p;
  p.kind = PrimitiveKind::Box;
  p.pose = pose;
  p.half_extents = half_extents;
  p.name = std::move(name);
  return p;
}

SdfPrimitive SdfPrimitive::cylinder(const Pose& pose, double radius,
                                    double half_height, std::string name) {
  if (radius <= 0.0 || half_height <= 0.0) {
    throw InvalidGeometry("cylinder radius and half height must be positive");
  }
  SdfPrimitive p;
  p.kind = PrimitiveKind::Cylinder;
  p.pose = pose;
  p.radius = radius;
  p.half_height = half_height;
  p.name = std::move(name);
  return p;
}

double SdfPrimitive::evaluate(const Vec3& world_point) const {
  const Vec3 p = pose.inverse().apply(world_point);
  switch (kind) {
    case PrimitiveKind::Plane:
      return p.z();
    case PrimitiveKind::Box: {
      const Vec3 q = p.cwiseAbs() - half_extents;
      const Vec3 outside = q.cwiseMax(0.0);
      const double inside = std::min(q.maxCoeff(), 0.0);
      return outside.norm() + inside;
    }
    case PrimitiveKind::Cylinder: {
      const double dr = std::hypot(p.x(), p.y()) - radius;
      const double dz = std::abs(p.z()) - half_height;
      const double outside = std::hypot(std::max(dr, 0.0), std::max(dz, 0.0));
      const double inside = std::min(std::max(dr, dz), 0.0);
      return outside + inside;
    }
  }
  return 0.0;  // unreachable
}

double SdfScene::evaluate(const Vec3& world_point) const {
  if (primitives.empty()) throw EmptyScene("evaluate on empty scene");
  double best = std::numeric_limits<double>::infinity();
  for (const SdfPrimitive& prim : primitives) {
    best = std::min(best, prim.evaluate(world_point));
  }
  return best;
}

Vec3 SdfScene::gradient(const Vec3& world_point, double h) const {
  Vec3 g;
  for (int a = 0; a < 3; ++a) {
    Vec3 hi = world_point, lo = world_point;
    hi[a] += h;
    lo[a] -= h;
    g[a] = (evaluate(hi) - evaluate(lo)) / (2.0 * h);
  }
  const double n = g.norm();
  if (n < 1e-12) return Vec3::UnitZ();  // degenerate (e.g. medial axis)
  return g / n;
}

double SdfScene::min_distance(const PointCloud& model, const Pose& pose) const {
  if (model.empty()) throw EmptyCloud("min distance over empty cloud");
  double best = std::numeric_limits<double>::infinity();
  for (const Vec3& p : model.points) {
    best = std::min(best, evaluate(pose.apply(p)));
  }
  return best;
}

int SdfScene::argmin_distance(const PointCloud& model, const Pose& pose) const {
  if (model.empty()) throw EmptyCloud("argmin distance over empty cloud");
  int best = 0;
  double best_d = evaluate(pose.apply(model.points[0]));
  for (std::size_t i = 1; i < model.size(); ++i) {
    const double d = evaluate(pose.apply(model.points[i]));
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

SdfScene SdfScene::merged_with(const SdfScene& other) const {
  SdfScene out = *this;
  out.primitives.insert(out.primitives.end(), other.primitives.begin(),
                        other.primitives.end());
  return out;
}

}  // namespace catmanip::attention
