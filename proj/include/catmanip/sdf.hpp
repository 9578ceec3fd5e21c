#pragma once

#include <string>
#include <vector>

#include "catmanip/cloud.hpp"
#include "catmanip/pose.hpp"

namespace catmanip::attention {

using geom::PointCloud;
using geom::Pose;
using geom::Vec3;

enum class PrimitiveKind { Plane, Box, Cylinder };

// One signed-distance primitive with its own local frame. Distances are
// positive outside, negative inside, zero on the surface.
//  - Plane: the half-space z <= 0 is solid.
//  - Box: axis-aligned in the local frame, given by half extents.
//  - Cylinder: axis +z, given by radius and half height (capped).
struct SdfPrimitive {
  PrimitiveKind kind = PrimitiveKind::Plane;
  std::string name;
  Pose pose;  // local -> world
  Vec3 half_extents = Vec3::Zero();
  double radius = 0.0;
  double half_height = 0.0;

  static SdfPrimitive plane(const Pose& pose, std::string name = "plane");
  static SdfPrimitive box(const Pose& pose, const Vec3& half_extents,
                          std::string name = "box");
  static SdfPrimitive cylinder(const Pose& pose, double radius, double half_height,
                               std::string name = "cylinder");

  double evaluate(const Vec3& world_point) const;
};

// Union of primitives: the pointwise minimum of their signed distances.
struct SdfScene {
  std::vector<SdfPrimitive> primitives;

  bool empty() const { return primitives.empty(); }

  double evaluate(const Vec3& world_point) const;  // throws EmptyScene
  // Outward direction by central differences (normalized; h in meters).
  Vec3 gradient(const Vec3& world_point, double h = 1e-6) const;

  // Minimum signed distance over a model cloud placed at `pose`, and the
  // index of the point attaining it (lowest index on ties).
  double min_distance(const PointCloud& model, const Pose& pose) const;
  int argmin_distance(const PointCloud& model, const Pose& pose) const;

  SdfScene merged_with(const SdfScene& other) const;
};

}  // namespace catmanip::attention
