#pragma once

#include "catmanip/mesh.hpp"
#include "catmanip/predict.hpp"

namespace catmanip::simgen {

using geom::PointCloud;
using geom::TriangleMesh;
using geom::Vec3;

// Procedural solids centered at the origin, axis along +z, dimensions in
// meters. Used both as training templates and as scripted task objects.
TriangleMesh make_cylinder_mesh(double radius, double half_height,
                                int segments = 48);
TriangleMesh make_box_mesh(const Vec3& half_extents);
// Annulus (washer / gear blank): outer wall, inner bore, flat top and bottom.
TriangleMesh make_annulus_mesh(double outer_radius, double inner_radius,
                               double half_height, int segments = 64);

// Deterministic surface clouds for contact checking and attention. Point
// order is fixed and documented where it matters:
//  - cylinder: index 0 is the bottom face center;
//  - annulus: index 0 is a bottom-face point at 3/4 of the outer radius,
//    angle 0 (a radius present across category instances), followed by a
//    dense bottom inner-edge ring.
PointCloud cylinder_cloud(double radius, double half_height);
PointCloud annulus_cloud(double outer_radius, double inner_radius,
                         double half_height);

// Small fixed template libraries for the two shape families.
nunocs::CategoryDb make_battery_category(int variants = 4);
nunocs::CategoryDb make_gear_category(int variants = 4);

}  // namespace catmanip::simgen
