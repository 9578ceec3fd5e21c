#pragma once

#include <string>

#include "catmanip/catbc.hpp"

namespace catmanip::catbc {

struct SuccessReport {
  bool success = false;
  std::string reason;  // first failed condition; empty on success
};

// Upright placement on a circular platform: small tilt, base resting at the
// platform top height, and the whole base circle supported by the platform.
struct StandingGeometry {
  double platform_radius = 0.0;
  double platform_top_z = 0.0;
  double base_radius = 0.0;    // object base circle radius
  double half_height = 0.0;    // object center sits this far above its base
  double tilt_tol = 5.0 * M_PI / 180.0;
  double height_tol = 0.002;
};

SuccessReport check_standing(const geom::Pose& final_pose,
                             const StandingGeometry& geo);

// Peg-in-hole style insertion: the object's hole must sit around the shaft
// with enough axial engagement; the clearance budget covers both the lateral
// offset and the projected tilt.
struct InsertionGeometry {
  double hole_radius = 0.0;
  double shaft_radius = 0.0;
  double hole_half_length = 0.0;  // hole extends +/- this along the local axis
  double required_engage = 0.0;   // minimum axial overlap, meters
  double shaft_base_z = 0.0;
  double shaft_top_z = 0.0;       // shaft occupies [base_z, top_z] on the z axis
};

SuccessReport check_insertion(const geom::Pose& final_pose,
                              const InsertionGeometry& geo);

// Spring-loaded slot assembly. The object (a cylinder lying along its local
// +z axis) must compress the virtual spring at the moment its positive end
// drops past the wall, and end up captive between spring and far wall.
struct AssemblyGeometry {
  double wall_x = 0.0;          // inner face of the spring-side wall
  double wall_top_z = 0.0;      // height of the far wall to clear
  double inner_length = 0.0;    // distance between the two inner faces
  double spring_natural = 0.016;
  double object_length = 0.0;
  geom::Vec3 neg_end_local = geom::Vec3::Zero();  // spring-side end, model frame
  geom::Vec3 pos_end_local = geom::Vec3::Zero();
  double level_tol = 5.0 * M_PI / 180.0;
};

SuccessReport check_assembly(const std::vector<TickTrace>& trace,
                             const geom::Pose& final_pose,
                             const AssemblyGeometry& geo);

}  // namespace catmanip::catbc
