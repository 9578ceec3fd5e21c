#include "catmanip/success.hpp"

#include <cmath>

#include "catmanip/errors.hpp"

namespace catmanip::catbc {

namespace {
// Absolute slack for boundary comparisons so "exactly at the limit" counts
// as inside regardless of rounding in the caller's arithmetic.
constexpr double kEdgeTol = 1e-9;

double axis_tilt(const geom::Pose& pose, const geom::Vec3& world_axis) {
  const geom::Vec3 a = pose.rotation * geom::Vec3::UnitZ();
  return std::atan2(a.cross(world_axis).norm(), a.dot(world_axis));
}
}  // namespace

SuccessReport check_standing(const geom::Pose& final_pose,
                             const StandingGeometry& geo) {
  if (geo.platform_radius <= 0.0 || geo.base_radius <= 0.0 || geo.half_height <= 0.0) {
    throw InvalidGeometry("standing geometry must have positive dimensions");
  }
  SuccessReport rep;
  const double tilt = axis_tilt(final_pose, geom::Vec3::UnitZ());
  if (tilt > geo.tilt_tol + kEdgeTol) {
    rep.reason = "tilted " + std::to_string(geom::rad_to_deg(tilt)) + " deg";
    return rep;
  }
  const double base_z = final_pose.translation.z() -
                        geo.half_height * std::cos(tilt);
  if (std::abs(base_z - geo.platform_top_z) > geo.height_tol + kEdgeTol) {
    rep.reason = "base not resting at platform height";
    return rep;
  }
  const double radial = std::hypot(final_pose.translation.x(),
                                   final_pose.translation.y());
  if (radial + geo.base_radius > geo.platform_radius + kEdgeTol) {
    rep.reason = "base circle overhangs the platform edge";
    return rep;
  }
  rep.success = true;
  return rep;
}

SuccessReport check_insertion(const geom::Pose& final_pose,
                              const InsertionGeometry& geo) {
  const double clearance = geo.hole_radius - geo.shaft_radius;
  if (clearance <= 0.0) {
    throw InvalidGeometry("hole radius must exceed shaft radius");
  }
  if (geo.hole_half_length <= 0.0 || geo.required_engage <= 0.0) {
    throw InvalidGeometry("insertion geometry must have positive lengths");
  }

  SuccessReport rep;
  const geom::Vec3 axis = final_pose.rotation * geom::Vec3::UnitZ();
  const double tilt = std::atan2(axis.cross(geom::Vec3::UnitZ()).norm(),
                                 axis.dot(geom::Vec3::UnitZ()));
  const geom::Vec3 center = final_pose.translation;

  const double axial_span = geo.hole_half_length * std::abs(axis.z());
  const double hole_top = center.z() + axial_span;
  const double hole_bottom = center.z() - axial_span;
  const double overlap =
      std::min(hole_top, geo.shaft_top_z) - std::max(hole_bottom, geo.shaft_base_z);
  if (overlap + kEdgeTol < geo.required_engage) {
    rep.reason = "axial engagement too shallow";
    return rep;
  }

  const double offset = std::hypot(center.x(), center.y());
  if (offset + geo.required_engage * std::sin(tilt) > clearance + kEdgeTol) {
    rep.reason = "lateral offset plus tilt exceeds clearance";
    return rep;
  }
  rep.success = true;
  return rep;
}

SuccessReport check_assembly(const std::vector<TickTrace>& trace,
                             const geom::Pose& final_pose,
                             const AssemblyGeometry& geo) {
  if (geo.inner_length <= 0.0 || geo.object_length <= 0.0 ||
      geo.spring_natural <= 0.0) {
    throw InvalidGeometry("assembly geometry must have positive lengths");
  }

  SuccessReport rep;
  const double far_inner_x = geo.wall_x + geo.inner_length;

  // The moment the positive end drops past the far wall into the slot. The
  // spring must already be held at half its free length or shorter,
  // otherwise the battery cannot have cleared the wall in reality.
  bool cleared = false;
  for (const TickTrace& tick : trace) {
    const geom::Vec3 pos = tick.true_pose.apply(geo.pos_end_local);
    if (pos.z() < geo.wall_top_z && pos.x() < far_inner_x - kEdgeTol) {
      const geom::Vec3 neg = tick.true_pose.apply(geo.neg_end_local);
      const double spring = neg.x() - geo.wall_x;
      if (spring > 0.5 * geo.spring_natural + kEdgeTol) {
        rep.reason = "spring not pressed to half length at wall clearance";
        return rep;
      }
      cleared = true;
      break;
    }
  }
  if (!cleared) {
    rep.reason = "positive end never entered the slot";
    return rep;
  }

  const geom::Vec3 neg = final_pose.apply(geo.neg_end_local);
  const geom::Vec3 pos = final_pose.apply(geo.pos_end_local);
  const geom::Vec3 axis = (pos - neg).normalized();
  if (std::abs(axis.z()) > std::sin(geo.level_tol) + kEdgeTol) {
    rep.reason = "object not lying level in the slot";
    return rep;
  }
  if (pos.z() >= geo.wall_top_z || pos.x() >= far_inner_x - kEdgeTol) {
    rep.reason = "positive end not inside the slot at the end";
    return rep;
  }
  const double spring_final = neg.x() - geo.wall_x;
  if (spring_final < -kEdgeTol) {
    rep.reason = "object passed through the spring wall";
    return rep;
  }
  if (spring_final >= geo.spring_natural) {
    rep.reason = "spring fully extended: object not captive";
    return rep;
  }
  if (geo.object_length + spring_final > geo.inner_length + kEdgeTol) {
    rep.reason = "object plus spring does not fit the slot";
    return rep;
  }
  rep.success = true;
  return rep;
}

}  // namespace catmanip::catbc
