#include "catmanip/plant.hpp"

#include <algorithm>
#include <cmath>

#include "catmanip/errors.hpp"

namespace catmanip::catbc {

Plant::Plant(SdfScene scene, PointCloud model, const Pose& initial_pose,
             std::uint64_t seed, DisturbanceModel disturbance)
    : scene_(std::move(scene)),
      model_(std::move(model)),
      pose_(initial_pose),
      disturbance_(std::move(disturbance)),
      rng_(seed) {
  if (scene_.empty()) throw EmptyScene("plant needs scene geometry");
  if (model_.empty()) throw EmptyCloud("plant needs a model cloud");
  if (distance_at(pose_) < -kPenetrationTol) {
    throw InvalidGeometry("initial pose penetrates the scene");
  }
  std::sort(disturbance_.pushes.begin(), disturbance_.pushes.end(),
            [](const PushEvent& a, const PushEvent& b) { return a.tick < b.tick; });
}

double Plant::distance_at(const Pose& pose) const {
  return scene_.min_distance(model_, pose);
}

Pose Plant::apply_grasp_slip() {
  if (slip_applied_) throw DegenerateInput("grasp slip already applied");
  slip_applied_ = true;
  Pose slip;
  if (disturbance_.grasp_slip_sigma_trans > 0.0 ||
      disturbance_.grasp_slip_sigma_rot > 0.0) {
    const Vec3 dt = rng_.normal3(disturbance_.grasp_slip_sigma_trans);
    const Vec3 axis = rng_.unit_vector();
    const double angle = rng_.normal(0.0, disturbance_.grasp_slip_sigma_rot);
    slip = Pose(geom::quat_from_axis_angle(axis, angle), dt);
    pose_ = compose(pose_, slip);
    if (!resolve_penetration(pose_)) {
      throw InvalidGeometry("grasp slip cannot be resolved against the scene");
    }
  }
  return slip;
}

Pose Plant::project_motion(const Pose& from, const Pose& to, bool& contact) const {
  contact = false;
  if (distance_at(to) >= -kPenetrationTol) return to;
  contact = true;

  // First contact along the interpolated motion: the largest s whose pose is
  // still on or outside the surface (within kSurfaceTol).
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 64 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double phi = distance_at(geom::interpolate(from, to, mid));
    if (phi >= -kSurfaceTol) {
      lo = mid;
      if (phi <= kSurfaceTol) break;
    } else {
      hi = mid;
    }
  }
  const Pose at_contact = geom::interpolate(from, to, lo);

  // Discard the blocked normal component of the remaining translation and
  // slide tangentially; the remaining rotation is given up for this tick.
  const Vec3 remaining = to.translation - at_contact.translation;
  const int worst = scene_.argmin_distance(model_, at_contact);
  const Vec3 normal = scene_.gradient(at_contact.apply(model_.points[worst]));
  const double into = remaining.dot(normal);
  const Vec3 slide = remaining - std::min(into, 0.0) * normal;
  if (slide.norm() < 1e-15) return at_contact;

  Pose slid(at_contact.rotation, at_contact.translation + slide);
  if (!resolve_penetration(slid)) return at_contact;
  return slid;
}

bool Plant::resolve_penetration(Pose& pose) const {
  for (int it = 0; it < 32; ++it) {
    const double phi = distance_at(pose);
    if (phi >= -kPenetrationTol) return true;
    const int worst = scene_.argmin_distance(model_, pose);
    const Vec3 normal = scene_.gradient(pose.apply(model_.points[worst]));
    pose.translation += (-phi + kSurfaceTol) * normal;
  }
  return distance_at(pose) >= -kPenetrationTol;
}

void Plant::step_to(const Pose& tentative) {
  if (!tentative.is_finite()) throw DegenerateInput("non-finite commanded pose");
  bool contact = false;
  pose_ = project_motion(pose_, tentative, contact);
  last_contact_ = contact;

  // Scheduled external pokes for this tick.
  for (const PushEvent& push : disturbance_.pushes) {
    if (push.tick != tick_) continue;
    Pose pushed(pose_.rotation, pose_.translation + push.translation);
    if (resolve_penetration(pushed)) pose_ = pushed;
  }

  // Contact-induced slip of the object within the gripper.
  if (contact && (disturbance_.contact_slip_sigma_trans > 0.0 ||
                  disturbance_.contact_slip_sigma_rot > 0.0)) {
    const Vec3 dt = rng_.normal3(disturbance_.contact_slip_sigma_trans);
    const Vec3 axis = rng_.unit_vector();
    const double angle = rng_.normal(0.0, disturbance_.contact_slip_sigma_rot);
    Pose slipped = compose(pose_, Pose(geom::quat_from_axis_angle(axis, angle), dt));
    if (resolve_penetration(slipped)) pose_ = slipped;
  }

  ++tick_;
}

}  // namespace catmanip::catbc
