#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <cmath>

#include "catmanip/errors.hpp"

namespace catmanip::geom {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

inline double deg_to_rad(double d) { return d * M_PI / 180.0; }
inline double rad_to_deg(double r) { return r * 180.0 / M_PI; }

// Geodesic angle between two rotations, in radians. Computed from the vector
// part of the relative quaternion with atan2; well conditioned near identity,
// unlike the acos form.
inline double rotation_geodesic(const Quat& a, const Quat& b) {
  const Quat r = a.conjugate() * b;
  return 2.0 * std::atan2(r.vec().norm(), std::abs(r.w()));
}

inline Quat quat_from_axis_angle(const Vec3& axis, double angle) {
  const double n = axis.norm();
  if (n < 1e-15) {
    if (std::abs(angle) < 1e-15) return Quat::Identity();
    throw DegenerateInput("rotation axis has zero length");
  }
  return Quat(Eigen::AngleAxisd(angle, axis / n));
}

// Rigid transform acting on column vectors: p' = R p + t. Quaternions are
// kept normalized and serialized in (w, x, y, z) order.
struct Pose {
  Quat rotation = Quat::Identity();
  Vec3 translation = Vec3::Zero();

  Pose() = default;
  Pose(const Quat& q, const Vec3& t) : rotation(q.normalized()), translation(t) {}

  static Pose identity() { return Pose(); }

  static Pose from_translation(const Vec3& t) { return Pose(Quat::Identity(), t); }

  static Pose from_axis_angle(const Vec3& axis, double angle,
                              const Vec3& t = Vec3::Zero()) {
    return Pose(quat_from_axis_angle(axis, angle), t);
  }

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }

  Pose inverse() const {
    const Quat qi = rotation.conjugate();
    return Pose(qi, -(qi * translation));
  }

  bool is_finite() const {
    return rotation.coeffs().allFinite() && translation.allFinite();
  }
};

// compose(a, b) applies b first, then a; identical to the matrix product a*b.
inline Pose compose(const Pose& a, const Pose& b) {
  return Pose(a.rotation * b.rotation, a.rotation * b.translation + a.translation);
}

inline Pose operator*(const Pose& a, const Pose& b) { return compose(a, b); }

inline double translation_distance(const Pose& a, const Pose& b) {
  return (a.translation - b.translation).norm();
}

inline double rotation_distance(const Pose& a, const Pose& b) {
  return rotation_geodesic(a.rotation, b.rotation);
}

// Linear interpolation from a to b at parameter s in [0, 1]; translation is
// lerped and rotation slerped along the shorter arc.
inline Pose interpolate(const Pose& a, const Pose& b, double s) {
  return Pose(a.rotation.slerp(s, b.rotation),
              (1.0 - s) * a.translation + s * b.translation);
}

// Similarity transform: p' = s R p + t with one uniform scale.
struct SimilarityTransform {
  double scale = 1.0;
  Quat rotation = Quat::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return scale * (rotation * p) + translation; }

  SimilarityTransform inverse() const {
    if (scale <= 0.0) throw DegenerateInput("similarity scale must be positive");
    SimilarityTransform out;
    out.scale = 1.0 / scale;
    out.rotation = rotation.conjugate();
    out.translation = -(out.rotation * translation) / scale;
    return out;
  }

  Pose rigid_part() const { return Pose(rotation, translation); }
};

inline SimilarityTransform compose(const SimilarityTransform& a,
                                   const SimilarityTransform& b) {
  SimilarityTransform out;
  out.scale = a.scale * b.scale;
  out.rotation = a.rotation * b.rotation;
  out.translation = a.scale * (a.rotation * b.translation) + a.translation;
  return out;
}

}  // namespace catmanip::geom
