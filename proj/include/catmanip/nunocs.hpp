#pragma once

#include <array>
#include <vector>

#include "catmanip/cloud.hpp"
#include "catmanip/pose.hpp"

namespace catmanip::nunocs {

using geom::Aabb;
using geom::PointCloud;
using geom::Pose;
using geom::Quat;
using geom::Vec3;

// A cloud expressed in the per-axis normalized unit cube [0,1]^3, together
// with the relative scales (1, alpha, beta): the axis extents divided by the
// extent of axis 0.
struct NunocsCloud {
  std::vector<Vec3> coords;
  Vec3 scales = Vec3::Ones();
  std::vector<int> source_indices;

  std::size_t size() const { return coords.size(); }
  bool empty() const { return coords.empty(); }
};

struct NormalizeResult {
  NunocsCloud cloud;
  Vec3 extents = Vec3::Ones();  // original per-axis extents
  Vec3 origin = Vec3::Zero();   // original per-axis minima
};

// Per-axis normalization into the unit cube: c = (p - min) / (max - min).
// Throws DegenerateExtent when any axis extent is below `min_extent`.
NormalizeResult normalize_to_unit_cube(const PointCloud& cloud,
                                       double min_extent = 1e-9);

// Same mapping but with the box supplied by the caller; lets partial views be
// normalized consistently with the full model they came from.
NormalizeResult normalize_with_box(const PointCloud& cloud, const Aabb& box,
                                   double min_extent = 1e-9);

// Inverse of the normalization (unit cube -> original frame).
PointCloud denormalize(const NunocsCloud& cloud, const Vec3& extents,
                       const Vec3& origin);

// --- Discretized coordinate classification ------------------------------

// Bin index of a coordinate in [0,1]: min(floor(c*B), B-1), clamped at 0.
int coord_to_bin(double c, int bin_count);
// Center of bin i: (i + 0.5) / B.
double bin_center(int index, int bin_count);

struct BinEncoding {
  int bin_count = 0;
  std::vector<std::array<int, 3>> bins;  // per point, per axis
};

BinEncoding encode_bins(const NunocsCloud& cloud, int bin_count);
std::vector<Vec3> decode_bins(const BinEncoding& encoding);

// Per-point, per-axis categorical distributions over bins (row-major:
// point, axis, bin). Rows must each sum to 1 within 1e-6.
struct BinDistributions {
  int bin_count = 0;
  std::size_t point_count = 0;
  std::vector<double> probs;

  double& at(std::size_t point, int axis, int bin) {
    return probs[(point * 3 + axis) * bin_count + bin];
  }
  double at(std::size_t point, int axis, int bin) const {
    return probs[(point * 3 + axis) * bin_count + bin];
  }

  static BinDistributions one_hot(const NunocsCloud& cloud, int bin_count);
  // One-hot mixed with uniform: (1-eps) at the target bin plus eps/B
  // everywhere. Rows sum to exactly 1.
  static BinDistributions smoothed_one_hot(const NunocsCloud& cloud,
                                           int bin_count, double eps);
};

// --- Symmetry -------------------------------------------------------------

// Discrete rotation group applied about a pivot (the unit-cube center for
// normalized coordinates). Always contains the identity at index 0.
struct SymmetryGroup {
  std::vector<Quat> rotations = {Quat::Identity()};
  Vec3 pivot = Vec3(0.5, 0.5, 0.5);

  static SymmetryGroup identity_only(const Vec3& pivot = Vec3(0.5, 0.5, 0.5));
  // Rotations about +z in steps of `step_deg` covering [0, 360).
  static SymmetryGroup z_rotations(double step_deg,
                                   const Vec3& pivot = Vec3(0.5, 0.5, 0.5));

  std::size_t size() const { return rotations.size(); }
  Vec3 apply(std::size_t k, const Vec3& c) const {
    return rotations[k] * (c - pivot) + pivot;
  }
  // The same group element as a rigid transform (for object poses).
  Pose pose_element(std::size_t k) const;
};

// --- Losses ----------------------------------------------------------------

// Symmetry-aware classification loss: for each group element the ground
// truth is rotated about the pivot, re-binned, and scored with summed
// cross-entropy (natural log) over all points and axes against the predicted
// distributions; the minimum over the group is returned.
double nunocs_loss(const BinDistributions& predicted, const NunocsCloud& ground_truth,
                   const SymmetryGroup& symmetry);

// L2 distance between predicted and true relative scales.
double scale_loss(const Vec3& predicted, const Vec3& ground_truth);

// Weighted sum of the two terms; both weights default to 1.
double total_loss(double nunocs_term, double scale_term, double w_nunocs = 1.0,
                  double w_scale = 1.0);

// --- 9D pose recovery -------------------------------------------------------

// Non-uniform scale + similarity transform mapping normalized coordinates to
// an observed cloud: p = s R (sigma .* c) + t with sigma = scale * scales.
struct CategoryPose9D {
  geom::SimilarityTransform similarity;   // uniform part (s, R, t)
  Vec3 scales = Vec3::Ones();             // relative per-axis scales (1, a, b)
  double rms_residual = 0.0;

  // Full per-axis sizes: similarity.scale * scales.
  Vec3 axis_sizes() const { return similarity.scale * scales; }
  Vec3 apply(const Vec3& c) const {
    return similarity.apply(scales.cwiseProduct(c));
  }
};

// Recovers the 9D pose from predicted normalized coordinates and the observed
// points they correspond to (index-aligned). The per-axis scales are taken
// from the prediction; the uniform similarity is solved in closed form.
CategoryPose9D solve_pose9d(const NunocsCloud& predicted, const PointCloud& observed);

}  // namespace catmanip::nunocs
