#include "catmanip/nunocs.hpp"

#include <cmath>
#include <limits>

#include "catmanip/errors.hpp"
#include "catmanip/umeyama.hpp"

namespace catmanip::nunocs {

NormalizeResult normalize_with_box(const PointCloud& cloud, const Aabb& box,
                                   double min_extent) {
  if (cloud.empty()) throw EmptyCloud("normalize on empty cloud");
  const Vec3 ext = box.extent();
  if ((ext.array() < min_extent).any()) {
    throw DegenerateExtent("axis extent below minimum during normalization");
  }
  NormalizeResult out;
  out.extents = ext;
  out.origin = box.min;
  out.cloud.coords.reserve(cloud.size());
  for (const Vec3& p : cloud.points) {
    out.cloud.coords.push_back((p - box.min).cwiseQuotient(ext));
  }
  out.cloud.scales = ext / ext.x();
  out.cloud.source_indices = cloud.source_indices;
  return out;
}

NormalizeResult normalize_to_unit_cube(const PointCloud& cloud, double min_extent) {
  return normalize_with_box(cloud, geom::bounding_box(cloud), min_extent);
}

PointCloud denormalize(const NunocsCloud& cloud, const Vec3& extents,
                       const Vec3& origin) {
  PointCloud out;
  out.points.reserve(cloud.size());
  for (const Vec3& c : cloud.coords) {
    out.points.push_back(origin + c.cwiseProduct(extents));
  }
  out.source_indices = cloud.source_indices;
  return out;
}

int coord_to_bin(double c, int bin_count) {
  const int idx = static_cast<int>(std::floor(c * bin_count));
  return std::max(0, std::min(idx, bin_count - 1));
}

double bin_center(int index, int bin_count) {
  return (index + 0.5) / bin_count;
}

BinEncoding encode_bins(const NunocsCloud& cloud, int bin_count) {
  if (bin_count < 1) throw DegenerateInput("bin count must be positive");
  BinEncoding enc;
  enc.bin_count = bin_count;
  enc.bins.reserve(cloud.size());
  for (const Vec3& c : cloud.coords) {
    enc.bins.push_back({coord_to_bin(c.x(), bin_count),
                        coord_to_bin(c.y(), bin_count),
                        coord_to_bin(c.z(), bin_count)});
  }
  return enc;
}

std::vector<Vec3> decode_bins(const BinEncoding& encoding) {
  std::vector<Vec3> out;
  out.reserve(encoding.bins.size());
  for (const auto& b : encoding.bins) {
    out.emplace_back(bin_center(b[0], encoding.bin_count),
                     bin_center(b[1], encoding.bin_count),
                     bin_center(b[2], encoding.bin_count));
  }
  return out;
}

BinDistributions BinDistributions::one_hot(const NunocsCloud& cloud, int bin_count) {
  return smoothed_one_hot(cloud, bin_count, 0.0);
}

BinDistributions BinDistributions::smoothed_one_hot(const NunocsCloud& cloud,
                                                    int bin_count, double eps) {
  if (bin_count < 1) throw DegenerateInput("bin count must be positive");
  if (eps < 0.0 || eps > 1.0) {
    throw InvalidDistribution("smoothing factor outside [0, 1]");
  }
  const BinEncoding enc = encode_bins(cloud, bin_count);
  BinDistributions out;
  out.bin_count = bin_count;
  out.point_count = cloud.size();
  const double floor_p = eps / bin_count;
  out.probs.assign(out.point_count * 3 * bin_count, floor_p);
  for (std::size_t i = 0; i < enc.bins.size(); ++i) {
    for (int a = 0; a < 3; ++a) {
      out.at(i, a, enc.bins[i][a]) += 1.0 - eps;
    }
  }
  return out;
}

SymmetryGroup SymmetryGroup::identity_only(const Vec3& pivot) {
  SymmetryGroup g;
  g.pivot = pivot;
  return g;
}

SymmetryGroup SymmetryGroup::z_rotations(double step_deg, const Vec3& pivot) {
  if (step_deg <= 0.0) throw DegenerateInput("symmetry step must be positive");
  const double n_real = 360.0 / step_deg;
  const int n = static_cast<int>(std::llround(n_real));
  if (n < 1 || std::abs(n * step_deg - 360.0) > 1e-6) {
    throw DegenerateInput("symmetry step must divide 360 degrees");
  }
  SymmetryGroup g;
  g.pivot = pivot;
  g.rotations.clear();
  for (int k = 0; k < n; ++k) {
    g.rotations.push_back(geom::quat_from_axis_angle(
        Vec3::UnitZ(), geom::deg_to_rad(k * step_deg)));
  }
  return g;
}

Pose SymmetryGroup::pose_element(std::size_t k) const {
  const Quat& q = rotations[k];
  return Pose(q, pivot - q * pivot);
}

namespace {

void validate_distributions(const BinDistributions& d) {
  if (d.bin_count < 1) throw InvalidDistribution("bin count must be positive");
  if (d.probs.size() != d.point_count * 3 * static_cast<std::size_t>(d.bin_count)) {
    throw SizeMismatch("distribution buffer size mismatch");
  }
  for (std::size_t i = 0; i < d.point_count; ++i) {
    for (int a = 0; a < 3; ++a) {
      double sum = 0.0;
      for (int b = 0; b < d.bin_count; ++b) {
        const double p = d.at(i, a, b);
        if (p < 0.0) throw InvalidDistribution("negative probability");
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-6) {
        throw InvalidDistribution("distribution row does not sum to 1");
      }
    }
  }
}

}  // namespace

double nunocs_loss(const BinDistributions& predicted, const NunocsCloud& ground_truth,
                   const SymmetryGroup& symmetry) {
  if (predicted.point_count != ground_truth.size()) {
    throw SizeMismatch("prediction and ground truth differ in point count");
  }
  if (ground_truth.empty()) throw EmptyCloud("loss on empty ground truth");
  validate_distributions(predicted);
  if (symmetry.rotations.empty()) {
    throw DegenerateInput("symmetry group must contain at least the identity");
  }

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < symmetry.size(); ++k) {
    double sum = 0.0;
    for (std::size_t i = 0; i < ground_truth.size(); ++i) {
      const Vec3 c = symmetry.apply(k, ground_truth.coords[i]);
      for (int a = 0; a < 3; ++a) {
        const int bin = coord_to_bin(c[a], predicted.bin_count);
        const double p = predicted.at(i, a, bin);
        if (p <= 0.0) {
          sum = std::numeric_limits<double>::infinity();
          break;
        }
        sum -= std::log(p);
      }
      if (std::isinf(sum)) break;
    }
    best = std::min(best, sum);
  }
  return best;
}

double scale_loss(const Vec3& predicted, const Vec3& ground_truth) {
  return (predicted - ground_truth).norm();
}

double total_loss(double nunocs_term, double scale_term, double w_nunocs,
                  double w_scale) {
  return w_nunocs * nunocs_term + w_scale * scale_term;
}

CategoryPose9D solve_pose9d(const NunocsCloud& predicted, const PointCloud& observed) {
  if (predicted.size() != observed.size()) {
    throw SizeMismatch("pose solve: coordinate and observation counts differ");
  }
  if ((predicted.scales.array() <= 0.0).any()) {
    throw DegenerateInput("pose solve: non-positive relative scale");
  }
  PointCloud stretched;
  stretched.points.reserve(predicted.size());
  for (const Vec3& c : predicted.coords) {
    stretched.points.push_back(predicted.scales.cwiseProduct(c));
  }
  CategoryPose9D out;
  out.similarity = geom::umeyama_similarity(stretched, observed);
  out.scales = predicted.scales;
  out.rms_residual = geom::alignment_rms(out.similarity, stretched, observed);
  return out;
}

}  // namespace catmanip::nunocs
