#include "catmanip/umeyama.hpp"

#include <Eigen/SVD>

#include "catmanip/errors.hpp"

namespace catmanip::geom {

SimilarityTransform umeyama_similarity(const PointCloud& src, const PointCloud& dst) {
  if (src.size() != dst.size()) {
    throw SizeMismatch("umeyama: src and dst differ in length");
  }
  const std::size_t n = src.size();
  if (n < 3) throw DegenerateInput("umeyama: need at least 3 point pairs");

  const double inv_n = 1.0 / static_cast<double>(n);
  Vec3 mu_s = Vec3::Zero(), mu_d = Vec3::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    mu_s += src.points[i];
    mu_d += dst.points[i];
  }
  mu_s *= inv_n;
  mu_d *= inv_n;

  double var_s = 0.0;
  Mat3 cov = Mat3::Zero();  // E[(d - mu_d)(s - mu_s)^T]
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 s = src.points[i] - mu_s;
    const Vec3 d = dst.points[i] - mu_d;
    var_s += s.squaredNorm();
    cov += d * s.transpose();
  }
  var_s *= inv_n;
  cov *= inv_n;

  Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 sigma = svd.singularValues();

  // Source spread must span at least a plane; collinear input has no unique
  // rotation about the line.
  Eigen::JacobiSVD<Mat3> src_svd;
  {
    Mat3 scatter = Mat3::Zero();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3 s = src.points[i] - mu_s;
      scatter += s * s.transpose();
    }
    src_svd.compute(scatter);
    const Vec3 sv = src_svd.singularValues();
    if (sv[0] <= 0.0 || sv[1] <= 1e-12 * sv[0]) {
      throw DegenerateInput("umeyama: source points are collinear or coincident");
    }
  }

  Mat3 s_fix = Mat3::Identity();
  if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0.0) {
    s_fix(2, 2) = -1.0;
  }
  const Mat3 r = svd.matrixU() * s_fix * svd.matrixV().transpose();
  const double trace_ds = sigma[0] * s_fix(0, 0) + sigma[1] * s_fix(1, 1) +
                          sigma[2] * s_fix(2, 2);
  const double scale = trace_ds / var_s;
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw DegenerateInput("umeyama: non-positive or non-finite scale");
  }

  SimilarityTransform out;
  out.scale = scale;
  out.rotation = Quat(r).normalized();
  out.translation = mu_d - scale * (r * mu_s);
  return out;
}

double alignment_rms(const SimilarityTransform& t, const PointCloud& src,
                     const PointCloud& dst) {
  if (src.size() != dst.size()) {
    throw SizeMismatch("alignment_rms: src and dst differ in length");
  }
  if (src.empty()) throw EmptyCloud("alignment_rms on empty clouds");
  double sum = 0.0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    sum += (t.apply(src.points[i]) - dst.points[i]).squaredNorm();
  }
  return std::sqrt(sum / static_cast<double>(src.size()));
}

}  // namespace catmanip::geom
