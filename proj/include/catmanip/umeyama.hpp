#pragma once

#include "catmanip/cloud.hpp"
#include "catmanip/pose.hpp"

namespace catmanip::geom {

// Least-squares similarity transform (scale, rotation, translation) mapping
// src[i] -> dst[i], closed form with the proper-rotation sign fix. Points are
// weighted uniformly. Requires at least 3 non-collinear source points.
SimilarityTransform umeyama_similarity(const PointCloud& src, const PointCloud& dst);

// Root-mean-square of |T(src[i]) - dst[i]|.
double alignment_rms(const SimilarityTransform& t, const PointCloud& src,
                     const PointCloud& dst);

}  // namespace catmanip::geom
