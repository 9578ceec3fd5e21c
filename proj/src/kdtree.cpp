#include "catmanip/kdtree.hpp"

#include <algorithm>
#include <numeric>

#include "catmanip/errors.hpp"

namespace catmanip::geom {

namespace {
constexpr int kLeafSize = 8;
}

NearestResult nearest_neighbor_brute(const Vec3& query, const PointCloud& cloud) {
  if (cloud.empty()) throw EmptyCloud("nearest neighbour on empty cloud");
  int best = 0;
  double best_d2 = (cloud.points[0] - query).squaredNorm();
  for (std::size_t i = 1; i < cloud.points.size(); ++i) {
    const double d2 = (cloud.points[i] - query).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = static_cast<int>(i);
    }
  }
  return {best, std::sqrt(best_d2)};
}

NearestResult nearest_neighbor(const Vec3& query, const PointCloud& cloud) {
  return nearest_neighbor_brute(query, cloud);
}

KdTree::KdTree(const PointCloud& cloud) : points_(cloud.points) {
  if (points_.empty()) throw EmptyCloud("kd-tree over empty cloud");
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0);
  nodes_.reserve(2 * points_.size() / kLeafSize + 2);
  root_ = build(0, static_cast<int>(order_.size()));
}

int KdTree::build(int begin, int end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  if (end - begin <= kLeafSize) {
    nodes_[id].begin = begin;
    nodes_[id].end = end;
    return id;
  }
  // Split on the widest axis at the median.
  Vec3 lo = points_[order_[begin]], hi = lo;
  for (int i = begin + 1; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  const int mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid,
                   order_.begin() + end, [&](int a, int b) {
                     if (points_[a][axis] != points_[b][axis]) {
                       return points_[a][axis] < points_[b][axis];
                     }
                     return a < b;  // deterministic layout
                   });
  nodes_[id].axis = axis;
  nodes_[id].split = points_[order_[mid]][axis];
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void KdTree::search(int node, const Vec3& query, int& best, double& best_d2) const {
  const Node& n = nodes_[node];
  if (n.axis < 0) {
    for (int i = n.begin; i < n.end; ++i) {
      const int idx = order_[i];
      const double d2 = (points_[idx] - query).squaredNorm();
      if (d2 < best_d2 || (d2 == best_d2 && idx < best)) {
        best_d2 = d2;
        best = idx;
      }
    }
    return;
  }
  const double diff = query[n.axis] - n.split;
  const int near = diff < 0.0 ? n.left : n.right;
  const int far = diff < 0.0 ? n.right : n.left;
  search(near, query, best, best_d2);
  // Strict comparison: an equal-distance point across the plane may still win
  // the tie on index, so the far side is visited on equality.
  if (diff * diff <= best_d2) search(far, query, best, best_d2);
}

NearestResult KdTree::nearest(const Vec3& query) const {
  int best = static_cast<int>(points_.size());
  double best_d2 = std::numeric_limits<double>::infinity();
  search(root_, query, best, best_d2);
  return {best, std::sqrt(best_d2)};
}

}  // namespace catmanip::geom
