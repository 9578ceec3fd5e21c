#pragma once

#include <utility>
#include <vector>

#include "catmanip/cloud.hpp"

namespace catmanip::geom {

struct NearestResult {
  int index = -1;
  double distance = 0.0;
};

// Exact nearest neighbour by linear scan. Ties on squared distance resolve to
// the lowest index. Serves as the reference for the kd-tree.
NearestResult nearest_neighbor_brute(const Vec3& query, const PointCloud& cloud);

// Static kd-tree over a point cloud; exact nearest-neighbour queries with the
// same tie rule as the brute-force scan (lowest index wins on equal squared
// distance).
class KdTree {
 public:
  explicit KdTree(const PointCloud& cloud);

  NearestResult nearest(const Vec3& query) const;
  std::size_t size() const { return points_.size(); }

 private:
  struct Node {
    int axis = -1;      // -1 marks a leaf
    double split = 0.0;
    int left = -1, right = -1;
    int begin = 0, end = 0;  // leaf range into order_
  };

  int build(int begin, int end);
  void search(int node, const Vec3& query, int& best, double& best_d2) const;

  std::vector<Vec3> points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

// One-shot exact query (brute force; build a KdTree for repeated queries).
NearestResult nearest_neighbor(const Vec3& query, const PointCloud& cloud);

}  // namespace catmanip::geom
