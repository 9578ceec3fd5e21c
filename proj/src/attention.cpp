#include "catmanip/attention.hpp"

#include <algorithm>
#include <cmath>

#include "catmanip/errors.hpp"

namespace catmanip::attention {

AttentionMap attention_heatmap(const PointCloud& model, const Pose& pose,
                               const SdfScene& scene, double timestamp) {
  if (model.empty()) throw EmptyCloud("attention over empty cloud");
  if (scene.empty()) throw EmptyScene("attention against empty scene");

  std::vector<double> dist(model.size());
  for (std::size_t i = 0; i < model.size(); ++i) {
    dist[i] = scene.evaluate(pose.apply(model.points[i]));
  }

  // Softmax over distances with max-subtraction; the most salient point is
  // the one with the smallest softmax share, i.e. the smallest distance.
  const double dmax = *std::max_element(dist.begin(), dist.end());
  double denom = 0.0;
  std::vector<double> expd(model.size());
  for (std::size_t i = 0; i < model.size(); ++i) {
    expd[i] = std::exp(dist[i] - dmax);
    denom += expd[i];
  }

  AttentionMap map;
  map.timestamp = timestamp;
  map.weights.resize(model.size());
  int anchor = 0;
  double best = dist[0];
  for (std::size_t i = 0; i < model.size(); ++i) {
    map.weights[i] = 1.0 - expd[i] / denom;
    if (dist[i] < best) {  // strict: lowest index wins ties
      best = dist[i];
      anchor = static_cast<int>(i);
    }
  }
  map.anchor_index = anchor;
  return map;
}

Pose anchor_frame(const Pose& pose, const Vec3& anchor_model_point) {
  return Pose(pose.rotation, pose.apply(anchor_model_point));
}

AttentionMap transfer_attention(const AttentionMap& demo_map,
                                const std::vector<int>& demo_to_novel,
                                std::size_t novel_size) {
  if (demo_map.weights.size() != demo_to_novel.size()) {
    throw SizeMismatch("attention and correspondence differ in length");
  }
  if (demo_map.anchor_index < 0 ||
      static_cast<std::size_t>(demo_map.anchor_index) >= demo_map.size()) {
    throw MissingAnchorImage("demo attention has no valid anchor");
  }
  AttentionMap out;
  out.timestamp = demo_map.timestamp;
  out.weights.assign(novel_size, 0.0);
  for (std::size_t i = 0; i < demo_to_novel.size(); ++i) {
    const int j = demo_to_novel[i];
    if (j < 0 || static_cast<std::size_t>(j) >= novel_size) {
      throw SizeMismatch("correspondence index out of range");
    }
    out.weights[j] = std::max(out.weights[j], demo_map.weights[i]);
  }
  out.anchor_index = demo_to_novel[demo_map.anchor_index];
  return out;
}

}  // namespace catmanip::attention
