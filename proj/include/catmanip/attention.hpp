#pragma once

#include <vector>

#include "catmanip/sdf.hpp"

namespace catmanip::attention {

// Saliency over the points of an object at one instant: points close to the
// receptacle surface get weights near 1, far points near 0. `anchor_index` is
// the most salient point (lowest index on ties).
struct AttentionMap {
  std::vector<double> weights;
  int anchor_index = -1;
  double timestamp = 0.0;

  std::size_t size() const { return weights.size(); }
};

// Computes attention for a model cloud placed at `pose`:
//   w_i = 1 - softmax_i(distance_to_scene)
// so small distances give large weights. The softmax is evaluated with
// max-subtraction; the weights are NOT renormalized, but their complements
// (1 - w_i) sum to 1 by construction.
AttentionMap attention_heatmap(const PointCloud& model, const Pose& pose,
                               const SdfScene& scene, double timestamp = 0.0);

// Frame re-anchoring: the returned pose has the same orientation but its
// translation moved so the origin sits at the anchor point's world position.
Pose anchor_frame(const Pose& pose, const Vec3& anchor_model_point);

// Carries attention from a demo cloud onto a novel cloud through a dense
// index correspondence (demo index -> novel index). A novel point assigned by
// several demo points takes the maximum weight; unassigned points get 0.
// The anchor is the novel point assigned by the demo anchor.
AttentionMap transfer_attention(const AttentionMap& demo_map,
                                const std::vector<int>& demo_to_novel,
                                std::size_t novel_size);

}  // namespace catmanip::attention
