#pragma once

#include <filesystem>
#include <vector>

#include "catmanip/attention.hpp"
#include "catmanip/nunocs.hpp"
#include "catmanip/trajectory.hpp"

namespace catmanip::correspond {

using geom::PointCloud;
using geom::Pose;
using geom::Quat;
using geom::Vec3;

// Dense map from every demo point to its nearest novel point in normalized
// category coordinates. `residuals` are the matching distances in that space;
// `novel_to_demo` lists the preimages of each novel point (possibly empty,
// possibly several).
struct DenseCorrespondence {
  std::vector<int> demo_to_novel;
  std::vector<double> residuals;
  std::vector<std::vector<int>> novel_to_demo;

  std::size_t size() const { return demo_to_novel.size(); }
};

DenseCorrespondence build_correspondence(const nunocs::NunocsCloud& demo,
                                         const nunocs::NunocsCloud& novel);

// CSV with header demo_idx,novel_idx,residual.
void save_correspondence(const std::filesystem::path& path,
                         const DenseCorrespondence& corr);
DenseCorrespondence load_correspondence(const std::filesystem::path& path,
                                        std::size_t novel_size);

enum class ReprojectMode {
  Anchored,   // pin the attention anchor's world position (default)
  Centroid,   // diagnostic: pin the cloud centroids instead
};

struct ReprojectParams {
  ReprojectMode mode = ReprojectMode::Anchored;
  // Canonical-frame orientations of the two instances; their relative
  // rotation is applied to every reprojected pose. Identity when both
  // instances share the canonical orientation.
  Quat demo_canonical_rotation = Quat::Identity();
  Quat novel_canonical_rotation = Quat::Identity();
};

// Transfers a demo object trajectory onto a novel instance. At each timestep
// the demo's most scene-salient point is located, mapped through the
// correspondence, and the novel pose is chosen so that the mapped anchor
// lands exactly where the demo anchor was (orientation adjusted by the
// canonical-frame delta). Timestamps and frame are preserved.
demo::Trajectory reproject_trajectory(const demo::Trajectory& demo_traj,
                                      const PointCloud& demo_model,
                                      const PointCloud& novel_model,
                                      const DenseCorrespondence& corr,
                                      const attention::SdfScene& scene,
                                      const ReprojectParams& params = {});

}  // namespace catmanip::correspond
