#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "catmanip/mesh.hpp"
#include "catmanip/nunocs.hpp"

namespace catmanip::nunocs {

struct CategoryModel {
  std::string id;
  geom::TriangleMesh mesh;
};

// A small library of training models for one category, plus the category's
// symmetry convention (z-axis rotations at a fixed angular step; a step of 0
// means no symmetry beyond the identity).
struct CategoryDb {
  std::string category;
  double z_step_deg = 0.0;
  std::vector<CategoryModel> models;

  SymmetryGroup symmetry(const Vec3& pivot = Vec3(0.5, 0.5, 0.5)) const {
    return z_step_deg > 0.0 ? SymmetryGroup::z_rotations(z_step_deg, pivot)
                            : SymmetryGroup::identity_only(pivot);
  }
};

// Directory layout: manifest.json naming the category, symmetry step and the
// model OBJ files stored alongside it.
CategoryDb load_category_db(const std::filesystem::path& dir);
void save_category_db(const std::filesystem::path& dir, const CategoryDb& db);

// Maps an observed (partial) cloud to normalized category coordinates.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual NunocsCloud predict(const geom::PointCloud& observed) const = 0;
};

// Ground-truth-backed predictor: uses the instance's known model box and pose
// to emit exact normalized coordinates for each observed point.
class OraclePredictor : public Predictor {
 public:
  OraclePredictor(const geom::Aabb& model_box, const geom::Pose& model_to_world);
  NunocsCloud predict(const geom::PointCloud& observed) const override;

 private:
  geom::Aabb box_;
  geom::Pose world_to_model_;
};

struct MatchResult {
  int template_index = -1;
  int yaw_index = -1;
  double yaw_deg = 0.0;
  double chamfer = 0.0;
  Vec3 scales = Vec3::Ones();
};

// Template matcher: brute-force search over (template x yaw at a fixed step),
// fitting each template's normalized shape into the yaw-derotated observed
// box and scoring symmetric chamfer distance. Deterministic; ties prefer the
// lower template index, then the lower yaw index.
class TemplateMatcher : public Predictor {
 public:
  explicit TemplateMatcher(const CategoryDb& db, double yaw_step_deg = 5.0,
                           std::size_t template_samples = 512,
                           std::size_t max_observed = 1024);

  NunocsCloud predict(const geom::PointCloud& observed) const override;
  MatchResult match(const geom::PointCloud& observed) const;

 private:
  struct TemplateShape {
    std::vector<Vec3> coords;  // normalized coordinates of surface samples
    Vec3 scales = Vec3::Ones();
  };

  double yaw_step_deg_;
  std::size_t max_observed_;
  std::vector<TemplateShape> shapes_;
};

}  // namespace catmanip::nunocs
