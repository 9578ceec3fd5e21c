#include "catmanip/predict.hpp"

#include <fstream>
#include <json.hpp>
#include <limits>

#include "catmanip/errors.hpp"
#include "catmanip/kdtree.hpp"
#include "catmanip/rng.hpp"

namespace catmanip::nunocs {

using nlohmann::json;

CategoryDb load_category_db(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  std::ifstream in(manifest_path);
  if (!in) throw MissingArtifact("cannot open " + manifest_path.string());
  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception& e) {
    throw Io("malformed manifest " + manifest_path.string() + ": " + e.what());
  }
  CategoryDb db;
  db.category = manifest.value("category", "");
  db.z_step_deg = manifest.value("z_step_deg", 0.0);
  if (!manifest.contains("models") || !manifest["models"].is_array()) {
    throw Io("manifest missing model list: " + manifest_path.string());
  }
  for (const auto& entry : manifest["models"]) {
    CategoryModel model;
    model.id = entry.get<std::string>();
    model.mesh = geom::load_obj(dir / (model.id + ".obj"));
    db.models.push_back(std::move(model));
  }
  if (db.models.empty()) throw EmptyDatabase("category db has no models: " + dir.string());
  return db;
}

void save_category_db(const std::filesystem::path& dir, const CategoryDb& db) {
  if (db.models.empty()) throw EmptyDatabase("refusing to save empty category db");
  std::filesystem::create_directories(dir);
  json manifest;
  manifest["category"] = db.category;
  manifest["z_step_deg"] = db.z_step_deg;
  json models = json::array();
  for (const auto& model : db.models) {
    models.push_back(model.id);
    geom::save_obj(dir / (model.id + ".obj"), model.mesh);
  }
  manifest["models"] = models;
  std::ofstream out(dir / "manifest.json");
  if (!out) throw Io("cannot write manifest in " + dir.string());
  out << manifest.dump(2) << '\n';
}

OraclePredictor::OraclePredictor(const geom::Aabb& model_box,
                                 const geom::Pose& model_to_world)
    : box_(model_box), world_to_model_(model_to_world.inverse()) {
  if ((box_.extent().array() < 1e-9).any()) {
    throw DegenerateExtent("oracle predictor: degenerate model box");
  }
}

NunocsCloud OraclePredictor::predict(const geom::PointCloud& observed) const {
  if (observed.empty()) throw EmptyCloud("predict on empty cloud");
  const geom::PointCloud in_model = observed.transformed(world_to_model_);
  return normalize_with_box(in_model, box_).cloud;
}

namespace {

// Evenly strided subset of at most `target` points, preserving order.
geom::PointCloud subsample(const geom::PointCloud& cloud, std::size_t target) {
  if (cloud.size() <= target) return cloud;
  geom::PointCloud out;
  out.points.reserve(target);
  for (std::size_t i = 0; i < target; ++i) {
    out.points.push_back(cloud.points[i * cloud.size() / target]);
  }
  return out;
}

double symmetric_chamfer(const geom::PointCloud& a, const geom::KdTree& tree_a,
                         const geom::PointCloud& b, const geom::KdTree& tree_b) {
  double ab = 0.0;
  for (const geom::Vec3& p : a.points) ab += tree_b.nearest(p).distance;
  double ba = 0.0;
  for (const geom::Vec3& p : b.points) ba += tree_a.nearest(p).distance;
  return ab / static_cast<double>(a.size()) + ba / static_cast<double>(b.size());
}

}  // namespace

TemplateMatcher::TemplateMatcher(const CategoryDb& db, double yaw_step_deg,
                                 std::size_t template_samples,
                                 std::size_t max_observed)
    : yaw_step_deg_(yaw_step_deg), max_observed_(max_observed) {
  if (db.models.empty()) throw EmptyDatabase("template matcher needs models");
  if (yaw_step_deg_ <= 0.0 || yaw_step_deg_ > 360.0) {
    throw DegenerateInput("yaw step must be in (0, 360]");
  }
  for (std::size_t t = 0; t < db.models.size(); ++t) {
    // Fixed per-template stream so the sampled shape is stable across runs.
    Rng rng(derive_seed(0x7e3a91c2u, t));
    geom::PointCloud samples =
        geom::sample_surface(db.models[t].mesh, template_samples, rng);
    const geom::Aabb box = geom::bounding_box(db.models[t].mesh);
    const NormalizeResult norm = normalize_with_box(samples, box);
    TemplateShape shape;
    shape.coords = norm.cloud.coords;
    shape.scales = norm.cloud.scales;
    shapes_.push_back(std::move(shape));
  }
}

MatchResult TemplateMatcher::match(const geom::PointCloud& observed) const {
  if (observed.empty()) throw EmptyCloud("match on empty cloud");
  const geom::PointCloud obs = subsample(observed, max_observed_);
  const Vec3 centroid = obs.centroid();

  const int yaw_count = std::max(1, static_cast<int>(std::llround(360.0 / yaw_step_deg_)));
  MatchResult best;
  double best_score = std::numeric_limits<double>::infinity();
  NunocsCloud ignored;

  for (std::size_t t = 0; t < shapes_.size(); ++t) {
    for (int j = 0; j < yaw_count; ++j) {
      const double yaw = geom::deg_to_rad(j * yaw_step_deg_);
      const Quat derot =
          geom::quat_from_axis_angle(Vec3::UnitZ(), yaw).conjugate();
      geom::PointCloud derotated;
      derotated.points.reserve(obs.size());
      for (const Vec3& p : obs.points) {
        derotated.points.push_back(derot * (p - centroid));
      }
      const geom::Aabb box = geom::bounding_box(derotated);
      const Vec3 ext = box.extent();
      if ((ext.array() < 1e-9).any()) continue;

      geom::PointCloud fitted;
      fitted.points.reserve(shapes_[t].coords.size());
      for (const Vec3& c : shapes_[t].coords) {
        fitted.points.push_back(box.min + c.cwiseProduct(ext));
      }
      const geom::KdTree obs_tree(derotated);
      const geom::KdTree fit_tree(fitted);
      const double score = symmetric_chamfer(derotated, obs_tree, fitted, fit_tree);
      // Strict comparison with fixed iteration order: ties keep the lower
      // template index, then the lower yaw index.
      if (score < best_score) {
        best_score = score;
        best.template_index = static_cast<int>(t);
        best.yaw_index = j;
        best.yaw_deg = j * yaw_step_deg_;
        best.chamfer = score;
        best.scales = ext / ext.x();
      }
    }
  }
  if (best.template_index < 0) {
    throw DegenerateExtent("no yaw produced a usable bounding box");
  }
  return best;
}

NunocsCloud TemplateMatcher::predict(const geom::PointCloud& observed) const {
  const MatchResult m = match(observed);
  const Vec3 centroid = observed.centroid();
  const Quat derot =
      geom::quat_from_axis_angle(Vec3::UnitZ(), geom::deg_to_rad(m.yaw_deg))
          .conjugate();
  geom::PointCloud derotated;
  derotated.points.reserve(observed.size());
  for (const Vec3& p : observed.points) {
    derotated.points.push_back(derot * (p - centroid));
  }
  const geom::Aabb box = geom::bounding_box(derotated);
  const Vec3 ext = box.extent();
  if ((ext.array() < 1e-9).any()) {
    throw DegenerateExtent("matched cloud has a degenerate extent");
  }

  const TemplateShape& shape = shapes_[m.template_index];
  geom::PointCloud fitted;
  fitted.points.reserve(shape.coords.size());
  for (const Vec3& c : shape.coords) {
    fitted.points.push_back(box.min + c.cwiseProduct(ext));
  }
  const geom::KdTree fit_tree(fitted);

  // Each observed point takes the canonical coordinate of its nearest
  // template sample: the cloud is snapped onto the matched template surface.
  NunocsCloud out;
  out.coords.reserve(observed.size());
  for (const Vec3& p : derotated.points) {
    out.coords.push_back(shape.coords[fit_tree.nearest(p).index]);
  }
  out.scales = m.scales;
  out.source_indices = observed.source_indices;
  return out;
}

}  // namespace catmanip::nunocs
