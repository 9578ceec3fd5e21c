#include "catmanip/simgen.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>

#include "catmanip/errors.hpp"

namespace catmanip::simgen {

using nlohmann::json;

CameraModel CameraModel::looking_at(const geom::Vec3& target, double distance,
                                    double elevation_deg, double azimuth_deg,
                                    int width, int height, double fov_y_deg) {
  if (distance <= 0.0) throw DegenerateInput("camera distance must be positive");
  const double el = geom::deg_to_rad(elevation_deg);
  const double az = geom::deg_to_rad(azimuth_deg);
  const geom::Vec3 offset(distance * std::cos(el) * std::cos(az),
                          distance * std::cos(el) * std::sin(az),
                          distance * std::sin(el));
  const geom::Vec3 eye = target + offset;

  // Build the camera axes: +z toward the target, +y pointing downward-ish.
  const geom::Vec3 forward = (target - eye).normalized();
  geom::Vec3 up_hint = geom::Vec3::UnitZ();
  if (std::abs(forward.dot(up_hint)) > 0.999) up_hint = geom::Vec3::UnitX();
  const geom::Vec3 right = forward.cross(-up_hint).normalized();
  const geom::Vec3 down = forward.cross(right).normalized();
  geom::Mat3 rot;
  rot.col(0) = right;
  rot.col(1) = down;
  rot.col(2) = forward;

  CameraModel cam;
  cam.width = width;
  cam.height = height;
  cam.fov_y_deg = fov_y_deg;
  cam.pose = Pose(Quat(rot), eye);
  return cam;
}

InstanceSpec random_instance(const nunocs::CategoryDb& db, Rng& rng,
                             double scale_lo, double scale_hi) {
  if (db.models.empty()) throw EmptyDatabase("no templates to instantiate");
  if (scale_lo <= 0.0 || scale_hi < scale_lo) {
    throw DegenerateInput("invalid scale range");
  }
  const int idx = static_cast<int>(
      rng.uniform_int(0, static_cast<std::int64_t>(db.models.size()) - 1));
  InstanceSpec spec;
  spec.template_index = idx;
  spec.template_id = db.models[idx].id;
  spec.scale_factors = geom::Vec3(rng.uniform(scale_lo, scale_hi),
                                  rng.uniform(scale_lo, scale_hi),
                                  rng.uniform(scale_lo, scale_hi));
  const geom::Aabb box = geom::bounding_box(db.models[idx].mesh);
  spec.mesh = db.models[idx].mesh.scaled_about(box.center(), spec.scale_factors);
  return spec;
}

SceneSample sample_scene(const nunocs::CategoryDb& db, const SceneParams& params,
                         Rng& rng) {
  SceneSample scene;
  scene.instance = random_instance(db, rng, params.scale_lo, params.scale_hi);

  std::vector<Quat> rests = params.rest_rotations;
  if (rests.empty()) {
    rests = {Quat::Identity(),
             geom::quat_from_axis_angle(geom::Vec3::UnitX(), M_PI / 2.0)};
  }
  const std::size_t rest_idx = static_cast<std::size_t>(
      rng.uniform_int(0, static_cast<std::int64_t>(rests.size()) - 1));
  const double yaw = rng.uniform(0.0, 2.0 * M_PI);
  const Quat rot =
      geom::quat_from_axis_angle(geom::Vec3::UnitZ(), yaw) * rests[rest_idx];

  scene.table_height = rng.uniform(params.table_height_lo, params.table_height_hi);
  const double x = rng.uniform(-params.xy_range, params.xy_range);
  const double y = rng.uniform(-params.xy_range, params.xy_range);

  // Rest the lowest vertex exactly on the table plane.
  double min_z = std::numeric_limits<double>::infinity();
  for (const geom::Vec3& v : scene.instance.mesh.vertices) {
    min_z = std::min(min_z, (rot * v).z());
  }
  scene.object_pose =
      Pose(rot, geom::Vec3(x, y, scene.table_height - min_z));

  scene.camera = CameraModel::looking_at(
      geom::Vec3(0.0, 0.0, scene.table_height), params.camera_distance,
      params.camera_elevation_deg, /*azimuth_deg=*/0.0, params.image_width,
      params.image_height, params.fov_y_deg);

  const geom::PointCloud rendered =
      render_partial(scene.instance.mesh, scene.object_pose, scene.camera);
  scene.dropout_fraction = rng.uniform(params.dropout_lo, params.dropout_hi);
  scene.partial = corrupt_depth(rendered, scene.dropout_fraction, rng);
  if (scene.partial.empty()) {
    throw EmptyCloud("scene render left no points after dropout");
  }
  return scene;
}

geom::PointCloud render_partial(const geom::TriangleMesh& mesh, const Pose& pose,
                                const CameraModel& camera) {
  if (mesh.vertices.empty()) throw EmptyCloud("render of empty mesh");
  if (camera.width < 1 || camera.height < 1 || camera.fov_y_deg <= 0.0 ||
      camera.fov_y_deg >= 180.0) {
    throw DegenerateInput("invalid camera intrinsics");
  }
  const geom::TriangleMesh world = mesh.transformed(pose);
  const geom::Aabb box = geom::bounding_box(world);

  const double f =
      (camera.height / 2.0) / std::tan(geom::deg_to_rad(camera.fov_y_deg) / 2.0);
  const double cx = camera.width / 2.0, cy = camera.height / 2.0;
  const geom::Vec3 origin = camera.pose.translation;

  geom::PointCloud cloud;
  for (int v = 0; v < camera.height; ++v) {
    for (int u = 0; u < camera.width; ++u) {
      const geom::Vec3 dir_cam((u + 0.5 - cx) / f, (v + 0.5 - cy) / f, 1.0);
      const geom::Vec3 dir = (camera.pose.rotation * dir_cam).normalized();
      if (!geom::ray_intersects_aabb(origin, dir, box)) continue;
      const auto hit = geom::ray_cast(world, origin, dir);
      if (!hit) continue;
      cloud.points.push_back(hit->point);
      cloud.source_indices.push_back(v * camera.width + u);
    }
  }
  if (cloud.empty()) {
    throw OutOfFrustum("object not visible from the camera");
  }
  return cloud;
}

geom::PointCloud corrupt_depth(const geom::PointCloud& cloud, double fraction,
                               Rng& rng) {
  if (fraction < 0.0 || fraction > 0.4) {
    throw FractionOutOfRange("dropout fraction must lie in [0, 0.4]");
  }
  const std::size_t n = cloud.size();
  const std::size_t remove =
      static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  if (remove == 0) return cloud;

  // Partial Fisher-Yates picks `remove` distinct indices uniformly.
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::vector<bool> removed(n, false);
  for (std::size_t i = 0; i < remove; ++i) {
    const std::size_t j = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(n - 1)));
    std::swap(idx[i], idx[j]);
    removed[idx[i]] = true;
  }

  geom::PointCloud out;
  out.points.reserve(n - remove);
  const bool has_src = cloud.source_indices.size() == n;
  for (std::size_t i = 0; i < n; ++i) {
    if (removed[i]) continue;
    out.points.push_back(cloud.points[i]);
    if (has_src) out.source_indices.push_back(cloud.source_indices[i]);
  }
  return out;
}

Labels emit_labels(const SceneSample& scene) {
  if (scene.partial.empty()) throw EmptyCloud("labels for empty partial cloud");
  const geom::Aabb box = geom::bounding_box(scene.instance.mesh);
  const geom::Vec3 ext = box.extent();
  if ((ext.array() < 1e-9).any()) {
    throw DegenerateExtent("instance box is degenerate");
  }

  Labels labels;
  const geom::PointCloud in_model =
      scene.partial.transformed(scene.object_pose.inverse());
  labels.nunocs = nunocs::normalize_with_box(in_model, box).cloud;

  labels.pose9d.scales = ext / ext.x();
  labels.pose9d.similarity.scale = ext.x();
  labels.pose9d.similarity.rotation = scene.object_pose.rotation;
  labels.pose9d.similarity.translation =
      scene.object_pose.rotation * box.min + scene.object_pose.translation;
  labels.pose9d.rms_residual = 0.0;

  // Round-trip check: the labels must reproduce the observed points.
  for (std::size_t i = 0; i < scene.partial.size(); ++i) {
    const geom::Vec3 back = labels.pose9d.apply(labels.nunocs.coords[i]);
    if ((back - scene.partial.points[i]).norm() > 1e-9) {
      throw DegenerateInput("label round-trip exceeded tolerance");
    }
  }
  return labels;
}

namespace {

json vec_json(const geom::Vec3& v) { return json{v.x(), v.y(), v.z()}; }

json quat_json(const Quat& q) { return json{q.w(), q.x(), q.y(), q.z()}; }

}  // namespace

void write_dataset(const std::filesystem::path& dir, const nunocs::CategoryDb& db,
                   int count, const SceneParams& params, std::uint64_t master_seed) {
  if (count < 1) throw DegenerateInput("dataset count must be positive");
  std::filesystem::create_directories(dir);
  nunocs::save_category_db(dir / "db", db);

  for (int i = 0; i < count; ++i) {
    const std::uint64_t seed = derive_seed(master_seed, static_cast<std::uint64_t>(i));
    Rng rng(seed);
    const SceneSample scene = sample_scene(db, params, rng);
    const Labels labels = emit_labels(scene);

    std::ostringstream name;
    name << std::setw(5) << std::setfill('0') << i;
    const auto scene_dir = dir / "scenes" / name.str();
    std::filesystem::create_directories(scene_dir);

    geom::save_point_cloud(scene_dir / "cloud.ply", scene.partial);

    json jlabels;
    json coords = json::array();
    for (const geom::Vec3& c : labels.nunocs.coords) coords.push_back(vec_json(c));
    jlabels["coords"] = std::move(coords);
    jlabels["scales"] = vec_json(labels.nunocs.scales);
    jlabels["pose9d"] = {{"scale", labels.pose9d.similarity.scale},
                         {"q", quat_json(labels.pose9d.similarity.rotation)},
                         {"p", vec_json(labels.pose9d.similarity.translation)},
                         {"scales", vec_json(labels.pose9d.scales)}};
    std::ofstream lf(scene_dir / "labels.json");
    if (!lf) throw Io("cannot write labels in " + scene_dir.string());
    lf << jlabels.dump() << '\n';

    json meta;
    meta["template_id"] = scene.instance.template_id;
    meta["template_index"] = scene.instance.template_index;
    meta["scale_factors"] = vec_json(scene.instance.scale_factors);
    meta["pose"] = {{"q", quat_json(scene.object_pose.rotation)},
                    {"p", vec_json(scene.object_pose.translation)}};
    meta["table_height"] = scene.table_height;
    meta["dropout_fraction"] = scene.dropout_fraction;
    meta["seed"] = seed;
    meta["camera"] = {{"width", scene.camera.width},
                      {"height", scene.camera.height},
                      {"fov_y_deg", scene.camera.fov_y_deg},
                      {"q", quat_json(scene.camera.pose.rotation)},
                      {"p", vec_json(scene.camera.pose.translation)}};
    std::ofstream mf(scene_dir / "meta.json");
    if (!mf) throw Io("cannot write meta in " + scene_dir.string());
    mf << meta.dump(2) << '\n';
  }
}

}  // namespace catmanip::simgen
