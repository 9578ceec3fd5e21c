#pragma once

#include <filesystem>
#include <vector>

#include "catmanip/nunocs.hpp"
#include "catmanip/predict.hpp"
#include "catmanip/rng.hpp"
#include "catmanip/shapes.hpp"

namespace catmanip::simgen {

using geom::Pose;
using geom::Quat;

// Pinhole camera; +z looks forward, +x right, +y down in the camera frame.
struct CameraModel {
  int width = 160;
  int height = 120;
  double fov_y_deg = 60.0;
  Pose pose;  // camera -> world

  // Camera placed on a sphere around `target`, looking at it.
  static CameraModel looking_at(const geom::Vec3& target, double distance,
                                double elevation_deg, double azimuth_deg,
                                int width = 160, int height = 120,
                                double fov_y_deg = 60.0);
};

struct InstanceSpec {
  std::string template_id;
  int template_index = -1;
  geom::Vec3 scale_factors = geom::Vec3::Ones();
  geom::TriangleMesh mesh;  // scaled template, model frame
};

// Scaled copy of a random template: independent per-axis factors drawn
// uniformly from [lo, hi], applied about the template's box center.
InstanceSpec random_instance(const nunocs::CategoryDb& db, Rng& rng,
                             double scale_lo = 0.5, double scale_hi = 2.0);

struct SceneParams {
  double scale_lo = 0.5, scale_hi = 2.0;
  double table_height_lo = 0.0, table_height_hi = 0.05;
  double xy_range = 0.04;  // object position within +/- this
  std::vector<Quat> rest_rotations;  // empty selects upright + lying on side
  double camera_distance = 0.6;
  double camera_elevation_deg = 45.0;
  int image_width = 160, image_height = 120;
  double fov_y_deg = 60.0;
  double dropout_lo = 0.0, dropout_hi = 0.4;
};

struct SceneSample {
  InstanceSpec instance;
  Pose object_pose;  // model -> world
  double table_height = 0.0;
  CameraModel camera;
  double dropout_fraction = 0.0;
  geom::PointCloud partial;  // rendered + corrupted, world frame
};

// One synthetic observation: a scaled instance rested on the table plane (a
// rest orientation plus a random yaw; the lowest vertex exactly at table
// height), viewed by a fixed-elevation camera, depth-rendered and corrupted.
SceneSample sample_scene(const nunocs::CategoryDb& db, const SceneParams& params,
                         Rng& rng);

// Depth render: one ray through each pixel center; hits on the instance mesh
// become world-frame points (row-major pixel order). Throws OutOfFrustum when
// no pixel sees the object.
geom::PointCloud render_partial(const geom::TriangleMesh& mesh, const Pose& pose,
                                const CameraModel& camera);

// Removes exactly round(N * fraction) points, chosen uniformly without
// replacement; survivor order is preserved. fraction must lie in [0, 0.4].
geom::PointCloud corrupt_depth(const geom::PointCloud& cloud, double fraction,
                               Rng& rng);

struct Labels {
  nunocs::NunocsCloud nunocs;       // partial cloud in normalized coordinates
  nunocs::CategoryPose9D pose9d;    // exact 9D pose of the instance
};

// Ground-truth labels for a sampled scene. Coordinates are normalized with
// the FULL model's box (not the partial view's), so partial views of the same
// instance share one canonical frame. Verifies round-trip to 1e-9.
Labels emit_labels(const SceneSample& scene);

// Renders `count` scenes under seeds derived from `master_seed` and writes
// db/ (templates + manifest) and scenes/NNNNN/{cloud.ply,labels.json,meta.json}.
void write_dataset(const std::filesystem::path& dir, const nunocs::CategoryDb& db,
                   int count, const SceneParams& params, std::uint64_t master_seed);

}  // namespace catmanip::simgen
