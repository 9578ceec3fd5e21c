#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "catmanip/errors.hpp"
#include "catmanip/rng.hpp"
#include "catmanip/shapes.hpp"
#include "catmanip/simgen.hpp"

using namespace catmanip;
using geom::Pose;
using geom::Quat;
using geom::Vec3;
using simgen::CameraModel;
using simgen::SceneParams;
using simgen::SceneSample;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("catmanip_simgen_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

std::map<std::string, std::string> slurp_tree(const std::filesystem::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    files[std::filesystem::relative(entry.path(), root).string()] = buf.str();
  }
  return files;
}

SceneParams visible_params() {
  SceneParams params;
  params.scale_lo = 0.5;
  params.scale_hi = 2.0;
  params.camera_distance = 0.35;
  params.image_width = 240;
  params.image_height = 180;
  return params;
}

}  // namespace

TEST_CASE("surface clouds have their documented anchor points and balance") {
  const geom::PointCloud battery = simgen::cylinder_cloud(0.007, 0.025);
  CHECK(battery.points[0].x() == 0.0);
  CHECK(battery.points[0].y() == 0.0);
  CHECK(battery.points[0].z() == -0.025);
  CHECK(battery.centroid().norm() < 1e-13);  // top/bottom layouts mirror

  const geom::PointCloud gear = simgen::annulus_cloud(0.015, 0.004, 0.003);
  CHECK((gear.points[0] - Vec3(0.75 * 0.015, 0.0, -0.003)).norm() < 1e-15);

  // All cylinder points lie on the cylinder surface.
  for (const Vec3& p : battery.points) {
    const double radial = std::hypot(p.x(), p.y());
    const bool on_cap = std::abs(std::abs(p.z()) - 0.025) < 1e-12 &&
                        radial <= 0.007 + 1e-12;
    const bool on_wall = std::abs(radial - 0.007) < 1e-12 &&
                         std::abs(p.z()) <= 0.025 + 1e-12;
    CHECK((on_cap || on_wall));
  }
}

TEST_CASE("template categories expose the documented size ladders") {
  const auto batteries = simgen::make_battery_category(4);
  CHECK(batteries.category == "battery");
  CHECK(batteries.z_step_deg == 5.0);
  REQUIRE(batteries.models.size() == 4);
  for (int i = 0; i < 4; ++i) {
    const geom::Aabb box = geom::bounding_box(batteries.models[i].mesh);
    const double r = 0.006 + 0.001 * i;
    const double hh = 0.020 + 0.004 * i;
    CHECK(box.extent().x() == doctest::Approx(2 * r).epsilon(1e-9));
    CHECK(box.extent().z() == doctest::Approx(2 * hh).epsilon(1e-12));
  }

  const auto gears = simgen::make_gear_category(4);
  CHECK(gears.category == "gear");
  REQUIRE(gears.models.size() == 4);
  for (int i = 0; i < 4; ++i) {
    const geom::Aabb box = geom::bounding_box(gears.models[i].mesh);
    CHECK(box.extent().z() == doctest::Approx(2 * (0.003 + 0.001 * i)).epsilon(1e-12));
  }
  // Template ids are distinct.
  CHECK(gears.models[0].id != gears.models[1].id);
}

TEST_CASE("random_instance scales templates about their box center") {
  const auto db = simgen::make_battery_category(2);

  Rng fixed(21);
  const auto same = simgen::random_instance(db, fixed, 1.0, 1.0);
  const auto& original = db.models[same.template_index].mesh;
  REQUIRE(same.mesh.vertices.size() == original.vertices.size());
  for (std::size_t i = 0; i < original.vertices.size(); ++i) {
    CHECK((same.mesh.vertices[i] - original.vertices[i]).norm() < 1e-12);
  }

  Rng rng(22);
  Vec3 mean = Vec3::Zero();
  for (int i = 0; i < 100; ++i) {
    const auto inst = simgen::random_instance(db, rng, 0.5, 2.0);
    CHECK(inst.template_index >= 0);
    CHECK(inst.template_index < 2);
    CHECK((inst.scale_factors.array() >= 0.5).all());
    CHECK((inst.scale_factors.array() <= 2.0).all());
    mean += inst.scale_factors;

    // Extents multiply exactly by the drawn factors.
    const Vec3 base =
        geom::bounding_box(db.models[inst.template_index].mesh).extent();
    const Vec3 got = geom::bounding_box(inst.mesh).extent();
    CHECK((got - base.cwiseProduct(inst.scale_factors)).norm() < 1e-12);
  }
  mean /= 100.0;
  for (int a = 0; a < 3; ++a) {
    CHECK(mean[a] == doctest::Approx(1.25).epsilon(0.05));
  }

  CHECK_THROWS_AS(simgen::random_instance(nunocs::CategoryDb{}, rng),
                  EmptyDatabase);
  CHECK_THROWS_AS(simgen::random_instance(db, rng, 0.0, 1.0), DegenerateInput);
}

TEST_CASE("sample_scene rests the object exactly on the table") {
  const auto db = simgen::make_battery_category(4);
  const SceneParams params = visible_params();
  Rng rng(23);
  for (int i = 0; i < 20; ++i) {
    const SceneSample scene = simgen::sample_scene(db, params, rng);
    CHECK(scene.table_height >= params.table_height_lo);
    CHECK(scene.table_height <= params.table_height_hi);
    CHECK(std::abs(scene.object_pose.translation.x()) <= params.xy_range);
    CHECK(std::abs(scene.object_pose.translation.y()) <= params.xy_range);

    double min_z = std::numeric_limits<double>::infinity();
    for (const Vec3& v : scene.instance.mesh.vertices) {
      min_z = std::min(min_z, scene.object_pose.apply(v).z());
    }
    CHECK(std::abs(min_z - scene.table_height) < 1e-12);
    CHECK(!scene.partial.empty());
  }
}

TEST_CASE("sample_scene is deterministic under one seed") {
  const auto db = simgen::make_battery_category(4);
  const SceneParams params = visible_params();
  Rng a(24), b(24);
  const SceneSample sa = simgen::sample_scene(db, params, a);
  const SceneSample sb = simgen::sample_scene(db, params, b);
  CHECK(sa.instance.template_index == sb.instance.template_index);
  CHECK(sa.object_pose.translation == sb.object_pose.translation);
  CHECK(sa.object_pose.rotation.coeffs() == sb.object_pose.rotation.coeffs());
  REQUIRE(sa.partial.size() == sb.partial.size());
  for (std::size_t i = 0; i < sa.partial.size(); ++i) {
    CHECK(sa.partial.points[i] == sb.partial.points[i]);
  }
}

TEST_CASE("sampled yaw is uniform over the circle") {
  const auto db = simgen::make_battery_category(4);
  SceneParams params = visible_params();
  params.rest_rotations = {Quat::Identity()};  // isolate the yaw draw
  Rng rng(25);

  const int kBins = 8;
  std::array<int, kBins> counts{};
  const int n = 500;
  for (int i = 0; i < n; ++i) {
    const SceneSample scene = simgen::sample_scene(db, params, rng);
    const Vec3 heading = scene.object_pose.rotation * Vec3::UnitX();
    const double yaw = std::atan2(heading.y(), heading.x());
    int bin = static_cast<int>((yaw + M_PI) / (2.0 * M_PI) * kBins);
    bin = std::clamp(bin, 0, kBins - 1);
    ++counts[bin];
  }
  const double expected = double(n) / kBins;
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi2 < 18.475);  // chi-square 99th percentile, 7 degrees of freedom
}

TEST_CASE("render_partial: face-on box renders its top face only") {
  const geom::TriangleMesh slab = simgen::make_box_mesh(Vec3(0.05, 0.05, 0.01));
  const CameraModel cam =
      CameraModel::looking_at(Vec3::Zero(), 0.5, 90.0, 0.0, 160, 120);
  const geom::PointCloud cloud = render_partial(slab, Pose::identity(), cam);

  REQUIRE(cloud.size() > 100);
  REQUIRE(cloud.source_indices.size() == cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    CHECK(std::abs(cloud.points[i].z() - 0.01) < 1e-9);
    CHECK(std::abs(cloud.points[i].x()) <= 0.05 + 1e-9);
    CHECK(std::abs(cloud.points[i].y()) <= 0.05 + 1e-9);
    if (i > 0) CHECK(cloud.source_indices[i] > cloud.source_indices[i - 1]);
  }

  // More pixels see strictly more of the same face.
  const CameraModel coarse =
      CameraModel::looking_at(Vec3::Zero(), 0.5, 90.0, 0.0, 80, 60);
  const geom::PointCloud few = render_partial(slab, Pose::identity(), coarse);
  CHECK(few.size() < cloud.size());

  // An object far outside the view frustum renders nothing.
  CHECK_THROWS_AS(
      render_partial(slab, Pose::from_translation(Vec3(10, 0, 0)), cam),
      OutOfFrustum);
  CHECK_THROWS_AS(render_partial(geom::TriangleMesh{}, Pose::identity(), cam),
                  EmptyCloud);
}

TEST_CASE("corrupt_depth removes the exact count and preserves order") {
  geom::PointCloud cloud;
  for (int i = 0; i < 1000; ++i) {
    cloud.points.emplace_back(double(i), 0.0, 0.0);
    cloud.source_indices.push_back(i);
  }

  Rng rng(26);
  const geom::PointCloud same = simgen::corrupt_depth(cloud, 0.0, rng);
  REQUIRE(same.size() == 1000);
  for (std::size_t i = 0; i < same.size(); ++i) {
    CHECK(same.points[i] == cloud.points[i]);
  }

  const geom::PointCloud cut = simgen::corrupt_depth(cloud, 0.4, rng);
  REQUIRE(cut.size() == 600);
  for (std::size_t i = 1; i < cut.size(); ++i) {
    CHECK(cut.source_indices[i] > cut.source_indices[i - 1]);  // subsequence
    CHECK(cut.points[i].x() == double(cut.source_indices[i]));
  }

  // Fractional counts round to nearest.
  geom::PointCloud ten;
  for (int i = 0; i < 10; ++i) ten.points.emplace_back(double(i), 0, 0);
  CHECK(simgen::corrupt_depth(ten, 0.25, rng).size() == 7);  // removes 3

  // Same seed replays the same survivors; another seed picks differently.
  Rng r1(27), r2(27), r3(28);
  const auto a = simgen::corrupt_depth(cloud, 0.3, r1);
  const auto b = simgen::corrupt_depth(cloud, 0.3, r2);
  const auto c = simgen::corrupt_depth(cloud, 0.3, r3);
  REQUIRE(a.size() == b.size());
  bool all_equal_ab = true, all_equal_ac = a.size() == c.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    all_equal_ab = all_equal_ab && a.source_indices[i] == b.source_indices[i];
    if (all_equal_ac) {
      all_equal_ac = a.source_indices[i] == c.source_indices[i];
    }
  }
  CHECK(all_equal_ab);
  CHECK(!all_equal_ac);

  CHECK_THROWS_AS(simgen::corrupt_depth(cloud, -0.1, rng), FractionOutOfRange);
  CHECK_THROWS_AS(simgen::corrupt_depth(cloud, 0.41, rng), FractionOutOfRange);
}

TEST_CASE("emit_labels: exact 9D pose for a known box instance") {
  Rng rng(29);
  SceneSample scene;
  scene.instance.template_id = "box";
  scene.instance.template_index = 0;
  scene.instance.mesh = simgen::make_box_mesh(Vec3(0.01, 0.02, 0.04));
  scene.object_pose = Pose(rng.random_rotation(), rng.normal3(0.3));
  const geom::PointCloud on_surface =
      geom::sample_surface(scene.instance.mesh, 200, rng);
  scene.partial = on_surface.transformed(scene.object_pose);

  const simgen::Labels labels = simgen::emit_labels(scene);
  CHECK(labels.pose9d.scales.x() == 1.0);
  CHECK(labels.pose9d.scales.y() == 2.0);
  CHECK(labels.pose9d.scales.z() == 4.0);
  CHECK(labels.pose9d.similarity.scale == doctest::Approx(0.02).epsilon(1e-12));
  CHECK(labels.pose9d.similarity.rotation.coeffs() ==
        scene.object_pose.rotation.coeffs());
  for (std::size_t i = 0; i < scene.partial.size(); ++i) {
    const Vec3 back = labels.pose9d.apply(labels.nunocs.coords[i]);
    CHECK((back - scene.partial.points[i]).norm() < 1e-9);
    CHECK(labels.nunocs.coords[i].minCoeff() >= -1e-9);
    CHECK(labels.nunocs.coords[i].maxCoeff() <= 1.0 + 1e-9);
  }

  // With an identity pose the labels reduce to plain box normalization.
  SceneSample flat = scene;
  flat.object_pose = Pose::identity();
  flat.partial = on_surface;
  const simgen::Labels direct = simgen::emit_labels(flat);
  const auto norm = nunocs::normalize_with_box(
      on_surface, geom::bounding_box(flat.instance.mesh));
  for (std::size_t i = 0; i < on_surface.size(); ++i) {
    CHECK((direct.nunocs.coords[i] - norm.cloud.coords[i]).norm() == 0.0);
  }

  SceneSample empty = scene;
  empty.partial = geom::PointCloud{};
  CHECK_THROWS_AS(simgen::emit_labels(empty), EmptyCloud);
}

TEST_CASE("write_dataset is byte-identical under one master seed") {
  TempDir dir;
  const auto db = simgen::make_battery_category(2);
  const SceneParams params = visible_params();

  simgen::write_dataset(dir.path / "a", db, 3, params, 99);
  simgen::write_dataset(dir.path / "b", db, 3, params, 99);

  const auto a = slurp_tree(dir.path / "a");
  const auto b = slurp_tree(dir.path / "b");
  REQUIRE(!a.empty());
  CHECK(a == b);

  // Expected layout: template db plus one directory per scene.
  CHECK(a.count("db/manifest.json") == 1);
  for (const char* scene : {"00000", "00001", "00002"}) {
    CHECK(a.count(std::string("scenes/") + scene + "/cloud.ply") == 1);
    CHECK(a.count(std::string("scenes/") + scene + "/labels.json") == 1);
    CHECK(a.count(std::string("scenes/") + scene + "/meta.json") == 1);
  }

  // A different master seed produces different scene content.
  simgen::write_dataset(dir.path / "c", db, 3, params, 100);
  const auto c = slurp_tree(dir.path / "c");
  CHECK(a.at("scenes/00000/cloud.ply") != c.at("scenes/00000/cloud.ply"));
}
