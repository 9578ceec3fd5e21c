#include <doctest.h>

#include <cmath>

#include "catmanip/attention.hpp"
#include "catmanip/errors.hpp"
#include "catmanip/rng.hpp"
#include "catmanip/shapes.hpp"

using namespace catmanip;
using attention::AttentionMap;
using attention::SdfPrimitive;
using attention::SdfScene;
using geom::Pose;
using geom::Quat;
using geom::Vec3;

namespace {

// Exact closest point on a triangle (Ericson, Real-Time Collision Detection).
Vec3 closest_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  }
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

double mesh_distance(const geom::TriangleMesh& mesh, const Vec3& p) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& f : mesh.faces) {
    const Vec3 q = closest_on_triangle(p, mesh.vertices[f[0]], mesh.vertices[f[1]],
                                       mesh.vertices[f[2]]);
    best = std::min(best, (p - q).norm());
  }
  return best;
}

SdfScene floor_scene(double z = 0.0) {
  SdfScene scene;
  scene.primitives.push_back(
      SdfPrimitive::plane(Pose::from_translation(Vec3(0, 0, z)), "floor"));
  return scene;
}

}  // namespace

TEST_CASE("sdf primitives: forced analytic values") {
  const SdfPrimitive plane = SdfPrimitive::plane(Pose::identity());
  CHECK(plane.evaluate(Vec3(0, 0, 2)) == 2.0);
  CHECK(plane.evaluate(Vec3(7, -3, -0.5)) == -0.5);

  const SdfPrimitive cyl = SdfPrimitive::cylinder(Pose::identity(), 1.0, 100.0);
  CHECK(cyl.evaluate(Vec3(3, 0, 0)) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(cyl.evaluate(Vec3(0, 0, 0)) == doctest::Approx(-1.0).epsilon(1e-15));

  const SdfPrimitive cap = SdfPrimitive::cylinder(Pose::identity(), 1.0, 1.0);
  CHECK(cap.evaluate(Vec3(0, 0, 3)) == doctest::Approx(2.0).epsilon(1e-15));
  // Outside both radially and axially: Euclidean corner distance.
  CHECK(cap.evaluate(Vec3(2, 0, 2)) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

  const SdfPrimitive box = SdfPrimitive::box(Pose::identity(), Vec3(1, 1, 1));
  CHECK(box.evaluate(Vec3(2, 0, 0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(box.evaluate(Vec3(2, 2, 2)) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
  CHECK(box.evaluate(Vec3(0.5, 0, 0)) == doctest::Approx(-0.5).epsilon(1e-15));

  CHECK_THROWS_AS(SdfPrimitive::box(Pose::identity(), Vec3(1, 0, 1)),
                  InvalidGeometry);
  CHECK_THROWS_AS(SdfPrimitive::cylinder(Pose::identity(), -1.0, 1.0),
                  InvalidGeometry);
}

TEST_CASE("box sdf equals the exact triangle-mesh distance oracle") {
  const geom::TriangleMesh mesh = simgen::make_box_mesh(Vec3(1, 1, 1));
  SdfScene scene;
  scene.primitives.push_back(SdfPrimitive::box(Pose::identity(), Vec3(1, 1, 1)));

  for (double x = -2.0; x <= 2.01; x += 0.25) {
    for (double y = -2.0; y <= 2.01; y += 0.25) {
      for (double z = -2.0; z <= 2.01; z += 0.25) {
        const Vec3 p(x, y, z);
        const double sdf = scene.evaluate(p);
        const double oracle = mesh_distance(mesh, p);
        const bool inside =
            std::abs(x) <= 1.0 && std::abs(y) <= 1.0 && std::abs(z) <= 1.0;
        CHECK(std::abs(std::abs(sdf) - oracle) < 1e-9);
        CHECK((sdf <= 0.0) == inside);
      }
    }
  }
}

TEST_CASE("sdf respects a primitive's pose") {
  Rng rng(41);
  const Pose pose(rng.random_rotation(), rng.normal3(1.0));
  SdfScene scene;
  scene.primitives.push_back(SdfPrimitive::box(pose, Vec3(0.2, 0.3, 0.4)));
  for (int i = 0; i < 200; ++i) {
    const Vec3 local = rng.normal3(1.0);
    const Vec3 q = local.cwiseAbs() - Vec3(0.2, 0.3, 0.4);
    const double expect =
        q.cwiseMax(0.0).norm() + std::min(q.maxCoeff(), 0.0);
    CHECK(scene.evaluate(pose.apply(local)) ==
          doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("scene union is the pointwise minimum; gradient points outward") {
  SdfScene scene = floor_scene();
  scene.primitives.push_back(
      SdfPrimitive::cylinder(Pose::from_translation(Vec3(0, 0, 0.5)), 0.1, 0.5));
  CHECK(scene.evaluate(Vec3(0, 0, 2)) == doctest::Approx(1.0));   // cylinder top
  CHECK(scene.evaluate(Vec3(5, 0, 0.2)) == doctest::Approx(0.2)); // floor

  const Vec3 g = scene.gradient(Vec3(0, 0, 2));
  CHECK((g - Vec3(0, 0, 1)).norm() < 1e-6);

  SdfScene empty;
  CHECK_THROWS_AS(empty.evaluate(Vec3::Zero()), EmptyScene);
}

TEST_CASE("min/argmin distance over a posed cloud") {
  geom::PointCloud model;
  model.points = {Vec3(0, 0, 0.5), Vec3(0, 0, 0.2), Vec3(0, 0, 0.9)};
  const SdfScene scene = floor_scene();
  const Pose lift = Pose::from_translation(Vec3(0, 0, 0.1));
  CHECK(scene.min_distance(model, lift) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(scene.argmin_distance(model, lift) == 1);

  // Ties resolve to the lowest index.
  geom::PointCloud tied;
  tied.points = {Vec3(0, 0, 0.2), Vec3(1, 0, 0.2)};
  CHECK(scene.argmin_distance(tied, Pose::identity()) == 0);
}

TEST_CASE("attention: two points at distances 0 and ln 3 weigh 0.75 and 0.25") {
  geom::PointCloud model;
  model.points = {Vec3(0, 0, 0), Vec3(0, 0, std::log(3.0))};
  const AttentionMap map =
      attention::attention_heatmap(model, Pose::identity(), floor_scene());
  CHECK(map.weights[0] == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(map.weights[1] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(map.anchor_index == 0);
}

TEST_CASE("attention: equal distances give every point weight 1 - 1/n") {
  geom::PointCloud model;
  const int n = 17;
  for (int i = 0; i < n; ++i) {
    model.points.emplace_back(0.01 * i, 0.0, 0.3);  // same height over a plane
  }
  const AttentionMap map =
      attention::attention_heatmap(model, Pose::identity(), floor_scene());
  for (double w : map.weights) {
    CHECK(w == doctest::Approx(1.0 - 1.0 / n).epsilon(1e-12));
  }
  CHECK(map.anchor_index == 0);  // ties resolve to the lowest index
}

TEST_CASE("attention: complements sum to 1, anchor equals brute-force argmin") {
  Rng rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    SdfScene scene = floor_scene(rng.uniform(-0.2, 0.0));
    scene.primitives.push_back(SdfPrimitive::box(
        Pose(rng.random_rotation(), rng.normal3(0.3)), Vec3(0.1, 0.15, 0.2)));
    geom::PointCloud model;
    const int n = 40;
    for (int i = 0; i < n; ++i) model.points.push_back(rng.normal3(0.2));
    const Pose pose(rng.random_rotation(), rng.normal3(0.4) + Vec3(0, 0, 1.0));

    const AttentionMap map = attention::attention_heatmap(model, pose, scene);
    double sum = 0.0;
    for (double w : map.weights) sum += 1.0 - w;
    CHECK(std::abs(sum - 1.0) < 1e-9);

    int brute = 0;
    double best = scene.evaluate(pose.apply(model.points[0]));
    for (int i = 1; i < n; ++i) {
      const double d = scene.evaluate(pose.apply(model.points[i]));
      if (d < best) {
        best = d;
        brute = i;
      }
    }
    CHECK(map.anchor_index == brute);
    CHECK(map.anchor_index == scene.argmin_distance(model, pose));
  }
}

TEST_CASE("attention: shifting every distance by a constant leaves weights fixed") {
  Rng rng(43);
  geom::PointCloud model;
  for (int i = 0; i < 30; ++i) model.points.push_back(rng.normal3(0.1));
  const Pose pose = Pose::from_translation(Vec3(0, 0, 0.5));

  // Lowering the floor by c adds exactly c to every plane distance.
  const AttentionMap base =
      attention::attention_heatmap(model, pose, floor_scene(0.0));
  for (double c : {0.1, 1.0, 25.0}) {
    const AttentionMap shifted =
        attention::attention_heatmap(model, pose, floor_scene(-c));
    REQUIRE(shifted.size() == base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
      CHECK(std::abs(shifted.weights[i] - base.weights[i]) < 1e-9);
    }
    CHECK(shifted.anchor_index == base.anchor_index);
  }
}

TEST_CASE("anchor_frame: translation moves to the anchor's world position") {
  CHECK((attention::anchor_frame(Pose::identity(), Vec3(0, 0, -0.025)).translation -
         Vec3(0, 0, -0.025))
            .norm() == 0.0);

  Rng rng(44);
  for (int i = 0; i < 100; ++i) {
    const Pose pose(rng.random_rotation(), rng.normal3(1.0));
    const Vec3 p = rng.normal3(0.5);
    const Pose anchored = attention::anchor_frame(pose, p);
    CHECK((anchored.translation - compose(pose, Pose::from_translation(p)).translation)
              .norm() < 1e-12);
    // The pose constructor renormalizes the quaternion, so allow last-bit drift.
    CHECK(geom::rotation_geodesic(anchored.rotation, pose.rotation) < 1e-12);
  }
}

TEST_CASE("transfer_attention: identity, permutation, max rule, errors") {
  AttentionMap demo;
  demo.weights = {0.9, 0.5, 0.2};
  demo.anchor_index = 0;

  const AttentionMap same = attention::transfer_attention(demo, {0, 1, 2}, 3);
  CHECK(same.weights == demo.weights);
  CHECK(same.anchor_index == 0);

  const AttentionMap permuted = attention::transfer_attention(demo, {2, 0, 1}, 3);
  CHECK(permuted.weights[2] == 0.9);
  CHECK(permuted.weights[0] == 0.5);
  CHECK(permuted.weights[1] == 0.2);
  CHECK(permuted.anchor_index == 2);

  // Many-to-one takes the max; unassigned novel points get 0.
  const AttentionMap squeezed = attention::transfer_attention(demo, {1, 1, 1}, 3);
  CHECK(squeezed.weights[1] == 0.9);
  CHECK(squeezed.weights[0] == 0.0);
  CHECK(squeezed.weights[2] == 0.0);
  CHECK(squeezed.anchor_index == 1);

  AttentionMap broken = demo;
  broken.anchor_index = -1;
  CHECK_THROWS_AS(attention::transfer_attention(broken, {0, 1, 2}, 3),
                  MissingAnchorImage);
  CHECK_THROWS_AS(attention::transfer_attention(demo, {0, 1}, 3), SizeMismatch);
  CHECK_THROWS_AS(attention::transfer_attention(demo, {0, 1, 5}, 3), SizeMismatch);
}

TEST_CASE("standing scene: the anchor sits on the model's minimum-z surface") {
  const geom::PointCloud battery = simgen::cylinder_cloud(0.007, 0.025);
  SdfScene scene = floor_scene(-0.01);
  scene.primitives.push_back(SdfPrimitive::cylinder(
      Pose::from_translation(Vec3(0, 0, -0.005)), 0.009, 0.005));

  // Hovering upright above the platform during a placing descent.
  const Pose pose = Pose::from_translation(Vec3(0, 0, 0.0252));
  const AttentionMap map = attention::attention_heatmap(battery, pose, scene);
  double min_z = 1e9;
  for (const Vec3& p : battery.points) min_z = std::min(min_z, p.z());
  CHECK(battery.points[map.anchor_index].z() - min_z < 1e-3);
}

TEST_CASE("attention transfers onto a wider battery and stays on its bottom") {
  const geom::PointCloud demo_model = simgen::cylinder_cloud(0.007, 0.025);
  const geom::PointCloud novel_model = simgen::cylinder_cloud(0.0098, 0.025);
  SdfScene scene = floor_scene(-0.01);
  scene.primitives.push_back(SdfPrimitive::cylinder(
      Pose::from_translation(Vec3(0, 0, -0.005)), 0.012, 0.005));

  const Pose pose = Pose::from_translation(Vec3(0, 0, 0.0253));
  const AttentionMap demo_map =
      attention::attention_heatmap(demo_model, pose, scene);

  // Same construction recipe, so the index layout matches point-for-point.
  REQUIRE(demo_model.size() == novel_model.size());
  std::vector<int> identity(demo_model.size());
  for (std::size_t i = 0; i < identity.size(); ++i) identity[i] = static_cast<int>(i);
  const AttentionMap transferred =
      attention::transfer_attention(demo_map, identity, novel_model.size());

  double min_z = 1e9;
  for (const Vec3& p : novel_model.points) min_z = std::min(min_z, p.z());
  CHECK(novel_model.points[transferred.anchor_index].z() - min_z < 1e-3);

  // The recomputed heatmap on the novel model agrees on where the bottom is.
  const AttentionMap direct =
      attention::attention_heatmap(novel_model, pose, scene);
  CHECK(novel_model.points[direct.anchor_index].z() - min_z < 1e-3);
}

TEST_CASE("attention error paths") {
  CHECK_THROWS_AS(
      attention::attention_heatmap(geom::PointCloud{}, Pose::identity(),
                                   floor_scene()),
      EmptyCloud);
  geom::PointCloud one;
  one.points = {Vec3::Zero()};
  CHECK_THROWS_AS(attention::attention_heatmap(one, Pose::identity(), SdfScene{}),
                  EmptyScene);
}
