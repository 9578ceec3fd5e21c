#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "catmanip/attention.hpp"
#include "catmanip/correspond.hpp"
#include "catmanip/kdtree.hpp"
#include "catmanip/nunocs.hpp"
#include "catmanip/scenario.hpp"
#include "catmanip/umeyama.hpp"

namespace py = pybind11;
using namespace catmanip;

namespace {

using Points = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

geom::PointCloud to_cloud(const Points& m) {
  geom::PointCloud cloud;
  cloud.points.reserve(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) cloud.points.push_back(m.row(i));
  return cloud;
}

Points from_points(const std::vector<geom::Vec3>& pts) {
  Points m(static_cast<Eigen::Index>(pts.size()), 3);
  for (std::size_t i = 0; i < pts.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = pts[i];
  return m;
}

geom::Pose pose_from(const Eigen::Vector4d& q_wxyz, const geom::Vec3& p) {
  return geom::Pose(geom::Quat(q_wxyz[0], q_wxyz[1], q_wxyz[2], q_wxyz[3]), p);
}

py::dict pose_dict(const geom::Pose& pose) {
  py::dict d;
  d["q"] = Eigen::Vector4d(pose.rotation.w(), pose.rotation.x(),
                           pose.rotation.y(), pose.rotation.z());
  d["p"] = geom::Vec3(pose.translation);
  return d;
}

attention::SdfScene scene_from(const py::list& primitives) {
  attention::SdfScene scene;
  for (const auto& item : primitives) {
    py::dict d = item.cast<py::dict>();
    const std::string type = d["type"].cast<std::string>();
    const geom::Pose pose =
        pose_from(d.contains("q") ? d["q"].cast<Eigen::Vector4d>()
                                  : Eigen::Vector4d(1, 0, 0, 0),
                  d.contains("p") ? d["p"].cast<geom::Vec3>() : geom::Vec3::Zero());
    const std::string name =
        d.contains("name") ? d["name"].cast<std::string>() : type;
    if (type == "plane") {
      scene.primitives.push_back(attention::SdfPrimitive::plane(pose, name));
    } else if (type == "box") {
      scene.primitives.push_back(attention::SdfPrimitive::box(
          pose, d["half_extents"].cast<geom::Vec3>(), name));
    } else if (type == "cylinder") {
      scene.primitives.push_back(attention::SdfPrimitive::cylinder(
          pose, d["radius"].cast<double>(), d["half_height"].cast<double>(), name));
    } else {
      throw ConfigError("unknown primitive type '" + type + "'");
    }
  }
  return scene;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "category-level manipulation core operations";

  py::register_exception<Error>(m, "CatmanipError");

  m.def(
      "normalize",
      [](const Points& points) {
        const nunocs::NormalizeResult res = nunocs::normalize_to_unit_cube(to_cloud(points));
        py::dict d;
        d["coords"] = from_points(res.cloud.coords);
        d["scales"] = geom::Vec3(res.cloud.scales);
        d["extents"] = geom::Vec3(res.extents);
        d["origin"] = geom::Vec3(res.origin);
        return d;
      },
      py::arg("points"),
      "Per-axis normalization of a point cloud into the unit cube.");

  m.def(
      "denormalize",
      [](const Points& coords, const geom::Vec3& extents, const geom::Vec3& origin) {
        nunocs::NunocsCloud cloud;
        const geom::PointCloud tmp = to_cloud(coords);
        cloud.coords = tmp.points;
        return from_points(nunocs::denormalize(cloud, extents, origin).points);
      },
      py::arg("coords"), py::arg("extents"), py::arg("origin"));

  m.def(
      "umeyama",
      [](const Points& src, const Points& dst) {
        const geom::SimilarityTransform t =
            geom::umeyama_similarity(to_cloud(src), to_cloud(dst));
        py::dict d;
        d["scale"] = t.scale;
        d["q"] = Eigen::Vector4d(t.rotation.w(), t.rotation.x(), t.rotation.y(),
                                 t.rotation.z());
        d["p"] = geom::Vec3(t.translation);
        return d;
      },
      py::arg("src"), py::arg("dst"),
      "Least-squares similarity transform aligning src onto dst.");

  m.def(
      "solve_pose9d",
      [](const Points& coords, const geom::Vec3& scales, const Points& observed) {
        nunocs::NunocsCloud cloud;
        cloud.coords = to_cloud(coords).points;
        cloud.scales = scales;
        const nunocs::CategoryPose9D p = nunocs::solve_pose9d(cloud, to_cloud(observed));
        py::dict d;
        d["scale"] = p.similarity.scale;
        d["q"] = Eigen::Vector4d(p.similarity.rotation.w(), p.similarity.rotation.x(),
                                 p.similarity.rotation.y(), p.similarity.rotation.z());
        d["p"] = geom::Vec3(p.similarity.translation);
        d["scales"] = geom::Vec3(p.scales);
        d["rms"] = p.rms_residual;
        return d;
      },
      py::arg("coords"), py::arg("scales"), py::arg("observed"));

  m.def(
      "nearest_neighbors",
      [](const Points& data, const Points& queries) {
        const geom::PointCloud cloud = to_cloud(data);
        const geom::KdTree tree(cloud);
        Eigen::VectorXi idx(queries.rows());
        Eigen::VectorXd dist(queries.rows());
        for (Eigen::Index i = 0; i < queries.rows(); ++i) {
          const geom::NearestResult r = tree.nearest(queries.row(i));
          idx[i] = r.index;
          dist[i] = r.distance;
        }
        return py::make_tuple(idx, dist);
      },
      py::arg("data"), py::arg("queries"),
      "Exact nearest neighbor in data for each query point.");

  m.def(
      "attention",
      [](const Points& model, const Eigen::Vector4d& q, const geom::Vec3& p,
         const py::list& primitives) {
        const attention::SdfScene scene = scene_from(primitives);
        const attention::AttentionMap map =
            attention::attention_heatmap(to_cloud(model), pose_from(q, p), scene);
        Eigen::VectorXd w(static_cast<Eigen::Index>(map.weights.size()));
        for (std::size_t i = 0; i < map.weights.size(); ++i)
          w[static_cast<Eigen::Index>(i)] = map.weights[i];
        py::dict d;
        d["weights"] = w;
        d["anchor_index"] = map.anchor_index;
        return d;
      },
      py::arg("model"), py::arg("q"), py::arg("p"), py::arg("primitives"),
      "Scene-proximity attention weights and anchor for a posed model cloud.");

  m.def(
      "correspond",
      [](const Points& demo_coords, const geom::Vec3& demo_scales,
         const Points& novel_coords, const geom::Vec3& novel_scales) {
        nunocs::NunocsCloud demo, novel;
        demo.coords = to_cloud(demo_coords).points;
        demo.scales = demo_scales;
        novel.coords = to_cloud(novel_coords).points;
        novel.scales = novel_scales;
        const correspond::DenseCorrespondence corr =
            correspond::build_correspondence(demo, novel);
        Eigen::VectorXi idx(static_cast<Eigen::Index>(corr.demo_to_novel.size()));
        Eigen::VectorXd res(static_cast<Eigen::Index>(corr.residuals.size()));
        for (std::size_t i = 0; i < corr.demo_to_novel.size(); ++i) {
          idx[static_cast<Eigen::Index>(i)] = corr.demo_to_novel[i];
          res[static_cast<Eigen::Index>(i)] = corr.residuals[i];
        }
        return py::make_tuple(idx, res);
      },
      py::arg("demo_coords"), py::arg("demo_scales"), py::arg("novel_coords"),
      py::arg("novel_scales"),
      "Dense demo-to-novel correspondence through canonical coordinates.");

  m.def(
      "run_config",
      [](const std::filesystem::path& config, py::object seed, int jobs) {
        cli::Config cfg = cli::Config::load(config);
        cli::Scenario s = cli::build_scenario(cfg);
        if (!seed.is_none()) s.seed = seed.cast<std::uint64_t>();
        const cli::PipelineArtifacts art = cli::build_pipeline(s);
        const std::vector<cli::RunOutput> outs = cli::run_scenario(s, art, jobs);
        py::list rows;
        for (const cli::RunOutput& o : outs) {
          py::dict d;
          d["scenario"] = o.row.scenario;
          d["seed"] = o.row.seed;
          d["policy"] = o.row.policy;
          d["success"] = o.row.success;
          d["ticks"] = o.row.ticks;
          d["final_err_mm"] = o.row.final_err_mm;
          d["final_err_deg"] = o.row.final_err_deg;
          d["failure_reason"] = o.failure_reason;
          d["final_true_pose"] = pose_dict(o.result.final_true_pose);
          rows.append(d);
        }
        return rows;
      },
      py::arg("config"), py::arg("seed") = py::none(), py::arg("jobs") = 1,
      "Build the scenario in a config file and execute all of its runs.");
}
