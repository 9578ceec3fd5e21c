#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "catmanip/catbc.hpp"
#include "catmanip/config.hpp"
#include "catmanip/correspond.hpp"
#include "catmanip/mesh.hpp"
#include "catmanip/demo.hpp"
#include "catmanip/success.hpp"

namespace catmanip::cli {

enum class TaskKind { Standing, Insertion, Assembly };
enum class PolicyKind { Closed, Open, Centroid };
enum class PredictorKind { Oracle, Matcher };

// One manipulated object: analytic shape, render mesh and ordered contact
// cloud, all in the model frame.
struct InstanceShape {
  std::string shape;  // "cylinder" or "gear"
  double radius = 0.0;
  double outer_radius = 0.0;
  double inner_radius = 0.0;
  double half_height = 0.0;
  geom::TriangleMesh mesh;
  geom::PointCloud cloud;
};

// Fully resolved scenario: receptacle geometry, the demo and novel objects,
// the scripted demonstration, noise/disturbance models and the task checker
// parameters. Everything a `run` needs, validated at build time.
struct Scenario {
  std::string name;
  TaskKind task = TaskKind::Standing;
  PolicyKind policy = PolicyKind::Closed;
  PredictorKind predictor = PredictorKind::Oracle;
  correspond::ReprojectMode reproject_mode = correspond::ReprojectMode::Anchored;
  int runs = 1;
  std::uint64_t seed = 0;

  attention::SdfScene receptacle;
  InstanceShape demo_instance;
  InstanceShape novel_instance;
  demo::Trajectory demo_script;  // dense, receptacle frame

  geom::Pose receptacle_in_camera;  // staging for the synthetic demo log
  geom::Pose camera_to_robot;

  double keypose_threshold = 0.05;
  double discretize_translation = 0.002;
  double discretize_rotation = 2.0 * M_PI / 180.0;

  nunocs::SymmetryGroup pose_symmetry;  // acts in the object model frame
  catbc::TrackerModel tracker;
  catbc::DisturbanceModel disturbance;
  catbc::ControlParams control;

  catbc::StandingGeometry standing;
  catbc::InsertionGeometry insertion;
  catbc::AssemblyGeometry assembly;
};

Scenario build_scenario(const Config& cfg);

// Everything derived from the demo before any physical run: the synthetic
// camera-frame log, its parse, the sparsified last-inch segment, the dense
// correspondence and the reprojected target for the novel instance.
struct PipelineArtifacts {
  demo::DemoLog demo_log;
  demo::Trajectory parsed;
  demo::Trajectory discretized;
  int keypose_index = 0;
  demo::Trajectory last_inch;
  nunocs::NunocsCloud demo_nunocs;
  nunocs::NunocsCloud novel_nunocs;
  correspond::DenseCorrespondence corr;
  demo::Trajectory target;
};

PipelineArtifacts build_pipeline(const Scenario& scenario);

struct RunRow {
  std::string scenario;
  std::uint64_t seed = 0;
  std::string policy;
  int success = 0;
  long ticks = 0;
  double final_err_mm = 0.0;
  double final_err_deg = 0.0;
};

struct RunOutput {
  RunRow row;
  catbc::RunResult result;
  std::string failure_reason;
};

// One physical run under seed derive_seed(scenario.seed, run_index).
RunOutput execute_run(const Scenario& scenario, const PipelineArtifacts& artifacts,
                      int run_index);

// All runs of the scenario, optionally on several threads. Output order is
// by run index regardless of scheduling.
std::vector<RunOutput> run_scenario(const Scenario& scenario,
                                    const PipelineArtifacts& artifacts, int jobs = 1);

// results.csv schema: scenario,seed,policy,success,ticks,final_err_mm,final_err_deg
// sorted by (scenario, seed, policy).
void write_results_csv(const std::filesystem::path& path, std::vector<RunRow> rows);
std::vector<RunRow> load_results_csv(const std::filesystem::path& path);

void write_trace(const std::filesystem::path& path, const catbc::RunResult& result);

}  // namespace catmanip::cli
