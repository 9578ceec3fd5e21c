#include "catmanip/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "catmanip/errors.hpp"
#include "catmanip/predict.hpp"
#include "catmanip/shapes.hpp"

namespace catmanip::cli {

using nlohmann::json;

namespace {

geom::Quat quat_from_rpy(const geom::Vec3& rpy) {
  return geom::quat_from_axis_angle(geom::Vec3::UnitZ(), rpy.z()) *
         geom::quat_from_axis_angle(geom::Vec3::UnitY(), rpy.y()) *
         geom::quat_from_axis_angle(geom::Vec3::UnitX(), rpy.x());
}

geom::Pose pose_from_config(const Config& cfg, const std::string& section) {
  const geom::Vec3 position = cfg.get_vec3(section + ".position", geom::Vec3::Zero());
  const geom::Vec3 rpy = cfg.get_vec3(section + ".rpy", geom::Vec3::Zero());
  return geom::Pose(quat_from_rpy(rpy), position);
}

attention::SdfScene parse_primitives(const Config& cfg) {
  attention::SdfScene scene;
  for (const std::string& section : cfg.sections()) {
    if (section.rfind("primitive.", 0) != 0) continue;
    const std::string name = section.substr(std::string("primitive.").size());
    const std::string type = cfg.get_string(section + ".type");
    const geom::Pose pose = pose_from_config(cfg, section);
    if (type == "plane") {
      scene.primitives.push_back(attention::SdfPrimitive::plane(pose, name));
    } else if (type == "box") {
      scene.primitives.push_back(attention::SdfPrimitive::box(
          pose, cfg.get_vec3(section + ".half_extents"), name));
    } else if (type == "cylinder") {
      scene.primitives.push_back(attention::SdfPrimitive::cylinder(
          pose, cfg.get_double(section + ".radius"),
          cfg.get_double(section + ".half_height"), name));
    } else {
      throw ConfigError("unknown primitive type '" + type + "' in [" + section + "]");
    }
  }
  if (scene.empty()) throw ConfigError("config defines no [primitive.*] sections");
  return scene;
}

InstanceShape parse_instance(const Config& cfg, const std::string& section) {
  InstanceShape inst;
  inst.shape = cfg.get_string(section + ".shape");
  inst.half_height = cfg.get_double(section + ".half_height");
  if (inst.half_height <= 0.0) {
    throw ConfigError("[" + section + "] half_height must be positive");
  }
  if (inst.shape == "cylinder") {
    inst.radius = cfg.get_double(section + ".radius");
    if (inst.radius <= 0.0) throw ConfigError("[" + section + "] radius must be positive");
    inst.mesh = simgen::make_cylinder_mesh(inst.radius, inst.half_height);
    inst.cloud = simgen::cylinder_cloud(inst.radius, inst.half_height);
  } else if (inst.shape == "gear") {
    inst.outer_radius = cfg.get_double(section + ".outer_radius");
    inst.inner_radius = cfg.get_double(section + ".inner_radius");
    if (inst.inner_radius <= 0.0 || inst.outer_radius <= inst.inner_radius) {
      throw ConfigError("[" + section + "] needs 0 < inner_radius < outer_radius");
    }
    inst.mesh = simgen::make_annulus_mesh(inst.outer_radius, inst.inner_radius,
                                          inst.half_height);
    inst.cloud = simgen::annulus_cloud(inst.outer_radius, inst.inner_radius,
                                       inst.half_height);
  } else {
    throw ConfigError("[" + section + "] unknown shape '" + inst.shape + "'");
  }
  return inst;
}

// Appends linearly interpolated poses from the last waypoint to `to`, at
// roughly `step_trans` / `step_rot` resolution, advancing time by dt each.
void append_segment(demo::Trajectory& traj, const geom::Pose& to, double dt,
                    double step_trans = 0.0005,
                    double step_rot = 0.5 * M_PI / 180.0) {
  const geom::Pose from = traj.waypoints.back().pose;
  const double span = std::max(geom::translation_distance(from, to) / step_trans,
                               geom::rotation_distance(from, to) / step_rot);
  const int steps = std::max(1, static_cast<int>(std::ceil(span)));
  double t = traj.waypoints.back().t;
  for (int i = 1; i <= steps; ++i) {
    t += dt;
    traj.waypoints.push_back({t, geom::interpolate(from, to, double(i) / steps)});
  }
}

demo::Trajectory build_standing_script(const Config& cfg, const InstanceShape& obj) {
  const double platform_top = cfg.get_double("task.platform_top_z", 0.0);
  const double approach = cfg.get_double("demo.approach_height", 0.09);
  const geom::Pose final_pose(geom::Quat::Identity(),
                              geom::Vec3(0, 0, platform_top + obj.half_height));
  demo::Trajectory traj;
  traj.waypoints.push_back(
      {0.0, geom::Pose(geom::Quat::Identity(),
                       final_pose.translation + geom::Vec3(0, 0, approach))});
  append_segment(traj, final_pose, 1.0 / 30.0);
  return traj;
}

demo::Trajectory build_insertion_script(const Config& cfg, const InstanceShape& obj) {
  const double base_z = cfg.get_double("task.shaft_base_z", 0.0);
  const double approach = cfg.get_double("demo.approach_height", 0.09);
  const geom::Pose final_pose(geom::Quat::Identity(),
                              geom::Vec3(0, 0, base_z + obj.half_height));
  demo::Trajectory traj;
  traj.waypoints.push_back(
      {0.0, geom::Pose(geom::Quat::Identity(),
                       final_pose.translation + geom::Vec3(0, 0, approach))});
  append_segment(traj, final_pose, 1.0 / 30.0);
  return traj;
}

// Tilted entry, push against the spring, pivot level, settle onto the floor.
demo::Trajectory build_assembly_script(const Config& cfg, const InstanceShape& obj) {
  const double wall_x = cfg.get_double("task.wall_x", 0.0);
  const double tilt = cfg.get_double("demo.entry_tilt", 30.0 * M_PI / 180.0);
  const double entry_x = cfg.get_double("demo.entry_x", 0.020);
  const double press_x = cfg.get_double("demo.press_x", 0.005);
  const double approach = cfg.get_double("demo.approach_height", 0.06);
  const double hover = cfg.get_double("demo.hover_clearance", 0.0005);
  const double r = obj.radius;
  const double length = 2.0 * obj.half_height;
  if (r <= 0.0) throw ConfigError("assembly object must be a cylinder");

  // Battery axis along +x when level; alpha is elevation of the positive end.
  const auto orientation = [](double alpha) {
    return geom::quat_from_axis_angle(geom::Vec3::UnitY(), M_PI / 2.0 - alpha);
  };
  // Pose given the negative end tip and the tilt angle.
  const auto pose_at = [&](double tip_x, double tip_z, double alpha) {
    const geom::Vec3 axis(std::cos(alpha), 0.0, std::sin(alpha));
    const geom::Vec3 center =
        geom::Vec3(tip_x, 0.0, tip_z) + 0.5 * length * axis;
    return geom::Pose(orientation(alpha), center);
  };
  const auto rim_tip_z = [&](double alpha) {
    return hover + r * std::cos(alpha);  // keeps the low rim `hover` above floor
  };

  demo::Trajectory traj;
  traj.waypoints.push_back(
      {0.0, pose_at(wall_x + entry_x, approach, tilt)});
  // Descend into the slot, tilted.
  append_segment(traj, pose_at(wall_x + entry_x, rim_tip_z(tilt), tilt), 1.0 / 30.0);
  // Push toward the spring wall.
  append_segment(traj, pose_at(wall_x + press_x, rim_tip_z(tilt), tilt), 1.0 / 30.0);
  // Pivot level about the negative tip, low rim staying just above the floor.
  const int pivot_steps = std::max(2, static_cast<int>(std::ceil(tilt / (0.5 * M_PI / 180.0))));
  double t = traj.waypoints.back().t;
  for (int i = 1; i <= pivot_steps; ++i) {
    const double a = tilt * (1.0 - double(i) / pivot_steps);
    t += 1.0 / 30.0;
    traj.waypoints.push_back({t, pose_at(wall_x + press_x, rim_tip_z(a), a)});
  }
  // Settle onto the floor.
  append_segment(traj, pose_at(wall_x + press_x, r, 0.0), 1.0 / 30.0);
  return traj;
}

catbc::DisturbanceModel parse_disturbance(const Config& cfg) {
  catbc::DisturbanceModel d;
  d.grasp_slip_sigma_trans = cfg.get_double("disturbance.grasp_slip_sigma_trans", 0.0);
  d.grasp_slip_sigma_rot = cfg.get_double("disturbance.grasp_slip_sigma_rot", 0.0);
  d.contact_slip_sigma_trans =
      cfg.get_double("disturbance.contact_slip_sigma_trans", 0.0);
  d.contact_slip_sigma_rot = cfg.get_double("disturbance.contact_slip_sigma_rot", 0.0);
  if (d.grasp_slip_sigma_trans < 0.0 || d.grasp_slip_sigma_rot < 0.0 ||
      d.contact_slip_sigma_trans < 0.0 || d.contact_slip_sigma_rot < 0.0) {
    throw ConfigError("disturbance sigmas must be non-negative");
  }
  // Scripted pushes: push_tick / push_delta, or push1_tick / push1_delta, ...
  const auto add_push = [&](const std::string& prefix) {
    if (!cfg.has(prefix + "_tick")) return false;
    catbc::PushEvent ev;
    ev.tick = cfg.get_int(prefix + "_tick");
    ev.translation = cfg.get_vec3(prefix + "_delta");
    if (ev.tick < 0) throw ConfigError("push tick must be non-negative");
    d.pushes.push_back(ev);
    return true;
  };
  add_push("disturbance.push");
  for (int i = 1; add_push("disturbance.push" + std::to_string(i)); ++i) {
  }
  return d;
}

}  // namespace

Scenario build_scenario(const Config& cfg) {
  Scenario s;
  s.name = cfg.get_string("scenario.name");
  const std::string task = cfg.get_string("scenario.task");
  if (task == "standing") {
    s.task = TaskKind::Standing;
  } else if (task == "insertion") {
    s.task = TaskKind::Insertion;
  } else if (task == "assembly") {
    s.task = TaskKind::Assembly;
  } else {
    throw ConfigError("unknown task '" + task + "'");
  }
  const std::string policy = cfg.get_string("scenario.policy", "closed");
  if (policy == "closed") {
    s.policy = PolicyKind::Closed;
  } else if (policy == "open") {
    s.policy = PolicyKind::Open;
  } else if (policy == "centroid") {
    s.policy = PolicyKind::Centroid;
  } else {
    throw ConfigError("unknown policy '" + policy + "'");
  }
  const std::string predictor = cfg.get_string("scenario.predictor", "oracle");
  if (predictor == "oracle") {
    s.predictor = PredictorKind::Oracle;
  } else if (predictor == "matcher") {
    s.predictor = PredictorKind::Matcher;
  } else {
    throw ConfigError("unknown predictor '" + predictor + "'");
  }
  const std::string reproject = cfg.get_string("scenario.reproject", "anchored");
  if (reproject == "anchored") {
    s.reproject_mode = correspond::ReprojectMode::Anchored;
  } else if (reproject == "centroid") {
    s.reproject_mode = correspond::ReprojectMode::Centroid;
  } else {
    throw ConfigError("unknown reproject mode '" + reproject + "'");
  }
  if (s.policy == PolicyKind::Centroid) {
    s.reproject_mode = correspond::ReprojectMode::Centroid;
  }

  s.runs = static_cast<int>(cfg.get_int("scenario.runs", 1));
  if (s.runs < 1) throw ConfigError("scenario.runs must be at least 1");
  const long seed = cfg.get_int("scenario.seed", 0);
  if (seed < 0) throw ConfigError("scenario.seed must be non-negative");
  s.seed = static_cast<std::uint64_t>(seed);

  s.receptacle = parse_primitives(cfg);
  s.demo_instance = parse_instance(cfg, "demo_instance");
  s.novel_instance = parse_instance(cfg, "novel_instance");

  s.receptacle_in_camera = cfg.has("demo.receptacle_position") || cfg.has("demo.receptacle_rpy")
      ? geom::Pose(quat_from_rpy(cfg.get_vec3("demo.receptacle_rpy", geom::Vec3::Zero())),
                   cfg.get_vec3("demo.receptacle_position", geom::Vec3::Zero()))
      : geom::Pose(quat_from_rpy(geom::Vec3(2.2, 0.15, -0.4)),
                   geom::Vec3(0.12, -0.08, 0.85));
  s.camera_to_robot = cfg.has("demo.extrinsic_position") || cfg.has("demo.extrinsic_rpy")
      ? geom::Pose(quat_from_rpy(cfg.get_vec3("demo.extrinsic_rpy", geom::Vec3::Zero())),
                   cfg.get_vec3("demo.extrinsic_position", geom::Vec3::Zero()))
      : geom::Pose(quat_from_rpy(geom::Vec3(-1.9, 0.3, 1.1)),
                   geom::Vec3(0.4, 0.55, 0.7));

  s.keypose_threshold = cfg.get_double("demo.keypose_threshold", 0.05);
  s.discretize_translation = cfg.get_double("demo.discretize_translation", 0.002);
  s.discretize_rotation = cfg.get_double("demo.discretize_rotation", 2.0 * M_PI / 180.0);
  if (s.keypose_threshold <= 0.0 || s.discretize_translation <= 0.0 ||
      s.discretize_rotation <= 0.0) {
    throw ConfigError("[demo] thresholds must be positive");
  }

  const double sym_step = cfg.get_double("symmetry.z_step", 0.0);
  s.pose_symmetry =
      sym_step > 0.0
          ? nunocs::SymmetryGroup::z_rotations(geom::rad_to_deg(sym_step),
                                               geom::Vec3::Zero())
          : nunocs::SymmetryGroup::identity_only(geom::Vec3::Zero());

  s.tracker.sigma_trans = cfg.get_double("tracker.sigma_trans", 0.0);
  s.tracker.sigma_rot = cfg.get_double("tracker.sigma_rot", 0.0);
  s.tracker.latency_ticks = static_cast<int>(cfg.get_int("tracker.latency_ticks", 1));
  s.tracker.rate_hz = cfg.get_double("tracker.rate_hz", 10.0);
  if (s.tracker.sigma_trans < 0.0 || s.tracker.sigma_rot < 0.0 ||
      s.tracker.latency_ticks < 0 || s.tracker.rate_hz <= 0.0) {
    throw ConfigError("[tracker] parameters out of range");
  }

  s.disturbance = parse_disturbance(cfg);

  s.control.goal_tol_trans = cfg.get_double("control.goal_tol_trans", 0.0005);
  s.control.goal_tol_rot = cfg.get_double("control.goal_tol_rot", 0.5 * M_PI / 180.0);
  s.control.max_step_trans = cfg.get_double("control.max_step_trans", 0.001);
  s.control.max_step_rot = cfg.get_double("control.max_step_rot", M_PI / 180.0);
  s.control.timeout_ticks = cfg.get_int("control.timeout_ticks", 0);
  if (s.control.goal_tol_trans <= 0.0 || s.control.goal_tol_rot <= 0.0 ||
      s.control.max_step_trans <= 0.0 || s.control.max_step_rot <= 0.0 ||
      s.control.timeout_ticks < 0) {
    throw ConfigError("[control] parameters out of range");
  }

  switch (s.task) {
    case TaskKind::Standing: {
      s.standing.platform_radius = cfg.get_double("task.platform_radius");
      s.standing.platform_top_z = cfg.get_double("task.platform_top_z", 0.0);
      s.standing.base_radius = s.novel_instance.radius;
      s.standing.half_height = s.novel_instance.half_height;
      s.standing.tilt_tol = cfg.get_double("task.tilt_tol", 5.0 * M_PI / 180.0);
      s.standing.height_tol = cfg.get_double("task.height_tol", 0.002);
      s.demo_script = build_standing_script(cfg, s.demo_instance);
      break;
    }
    case TaskKind::Insertion: {
      // Checker geometry defaults to the [primitive.shaft] block so a swept
      // shaft radius stays in sync with the success check.
      const bool has_shaft = cfg.has("primitive.shaft.radius");
      const double shaft_r =
          has_shaft ? cfg.get_double("primitive.shaft.radius") : 0.0;
      const double shaft_z =
          has_shaft ? cfg.get_vec3("primitive.shaft.position").z() : 0.0;
      const double shaft_hh =
          has_shaft ? cfg.get_double("primitive.shaft.half_height") : 0.0;
      s.insertion.hole_radius = s.novel_instance.inner_radius;
      s.insertion.shaft_radius = cfg.get_double("task.shaft_radius", shaft_r);
      s.insertion.hole_half_length = s.novel_instance.half_height;
      s.insertion.required_engage =
          cfg.get_double("task.required_engage", s.novel_instance.half_height);
      s.insertion.shaft_base_z =
          cfg.get_double("task.shaft_base_z", shaft_z - shaft_hh);
      s.insertion.shaft_top_z =
          cfg.get_double("task.shaft_top_z", shaft_z + shaft_hh);
      if (s.insertion.shaft_radius <= 0.0) {
        throw ConfigError("insertion needs task.shaft_radius or [primitive.shaft]");
      }
      if (s.insertion.hole_radius <= s.insertion.shaft_radius) {
        throw ConfigError("novel gear bore does not fit the shaft");
      }
      s.demo_script = build_insertion_script(cfg, s.demo_instance);
      break;
    }
    case TaskKind::Assembly: {
      s.assembly.wall_x = cfg.get_double("task.wall_x", 0.0);
      s.assembly.wall_top_z = cfg.get_double("task.wall_top_z");
      s.assembly.inner_length = cfg.get_double("task.inner_length");
      s.assembly.spring_natural = cfg.get_double("task.spring_natural", 0.016);
      s.assembly.object_length = 2.0 * s.novel_instance.half_height;
      s.assembly.neg_end_local = geom::Vec3(0, 0, -s.novel_instance.half_height);
      s.assembly.pos_end_local = geom::Vec3(0, 0, s.novel_instance.half_height);
      s.assembly.level_tol = cfg.get_double("task.level_tol", 5.0 * M_PI / 180.0);
      s.demo_script = build_assembly_script(cfg, s.demo_instance);
      break;
    }
  }
  s.demo_script.validate();
  return s;
}

PipelineArtifacts build_pipeline(const Scenario& s) {
  PipelineArtifacts art;
  art.demo_log =
      demo::synth_demo_log(s.demo_script, s.receptacle_in_camera, s.camera_to_robot);
  art.parsed = demo::parse_demo(art.demo_log);
  art.discretized =
      demo::discretize(art.parsed, s.discretize_translation, s.discretize_rotation);
  art.keypose_index = demo::detect_keypose(art.discretized, s.demo_instance.cloud,
                                           s.receptacle, s.keypose_threshold);
  art.last_inch.frame = art.discretized.frame;
  art.last_inch.waypoints.assign(
      art.discretized.waypoints.begin() + art.keypose_index,
      art.discretized.waypoints.end());
  art.last_inch.validate();

  art.demo_nunocs = nunocs::normalize_to_unit_cube(s.demo_instance.cloud).cloud;
  if (s.predictor == PredictorKind::Oracle) {
    const nunocs::OraclePredictor oracle(geom::bounding_box(s.novel_instance.mesh),
                                         geom::Pose::identity());
    art.novel_nunocs = oracle.predict(s.novel_instance.cloud);
  } else {
    const nunocs::CategoryDb db = s.novel_instance.shape == "gear"
                                      ? simgen::make_gear_category()
                                      : simgen::make_battery_category();
    const nunocs::TemplateMatcher matcher(db);
    art.novel_nunocs = matcher.predict(s.novel_instance.cloud);
  }
  art.corr = correspond::build_correspondence(art.demo_nunocs, art.novel_nunocs);

  correspond::ReprojectParams params;
  params.mode = s.reproject_mode;
  art.target = correspond::reproject_trajectory(art.last_inch, s.demo_instance.cloud,
                                                s.novel_instance.cloud, art.corr,
                                                s.receptacle, params);
  return art;
}

RunOutput execute_run(const Scenario& s, const PipelineArtifacts& art, int run_index) {
  const std::uint64_t run_seed =
      derive_seed(s.seed, static_cast<std::uint64_t>(run_index));
  catbc::Plant plant(s.receptacle, s.novel_instance.cloud, art.target.front_pose(),
                     run_seed, s.disturbance);
  // Commanded poses may press into contact (the plant projects them onto the
  // free space), so candidate screening only rejects subgoals that would bury
  // the object well past any reachable contact.
  constexpr double kCommandMargin = 0.002;
  const catbc::FeasiblePredicate feasible = [&](const geom::Pose& pose) {
    return s.receptacle.min_distance(s.novel_instance.cloud, pose) >=
           -kCommandMargin;
  };

  RunOutput out;
  if (s.policy == PolicyKind::Open) {
    out.result = catbc::run_open_loop(art.target, plant, s.pose_symmetry, s.control,
                                      feasible);
  } else {
    out.result = catbc::run_catbc(art.target, plant, s.tracker, s.pose_symmetry,
                                  s.control, feasible);
  }

  catbc::SuccessReport report;
  switch (s.task) {
    case TaskKind::Standing:
      report = catbc::check_standing(out.result.final_true_pose, s.standing);
      break;
    case TaskKind::Insertion:
      report = catbc::check_insertion(out.result.final_true_pose, s.insertion);
      break;
    case TaskKind::Assembly:
      report = catbc::check_assembly(out.result.trace, out.result.final_true_pose,
                                     s.assembly);
      break;
  }
  out.failure_reason = report.reason;

  out.row.scenario = s.name;
  out.row.seed = run_seed;
  out.row.policy = s.policy == PolicyKind::Closed
                       ? "closed"
                       : (s.policy == PolicyKind::Open ? "open" : "centroid");
  out.row.success = report.success ? 1 : 0;
  out.row.ticks = out.result.ticks;
  out.row.final_err_mm =
      1e3 * geom::translation_distance(out.result.final_true_pose,
                                       art.target.back_pose());
  out.row.final_err_deg = geom::rad_to_deg(geom::rotation_distance(
      out.result.final_true_pose, art.target.back_pose()));
  return out;
}

std::vector<RunOutput> run_scenario(const Scenario& s,
                                    const PipelineArtifacts& art, int jobs) {
  if (jobs < 1) jobs = 1;
  std::vector<RunOutput> outputs(static_cast<std::size_t>(s.runs));
  if (jobs == 1) {
    for (int i = 0; i < s.runs; ++i) outputs[i] = execute_run(s, art, i);
    return outputs;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> workers;
  const int n_workers = std::min(jobs, s.runs);
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_workers));
  workers.reserve(n_workers);
  for (int w = 0; w < n_workers; ++w) {
    workers.emplace_back([&, w]() {
      try {
        for (;;) {
          const int i = next.fetch_add(1);
          if (i >= s.runs) return;
          outputs[i] = execute_run(s, art, i);
        }
      } catch (...) {
        errors[w] = std::current_exception();
        next.store(s.runs);  // drain remaining work
      }
    });
  }
  for (std::thread& t : workers) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return outputs;
}

void write_results_csv(const std::filesystem::path& path, std::vector<RunRow> rows) {
  std::sort(rows.begin(), rows.end(), [](const RunRow& a, const RunRow& b) {
    if (a.scenario != b.scenario) return a.scenario < b.scenario;
    if (a.seed != b.seed) return a.seed < b.seed;
    return a.policy < b.policy;
  });
  std::ofstream out(path);
  if (!out) throw Io("cannot write " + path.string());
  out.precision(17);
  out << "scenario,seed,policy,success,ticks,final_err_mm,final_err_deg\n";
  for (const RunRow& r : rows) {
    out << r.scenario << ',' << r.seed << ',' << r.policy << ',' << r.success << ','
        << r.ticks << ',' << r.final_err_mm << ',' << r.final_err_deg << '\n';
  }
  if (!out) throw Io("write failed: " + path.string());
}

std::vector<RunRow> load_results_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifact("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) ||
      line != "scenario,seed,policy,success,ticks,final_err_mm,final_err_deg") {
    throw Io("unexpected results CSV header in " + path.string());
  }
  std::vector<RunRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    RunRow r;
    std::string field;
    try {
      std::getline(ss, r.scenario, ',');
      std::getline(ss, field, ',');
      r.seed = std::stoull(field);
      std::getline(ss, r.policy, ',');
      std::getline(ss, field, ',');
      r.success = std::stoi(field);
      std::getline(ss, field, ',');
      r.ticks = std::stol(field);
      std::getline(ss, field, ',');
      r.final_err_mm = std::stod(field);
      std::getline(ss, field, ',');
      r.final_err_deg = std::stod(field);
    } catch (const std::exception&) {
      throw Io("malformed results row in " + path.string());
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_trace(const std::filesystem::path& path, const catbc::RunResult& result) {
  std::ofstream out(path);
  if (!out) throw Io("cannot write " + path.string());
  for (const catbc::TickTrace& t : result.trace) {
    json rec{{"tick", t.tick},
             {"subgoal", t.subgoal},
             {"contact", t.contact},
             {"true_q",
              {t.true_pose.rotation.w(), t.true_pose.rotation.x(),
               t.true_pose.rotation.y(), t.true_pose.rotation.z()}},
             {"true_p",
              {t.true_pose.translation.x(), t.true_pose.translation.y(),
               t.true_pose.translation.z()}},
             {"believed_q",
              {t.believed_pose.rotation.w(), t.believed_pose.rotation.x(),
               t.believed_pose.rotation.y(), t.believed_pose.rotation.z()}},
             {"believed_p",
              {t.believed_pose.translation.x(), t.believed_pose.translation.y(),
               t.believed_pose.translation.z()}}};
    out << rec.dump() << '\n';
  }
  if (!out) throw Io("write failed: " + path.string());
}

}  // namespace catmanip::cli
