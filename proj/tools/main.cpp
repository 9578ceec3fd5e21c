#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <map>
#include <sstream>

#include "catmanip/catbc.hpp"
#include "catmanip/config.hpp"
#include "catmanip/correspond.hpp"
#include "catmanip/demo.hpp"
#include "catmanip/errors.hpp"
#include "catmanip/scenario.hpp"
#include "catmanip/shapes.hpp"
#include "catmanip/simgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace catmanip;

namespace {

struct GlobalOpts {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out_dir = "out";
  int jobs = 1;
};

cli::Config load_config(const GlobalOpts& g) {
  if (g.config_path.empty()) throw ConfigError("--config is required");
  return cli::Config::load(g.config_path);
}

cli::Scenario make_scenario(const GlobalOpts& g, const cli::Config& cfg) {
  cli::Scenario s = cli::build_scenario(cfg);
  if (g.seed_set) s.seed = g.seed;
  return s;
}

fs::path ensure_out(const GlobalOpts& g) {
  fs::create_directories(g.out_dir);
  return g.out_dir;
}

json pose_json(const geom::Pose& pose) {
  return json{{"q",
               {pose.rotation.w(), pose.rotation.x(), pose.rotation.y(),
                pose.rotation.z()}},
              {"p",
               {pose.translation.x(), pose.translation.y(),
                pose.translation.z()}}};
}

// ---------------------------------------------------------------------------

int cmd_gen_data(const GlobalOpts& g) {
  const cli::Config cfg = load_config(g);
  const std::string category = cfg.get_string("dataset.category", "battery");
  nunocs::CategoryDb db;
  if (category == "battery") {
    db = simgen::make_battery_category(
        static_cast<int>(cfg.get_int("dataset.variants", 4)));
  } else if (category == "gear") {
    db = simgen::make_gear_category(
        static_cast<int>(cfg.get_int("dataset.variants", 4)));
  } else {
    throw ConfigError("dataset.category must be 'battery' or 'gear'");
  }
  const int count = static_cast<int>(cfg.get_int("dataset.count", 10));
  simgen::SceneParams params;
  params.scale_lo = cfg.get_double("dataset.scale_lo", params.scale_lo);
  params.scale_hi = cfg.get_double("dataset.scale_hi", params.scale_hi);
  params.table_height_lo =
      cfg.get_double("dataset.table_height_lo", params.table_height_lo);
  params.table_height_hi =
      cfg.get_double("dataset.table_height_hi", params.table_height_hi);
  params.xy_range = cfg.get_double("dataset.xy_range", params.xy_range);
  params.camera_distance =
      cfg.get_double("dataset.camera_distance", params.camera_distance);
  params.camera_elevation_deg = geom::rad_to_deg(cfg.get_double(
      "dataset.camera_elevation", geom::deg_to_rad(params.camera_elevation_deg)));
  params.image_width = static_cast<int>(cfg.get_int("dataset.image_width", 160));
  params.image_height = static_cast<int>(cfg.get_int("dataset.image_height", 120));
  params.dropout_lo = cfg.get_double("dataset.dropout_lo", params.dropout_lo);
  params.dropout_hi = cfg.get_double("dataset.dropout_hi", params.dropout_hi);
  const std::uint64_t seed = g.seed_set
                                 ? g.seed
                                 : static_cast<std::uint64_t>(
                                       cfg.get_int("dataset.seed", 0));
  const fs::path out = ensure_out(g);
  simgen::write_dataset(out / "dataset", db, count, params, seed);
  std::cout << "wrote " << count << " scenes to " << (out / "dataset").string()
            << "\n";
  return 0;
}

int cmd_parse_demo(const GlobalOpts& g, const std::string& log_path) {
  const cli::Config cfg = load_config(g);
  const cli::Scenario s = make_scenario(g, cfg);
  const fs::path out = ensure_out(g);

  demo::DemoLog log;
  if (!log_path.empty()) {
    log = demo::load_demo_log(log_path);
  } else {
    log = demo::synth_demo_log(s.demo_script, s.receptacle_in_camera,
                               s.camera_to_robot);
    demo::save_demo_log(out / "demo_log.jsonl", log);
  }
  const demo::Trajectory parsed = demo::parse_demo(log);
  const demo::Trajectory sparse =
      demo::discretize(parsed, s.discretize_translation, s.discretize_rotation);
  const int key =
      demo::detect_keypose(sparse, s.demo_instance.cloud, s.receptacle,
                           s.keypose_threshold);
  demo::Trajectory last_inch;
  last_inch.frame = sparse.frame;
  last_inch.waypoints.assign(sparse.waypoints.begin() + key,
                             sparse.waypoints.end());

  demo::save_trajectory(out / "parsed.jsonl", parsed);
  demo::save_trajectory(out / "discretized.jsonl", sparse);
  demo::save_trajectory(out / "last_inch.jsonl", last_inch);
  std::ofstream kf(out / "keypose.json");
  kf << json{{"index", key},
             {"t", sparse.waypoints[key].t},
             {"threshold", s.keypose_threshold},
             {"waypoints_total", sparse.waypoints.size()}}
            .dump(2)
     << "\n";
  std::cout << "parsed " << parsed.waypoints.size() << " -> "
            << sparse.waypoints.size() << " waypoints, keypose at index " << key
            << "\n";
  return 0;
}

int cmd_predict(const GlobalOpts& g) {
  const cli::Config cfg = load_config(g);
  const cli::Scenario s = make_scenario(g, cfg);
  const fs::path out = ensure_out(g);

  nunocs::NunocsCloud pred;
  json extra;
  if (s.predictor == cli::PredictorKind::Oracle) {
    const nunocs::OraclePredictor oracle(
        geom::bounding_box(s.novel_instance.mesh), geom::Pose::identity());
    pred = oracle.predict(s.novel_instance.cloud);
    extra["predictor"] = "oracle";
  } else {
    const nunocs::CategoryDb db = s.novel_instance.shape == "gear"
                                      ? simgen::make_gear_category()
                                      : simgen::make_battery_category();
    const nunocs::TemplateMatcher matcher(db);
    const nunocs::MatchResult match = matcher.match(s.novel_instance.cloud);
    pred = matcher.predict(s.novel_instance.cloud);
    extra["predictor"] = "matcher";
    extra["template_index"] = match.template_index;
    extra["template_id"] = db.models[match.template_index].id;
    extra["yaw_deg"] = match.yaw_deg;
    extra["chamfer"] = match.chamfer;
  }
  const nunocs::CategoryPose9D pose9d =
      nunocs::solve_pose9d(pred, s.novel_instance.cloud);

  geom::PointCloud coords;
  coords.points = pred.coords;
  geom::save_point_cloud(out / "nunocs.ply", coords);
  json rec{{"scales", {pred.scales.x(), pred.scales.y(), pred.scales.z()}},
           {"pose9d",
            {{"scale", pose9d.similarity.scale},
             {"rotation",
              {pose9d.similarity.rotation.w(), pose9d.similarity.rotation.x(),
               pose9d.similarity.rotation.y(), pose9d.similarity.rotation.z()}},
             {"translation",
              {pose9d.similarity.translation.x(), pose9d.similarity.translation.y(),
               pose9d.similarity.translation.z()}},
             {"scales",
              {pose9d.scales.x(), pose9d.scales.y(), pose9d.scales.z()}},
             {"rms_residual", pose9d.rms_residual}}}};
  rec.update(extra);
  std::ofstream pf(out / "prediction.json");
  pf << rec.dump(2) << "\n";
  std::cout << "predicted " << pred.coords.size() << " canonical coords, rms "
            << pose9d.rms_residual << "\n";
  return 0;
}

int cmd_reproject(const GlobalOpts& g) {
  const cli::Config cfg = load_config(g);
  const cli::Scenario s = make_scenario(g, cfg);
  const cli::PipelineArtifacts art = cli::build_pipeline(s);
  const fs::path out = ensure_out(g);
  correspond::save_correspondence(out / "correspondence.csv", art.corr);
  demo::save_trajectory(out / "target.jsonl", art.target);
  std::cout << "reprojected " << art.target.waypoints.size()
            << " waypoints (keypose index " << art.keypose_index << ")\n";
  return 0;
}

struct Aggregate {
  long runs = 0;
  long successes = 0;
  double ticks = 0;
  double err_mm = 0;
  double err_deg = 0;
};

std::map<std::pair<std::string, std::string>, Aggregate> aggregate_rows(
    const std::vector<cli::RunRow>& rows) {
  std::map<std::pair<std::string, std::string>, Aggregate> by_key;
  for (const cli::RunRow& r : rows) {
    Aggregate& a = by_key[{r.scenario, r.policy}];
    a.runs += 1;
    a.successes += r.success;
    a.ticks += static_cast<double>(r.ticks);
    a.err_mm += r.final_err_mm;
    a.err_deg += r.final_err_deg;
  }
  return by_key;
}

void emit_report(const std::vector<cli::RunRow>& rows, const fs::path& out_dir) {
  const auto by_key = aggregate_rows(rows);
  std::ostringstream csv;
  csv << "scenario,policy,runs,successes,rate_pct,mean_ticks,mean_err_mm,mean_err_deg\n";

  std::size_t name_w = 8, pol_w = 6;
  for (const auto& [key, a] : by_key) {
    name_w = std::max(name_w, key.first.size());
    pol_w = std::max(pol_w, key.second.size());
  }
  std::cout << std::left << std::setw(static_cast<int>(name_w) + 2) << "scenario"
            << std::setw(static_cast<int>(pol_w) + 2) << "policy"
            << std::right << std::setw(16) << "success" << std::setw(12)
            << "mean ticks" << std::setw(14) << "mean err mm" << std::setw(14)
            << "mean err deg" << "\n";
  for (const auto& [key, a] : by_key) {
    const double rate = a.runs ? 100.0 * double(a.successes) / double(a.runs) : 0.0;
    std::ostringstream rate_s;
    rate_s << std::fixed << std::setprecision(1) << rate << "% (" << a.successes
           << "/" << a.runs << ")";
    const double mt = a.runs ? a.ticks / double(a.runs) : 0.0;
    const double mm = a.runs ? a.err_mm / double(a.runs) : 0.0;
    const double md = a.runs ? a.err_deg / double(a.runs) : 0.0;
    std::cout << std::left << std::setw(static_cast<int>(name_w) + 2) << key.first
              << std::setw(static_cast<int>(pol_w) + 2) << key.second << std::right
              << std::setw(16) << rate_s.str() << std::setw(12) << std::fixed
              << std::setprecision(1) << mt << std::setw(14)
              << std::setprecision(3) << mm << std::setw(14)
              << std::setprecision(3) << md << "\n";
    csv << key.first << ',' << key.second << ',' << a.runs << ',' << a.successes
        << ',' << std::fixed << std::setprecision(1) << rate << ','
        << std::setprecision(6) << mt << ',' << mm << ',' << md << "\n";
  }
  std::ofstream sf(out_dir / "summary.csv");
  if (!sf) throw Io("cannot write " + (out_dir / "summary.csv").string());
  sf << csv.str();
}

std::vector<cli::RunRow> run_one_scenario(const cli::Scenario& s, int jobs,
                                          const fs::path& out,
                                          bool write_traces) {
  const cli::PipelineArtifacts art = cli::build_pipeline(s);
  const std::vector<cli::RunOutput> outputs = cli::run_scenario(s, art, jobs);
  std::vector<cli::RunRow> rows;
  rows.reserve(outputs.size());
  if (write_traces) fs::create_directories(out / "traces");
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    rows.push_back(outputs[i].row);
    if (write_traces) {
      std::ostringstream name;
      name << s.name << "_" << outputs[i].row.policy << "_" << std::setw(4)
           << std::setfill('0') << i << ".jsonl";
      cli::write_trace(out / "traces" / name.str(), outputs[i].result);
    }
  }
  return rows;
}

int cmd_run(const GlobalOpts& g, bool traces) {
  const cli::Config cfg = load_config(g);
  const cli::Scenario s = make_scenario(g, cfg);
  const fs::path out = ensure_out(g);
  std::vector<cli::RunRow> rows = run_one_scenario(s, g.jobs, out, traces);
  cli::write_results_csv(out / "results.csv", rows);
  emit_report(cli::load_results_csv(out / "results.csv"), out);
  return 0;
}

int cmd_report(const GlobalOpts& g, const std::vector<std::string>& files) {
  std::vector<cli::RunRow> rows;
  for (const std::string& f : files) {
    std::vector<cli::RunRow> part = cli::load_results_csv(f);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  const fs::path out = ensure_out(g);
  emit_report(rows, out);
  return 0;
}

int cmd_sweep(const GlobalOpts& g, bool traces) {
  const cli::Config base = load_config(g);
  const std::string key = base.get_string("sweep.key");
  const std::vector<double> values = base.get_doubles("sweep.values");
  if (values.empty()) throw ConfigError("sweep.values must not be empty");
  const fs::path out = ensure_out(g);

  std::vector<cli::RunRow> rows;
  for (double value : values) {
    std::ostringstream vs;
    vs << value;
    cli::Config cfg = base;
    cfg.set(key, vs.str());
    cli::Scenario s = make_scenario(g, cfg);
    s.name += "@" + vs.str();
    std::vector<cli::RunRow> part = run_one_scenario(s, g.jobs, out, traces);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  cli::write_results_csv(out / "results.csv", rows);
  emit_report(cli::load_results_csv(out / "results.csv"), out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"category-level manipulation pipeline"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--config", g.config_path, "scenario config file")
      ->envname("CATMANIP_CONFIG");
  app.add_option("--seed", g.seed, "master seed override")
      ->each([&](const std::string&) { g.seed_set = true; });
  app.add_option("--out", g.out_dir, "output directory (default: out)");
  app.add_option("--jobs", g.jobs, "worker threads for runs")
      ->check(CLI::PositiveNumber);

  auto* gen = app.add_subcommand("gen-data", "render a synthetic labeled dataset");
  std::string log_path;
  auto* parse =
      app.add_subcommand("parse-demo", "parse a demo log into trajectories");
  parse->add_option("--log", log_path,
                    "existing demo log (default: synthesize from config)");
  auto* predict =
      app.add_subcommand("predict", "canonical coordinates for the novel object");
  auto* reproject =
      app.add_subcommand("reproject", "build the novel-instance target trajectory");
  bool traces = false;
  auto* run = app.add_subcommand("run", "execute the scenario runs");
  run->add_flag("--traces,!--no-traces", traces, "write per-run tick traces");
  std::vector<std::string> report_files;
  auto* report = app.add_subcommand("report", "aggregate results CSVs");
  report->add_option("files", report_files, "results.csv files")
      ->required()
      ->check(CLI::ExistingFile);
  bool sweep_traces = false;
  auto* sweep = app.add_subcommand("sweep", "run the scenario across sweep.values");
  sweep->add_flag("--traces", sweep_traces, "write per-run tick traces");

  try {
    app.parse(argc, argv);
    if (gen->parsed()) return cmd_gen_data(g);
    if (parse->parsed()) return cmd_parse_demo(g, log_path);
    if (predict->parsed()) return cmd_predict(g);
    if (reproject->parsed()) return cmd_reproject(g);
    if (run->parsed()) return cmd_run(g, traces);
    if (report->parsed()) return cmd_report(g, report_files);
    if (sweep->parsed()) return cmd_sweep(g, sweep_traces);
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << json{{"error", "ConfigError"},
                      {"code", static_cast<int>(ErrorCode::ConfigError)},
                      {"message", e.what()}}
                     .dump()
              << "\n";
    return static_cast<int>(ErrorCode::ConfigError);
  } catch (const Error& e) {
    std::cerr << json{{"error", e.name()},
                      {"code", static_cast<int>(e.code())},
                      {"message", e.what()}}
                     .dump()
              << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "Unknown"},
                      {"code", static_cast<int>(ErrorCode::Unknown)},
                      {"message", e.what()}}
                     .dump()
              << "\n";
    return static_cast<int>(ErrorCode::Unknown);
  }
}
