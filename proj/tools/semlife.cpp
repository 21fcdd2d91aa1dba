// semlife command-line tool. Exit codes: 0 success / accepted / valid,
// 2 rejected / violations, 1 error.

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "semlife/bench.hpp"
#include "semlife/io.hpp"
#include "semlife/lifecycle.hpp"
#include "semlife/render.hpp"

namespace fs = std::filesystem;
using namespace semlife;

namespace {

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kRejected = 2;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("semlife");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("SEMLIFE_LOG")) spdlog::set_level(spdlog::level::from_str(env));
}

Config load_config(const std::string& path, const Config& fallback) {
  if (path.empty()) return fallback;
  spdlog::debug("config from {}", path);
  return config_from_json(read_text(path));
}

std::vector<Arm> parse_arms(const std::string& list) {
  std::vector<Arm> arms;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) arms.push_back(parse_arm(item));
  if (arms.empty()) throw Error("no arms given");
  return arms;
}

void write_or_print(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    if (fs::path(out).has_parent_path()) fs::create_directories(fs::path(out).parent_path());
    write_text_atomic(out, text);
  }
}

struct Common {
  std::string store;
  std::string robot = "robot";
  std::string config;
  std::string arm = "full";
  std::string out;
  std::uint64_t seed = 2024;
};

int cmd_bootstrap(const Common& c, const std::string& grid_path, const std::string& semantics_path) {
  Store store(c.store);
  const Config cfg = load_config(c.config, Config{});
  const OccupancyGrid grid = read_grid(grid_path);
  std::optional<SemanticMap> seed;
  if (!semantics_path.empty())
    seed = semantics_from_json(read_text(semantics_path), grid, MetaLayer::empty_for(grid.frame()));
  const SemanticMap map = bootstrap(store, c.robot, grid, seed, cfg);
  spdlog::info("robot {}: version 0 with {} rooms and {} dividers", c.robot, map.rooms.size(), map.dividers.size());
  write_or_print(c.out, semantics_to_json(map, cfg));
  return kOk;
}

int cmd_run(const Common& c, const std::string& grid_path, const std::string& motion_path,
            const std::string& annotations_path) {
  Store store(c.store);
  const Config cfg = load_config(c.config, store.config(c.robot));
  const OccupancyGrid grid = read_grid(grid_path);
  const MotionEstimate motion =
      motion_path.empty() ? MotionEstimate::identity() : motion_from_json(read_text(motion_path));
  std::optional<AnnotationFile> annotations;
  if (!annotations_path.empty()) annotations = annotations_from_json(read_text(annotations_path));
  const MissionRecord rec =
      run_mission(store, c.robot, grid, motion, annotations ? &*annotations : nullptr, cfg, parse_arm(c.arm));
  spdlog::info("mission {}: {} {}", rec.mission, to_string(rec.outcome), rec.reason);
  std::cout << to_json(rec);
  return rec.outcome == Outcome::Accepted ? kOk : kRejected;
}

int cmd_bench(const Common& c, const std::string& corpus_dir, const std::string& arms, int threads, bool table) {
  const Corpus corpus = read_corpus(corpus_dir);
  const Config cfg = load_config(c.config, Config{});
  spdlog::info("benchmarking {} missions over {} homes", corpus.missions.size(), corpus.homes.size());
  const BenchReport report = run_benchmark(corpus, parse_arms(arms), cfg, threads);
  if (!c.out.empty()) write_text_atomic(c.out, to_json(report));
  if (table || c.out.empty()) std::cout << format_table(report);
  return kOk;
}

int cmd_build_corpus(const Common& c, int homes, int missions, const std::vector<double>& mix) {
  if (c.out.empty()) throw Error("--out is required");
  CorpusSpec spec;
  spec.seed = c.seed;
  spec.homes = homes;
  spec.missions_per_home = missions;
  if (!mix.empty()) {
    if (mix.size() != 4) throw Error("--mix takes four fractions: jitter disconnection connection exploration");
    spec.jitter = mix[0];
    spec.disconnection = mix[1];
    spec.connection = mix[2];
    spec.exploration = mix[3];
  }
  const Corpus corpus = build_corpus(spec);
  write_corpus(corpus, c.out);
  spdlog::info("wrote {} missions to {}", corpus.missions.size(), c.out);
  return kOk;
}

// Writes one home of a corpus as robot inputs: the first grid with its
// ground-truth semantics, then each mission's grid and motion (relative to
// the mission before it).
int cmd_simulate(const Common& c, const std::string& corpus_dir, int home_index) {
  if (c.out.empty()) throw Error("--out is required");
  const Corpus corpus = read_corpus(corpus_dir);
  if (home_index < 0 || home_index >= static_cast<int>(corpus.homes.size()))
    throw Error("home index out of range");
  const Config cfg = load_config(c.config, Config{});
  Home home = generate_home(corpus.homes[static_cast<std::size_t>(home_index)]);
  const fs::path out(c.out);
  fs::create_directories(out);
  write_grid(home.sensed(), out / "grid.pgm", out / "grid.json");
  write_text_atomic(out / "semantics.json", semantics_to_json(ground_truth_semantics(home, cfg), cfg));
  MotionEstimate last = MotionEstimate::identity();
  for (const auto& m : corpus.missions) {
    if (m.home != home_index) continue;
    SimResult sim = simulate_mission(home, m.script);
    std::ostringstream name;
    name << "mission_" << (m.index < 10 ? "0" : "") << m.index;
    const fs::path dir = out / name.str();
    fs::create_directories(dir);
    write_grid(sim.grid, dir / "grid.pgm", dir / "grid.json");
    write_text_atomic(dir / "motion.json", to_json(relative_motion(last, sim.motion)));
    write_text_atomic(dir / "script.json", to_json(m.script));
    last = sim.motion;
    home = std::move(sim.next);
  }
  return kOk;
}

int cmd_render(const Common& c, const std::string& version_dir, const std::string& trace_grid,
               const std::string& trace_motion) {
  if (c.out.empty()) throw Error("--out is required");
  Config cfg;
  const SemanticMap map = read_version_dir(version_dir, &cfg);
  if (trace_grid.empty()) {
    write_or_print(c.out, render_svg(map));
    return kOk;
  }
  const OccupancyGrid grid = read_grid(trace_grid);
  const MotionEstimate motion =
      trace_motion.empty() ? MotionEstimate::identity() : motion_from_json(read_text(trace_motion));
  const Resolved r = resolve_conflicts(map, grid, motion, load_config(c.config, cfg), parse_arm(c.arm));
  write_or_print(c.out, render_svg(r.candidate, &r.trace));
  return kOk;
}

int cmd_validate(const Common& c, const std::string& version_dir) {
  Config cfg;
  const SemanticMap map = read_version_dir(version_dir, &cfg);
  const ValidationReport report = validate_constraints(map, load_config(c.config, cfg));
  std::cout << to_json(report);
  return report.ok() ? kOk : kRejected;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Lifelong semantic map maintenance"};
  app.require_subcommand(1);
  Common c;
  auto common = [&](CLI::App* sub, bool store) {
    if (store) {
      sub->add_option("--store", c.store, "Store root directory")->required();
      sub->add_option("--robot", c.robot, "Robot id")->capture_default_str();
    }
    sub->add_option("--config", c.config, "JSON file with Config fields");
    sub->add_option("--out", c.out, "Output path");
  };

  std::string grid, semantics, motion, annotations, corpus_dir, arms = "baseline,meta-occ,full", version_dir,
                                                                          trace_grid, trace_motion;
  int threads = 1;
  int homes = 20;
  int missions = 15;
  int home_index = 0;
  bool table = false;
  std::vector<double> mix;

  auto* boot = app.add_subcommand("bootstrap", "Create version 0 of a robot's map");
  common(boot, true);
  boot->add_option("--grid", grid, "First grid (PGM with JSON sidecar)")->required();
  boot->add_option("--semantics", semantics, "Seed semantics JSON; automatic segmentation when omitted");

  auto* run = app.add_subcommand("run", "Process one mission; prints the mission record");
  common(run, true);
  run->add_option("--grid", grid, "Mission grid (PGM with JSON sidecar)")->required();
  run->add_option("--motion", motion, "Motion estimate JSON; identity when omitted");
  run->add_option("--annotations", annotations, "Annotation file JSON");
  run->add_option("--arm", c.arm, "baseline, meta-occ or full")->capture_default_str();

  auto* bench = app.add_subcommand("bench", "Error rate per arm over a corpus");
  common(bench, false);
  bench->add_option("--corpus", corpus_dir, "Corpus directory")->required();
  bench->add_option("--arms", arms, "Comma-separated arms")->capture_default_str();
  bench->add_option("--threads", threads, "Worker threads (homes run in parallel)")->capture_default_str();
  bench->add_flag("--table", table, "Print a text table as well as writing --out");

  auto* corpus = app.add_subcommand("build-corpus", "Generate a simulated corpus");
  common(corpus, false);
  corpus->add_option("--seed", c.seed, "Corpus seed")->capture_default_str();
  corpus->add_option("--homes", homes)->capture_default_str();
  corpus->add_option("--missions", missions, "Missions per home")->capture_default_str();
  corpus->add_option("--mix", mix, "jitter disconnection connection exploration fractions")->expected(4);

  auto* sim = app.add_subcommand("simulate", "Write one corpus home as grids and motion files");
  common(sim, false);
  sim->add_option("--corpus", corpus_dir, "Corpus directory")->required();
  sim->add_option("--home", home_index, "Home index")->capture_default_str();

  auto* render = app.add_subcommand("render", "SVG of a version directory");
  common(render, false);
  render->add_option("version_dir", version_dir, "Version directory")->required();
  render->add_option("--trace-grid", trace_grid, "Render the transfer of this version onto a new grid");
  render->add_option("--trace-motion", trace_motion, "Motion estimate for --trace-grid");
  render->add_option("--arm", c.arm, "Arm used for --trace-grid")->capture_default_str();

  auto* validate = app.add_subcommand("validate", "Check a version directory against the constraints");
  common(validate, false);
  validate->add_option("version_dir", version_dir, "Version directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kError;
  }

  try {
    if (*boot) return cmd_bootstrap(c, grid, semantics);
    if (*run) return cmd_run(c, grid, motion, annotations);
    if (*bench) return cmd_bench(c, corpus_dir, arms, threads, table);
    if (*corpus) return cmd_build_corpus(c, homes, missions, mix);
    if (*sim) return cmd_simulate(c, corpus_dir, home_index);
    if (*render) return cmd_render(c, version_dir, trace_grid, trace_motion);
    if (*validate) return cmd_validate(c, version_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}
