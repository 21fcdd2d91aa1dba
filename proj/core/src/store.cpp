#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <iomanip>
#include <sstream>

#include "json_codec.hpp"
#include "semlife/io.hpp"
#include "semlife/lifecycle.hpp"

namespace semlife {

namespace fs = std::filesystem;

namespace {

std::string numbered(const char* prefix, int n, const char* suffix = "") {
  std::ostringstream os;
  os << prefix << std::setw(4) << std::setfill('0') << n << suffix;
  return os.str();
}

struct Manifest {
  std::string robot;
  int current = 0;
  std::vector<int> versions;
  Config config;
};

Manifest read_manifest(const fs::path& path) {
  return guarded("store manifest", [&] {
    const json j = parse_document(read_text(path), "manifest");
    Manifest m;
    m.robot = j.at("robot").get<std::string>();
    m.current = j.at("current_version").get<int>();
    m.versions = j.at("versions").get<std::vector<int>>();
    m.config = j.at("config").get<Config>();
    if (std::find(m.versions.begin(), m.versions.end(), m.current) == m.versions.end())
      throw Error("current version missing from version list");
    return m;
  });
}

void write_manifest(const fs::path& path, const Manifest& m) {
  json j = document("manifest");
  j["robot"] = m.robot;
  j["current_version"] = m.current;
  j["versions"] = m.versions;
  j["config"] = m.config;
  write_text_atomic(path, dump(j));
}

void check_robot_name(const std::string& robot) {
  if (robot.empty() || robot == "." || robot == ".." ||
      robot.find_first_of("/\\") != std::string::npos || robot.front() == '.')
    throw Error("invalid robot id '" + robot + "'");
}

}  // namespace

Store::Store(fs::path root) : root_(std::move(root)) {}

fs::path Store::robot_dir(const std::string& robot) const {
  check_robot_name(robot);
  return root_ / robot;
}

fs::path Store::version_dir(const std::string& robot, int version) const {
  return robot_dir(robot) / numbered("v", version);
}

bool Store::has_robot(const std::string& robot) const { return fs::exists(robot_dir(robot) / "manifest.json"); }

int Store::current_version(const std::string& robot) const {
  if (!has_robot(robot)) throw Error("unknown robot '" + robot + "'");
  return read_manifest(robot_dir(robot) / "manifest.json").current;
}

std::vector<int> Store::versions(const std::string& robot) const {
  if (!has_robot(robot)) throw Error("unknown robot '" + robot + "'");
  return read_manifest(robot_dir(robot) / "manifest.json").versions;
}

Config Store::config(const std::string& robot) const {
  if (!has_robot(robot)) throw Error("unknown robot '" + robot + "'");
  return read_manifest(robot_dir(robot) / "manifest.json").config;
}

SemanticMap Store::load(const std::string& robot, int version) const {
  const fs::path dir = version_dir(robot, version);
  if (!fs::is_directory(dir)) throw Error("unknown version " + std::to_string(version) + " of robot '" + robot + "'");
  SemanticMap map = read_version_dir(dir);
  const ValidationReport v = validate_constraints(map, config(robot));
  if (!v.ok())
    throw Error("stored version " + std::to_string(version) + " breaks " + std::to_string(v.violations.size()) +
                " constraint(s)");
  return map;
}

SemanticMap Store::load_current(const std::string& robot) const { return load(robot, current_version(robot)); }

std::vector<MissionRecord> Store::records(const std::string& robot) const {
  if (!has_robot(robot)) throw Error("unknown robot '" + robot + "'");
  std::vector<MissionRecord> out;
  const fs::path dir = robot_dir(robot) / "records";
  if (!fs::is_directory(dir)) return out;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (name.rfind("mission_", 0) == 0 && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) out.push_back(mission_record_from_json(read_text(f)));
  std::stable_sort(out.begin(), out.end(),
                   [](const MissionRecord& a, const MissionRecord& b) { return a.mission < b.mission; });
  return out;
}

void Store::commit(const std::string& robot, const SemanticMap& map, const Config& cfg, const MissionRecord* record) {
  const ValidationReport v = validate_constraints(map, cfg);
  if (!v.ok()) throw Error("refusing to store a map with " + std::to_string(v.violations.size()) + " violation(s)");
  const fs::path rdir = robot_dir(robot);
  Manifest manifest;
  if (has_robot(robot)) {
    manifest = read_manifest(rdir / "manifest.json");
    if (std::find(manifest.versions.begin(), manifest.versions.end(), map.version) != manifest.versions.end())
      throw Error("version " + std::to_string(map.version) + " already exists");
  } else {
    manifest.robot = robot;
  }

  std::error_code ec;
  fs::create_directories(rdir, ec);
  if (ec) throw Error("cannot create " + rdir.string() + ": " + ec.message());
  const fs::path final_dir = version_dir(robot, map.version);
  const fs::path staging = rdir / numbered(".staging-v", map.version);
  fs::remove_all(staging, ec);
  fs::create_directory(staging, ec);
  if (ec) throw Error("cannot create " + staging.string() + ": " + ec.message());
  write_grid(map.grid, staging / "grid.pgm", staging / "grid.json");
  write_text_atomic(staging / "semantics.json", semantics_to_json(map, cfg));
  write_text_atomic(staging / "meta.json", meta_to_json(map.meta));
  if (record != nullptr) write_text_atomic(staging / "record.json", to_json(*record));

  // A directory left by an interrupted commit is not in the manifest.
  fs::remove_all(final_dir, ec);
  fs::rename(staging, final_dir, ec);
  if (ec) throw Error("cannot rename " + staging.string() + ": " + ec.message());

  manifest.versions.push_back(map.version);
  manifest.current = map.version;
  manifest.config = cfg;
  write_manifest(rdir / "manifest.json", manifest);
}

void Store::write_record(const std::string& robot, const MissionRecord& record) {
  const fs::path dir = robot_dir(robot) / "records";
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create " + dir.string() + ": " + ec.message());
  write_text_atomic(dir / numbered("mission_", record.mission, ".json"), to_json(record));
}

StoreLock::StoreLock(const Store& store, const std::string& robot) : path_(store.robot_dir(robot) / ".lock") {
  std::error_code ec;
  fs::create_directories(path_.parent_path(), ec);
  const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0) {
    if (errno == EEXIST) throw Error("store for robot '" + robot + "' is locked by another writer (" + path_.string() + ")");
    throw Error("cannot create lock " + path_.string() + ": " + std::strerror(errno));
  }
  const std::string pid = std::to_string(::getpid()) + "\n";
  [[maybe_unused]] const auto n = ::write(fd, pid.data(), pid.size());
  ::close(fd);
}

StoreLock::~StoreLock() {
  std::error_code ec;
  fs::remove(path_, ec);
}

SemanticMap bootstrap(Store& store, const std::string& robot, const OccupancyGrid& first_grid,
                      const std::optional<SemanticMap>& seed, const Config& cfg) {
  if (store.has_robot(robot)) throw Error("robot '" + robot + "' already has a store");
  StoreLock lock(store, robot);
  SemanticMap map = bootstrap_map(first_grid, seed, cfg);
  store.commit(robot, map, cfg);
  return map;
}

MissionRecord run_mission(Store& store, const std::string& robot, const OccupancyGrid& grid,
                          const MotionEstimate& motion, const AnnotationFile* annotations, const Config& cfg,
                          Arm arm) {
  cfg.validate();
  StoreLock lock(store, robot);
  const SemanticMap current = store.load_current(robot);
  MissionOutcome outcome = process_mission(current, grid, motion, annotations, cfg, arm);
  MissionRecord& record = outcome.record;
  const auto previous = store.records(robot);
  record.mission = previous.empty() ? 1 : previous.back().mission + 1;
  if (outcome.map) store.commit(robot, *outcome.map, cfg, &record);
  store.write_record(robot, record);
  return record;
}

History history(const Store& store, const std::string& robot) {
  History h;
  h.versions = store.versions(robot);
  h.records = store.records(robot);
  return h;
}

}  // namespace semlife
