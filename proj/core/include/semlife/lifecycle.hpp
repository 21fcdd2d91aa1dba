#pragma once

// Mission-end update: transfer, resolve, discover, validate, then accept the
// new map or keep the old one. Store persists versions on disk.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "semlife/discovery.hpp"

namespace semlife {

enum class Outcome { Accepted, Rejected };

std::string to_string(Outcome o);

/// One user action. Ops:
///   rename_room     id, label
///   add_divider     a, b (world meters)
///   remove_divider  id
///   reject_update
struct Annotation {
  std::string op;
  int id = -1;
  std::string label;
  Point a{};
  Point b{};

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

struct AnnotationFile {
  std::vector<Annotation> actions;

  friend bool operator==(const AnnotationFile&, const AnnotationFile&) = default;
};

struct AnnotationResult {
  std::vector<int> applied;  ///< indices into AnnotationFile::actions
  /// Index and reason for each action that was not applied.
  std::vector<std::pair<int, std::string>> invalid;
  bool reject_update = false;

  friend bool operator==(const AnnotationResult&, const AnnotationResult&) = default;
};

struct Timings {
  double resolve_ms = 0.0;
  double discover_ms = 0.0;
  double total_ms = 0.0;
};

struct MissionRecord {
  int mission = 0;          ///< 1-based mission index for the robot
  Outcome outcome = Outcome::Rejected;
  std::string reason;       ///< empty when accepted
  int version_before = 0;
  int version_after = 0;    ///< equals version_before when rejected
  ConflictReport conflicts;
  DiscoveryReport discovery;
  std::vector<Violation> violations;
  AnnotationResult annotations;
  /// Wall-clock timings; excluded from golden comparisons.
  Timings timings;
};

struct MissionOutcome {
  MissionRecord record;
  std::optional<SemanticMap> map;  ///< the new version when accepted
};

/// Applies the actions in order to `map` and rebuilds its rooms when the
/// dividers changed. An action whose reference does not resolve, or whose
/// result breaks a constraint, is reported and skipped.
AnnotationResult apply_annotations(SemanticMap& map, const AnnotationFile& file, const Config& cfg);

/// The pure part of a mission: no storage. The record's mission index is
/// left at 0.
MissionOutcome process_mission(const SemanticMap& current, const OccupancyGrid& grid, const MotionEstimate& motion,
                               const AnnotationFile* annotations, const Config& cfg, Arm arm);

/// Version-0 map from the first grid. With a seed its dividers, rooms and
/// labels are kept and only checked; otherwise walls are all occupied cells
/// and dividers come from estimate_dividers over the whole free space. The
/// result is then settled by transferring it onto its own grid until it no
/// longer changes (at most three rounds). Throws Error when the map has no
/// room or breaks a constraint.
SemanticMap bootstrap_map(const OccupancyGrid& grid, const std::optional<SemanticMap>& seed, const Config& cfg);

/// On-disk layout, one directory per robot:
///
///   <root>/<robot>/manifest.json          current version, version list, config
///   <root>/<robot>/vNNNN/                 grid.pgm grid.json semantics.json
///                                         meta.json record.json
///   <root>/<robot>/records/mission_NNNN.json
///   <root>/<robot>/.lock                  held by the single writer
///
/// Version directories and the manifest are written to a temporary name and
/// renamed into place, so a crash leaves the previous state loadable.
class Store {
 public:
  explicit Store(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path robot_dir(const std::string& robot) const;
  std::filesystem::path version_dir(const std::string& robot, int version) const;
  bool has_robot(const std::string& robot) const;

  /// Throws Error for an unknown robot.
  int current_version(const std::string& robot) const;
  std::vector<int> versions(const std::string& robot) const;
  Config config(const std::string& robot) const;
  /// Loads and validates a version.
  SemanticMap load(const std::string& robot, int version) const;
  SemanticMap load_current(const std::string& robot) const;
  std::vector<MissionRecord> records(const std::string& robot) const;

  /// Writes `map` as a new version and makes it current. `record` (if any)
  /// is stored inside the version directory.
  void commit(const std::string& robot, const SemanticMap& map, const Config& cfg,
              const MissionRecord* record = nullptr);
  void write_record(const std::string& robot, const MissionRecord& record);

 private:
  std::filesystem::path root_;
};

/// Exclusive writer lock on a robot directory (`.lock`, created with
/// O_EXCL). Throws Error when another writer holds it.
class StoreLock {
 public:
  StoreLock(const Store& store, const std::string& robot);
  ~StoreLock();
  StoreLock(const StoreLock&) = delete;
  StoreLock& operator=(const StoreLock&) = delete;

 private:
  std::filesystem::path path_;
};

/// Creates the robot's store with version 0. Throws Error if it exists.
SemanticMap bootstrap(Store& store, const std::string& robot, const OccupancyGrid& first_grid,
                      const std::optional<SemanticMap>& seed, const Config& cfg);

/// Runs one mission against the robot's current version and persists the
/// outcome. Rejected missions only add a record.
MissionRecord run_mission(Store& store, const std::string& robot, const OccupancyGrid& grid,
                          const MotionEstimate& motion, const AnnotationFile* annotations, const Config& cfg,
                          Arm arm);

struct History {
  std::vector<int> versions;
  std::vector<MissionRecord> records;
};

/// Throws Error for an unknown robot.
History history(const Store& store, const std::string& robot);

}  // namespace semlife
