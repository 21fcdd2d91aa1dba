#pragma once

// Deterministic synthetic homes and missions.
//
// A home is a set of rectangular chambers with 2-cell walls, doors between
// chambers (each with a ground-truth divider), optional openings into hidden,
// not yet explored space, and optional clutter. Missions perturb what the
// robot senses: rigid per-region jitter with sensing dropout, removed or
// added wall sections, door toggles, clutter and exploration.
//
// All randomness comes from SplitMix64 / xoshiro-style generators seeded
// from the spec or script, so every output is a pure function of its input.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "semlife/conflict.hpp"

namespace semlife {

/// Small portable PRNG (xoshiro256**) with explicit uniform and normal
/// helpers, so streams are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  std::uint64_t next();
  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [lo, hi].
  int range(int lo, int hi);
  double normal(double sigma);
  bool chance(double p) { return uniform() < p; }

 private:
  std::uint64_t s_[4];
};

/// Half-open cell rectangle [x0, x1) x [y0, y1).
struct Rect {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
  long area() const { return static_cast<long>(width()) * height(); }
  bool empty() const { return x1 <= x0 || y1 <= y0; }
  bool contains(int x, int y) const { return x >= x0 && x < x1 && y >= y0 && y < y1; }

  friend bool operator==(const Rect&, const Rect&) = default;
};

struct Chamber {
  int id = 0;
  Rect interior;
  bool hidden = false;
  bool hallway = false;
};

struct Door {
  int id = 0;
  int chamber_a = 0;  ///< side the ground-truth divider sits on
  int chamber_b = 0;
  Rect gap;           ///< wall cells cleared by the door
  Cell end_a{};       ///< wall cells the divider ends on
  Cell end_b{};
  bool open = true;
};

struct Opening {
  int chamber = 0;  ///< visible chamber the opening belongs to
  Rect gap;
};

struct ClutterBlob {
  int id = 0;
  Cell center{};
  int radius = 1;

  friend bool operator==(const ClutterBlob&, const ClutterBlob&) = default;
};

/// Full state of a simulated home, including what the robot has not seen.
struct Home {
  GridFrame frame;
  int wall_thickness = 2;
  std::vector<Chamber> chambers;
  std::vector<Door> doors;
  std::vector<Opening> openings;
  std::vector<ClutterBlob> clutter;
  /// Structure without doors closed or clutter: Occupied walls, Free
  /// interiors, Unknown outside the home.
  std::vector<CellState> structure;
  /// Cells the robot has sensed so far.
  Mask explored;

  /// Current true state: structure with closed doors and clutter applied.
  std::vector<CellState> truth() const;
  /// What the robot senses without any perturbation.
  OccupancyGrid sensed() const;
  /// Chamber id per free cell of the current truth, -1 elsewhere. Door cells
  /// on the divider's wall column/row belong to chamber_a, the rest to
  /// chamber_b; opening cells belong to their chamber.
  std::vector<int> room_truth() const;
  /// Dividers of the open and closed doors, ids = door ids.
  std::vector<Divider> ground_truth_dividers() const;
  const Chamber* find_chamber(int id) const;
  const Door* find_door(int id) const;
};

struct HomeSpec {
  std::uint64_t seed = 1;
  int width = 140;   ///< frame size in cells
  int height = 120;
  int chambers = 6;  ///< visible chambers including the hallway
  int min_chamber = 14;
  int door_min = 3;
  int door_max = 4;
  int corridor_min = 5;  ///< hallway and hidden corridor width range
  int corridor_max = 6;
  int opening_min = 4;
  int opening_max = 6;
  bool hallway = true;
  bool hidden_corridor = true;
  double resolution = 0.05;

  friend bool operator==(const HomeSpec&, const HomeSpec&) = default;
};

/// Throws Error when the chambers do not fit.
Home generate_home(const HomeSpec& spec);

/// Version-0 semantics of a home: all occupied cells are wall, one divider
/// per door and one room per visible chamber with id = chamber id.
SemanticMap ground_truth_semantics(const Home& home, const Config& cfg = {});

// Mission steps.

struct JitterStep {
  Polygon region;             ///< previous-frame world polygon; empty = everywhere
  double rotation = 0.0;      ///< radians, about the mean of the frame cells in the region
  Point translation{};        ///< meters
  double noise_sigma = 0.0;   ///< cells; added to the reported translation
};
struct RemoveWallStep {
  Rect cells;
};
struct AddWallStep {
  Rect cells;
};
struct ToggleDoorStep {
  int door = 0;
  bool open = true;
};
struct AddClutterStep {
  ClutterBlob blob;
};
struct RemoveClutterStep {
  int id = 0;
};
struct ExploreStep {
  Mask region;
};

using MissionStep =
    std::variant<JitterStep, RemoveWallStep, AddWallStep, ToggleDoorStep, AddClutterStep, RemoveClutterStep,
                 ExploreStep>;

std::string step_kind(const MissionStep& step);

struct MissionScript {
  std::uint64_t seed = 0;
  double dropout = 0.0;  ///< probability that a sensed occupied cell reads free
  std::vector<MissionStep> steps;
  std::string mission_class = "jitter";
};

struct SimResult {
  Home next;                 ///< persistent state after the mission
  OccupancyGrid grid;        ///< what the robot reports
  MotionEstimate motion;     ///< reported, noisy
  MotionEstimate true_motion;
  std::vector<int> room_truth;  ///< chamber id per cell of `grid`
};

/// Door, clutter and exploration steps persist into `next`; wall sections,
/// jitter and dropout only affect this mission's sensing. Throws Error for a
/// step naming an unknown door or clutter id.
SimResult simulate_mission(const Home& home, const MissionScript& script);

// Corpus.

struct CorpusSpec {
  std::uint64_t seed = 2024;
  int homes = 20;
  int missions_per_home = 15;
  double jitter = 0.6;
  double disconnection = 0.2;
  double connection = 0.1;
  double exploration = 0.1;
  HomeSpec home;  ///< template; each home gets its own seed
};

struct CorpusMission {
  int home = 0;
  int index = 0;  ///< 1-based within the home
  MissionScript script;
};

struct Corpus {
  CorpusSpec spec;
  std::vector<HomeSpec> homes;
  std::vector<CorpusMission> missions;
};

/// Per-class counts follow the mix by largest remainder over the whole
/// corpus; explorations are placed in the second half of each home's
/// sequence.
Corpus build_corpus(const CorpusSpec& spec);

// Scenario fixtures. Each returns a previous semantic map and the mission
// that perturbs it.

struct Scenario {
  Home home;
  SemanticMap prev;
  MissionScript script;
  /// Room ids with a named role in the scenario (meaning depends on the
  /// builder).
  std::vector<int> focus;
};

/// Three rooms in a row joined by doors.
Scenario scenario_three_rooms(std::uint64_t seed);
/// Generated home with moderate per-region jitter and dropout.
Scenario scenario_jitter(std::uint64_t seed);
/// Generated home with a wall section of `gap` cells removed between two
/// adjacent chambers; focus = {chamber a, chamber b}.
Scenario scenario_wall_gap(std::uint64_t seed, int gap);
/// Several removed wall sections merging rooms across a generated home.
Scenario scenario_wall_gaps(std::uint64_t seed);
/// A small room merged into a larger one that also opens onto newly
/// explored space; focus = {absorbed room, absorbing room}.
Scenario scenario_absorbed_room(std::uint64_t seed);
/// A narrow hallway cut into three pieces by sensed obstacles; focus =
/// {hallway}.
Scenario scenario_split_hallway(std::uint64_t seed);
/// Three rooms in a row above a hidden corridor that opens into each of
/// them; the mission explores the corridor. focus = the three rooms.
Scenario scenario_new_passage(std::uint64_t seed);
/// Exploration of a hidden chamber behind an opening of one room; focus =
/// {that room}.
Scenario scenario_new_chamber(std::uint64_t seed);

}  // namespace semlife
