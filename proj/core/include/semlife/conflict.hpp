#pragma once

// Conflict detection through per-room precision / recall and conflict
// resolution through the meta layer.

#include <optional>
#include <string>
#include <vector>

#include "semlife/transfer.hpp"

namespace semlife {

enum class RoomStatus { Transferred, LowPrecision, LowRecall, Lost };

struct RoomPR {
  int room_id = 0;
  double precision = 0.0;
  double recall = 0.0;
  RoomStatus status = RoomStatus::Lost;

  friend bool operator==(const RoomPR&, const RoomPR&) = default;
};

enum class ResolutionKind { WallDiff, FreeDiff, MetaDivider };

struct Resolution {
  ResolutionKind kind = ResolutionKind::WallDiff;
  int pass = 0;
  std::size_t cells = 0;            ///< meta occupancy cells added
  std::vector<Divider> segments;    ///< meta dividers added
};

/// Adjacency between two rooms (a < b) that exists in only one of the maps.
struct AdjacencyChange {
  int a = 0;
  int b = 0;
  bool gained = false;

  friend bool operator==(const AdjacencyChange&, const AdjacencyChange&) = default;
};

enum class Arm { Baseline, MetaOccupancy, Full };

std::string to_string(Arm arm);
Arm parse_arm(const std::string& s);
std::string to_string(RoomStatus s);
std::string to_string(ResolutionKind k);

struct ConflictReport {
  std::vector<RoomPR> rooms;
  std::vector<int> unplaced_dividers;
  std::vector<AdjacencyChange> connectivity;
  std::vector<Resolution> resolutions;
  double pr_threshold = 0.5;
  std::string arm;
  int passes = 0;

  /// Every previous room transferred above threshold and no unplaced divider.
  /// Connectivity changes are reported but do not gate success.
  bool success() const;
  std::vector<int> failed_rooms() const;
  const RoomPR* find(int room_id) const;
};

/// Lost when the candidate is absent; otherwise LowRecall, then
/// LowPrecision, checked in that order against the threshold.
RoomStatus classify_pr(double precision, double recall, bool present, double threshold);

/// precision = both / (b_only + both), recall = both / (a_only + both) over
/// rasterized cell counts; an empty denominator yields 0.
RoomPR room_precision_recall(int room_id, const Polygon& prev_room, const std::optional<Polygon>& candidate,
                             const GridFrame& frame, double threshold);

/// Compares every previous room with the candidate room of the same id. When
/// tracked semantics are given the previous rooms are taken at their tracked
/// positions, so rigid drift between missions does not count as change.
ConflictReport detect_conflicts(const SemanticMap& prev, const SemanticMap& candidate, const Config& cfg,
                                const TrackedSemantics* tracked = nullptr,
                                const std::vector<int>& unplaced_dividers = {});

/// Pairs of rooms whose rasters come within two cells of each other (through
/// a divider or a thin wall).
std::vector<std::pair<int, int>> room_adjacency(const std::vector<Room>& rooms, const GridFrame& frame);

/// Tracked boundary cells that were occupied in the previous map (looked up
/// through the inverse motion) and are not occupied now. Components of at
/// most cfg.max_diff_cells cells that come within one cell of a failed room's
/// one-cell dilation survive, minus raw occupied cells.
Mask wall_difference_repair(const SemanticMap& prev, const SemanticMap& candidate, const TrackedSemantics& tracked,
                            const MotionEstimate& motion, const ConflictReport& report, const Config& cfg);

/// Cells of tracked rooms (interior and boundary ring) that were free in the
/// previous map and are wall-labelled raw occupied cells now; filtered like
/// wall_difference_repair.
Mask free_difference_repair(const SemanticMap& prev, const SemanticMap& candidate, const TrackedSemantics& tracked,
                            const MotionEstimate& motion, const ConflictReport& report, const Config& cfg);

/// For every failed room, tracked boundary stretches farther than
/// cfg.snap_distance from walls, dividers and unknown space become meta
/// dividers; the open ends are snapped to walls or dividers.
std::vector<Divider> place_meta_dividers(const ConflictReport& report, const TrackedSemantics& tracked,
                                         const SemanticMap& candidate, const Config& cfg, int first_id);

struct Resolved {
  SemanticMap candidate;
  ConflictReport report;
  TransferTrace trace;
};

/// Transfer, then (arm permitting) meta-occupancy repair and a second
/// transfer, then meta dividers and a final reconstruction. At most three
/// passes; the report describes the last one.
Resolved resolve_conflicts(const SemanticMap& prev, const OccupancyGrid& new_grid, const MotionEstimate& motion,
                           const Config& cfg, Arm arm);

}  // namespace semlife
