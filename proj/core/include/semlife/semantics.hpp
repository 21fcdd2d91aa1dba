#pragma once

// Semantic map data model: obstacle labels, dividers, rooms and the meta
// layer, plus the constraint validator and room reconstruction.

#include <string>
#include <vector>

#include "semlife/grid.hpp"

namespace semlife {

enum class DividerKind { User, Meta };

struct Divider {
  int id = 0;
  Point a{};
  Point b{};
  DividerKind kind = DividerKind::User;

  friend bool operator==(const Divider&, const Divider&) = default;
};

struct Room {
  int id = 0;
  std::string label;
  Polygon boundary;

  friend bool operator==(const Room&, const Room&) = default;
};

/// Both masks are subsets of the effectively occupied cells.
struct ObstacleLabels {
  Mask wall;
  Mask clutter;

  friend bool operator==(const ObstacleLabels&, const ObstacleLabels&) = default;
};

/// Relaxed-constraint semantics used to resolve conflicts without touching
/// the raw grid. occupancy_wall only adds occupied cells, occupancy_free only
/// removes them, and neither ever marks an Unknown cell.
struct MetaLayer {
  Mask occupancy_wall;
  Mask occupancy_free;
  std::vector<Divider> dividers;

  static MetaLayer empty_for(const GridFrame& frame);
  bool empty() const { return occupancy_wall.none() && occupancy_free.none() && dividers.empty(); }

  friend bool operator==(const MetaLayer&, const MetaLayer&) = default;
};

/// Thresholds in cells unless noted.
struct Config {
  double wall_distance = 3.0;     ///< obstacle within this of a tracked boundary is wall
  double snap_distance = 2.0;     ///< divider endpoint / room edge tolerance
  std::size_t max_diff_cells = 400;  ///< largest difference component that gets repaired
  double growth_ratio = 1.3;      ///< room area ratio that triggers discovery
  double pr_threshold = 0.5;      ///< per-room precision and recall needed for success
  double door_width = 12.0;       ///< widest passage the divider estimator will cut
  std::size_t min_room_cells = 16;   ///< free pockets smaller than this are not rooms

  /// Dividers whose nearest snap target is farther than this are unplaced.
  double max_snap_distance() const { return 10.0 * snap_distance; }
  /// Throws Error when a field is out of range.
  void validate() const;

  friend bool operator==(const Config&, const Config&) = default;
};

struct SemanticMap {
  int version = 0;
  OccupancyGrid grid;
  ObstacleLabels labels;
  std::vector<Divider> dividers;
  std::vector<Room> rooms;
  MetaLayer meta;

  const Room* find_room(int id) const;
  const Divider* find_divider(int id) const;
  /// Smallest id greater than every room id in use.
  int next_room_id() const;
  int next_divider_id() const;

  friend bool operator==(const SemanticMap&, const SemanticMap&) = default;
};

struct Violation {
  std::string semantic;    // "divider", "room", "wall", ...
  std::string constraint;  // short constraint name
  std::string location;    // human-readable position / ids
  int id = -1;             // offending semantic id when there is one

  friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

/// (raw occupied | meta wall) - meta free. The grid is not modified.
Mask effective_occupancy(const OccupancyGrid& grid, const MetaLayer& meta);

/// Barrier mask used for room reconstruction: labelled walls plus meta walls,
/// with single-cell pinholes closed.
Mask wall_mask(const ObstacleLabels& labels, const MetaLayer& meta);

/// Cells covered by the rasterized divider segments.
Mask divider_raster(const std::vector<Divider>& dividers, const GridFrame& frame);

ValidationReport validate_constraints(const SemanticMap& map, const Config& cfg);

struct TrackedRoom {
  int id = 0;
  std::string label;
  Polygon boundary;

  friend bool operator==(const TrackedRoom&, const TrackedRoom&) = default;
};

/// Flood-fills passable space (not wall, not divider, not unknown; clutter is
/// passable) into 4-connected regions and turns each region of at least
/// cfg.min_room_cells cells into a room traced from its outline.
///
/// Ids: (region, tracked room) pairs are matched greedily by descending
/// raster overlap, ties to the lower room id and then the earlier region, so
/// every tracked id is used at most once. Unmatched regions get fresh ids
/// starting at max(first_fresh_id, 1 + largest tracked id) and the label
/// "Room <id>".
std::vector<Room> reconstruct_rooms(const Mask& walls, const std::vector<Divider>& dividers,
                                    const OccupancyGrid& grid, const MetaLayer& meta,
                                    const std::vector<TrackedRoom>& tracked, const Config& cfg,
                                    int first_fresh_id = 1);

std::string default_room_label(int id);

}  // namespace semlife
