#pragma once

// Semantic map transfer: carry rooms and dividers from the previous map onto
// a newly sensed grid through the mission's motion estimate, then rebuild
// walls, dividers and rooms against the new grid.

#include <optional>
#include <vector>

#include "semlife/semantics.hpp"
#include "semlife/wall_estimation.hpp"

namespace semlife {

/// Rigid motion of one region of the previous map:
///   p' = R(rotation) * (p - pivot) + pivot + translation
/// Region and pivot are in the previous map's world frame.
struct RegionMotion {
  double rotation = 0.0;  // radians
  Point translation{};    // meters
  Point pivot{};
  Polygon region;

  Point apply(Point p) const;
  Point invert(Point p) const;

  friend bool operator==(const RegionMotion&, const RegionMotion&) = default;
};

/// Per-region motion. A point belongs to the first listed region containing
/// it.
struct MotionEstimate {
  std::vector<RegionMotion> regions;

  /// A single zero motion over an unbounded region.
  static MotionEstimate identity();
  /// A single motion applied everywhere.
  static MotionEstimate global(double rotation, Point translation, Point pivot = {});

  /// Throws Error("untracked point") when no region contains p.
  Point apply(Point p) const;
  /// Previous-frame position of a new-frame point: the first region whose
  /// inverse maps p back inside it. Empty when none does.
  std::optional<Point> invert(Point p) const;

  friend bool operator==(const MotionEstimate&, const MotionEstimate&) = default;
};

/// Motion from the frame of a grid sensed with `from` to the frame of one
/// sensed with `to`, both given relative to a common reference frame. Every
/// region must be convex.
MotionEstimate relative_motion(const MotionEstimate& from, const MotionEstimate& to);

struct TrackedDivider {
  int id = 0;
  Point a{};
  Point b{};

  friend bool operator==(const TrackedDivider&, const TrackedDivider&) = default;
};

/// Previous semantics moved through the motion estimate; they need not be
/// consistent with the new grid.
struct TrackedSemantics {
  std::vector<TrackedRoom> rooms;
  std::vector<TrackedDivider> dividers;

  std::vector<Polygon> room_polygons() const;

  friend bool operator==(const TrackedSemantics&, const TrackedSemantics&) = default;
};

TrackedSemantics track_semantics(const SemanticMap& prev, const MotionEstimate& motion);

struct SnapResult {
  std::vector<Divider> placed;
  /// Ids of dividers with an endpoint farther than cfg.max_snap_distance()
  /// from every target.
  std::vector<int> unplaced;
};

/// Moves each endpoint to the closest target: a wall cell center, or a cell
/// center on an already placed divider (other_dividers first, then earlier
/// dividers of this call). Ties go to the lower (y, x) target.
SnapResult snap_dividers(const std::vector<TrackedDivider>& tracked, const Mask& walls,
                         const std::vector<Divider>& other_dividers, const Config& cfg,
                         const GridFrame& frame, DividerKind kind = DividerKind::User);

/// Single endpoint form of the snapping rule; empty when out of range.
std::optional<Point> snap_point(Point p, const Mask& walls, const std::vector<Divider>& dividers,
                                double max_cells, const GridFrame& frame);

/// Stage outputs kept for debugging and rendering.
struct TransferTrace {
  TrackedSemantics tracked;
  ObstacleLabels labels;
  WallEstimate walls;
  SnapResult snapped;
};

struct TransferResult {
  SemanticMap candidate;
  TransferTrace trace;
};

/// Track, classify obstacles, estimate walls, snap dividers, reconstruct
/// rooms. The candidate carries version prev.version + 1 and the given meta
/// layer (empty by default). Throws Error("no walls sensed") when the new
/// grid has no wall.
TransferResult transfer_semantics(const SemanticMap& prev, const OccupancyGrid& new_grid,
                                  const MotionEstimate& motion, const Config& cfg,
                                  const std::optional<MetaLayer>& meta = std::nullopt);

/// Rebuild rooms of a transfer result after the meta layer's dividers
/// changed, reusing the traced walls and snapped dividers.
void rebuild_rooms(TransferResult& result, const SemanticMap& prev, const MetaLayer& meta, const Config& cfg);

}  // namespace semlife
