#pragma once

// Discovery of new rooms in space that appeared since the previous mission.

#include <vector>

#include "semlife/conflict.hpp"

namespace semlife {

struct GrownRegion {
  int room_id = 0;
  Mask mask;
  /// The room has no previous counterpart and is reported as a whole.
  bool whole = false;
};

/// Rooms of `resolved` whose raster area exceeds cfg.growth_ratio times the
/// previous area. The previous room is taken at its tracked position when
/// `tracked` is given. The mask is the new raster minus the previous one.
std::vector<GrownRegion> detect_growth(const SemanticMap& prev, const SemanticMap& resolved, const Config& cfg,
                                       const TrackedSemantics* tracked = nullptr);

/// Proposes dividers across the narrow passages of a free-space region.
///
/// The region is eroded (thresholding its distance field at increasing
/// radii, up to half the door width) until it falls apart into two or more
/// cores that are at least one cell deeper than the erosion radius. Region
/// cells are assigned to the nearest core, and the shortest straight chord
/// (horizontal, vertical or diagonal, at most cfg.door_width cells) through
/// a zone boundary that separates two cores becomes a divider between the
/// blocking cells at its ends. Repeats until no split remains.
///
/// Chord endpoints not on `walls` are snapped to walls or earlier proposals;
/// chords that cannot be snapped are skipped.
std::vector<Divider> estimate_dividers(const Mask& region, const Mask& walls, const Config& cfg,
                                       const GridFrame& frame, int first_id = 1);

struct DiscoveryReport {
  std::vector<GrownRegion> grown;
  std::vector<Divider> proposals;
  std::vector<int> accepted;   ///< ids of proposals inserted into the map
  std::vector<int> rejected;   ///< ids of proposals that broke an existing room
  std::vector<int> new_rooms;  ///< ids of rooms created by accepted proposals
};

struct Discovered {
  SemanticMap map;
  DiscoveryReport report;
};

/// Runs divider estimation on every grown room and keeps the proposals that
/// cross its grown part. A proposal is accepted only if every room that was
/// transferred before still is, at or above the precision / recall
/// threshold, and the map stays valid.
Discovered discover(const SemanticMap& prev, const SemanticMap& resolved, const Config& cfg,
                    const TrackedSemantics* tracked = nullptr);

}  // namespace semlife
