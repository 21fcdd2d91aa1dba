#pragma once

// Wall / clutter classification against tracked room boundaries and wall
// mask estimation.

#include <vector>

#include "semlife/semantics.hpp"

namespace semlife {

/// Labels every effectively occupied cell as wall or clutter.
///
/// A cell within cfg.wall_distance of the rasterized tracked boundaries is
/// wall; a cell inside a tracked room and farther than that is clutter;
/// anything else (outside all tracked rooms) is wall. With no tracked rooms
/// every occupied cell is wall.
ObstacleLabels classify_obstacles(const OccupancyGrid& grid, const std::vector<Polygon>& tracked_rooms,
                                  const MetaLayer& meta, const Config& cfg);

struct WallEstimate {
  Mask mask;
  /// Outer outline of every 4-connected piece of the wall mask, in world
  /// coordinates; each is a closed loop.
  std::vector<Polygon> polylines;
};

/// Wall-labelled cells plus meta wall cells, with single-cell pinholes
/// closed. Throws Error("no walls sensed") when nothing is left.
WallEstimate estimate_walls(const ObstacleLabels& labels, const OccupancyGrid& grid, const MetaLayer& meta);

/// Union of the outer rings of the rasterized polygons: the cells a room's
/// walls and dividers occupy.
Mask tracked_boundary_raster(const std::vector<Polygon>& polys, const GridFrame& frame);

}  // namespace semlife
