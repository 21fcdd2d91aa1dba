#include "semlife/wall_estimation.hpp"

namespace semlife {

Mask tracked_boundary_raster(const std::vector<Polygon>& polys, const GridFrame& frame) {
  Mask ring(frame.width, frame.height);
  for (const auto& p : polys) {
    if (is_degenerate(p)) continue;
    ring |= boundary_ring(rasterize_polygon(p, frame));
  }
  return ring;
}

ObstacleLabels classify_obstacles(const OccupancyGrid& grid, const std::vector<Polygon>& tracked_rooms,
                                  const MetaLayer& meta, const Config& cfg) {
  const Mask occ = effective_occupancy(grid, meta);
  ObstacleLabels out{occ, Mask(grid.width(), grid.height())};
  if (tracked_rooms.empty()) return out;

  const GridFrame& frame = grid.frame();
  const Mask ring = tracked_boundary_raster(tracked_rooms, frame);
  if (ring.none()) return out;
  Mask interior(grid.width(), grid.height());
  for (const auto& p : tracked_rooms)
    if (!is_degenerate(p)) interior |= rasterize_polygon(p, frame);

  const DistanceField df = distance_field(ring);
  for (std::size_t i = 0; i < occ.size(); ++i) {
    if (!occ[i]) continue;
    if (df.values()[i] > cfg.wall_distance && interior[i]) {
      out.wall.set_index(i, false);
      out.clutter.set_index(i, true);
    }
  }
  return out;
}

WallEstimate estimate_walls(const ObstacleLabels& labels, const OccupancyGrid& grid, const MetaLayer& meta) {
  if (!labels.wall.same_shape(meta.occupancy_wall) || labels.wall.width() != grid.width() ||
      labels.wall.height() != grid.height())
    throw Error("label dimensions do not match the grid");
  WallEstimate est;
  est.mask = wall_mask(labels, meta);
  if (est.mask.none()) throw Error("no walls sensed");
  for (const Mask& piece : connected_components(est.mask, Connectivity::Four))
    est.polylines.push_back(trace_outline(piece, grid.frame()));
  return est;
}

}  // namespace semlife
