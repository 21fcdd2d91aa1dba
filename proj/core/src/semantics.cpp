#include "semlife/semantics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <tuple>

namespace semlife {

MetaLayer MetaLayer::empty_for(const GridFrame& frame) {
  return {Mask(frame.width, frame.height), Mask(frame.width, frame.height), {}};
}

void Config::validate() const {
  if (!(wall_distance > 0)) throw Error("config: wall_distance must be > 0");
  if (!(snap_distance > 0)) throw Error("config: snap_distance must be > 0");
  if (max_diff_cells == 0) throw Error("config: max_diff_cells must be > 0");
  if (!(growth_ratio > 0)) throw Error("config: growth_ratio must be > 0");
  if (!(pr_threshold > 0 && pr_threshold <= 1)) throw Error("config: pr_threshold must be in (0, 1]");
  if (!(door_width > 0)) throw Error("config: door_width must be > 0");
  if (min_room_cells == 0) throw Error("config: min_room_cells must be > 0");
}

const Room* SemanticMap::find_room(int id) const {
  for (const auto& r : rooms)
    if (r.id == id) return &r;
  return nullptr;
}

const Divider* SemanticMap::find_divider(int id) const {
  for (const auto& d : dividers)
    if (d.id == id) return &d;
  for (const auto& d : meta.dividers)
    if (d.id == id) return &d;
  return nullptr;
}

int SemanticMap::next_room_id() const {
  int id = 1;
  for (const auto& r : rooms) id = std::max(id, r.id + 1);
  return id;
}

int SemanticMap::next_divider_id() const {
  int id = 1;
  for (const auto& d : dividers) id = std::max(id, d.id + 1);
  for (const auto& d : meta.dividers) id = std::max(id, d.id + 1);
  return id;
}

std::string default_room_label(int id) { return "Room " + std::to_string(id); }

Mask effective_occupancy(const OccupancyGrid& grid, const MetaLayer& meta) {
  Mask occ = grid.occupied();
  if (!occ.same_shape(meta.occupancy_wall) || !occ.same_shape(meta.occupancy_free))
    throw Error("meta layer dimensions do not match the grid");
  occ |= meta.occupancy_wall;
  occ -= meta.occupancy_free;
  return occ;
}

Mask wall_mask(const ObstacleLabels& labels, const MetaLayer& meta) {
  return close_pinholes(labels.wall | meta.occupancy_wall);
}

Mask divider_raster(const std::vector<Divider>& dividers, const GridFrame& frame) {
  Mask m(frame.width, frame.height);
  for (const auto& d : dividers) draw_segment(m, d.a, d.b, frame);
  return m;
}

// ---------------------------------------------------------------------------

namespace {

std::string fmt_point(Point p) {
  std::ostringstream os;
  os.precision(4);
  os << "(" << p.x << ", " << p.y << ")";
  return os.str();
}

// Distance in cells from a world point to the nearest set cell center,
// searched exhaustively within `radius` cells. Returns +inf when none.
double nearest_set_distance(const Mask& mask, const GridFrame& frame, Point world, double radius) {
  const Point c = frame.to_cell_units(world);
  const int r = static_cast<int>(std::ceil(radius)) + 1;
  const int cx = static_cast<int>(std::floor(c.x));
  const int cy = static_cast<int>(std::floor(c.y));
  double best = std::numeric_limits<double>::infinity();
  for (int y = cy - r; y <= cy + r; ++y)
    for (int x = cx - r; x <= cx + r; ++x)
      if (mask.get(x, y)) best = std::min(best, std::hypot(x + 0.5 - c.x, y + 0.5 - c.y));
  return best;
}

bool endpoint_supported(Point p, const Mask& walls, const GridFrame& frame,
                        const std::vector<const Divider*>& supports, double tol_cells) {
  if (nearest_set_distance(walls, frame, p, tol_cells) <= tol_cells + 1e-9) return true;
  for (const Divider* d : supports)
    if (point_segment_distance(p, d->a, d->b) <= tol_cells * frame.resolution + 1e-9) return true;
  return false;
}

}  // namespace

ValidationReport validate_constraints(const SemanticMap& map, const Config& cfg) {
  ValidationReport report;
  auto add = [&](std::string semantic, std::string constraint, std::string location, int id = -1) {
    report.violations.push_back({std::move(semantic), std::move(constraint), std::move(location), id});
  };
  const OccupancyGrid& grid = map.grid;
  const GridFrame& frame = grid.frame();
  const int w = grid.width();
  const int h = grid.height();

  auto shape_ok = [&](const Mask& m) { return m.width() == w && m.height() == h; };
  if (!shape_ok(map.meta.occupancy_wall) || !shape_ok(map.meta.occupancy_free) ||
      !shape_ok(map.labels.wall) || !shape_ok(map.labels.clutter)) {
    add("map", "mask dimensions match grid", "labels or meta layer");
    return report;
  }

  const Mask raw_occ = grid.occupied();
  const Mask unknown = grid.unknown();

  // Meta occupancy: only adds / only removes, never on Unknown.
  if (const auto n = (map.meta.occupancy_wall & raw_occ).count(); n > 0)
    add("meta-occupancy", "meta wall only adds occupancy", std::to_string(n) + " cells already occupied");
  if (const auto n = (map.meta.occupancy_free - raw_occ).count(); n > 0)
    add("meta-occupancy", "meta free only removes occupancy", std::to_string(n) + " cells not occupied");
  if (const auto n = ((map.meta.occupancy_wall | map.meta.occupancy_free) & unknown).count(); n > 0)
    add("meta-occupancy", "never marks unknown cells", std::to_string(n) + " unknown cells");

  const Mask eff = effective_occupancy(grid, map.meta);

  // Obstacle labels.
  if (const auto n = (map.labels.wall & map.labels.clutter).count(); n > 0)
    add("clutter", "wall and clutter disjoint", std::to_string(n) + " cells");
  if (const auto n = ((map.labels.wall | map.labels.clutter) - eff).count(); n > 0)
    add("clutter", "lies on occupancy pixels", std::to_string(n) + " labelled cells not occupied");
  const Mask support = raw_occ | map.meta.occupancy_wall;
  if (map.labels.wall.any()) {
    if (support.none()) {
      add("wall", "within a distance of occupied pixels", "no occupied cells");
    } else {
      const DistanceField df = distance_field(support);
      std::size_t far = 0;
      for (std::size_t i = 0; i < map.labels.wall.size(); ++i)
        if (map.labels.wall[i] && df.values()[i] > cfg.wall_distance + 1e-9) ++far;
      if (far > 0)
        add("wall", "within a distance of occupied pixels", std::to_string(far) + " wall cells too far");
    }
  }

  const Mask walls = wall_mask(map.labels, map.meta);

  // Dividers.
  std::set<int> divider_ids;
  std::vector<const Divider*> user_dividers;
  std::vector<const Divider*> all_dividers;
  for (const auto& d : map.dividers) {
    if (d.kind == DividerKind::User) user_dividers.push_back(&d);
    all_dividers.push_back(&d);
  }
  for (const auto& d : map.meta.dividers) all_dividers.push_back(&d);
  for (const Divider* d : all_dividers) {
    if (!divider_ids.insert(d->id).second)
      add("divider", "unique id", "divider " + std::to_string(d->id), d->id);
    const bool is_meta = d->kind == DividerKind::Meta;
    std::vector<const Divider*> supports;
    for (const Divider* o : is_meta ? all_dividers : user_dividers)
      if (o != d) supports.push_back(o);
    for (const Point& p : {d->a, d->b}) {
      if (!endpoint_supported(p, walls, frame, supports, cfg.snap_distance)) {
        add(is_meta ? "meta-divider" : "divider",
            is_meta ? "ends on wall or meta-divider" : "ends on wall or another divider",
            "divider " + std::to_string(d->id) + " endpoint " + fmt_point(p), d->id);
      }
    }
  }

  // Rooms.
  Mask barrier = walls | eff | unknown | divider_raster(map.dividers, frame) |
                 divider_raster(map.meta.dividers, frame);
  std::set<int> room_ids;
  std::vector<Mask> rasters;
  std::vector<int> raster_ids;
  std::optional<DistanceField> barrier_df;
  if (barrier.any()) barrier_df.emplace(distance_field(barrier));
  for (const auto& room : map.rooms) {
    if (!room_ids.insert(room.id).second)
      add("room", "unique id", "room " + std::to_string(room.id), room.id);
    if (is_degenerate(room.boundary)) {
      add("room", "boundary is a polygon", "room " + std::to_string(room.id), room.id);
      continue;
    }
    rasters.push_back(rasterize_polygon(room.boundary, frame));
    raster_ids.push_back(room.id);

    // Each boundary edge must run along walls, dividers or the explored
    // frontier. Sampled every half cell; distances are upper bounds through
    // the nearest cell centers.
    const auto& v = room.boundary.vertices;
    std::size_t bad_samples = 0;
    Point first_bad{};
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Point a = frame.to_cell_units(v[i]);
      const Point b = frame.to_cell_units(v[(i + 1) % v.size()]);
      const double len = std::hypot(b.x - a.x, b.y - a.y);
      const int steps = std::max(1, static_cast<int>(std::ceil(len / 0.5)));
      for (int s = 0; s <= steps; ++s) {
        const double t = static_cast<double>(s) / steps;
        const Point p{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
        double best = std::min({p.x + 0.5, p.y + 0.5, w + 0.5 - p.x, h + 0.5 - p.y});
        if (barrier_df) {
          const int cx = static_cast<int>(std::floor(p.x));
          const int cy = static_cast<int>(std::floor(p.y));
          for (int y = cy - 1; y <= cy + 1; ++y)
            for (int x = cx - 1; x <= cx + 1; ++x)
              if (grid.contains(x, y))
                best = std::min(best, std::hypot(x + 0.5 - p.x, y + 0.5 - p.y) + (*barrier_df)(x, y));
        }
        if (best > cfg.snap_distance + 1e-9) {
          if (bad_samples == 0) first_bad = frame.to_world(p);
          ++bad_samples;
        }
      }
    }
    if (bad_samples > 0)
      add("room", "defined by wall sections and dividers",
          "room " + std::to_string(room.id) + " edge near " + fmt_point(first_bad), room.id);
  }
  for (std::size_t i = 0; i < rasters.size(); ++i) {
    for (std::size_t j = i + 1; j < rasters.size(); ++j) {
      const auto both = (rasters[i] & rasters[j]).count();
      if (both > 0)
        add("room", "rooms not disjoint",
            "rooms " + std::to_string(raster_ids[i]) + " and " + std::to_string(raster_ids[j]) + ": " +
                std::to_string(both) + " cells",
            raster_ids[i]);
    }
  }
  return report;
}

// ---------------------------------------------------------------------------

std::vector<Room> reconstruct_rooms(const Mask& walls, const std::vector<Divider>& dividers,
                                    const OccupancyGrid& grid, const MetaLayer& meta,
                                    const std::vector<TrackedRoom>& tracked, const Config& cfg,
                                    int first_fresh_id) {
  const GridFrame& frame = grid.frame();
  Mask blocked = walls | divider_raster(dividers, frame) | divider_raster(meta.dividers, frame) |
                 grid.unknown();
  // Cells the meta layer frees are passable even if labelled elsewhere.
  Mask passable = ~blocked;
  const Labeling lab = label_components(passable, Connectivity::Four);

  struct Region {
    Polygon outline;
    Mask raster;
  };
  std::vector<Region> regions;
  for (int l = 0; l < lab.count(); ++l) {
    if (lab.sizes[l] < cfg.min_room_cells) continue;
    Mask region = lab.component(l);
    Polygon outline = trace_outline(region, frame);
    Mask raster = rasterize_polygon(outline, frame);
    regions.push_back({std::move(outline), std::move(raster)});
  }

  std::vector<Mask> tracked_rasters;
  tracked_rasters.reserve(tracked.size());
  for (const auto& t : tracked) {
    if (is_degenerate(t.boundary)) tracked_rasters.emplace_back(frame.width, frame.height);
    else tracked_rasters.push_back(rasterize_polygon(t.boundary, frame));
  }

  // Greedy one-to-one matching by overlap.
  struct Pair {
    std::size_t overlap;
    int room_id;
    std::size_t region;
    std::size_t tracked;
  };
  std::vector<Pair> pairs;
  for (std::size_t r = 0; r < regions.size(); ++r) {
    for (std::size_t t = 0; t < tracked.size(); ++t) {
      const auto ov = overlap_areas(regions[r].raster, tracked_rasters[t]).both;
      if (ov > 0) pairs.push_back({ov, tracked[t].id, r, t});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    return std::make_tuple(-static_cast<long long>(a.overlap), a.room_id, a.region) <
           std::make_tuple(-static_cast<long long>(b.overlap), b.room_id, b.region);
  });
  std::vector<int> region_tracked(regions.size(), -1);
  std::vector<char> tracked_used(tracked.size(), 0);
  for (const auto& p : pairs) {
    if (region_tracked[p.region] >= 0 || tracked_used[p.tracked]) continue;
    region_tracked[p.region] = static_cast<int>(p.tracked);
    tracked_used[p.tracked] = 1;
  }

  int fresh = std::max(first_fresh_id, 1);
  for (const auto& t : tracked) fresh = std::max(fresh, t.id + 1);

  std::vector<Room> rooms;
  for (std::size_t r = 0; r < regions.size(); ++r) {
    Room room;
    if (region_tracked[r] >= 0) {
      const auto& t = tracked[region_tracked[r]];
      room.id = t.id;
      room.label = t.label.empty() ? default_room_label(t.id) : t.label;
    } else {
      room.id = fresh++;
      room.label = default_room_label(room.id);
    }
    room.boundary = std::move(regions[r].outline);
    rooms.push_back(std::move(room));
  }
  std::sort(rooms.begin(), rooms.end(), [](const Room& a, const Room& b) { return a.id < b.id; });
  return rooms;
}

}  // namespace semlife
