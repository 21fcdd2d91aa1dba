#include "semlife/transfer.hpp"

#include <cmath>
#include <limits>
#include <tuple>

namespace semlife {

Point RegionMotion::apply(Point p) const {
  const double c = std::cos(rotation);
  const double s = std::sin(rotation);
  const double dx = p.x - pivot.x;
  const double dy = p.y - pivot.y;
  return {c * dx - s * dy + pivot.x + translation.x, s * dx + c * dy + pivot.y + translation.y};
}

Point RegionMotion::invert(Point p) const {
  const double c = std::cos(rotation);
  const double s = std::sin(rotation);
  const double dx = p.x - pivot.x - translation.x;
  const double dy = p.y - pivot.y - translation.y;
  return {c * dx + s * dy + pivot.x, -s * dx + c * dy + pivot.y};
}

namespace {

Polygon unbounded_region() {
  constexpr double big = 1e12;
  return Polygon{{{-big, -big}, {big, -big}, {big, big}, {-big, big}}};
}

}  // namespace

MotionEstimate MotionEstimate::identity() { return global(0.0, {}); }

MotionEstimate MotionEstimate::global(double rotation, Point translation, Point pivot) {
  return MotionEstimate{{RegionMotion{rotation, translation, pivot, unbounded_region()}}};
}

Point MotionEstimate::apply(Point p) const {
  for (const auto& r : regions)
    if (contains_point(r.region, p)) return r.apply(p);
  throw Error("untracked point");
}

std::optional<Point> MotionEstimate::invert(Point p) const {
  for (const auto& r : regions) {
    const Point q = r.invert(p);
    if (contains_point(r.region, q)) return q;
  }
  return std::nullopt;
}

MotionEstimate relative_motion(const MotionEstimate& from, const MotionEstimate& to) {
  MotionEstimate out;
  auto moved = [](const RegionMotion& m, const Polygon& poly) {
    Polygon p;
    for (const auto& v : poly.vertices) p.vertices.push_back(m.apply(v));
    return p;
  };
  for (const auto& f : from.regions) {
    if (!is_convex(f.region)) throw Error("relative_motion needs convex regions");
    const Polygon own = moved(f, f.region);
    for (const auto& t : to.regions) {
      if (!is_convex(t.region)) throw Error("relative_motion needs convex regions");
      Polygon region = clip_convex(own, moved(f, t.region));
      if (is_degenerate(region)) continue;
      RegionMotion r;
      r.rotation = t.rotation - f.rotation;
      r.pivot = {f.pivot.x + f.translation.x, f.pivot.y + f.translation.y};
      const Point image = t.apply(f.invert(r.pivot));
      r.translation = {image.x - r.pivot.x, image.y - r.pivot.y};
      r.region = std::move(region);
      out.regions.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<Polygon> TrackedSemantics::room_polygons() const {
  std::vector<Polygon> out;
  out.reserve(rooms.size());
  for (const auto& r : rooms) out.push_back(r.boundary);
  return out;
}

TrackedSemantics track_semantics(const SemanticMap& prev, const MotionEstimate& motion) {
  TrackedSemantics out;
  for (const auto& room : prev.rooms) {
    TrackedRoom t{room.id, room.label, {}};
    t.boundary.vertices.reserve(room.boundary.vertices.size());
    for (const auto& v : room.boundary.vertices) t.boundary.vertices.push_back(motion.apply(v));
    out.rooms.push_back(std::move(t));
  }
  for (const auto& d : prev.dividers) out.dividers.push_back({d.id, motion.apply(d.a), motion.apply(d.b)});
  return out;
}

std::optional<Point> snap_point(Point p, const Mask& walls, const std::vector<Divider>& dividers,
                                double max_cells, const GridFrame& frame) {
  Mask targets = walls;
  for (const auto& d : dividers) draw_segment(targets, d.a, d.b, frame);
  const Point c = frame.to_cell_units(p);
  const int r = static_cast<int>(std::ceil(max_cells)) + 1;
  const int cx = static_cast<int>(std::floor(c.x));
  const int cy = static_cast<int>(std::floor(c.y));
  double best = std::numeric_limits<double>::infinity();
  Cell best_cell{};
  // Row-major from low y, strict improvement: ties keep the lower (y, x).
  for (int y = cy - r; y <= cy + r; ++y) {
    for (int x = cx - r; x <= cx + r; ++x) {
      if (!targets.get(x, y)) continue;
      const double d = std::hypot(x + 0.5 - c.x, y + 0.5 - c.y);
      if (d < best - 1e-12) {
        best = d;
        best_cell = {x, y};
      }
    }
  }
  if (best > max_cells + 1e-9) return std::nullopt;
  return frame.cell_center(best_cell);
}

SnapResult snap_dividers(const std::vector<TrackedDivider>& tracked, const Mask& walls,
                         const std::vector<Divider>& other_dividers, const Config& cfg,
                         const GridFrame& frame, DividerKind kind) {
  SnapResult out;
  std::vector<Divider> supports = other_dividers;
  for (const auto& t : tracked) {
    const auto a = snap_point(t.a, walls, supports, cfg.max_snap_distance(), frame);
    const auto b = snap_point(t.b, walls, supports, cfg.max_snap_distance(), frame);
    if (!a || !b || frame.cell_of(*a) == frame.cell_of(*b)) {
      out.unplaced.push_back(t.id);
      continue;
    }
    Divider d{t.id, *a, *b, kind};
    out.placed.push_back(d);
    supports.push_back(d);
  }
  return out;
}

TransferResult transfer_semantics(const SemanticMap& prev, const OccupancyGrid& new_grid,
                                  const MotionEstimate& motion, const Config& cfg,
                                  const std::optional<MetaLayer>& meta_in) {
  if (std::abs(prev.grid.resolution() - new_grid.resolution()) > 1e-12)
    throw Error("grid resolution changed between missions");
  const MetaLayer meta = meta_in ? *meta_in : MetaLayer::empty_for(new_grid.frame());

  TransferResult result;
  TransferTrace& trace = result.trace;
  trace.tracked = track_semantics(prev, motion);
  trace.labels = classify_obstacles(new_grid, trace.tracked.room_polygons(), meta, cfg);
  trace.walls = estimate_walls(trace.labels, new_grid, meta);
  trace.snapped = snap_dividers(trace.tracked.dividers, trace.walls.mask, {}, cfg, new_grid.frame());

  SemanticMap& cand = result.candidate;
  cand.version = prev.version + 1;
  cand.grid = new_grid;
  cand.labels = trace.labels;
  cand.dividers = trace.snapped.placed;
  cand.meta = meta;
  cand.rooms = reconstruct_rooms(trace.walls.mask, cand.dividers, new_grid, meta, trace.tracked.rooms, cfg,
                                 prev.next_room_id());
  return result;
}

void rebuild_rooms(TransferResult& result, const SemanticMap& prev, const MetaLayer& meta, const Config& cfg) {
  SemanticMap& cand = result.candidate;
  cand.meta = meta;
  cand.rooms = reconstruct_rooms(result.trace.walls.mask, cand.dividers, cand.grid, meta,
                                 result.trace.tracked.rooms, cfg, prev.next_room_id());
}

}  // namespace semlife
