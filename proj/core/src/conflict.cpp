#include "semlife/conflict.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace semlife {

std::string to_string(Arm arm) {
  switch (arm) {
    case Arm::Baseline: return "baseline";
    case Arm::MetaOccupancy: return "meta-occ";
    case Arm::Full: return "full";
  }
  return "?";
}

Arm parse_arm(const std::string& s) {
  if (s == "baseline") return Arm::Baseline;
  if (s == "meta-occ") return Arm::MetaOccupancy;
  if (s == "full") return Arm::Full;
  throw Error("unknown arm '" + s + "' (expected baseline, meta-occ or full)");
}

std::string to_string(RoomStatus s) {
  switch (s) {
    case RoomStatus::Transferred: return "Transferred";
    case RoomStatus::LowPrecision: return "LowPrecision";
    case RoomStatus::LowRecall: return "LowRecall";
    case RoomStatus::Lost: return "Lost";
  }
  return "?";
}

std::string to_string(ResolutionKind k) {
  switch (k) {
    case ResolutionKind::WallDiff: return "WallDiff";
    case ResolutionKind::FreeDiff: return "FreeDiff";
    case ResolutionKind::MetaDivider: return "MetaDivider";
  }
  return "?";
}

bool ConflictReport::success() const {
  if (!unplaced_dividers.empty()) return false;
  return std::all_of(rooms.begin(), rooms.end(), [&](const RoomPR& r) {
    return r.status == RoomStatus::Transferred && r.precision >= pr_threshold && r.recall >= pr_threshold;
  });
}

std::vector<int> ConflictReport::failed_rooms() const {
  std::vector<int> out;
  for (const auto& r : rooms)
    if (r.status != RoomStatus::Transferred) out.push_back(r.room_id);
  return out;
}

const RoomPR* ConflictReport::find(int room_id) const {
  for (const auto& r : rooms)
    if (r.room_id == room_id) return &r;
  return nullptr;
}

RoomStatus classify_pr(double precision, double recall, bool present, double threshold) {
  if (!present) return RoomStatus::Lost;
  if (recall < threshold) return RoomStatus::LowRecall;
  if (precision < threshold) return RoomStatus::LowPrecision;
  return RoomStatus::Transferred;
}

namespace {

RoomPR pr_from_overlap(int room_id, const OverlapAreas& ov, double threshold) {
  RoomPR r;
  r.room_id = room_id;
  const double c = static_cast<double>(ov.both);
  r.precision = ov.b_only + ov.both == 0 ? 0.0 : c / static_cast<double>(ov.b_only + ov.both);
  r.recall = ov.a_only + ov.both == 0 ? 0.0 : c / static_cast<double>(ov.a_only + ov.both);
  r.status = classify_pr(r.precision, r.recall, true, threshold);
  return r;
}

}  // namespace

RoomPR room_precision_recall(int room_id, const Polygon& prev_room, const std::optional<Polygon>& candidate,
                             const GridFrame& frame, double threshold) {
  if (is_degenerate(prev_room)) throw Error("degenerate polygon: fewer than 3 distinct vertices");
  if (!candidate) return RoomPR{room_id, 0.0, 0.0, RoomStatus::Lost};
  return pr_from_overlap(room_id, overlap_areas(prev_room, *candidate, frame), threshold);
}

std::vector<std::pair<int, int>> room_adjacency(const std::vector<Room>& rooms, const GridFrame& frame) {
  std::vector<Mask> grown;
  grown.reserve(rooms.size());
  for (const auto& r : rooms) {
    if (is_degenerate(r.boundary)) grown.emplace_back(frame.width, frame.height);
    else grown.push_back(dilate(rasterize_polygon(r.boundary, frame), 1));
  }
  std::vector<std::pair<int, int>> out;
  for (std::size_t i = 0; i < rooms.size(); ++i)
    for (std::size_t j = i + 1; j < rooms.size(); ++j)
      if ((grown[i] & grown[j]).any())
        out.emplace_back(std::min(rooms[i].id, rooms[j].id), std::max(rooms[i].id, rooms[j].id));
  std::sort(out.begin(), out.end());
  return out;
}

ConflictReport detect_conflicts(const SemanticMap& prev, const SemanticMap& candidate, const Config& cfg,
                                const TrackedSemantics* tracked, const std::vector<int>& unplaced_dividers) {
  ConflictReport report;
  report.pr_threshold = cfg.pr_threshold;
  report.unplaced_dividers = unplaced_dividers;
  const GridFrame& frame = candidate.grid.frame();

  std::map<int, Polygon> reference;
  if (tracked) {
    for (const auto& t : tracked->rooms) reference[t.id] = t.boundary;
  }
  for (const auto& room : prev.rooms) {
    if (!reference.count(room.id)) reference[room.id] = room.boundary;
  }
  for (const auto& room : prev.rooms) {
    const Room* cand = candidate.find_room(room.id);
    const Polygon& ref = reference[room.id];
    if (cand == nullptr || is_degenerate(cand->boundary)) {
      report.rooms.push_back({room.id, 0.0, 0.0, RoomStatus::Lost});
      continue;
    }
    report.rooms.push_back(room_precision_recall(room.id, ref, cand->boundary, frame, cfg.pr_threshold));
  }

  // Connectivity between rooms that exist in both maps.
  std::set<int> common;
  for (const auto& r : prev.rooms)
    if (candidate.find_room(r.id)) common.insert(r.id);
  auto filtered = [&](const std::vector<std::pair<int, int>>& adj) {
    std::set<std::pair<int, int>> s;
    for (const auto& p : adj)
      if (common.count(p.first) && common.count(p.second)) s.insert(p);
    return s;
  };
  std::vector<Room> prev_ref;
  for (const auto& r : prev.rooms) prev_ref.push_back({r.id, r.label, reference[r.id]});
  const auto before = filtered(room_adjacency(prev_ref, frame));
  const auto after = filtered(room_adjacency(candidate.rooms, frame));
  for (const auto& p : after)
    if (!before.count(p)) report.connectivity.push_back({p.first, p.second, true});
  for (const auto& p : before)
    if (!after.count(p)) report.connectivity.push_back({p.first, p.second, false});
  std::sort(report.connectivity.begin(), report.connectivity.end(), [](const auto& x, const auto& y) {
    return std::tie(x.a, x.b, x.gained) < std::tie(y.a, y.b, y.gained);
  });
  return report;
}

// ---------------------------------------------------------------------------

namespace {

// Previous-map value at the position a new-frame cell came from.
template <typename Pred>
Mask back_mapped(const GridFrame& new_frame, const GridFrame& prev_frame, const MotionEstimate& motion,
                 const Mask& where, Pred&& pred) {
  Mask out(new_frame.width, new_frame.height);
  for (int y = 0; y < new_frame.height; ++y) {
    for (int x = 0; x < new_frame.width; ++x) {
      if (!where(x, y)) continue;
      const auto q = motion.invert(new_frame.cell_center({x, y}));
      if (!q) continue;
      const Cell c = prev_frame.cell_of(*q);
      if (prev_frame.contains(c.x, c.y) && pred(c.x, c.y)) out.set(x, y);
    }
  }
  return out;
}

Mask failed_room_zone(const ConflictReport& report, const TrackedSemantics& tracked, const GridFrame& frame) {
  Mask zone(frame.width, frame.height);
  const auto failed = report.failed_rooms();
  for (const auto& t : tracked.rooms) {
    if (std::find(failed.begin(), failed.end(), t.id) == failed.end()) continue;
    if (is_degenerate(t.boundary)) continue;
    zone |= rasterize_polygon(t.boundary, frame);
  }
  // One-cell dilation, then 8-neighbour contact.
  return dilate(zone, 2);
}

Mask filter_components(const Mask& diff, const Mask& zone, const Config& cfg) {
  Mask out(diff.width(), diff.height());
  const Labeling lab = label_components(diff, Connectivity::Eight);
  std::vector<char> touches(lab.sizes.size(), 0);
  for (std::size_t i = 0; i < lab.labels.size(); ++i)
    if (lab.labels[i] >= 0 && zone[i]) touches[lab.labels[i]] = 1;
  for (std::size_t i = 0; i < lab.labels.size(); ++i) {
    const int l = lab.labels[i];
    if (l >= 0 && touches[l] && lab.sizes[l] <= cfg.max_diff_cells) out.set_index(i);
  }
  return out;
}

}  // namespace

Mask wall_difference_repair(const SemanticMap& prev, const SemanticMap& candidate, const TrackedSemantics& tracked,
                            const MotionEstimate& motion, const ConflictReport& report, const Config& cfg) {
  const GridFrame& frame = candidate.grid.frame();
  Mask none(frame.width, frame.height);
  if (report.failed_rooms().empty()) return none;

  const Mask ring = tracked_boundary_raster(tracked.room_polygons(), frame);
  const Mask prev_occ = effective_occupancy(prev.grid, prev.meta);
  Mask diff = back_mapped(frame, prev.grid.frame(), motion, ring, [&](int x, int y) { return prev_occ(x, y); });
  diff -= effective_occupancy(candidate.grid, candidate.meta);
  diff -= candidate.grid.unknown();
  diff -= candidate.meta.occupancy_free;

  Mask kept = filter_components(diff, failed_room_zone(report, tracked, frame), cfg);
  kept -= candidate.grid.occupied();
  return kept;
}

Mask free_difference_repair(const SemanticMap& prev, const SemanticMap& candidate, const TrackedSemantics& tracked,
                            const MotionEstimate& motion, const ConflictReport& report, const Config& cfg) {
  const GridFrame& frame = candidate.grid.frame();
  Mask none(frame.width, frame.height);
  if (report.failed_rooms().empty()) return none;

  Mask area(frame.width, frame.height);
  for (const auto& t : tracked.rooms)
    if (!is_degenerate(t.boundary)) area |= rasterize_polygon(t.boundary, frame);
  area |= boundary_ring(area);

  const Mask prev_occ = effective_occupancy(prev.grid, prev.meta);
  const Mask prev_unknown = prev.grid.unknown();
  Mask diff = back_mapped(frame, prev.grid.frame(), motion, area,
                          [&](int x, int y) { return !prev_occ(x, y) && !prev_unknown(x, y); });
  diff &= candidate.labels.wall;
  diff &= candidate.grid.occupied();
  diff -= candidate.meta.occupancy_wall;

  return filter_components(diff, failed_room_zone(report, tracked, frame), cfg);
}

// ---------------------------------------------------------------------------

std::vector<Divider> place_meta_dividers(const ConflictReport& report, const TrackedSemantics& tracked,
                                         const SemanticMap& candidate, const Config& cfg, int first_id) {
  std::vector<Divider> out;
  const auto failed = report.failed_rooms();
  if (failed.empty()) return out;
  const GridFrame& frame = candidate.grid.frame();
  const Mask walls = wall_mask(candidate.labels, candidate.meta);
  Mask cover = walls | candidate.grid.unknown() | divider_raster(candidate.dividers, frame) |
               divider_raster(candidate.meta.dividers, frame);
  int next_id = first_id;
  const double tol = cfg.snap_distance;

  auto covered = [&](Point cell_pt) {
    const int cx = static_cast<int>(std::floor(cell_pt.x));
    const int cy = static_cast<int>(std::floor(cell_pt.y));
    const int r = static_cast<int>(std::ceil(tol)) + 1;
    for (int y = cy - r; y <= cy + r; ++y)
      for (int x = cx - r; x <= cx + r; ++x) {
        const bool set = frame.contains(x, y) ? cover(x, y) : true;
        if (set && std::hypot(x + 0.5 - cell_pt.x, y + 0.5 - cell_pt.y) <= tol + 1e-9) return true;
      }
    return false;
  };

  for (const auto& t : tracked.rooms) {
    if (std::find(failed.begin(), failed.end(), t.id) == failed.end()) continue;
    if (is_degenerate(t.boundary)) continue;
    const auto& v = t.boundary.vertices;

    struct Sample {
      Point p;  // cell units
      bool vertex;
      bool covered;
    };
    std::vector<Sample> samples;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Point a = frame.to_cell_units(v[i]);
      const Point b = frame.to_cell_units(v[(i + 1) % v.size()]);
      const int steps = std::max(1, static_cast<int>(std::ceil(std::hypot(b.x - a.x, b.y - a.y) / 0.5 - 1e-9)));
      for (int s = 0; s < steps; ++s) {
        const double u = static_cast<double>(s) / steps;
        const Point p{a.x + u * (b.x - a.x), a.y + u * (b.y - a.y)};
        samples.push_back({p, s == 0, covered(p)});
      }
    }
    const std::size_t n = samples.size();
    if (n == 0) continue;
    // Start scanning right after a covered sample so runs do not wrap.
    std::size_t start = 0;
    bool any_covered = false;
    for (std::size_t i = 0; i < n; ++i)
      if (samples[i].covered) {
        start = (i + 1) % n;
        any_covered = true;
        break;
      }

    // Each run spans from the covered sample before it to the covered sample
    // after it, keeping the outline corners in between.
    std::vector<std::vector<Point>> runs;
    std::vector<Point> run;
    for (std::size_t k = 0; k < n; ++k) {
      const Sample& s = samples[(start + k) % n];
      if (!s.covered) {
        if (run.empty()) run.push_back(samples[(start + k + n - 1) % n].p);
        if (s.vertex) run.push_back(s.p);
      } else if (!run.empty()) {
        run.push_back(s.p);
        runs.push_back(std::move(run));
        run.clear();
      }
    }
    if (!run.empty()) {
      run.push_back(any_covered ? samples[start == 0 ? n - 1 : start - 1].p : run.front());
      runs.push_back(std::move(run));
    }

    for (auto& r : runs) {
      // Collapse consecutive duplicates.
      r.erase(std::unique(r.begin(), r.end()), r.end());
      if (r.size() < 2) continue;
      double length = 0.0;
      for (std::size_t i = 0; i + 1 < r.size(); ++i) length += std::hypot(r[i + 1].x - r[i].x, r[i + 1].y - r[i].y);
      if (length < 1.0) continue;

      std::vector<Point> world;
      for (const auto& p : r) world.push_back(frame.to_world(p));
      const bool closed = !any_covered;
      if (!closed) {
        std::vector<Divider> supports = candidate.dividers;
        supports.insert(supports.end(), candidate.meta.dividers.begin(), candidate.meta.dividers.end());
        supports.insert(supports.end(), out.begin(), out.end());
        const auto a = snap_point(world.front(), walls, supports, cfg.max_snap_distance(), frame);
        const auto b = snap_point(world.back(), walls, supports, cfg.max_snap_distance(), frame);
        if (!a || !b) continue;
        world.front() = *a;
        world.back() = *b;
      }
      for (std::size_t i = 0; i + 1 < world.size(); ++i) {
        if (frame.cell_of(world[i]) == frame.cell_of(world[i + 1])) continue;
        Divider d{next_id++, world[i], world[i + 1], DividerKind::Meta};
        out.push_back(d);
        draw_segment(cover, d.a, d.b, frame);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

Resolved resolve_conflicts(const SemanticMap& prev, const OccupancyGrid& new_grid, const MotionEstimate& motion,
                           const Config& cfg, Arm arm) {
  TransferResult result = transfer_semantics(prev, new_grid, motion, cfg);
  ConflictReport report =
      detect_conflicts(prev, result.candidate, cfg, &result.trace.tracked, result.trace.snapped.unplaced);
  report.arm = to_string(arm);
  report.passes = 1;
  std::vector<Resolution> applied;

  if (!report.success() && arm != Arm::Baseline) {
    const Mask walls_add =
        wall_difference_repair(prev, result.candidate, result.trace.tracked, motion, report, cfg);
    const Mask free_add = free_difference_repair(prev, result.candidate, result.trace.tracked, motion, report, cfg);
    MetaLayer meta = MetaLayer::empty_for(new_grid.frame());
    meta.occupancy_wall = walls_add;
    meta.occupancy_free = free_add;
    applied.push_back({ResolutionKind::WallDiff, 2, walls_add.count(), {}});
    applied.push_back({ResolutionKind::FreeDiff, 2, free_add.count(), {}});
    result = transfer_semantics(prev, new_grid, motion, cfg, meta);
    report = detect_conflicts(prev, result.candidate, cfg, &result.trace.tracked, result.trace.snapped.unplaced);
    report.arm = to_string(arm);
    report.passes = 2;

    if (!report.success() && arm == Arm::Full) {
      const int first_id = std::max(prev.next_divider_id(), result.candidate.next_divider_id());
      auto meta_dividers = place_meta_dividers(report, result.trace.tracked, result.candidate, cfg, first_id);
      if (!meta_dividers.empty()) {
        MetaLayer with_dividers = result.candidate.meta;
        with_dividers.dividers = meta_dividers;
        rebuild_rooms(result, prev, with_dividers, cfg);
        applied.push_back({ResolutionKind::MetaDivider, 3, 0, std::move(meta_dividers)});
        report =
            detect_conflicts(prev, result.candidate, cfg, &result.trace.tracked, result.trace.snapped.unplaced);
        report.arm = to_string(arm);
        report.passes = 3;
      }
    }
  }
  report.resolutions = std::move(applied);
  return {std::move(result.candidate), std::move(report), std::move(result.trace)};
}

}  // namespace semlife
