#include "semlife/discovery.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>
#include <tuple>

namespace semlife {

std::vector<GrownRegion> detect_growth(const SemanticMap& prev, const SemanticMap& resolved, const Config& cfg,
                                       const TrackedSemantics* tracked) {
  const GridFrame& frame = resolved.grid.frame();
  std::map<int, const Polygon*> before;
  for (const auto& r : prev.rooms) before[r.id] = &r.boundary;
  if (tracked)
    for (const auto& t : tracked->rooms) before[t.id] = &t.boundary;

  std::vector<GrownRegion> out;
  for (const auto& room : resolved.rooms) {
    if (is_degenerate(room.boundary)) continue;
    Mask now = rasterize_polygon(room.boundary, frame);
    const auto it = before.find(room.id);
    if (it == before.end() || is_degenerate(*it->second)) {
      out.push_back({room.id, std::move(now), true});
      continue;
    }
    const Mask then = rasterize_polygon(*it->second, frame);
    if (static_cast<double>(now.count()) > cfg.growth_ratio * static_cast<double>(then.count()))
      out.push_back({room.id, now - then, false});
  }
  return out;
}

namespace {

// Distance from each region cell to the nearest cell outside the region,
// with everything beyond the frame counted as outside.
std::vector<double> clearance(const Mask& region) {
  const int w = region.width();
  const int h = region.height();
  Mask padded(w + 2, h + 2, true);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (region(x, y)) padded.set(x + 1, y + 1, false);
  const DistanceField df = distance_field(padded);
  std::vector<double> out(region.size(), 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out[region.index(x, y)] = df(x + 1, y + 1);
  return out;
}

struct Chord {
  double width = 0.0;
  Cell start{};
  int dir = 0;
  Cell end_a{};
  Cell end_b{};
  std::vector<Cell> cells;
};

constexpr int kDirX[4] = {1, 0, 1, 1};
constexpr int kDirY[4] = {0, 1, 1, -1};

// Straight run of region cells through `c`, ended by a blocking cell on each
// side. Fails at the frame edge and where a diagonal step squeezes between
// two blocking cells.
std::optional<Chord> chord_through(const Mask& region, Cell c, int dir, double max_width) {
  const int dx = kDirX[dir];
  const int dy = kDirY[dir];
  Chord chord;
  chord.start = c;
  chord.dir = dir;
  auto walk = [&](int sx, int sy, Cell& end, std::vector<Cell>& cells) {
    Cell p = c;
    while (true) {
      const Cell q{p.x + sx, p.y + sy};
      if (sx != 0 && sy != 0 && !region.get(p.x + sx, p.y) && !region.get(p.x, p.y + sy)) return false;
      if (!region.contains(q.x, q.y)) return false;
      if (!region(q.x, q.y)) {
        end = q;
        return true;
      }
      cells.push_back(q);
      p = q;
      if (static_cast<double>(cells.size()) > max_width + 1) return false;
    }
  };
  std::vector<Cell> fwd;
  std::vector<Cell> back;
  if (!walk(dx, dy, chord.end_b, fwd) || !walk(-dx, -dy, chord.end_a, back)) return std::nullopt;
  chord.cells.assign(back.rbegin(), back.rend());
  chord.cells.push_back(c);
  chord.cells.insert(chord.cells.end(), fwd.begin(), fwd.end());
  const double span = std::hypot(chord.end_b.x - chord.end_a.x, chord.end_b.y - chord.end_a.y);
  chord.width = span - (dir < 2 ? 1.0 : std::sqrt(2.0));
  if (chord.width > max_width + 1e-9) return std::nullopt;
  return chord;
}

struct Split {
  std::vector<std::vector<std::size_t>> cores;  // cell indices per core
};

// Smallest erosion radius at which some connected piece of the region shows
// two or more deep cores.
std::optional<Split> find_split(const Mask& region, const std::vector<double>& dist, const Config& cfg) {
  const double max_r = cfg.door_width / 2.0;
  const Labeling pieces = label_components(region, Connectivity::Four);
  for (double r = 1.0; r <= max_r + 1e-9; r += 0.5) {
    Mask core(region.width(), region.height());
    for (std::size_t i = 0; i < dist.size(); ++i)
      if (region[i] && dist[i] > r + 1e-9) core.set_index(i);
    const Labeling lab = label_components(core, Connectivity::Four);
    if (lab.count() < 2) continue;
    std::vector<double> depth(lab.count(), 0.0);
    std::vector<std::vector<std::size_t>> cells(lab.count());
    for (std::size_t i = 0; i < lab.labels.size(); ++i) {
      const int l = lab.labels[i];
      if (l < 0) continue;
      depth[l] = std::max(depth[l], dist[i]);
      cells[l].push_back(i);
    }
    Split split;
    for (int l = 0; l < lab.count(); ++l)
      if (depth[l] >= r + 1.0 - 1e-9) split.cores.push_back(std::move(cells[l]));
    std::set<int> used;
    bool shared = false;
    for (const auto& c : split.cores) shared |= !used.insert(pieces.labels[c.front()]).second;
    if (shared) return split;
  }
  return std::nullopt;
}

// Number of region components holding a core, or -1 when some core is cut.
int separated_cores(const Mask& region, const Split& split, std::size_t min_cells) {
  const Labeling lab = label_components(region, Connectivity::Four);
  std::set<int> seen;
  for (const auto& core : split.cores) {
    int label = -1;
    for (std::size_t i : core) {
      const int l = lab.labels[i];
      if (l < 0) continue;
      if (label >= 0 && l != label) return -1;
      label = l;
    }
    if (label < 0) return -1;
    if (lab.sizes[label] < min_cells) return -1;
    seen.insert(label);
  }
  return static_cast<int>(seen.size());
}

}  // namespace

std::vector<Divider> estimate_dividers(const Mask& region_in, const Mask& walls, const Config& cfg,
                                       const GridFrame& frame, int first_id) {
  std::vector<Divider> out;
  Mask region = region_in;
  const int w = region.width();
  const int h = region.height();
  int next_id = first_id;

  for (int iter = 0; iter < 64 && region.any(); ++iter) {
    const std::vector<double> dist = clearance(region);
    const auto split = find_split(region, dist, cfg);
    if (!split) break;
    const int before = separated_cores(region, *split, 1);

    // Assign region cells to the nearest core.
    std::vector<int> zone(region.size(), -1);
    std::deque<std::size_t> queue;
    for (std::size_t k = 0; k < split->cores.size(); ++k)
      for (std::size_t i : split->cores[k]) {
        zone[i] = static_cast<int>(k);
        queue.push_back(i);
      }
    while (!queue.empty()) {
      const std::size_t i = queue.front();
      queue.pop_front();
      const int x = static_cast<int>(i % w);
      const int y = static_cast<int>(i / w);
      const Cell nb[4] = {{x + 1, y}, {x - 1, y}, {x, y + 1}, {x, y - 1}};
      for (const Cell& n : nb) {
        if (!region.get(n.x, n.y)) continue;
        const std::size_t j = region.index(n.x, n.y);
        if (zone[j] >= 0) continue;
        zone[j] = zone[i];
        queue.push_back(j);
      }
    }

    std::vector<Chord> chords;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const int z = zone[region.index(x, y)];
        if (!region(x, y) || z < 0) continue;
        bool boundary = false;
        const Cell nb[4] = {{x + 1, y}, {x - 1, y}, {x, y + 1}, {x, y - 1}};
        for (const Cell& n : nb) {
          if (!region.get(n.x, n.y)) continue;
          const int zn = zone[region.index(n.x, n.y)];
          if (zn >= 0 && zn != z) boundary = true;
        }
        if (!boundary) continue;
        for (int dir = 0; dir < 4; ++dir)
          if (auto c = chord_through(region, {x, y}, dir, cfg.door_width)) chords.push_back(std::move(*c));
      }
    }
    std::sort(chords.begin(), chords.end(), [](const Chord& a, const Chord& b) {
      return std::make_tuple(a.width, a.start.y, a.start.x, a.dir) <
             std::make_tuple(b.width, b.start.y, b.start.x, b.dir);
    });

    bool placed = false;
    for (const Chord& chord : chords) {
      Mask trial = region;
      for (const Cell& c : chord.cells) trial.set(c.x, c.y, false);
      const int after = separated_cores(trial, *split, cfg.min_room_cells);
      if (after <= before) continue;

      auto endpoint = [&](Cell e) -> std::optional<Point> {
        const Point p = frame.cell_center(e);
        if (walls.get(e.x, e.y)) return p;
        return snap_point(p, walls, out, cfg.max_snap_distance(), frame);
      };
      const auto a = endpoint(chord.end_a);
      const auto b = endpoint(chord.end_b);
      if (!a || !b || frame.cell_of(*a) == frame.cell_of(*b)) continue;
      const Divider d{next_id++, *a, *b, DividerKind::User};
      for (const Cell& c : segment_cells(d.a, d.b, frame)) region.set(c.x, c.y, false);
      for (const Cell& c : chord.cells) region.set(c.x, c.y, false);
      out.push_back(d);
      placed = true;
      break;
    }
    if (!placed) break;
  }
  return out;
}

Discovered discover(const SemanticMap& prev, const SemanticMap& resolved, const Config& cfg,
                    const TrackedSemantics* tracked) {
  Discovered out{resolved, {}};
  DiscoveryReport& report = out.report;
  report.grown = detect_growth(prev, resolved, cfg, tracked);
  if (report.grown.empty()) return out;

  const GridFrame& frame = resolved.grid.frame();
  const Mask walls = wall_mask(resolved.labels, resolved.meta);
  const Mask barrier = walls | divider_raster(resolved.dividers, frame) |
                       divider_raster(resolved.meta.dividers, frame);
  const Mask unknown = resolved.grid.unknown();
  int next_id = std::max(prev.next_divider_id(), resolved.next_divider_id());

  for (const auto& g : report.grown) {
    const Room* room = resolved.find_room(g.room_id);
    if (room == nullptr) continue;
    const Mask region = rasterize_polygon(room->boundary, frame) - barrier - unknown;
    if (region.none()) continue;
    const Mask near_grown = dilate(g.mask, 1);
    for (const auto& d : estimate_dividers(region, barrier, cfg, frame, next_id)) {
      Mask raster(frame.width, frame.height);
      draw_segment(raster, d.a, d.b, frame);
      if ((raster & near_grown).none()) continue;
      Divider p = d;
      p.id = next_id++;
      report.proposals.push_back(p);
    }
  }

  const ConflictReport base = detect_conflicts(prev, resolved, cfg, tracked);
  const std::size_t base_violations = validate_constraints(resolved, cfg).violations.size();
  for (const auto& p : report.proposals) {
    SemanticMap trial = out.map;
    trial.dividers.push_back(p);
    std::vector<TrackedRoom> current;
    for (const auto& r : out.map.rooms) current.push_back({r.id, r.label, r.boundary});
    trial.rooms = reconstruct_rooms(walls, trial.dividers, trial.grid, trial.meta, current, cfg,
                                    std::max(prev.next_room_id(), out.map.next_room_id()));

    bool ok = trial.rooms.size() > out.map.rooms.size();
    if (ok) {
      const ConflictReport rep = detect_conflicts(prev, trial, cfg, tracked);
      for (const auto& r : base.rooms) {
        if (r.status != RoomStatus::Transferred) continue;
        const RoomPR* now = rep.find(r.room_id);
        if (now == nullptr || now->status != RoomStatus::Transferred) ok = false;
      }
    }
    if (ok) ok = validate_constraints(trial, cfg).violations.size() <= base_violations;
    if (!ok) {
      report.rejected.push_back(p.id);
      continue;
    }
    for (const auto& r : trial.rooms)
      if (out.map.find_room(r.id) == nullptr) report.new_rooms.push_back(r.id);
    out.map = std::move(trial);
    report.accepted.push_back(p.id);
  }
  return out;
}

}  // namespace semlife
