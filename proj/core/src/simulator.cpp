#include "semlife/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace semlife {

// ---------------------------------------------------------------------------
// Rng

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt) {
  std::uint64_t s = base ^ (salt * 0xd1b54a32d192ed03ULL);
  return splitmix64(s);
}

}  // namespace

Rng::Rng(std::uint64_t seed) {
  for (auto& s : s_) s = splitmix64(seed);
}

std::uint64_t Rng::next() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

int Rng::range(int lo, int hi) {
  if (hi <= lo) return lo;
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<int>(next() % span);
}

double Rng::normal(double sigma) {
  if (sigma <= 0) return 0.0;
  double u1 = uniform();
  if (u1 < 1e-300) u1 = 1e-300;
  const double u2 = uniform();
  return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// ---------------------------------------------------------------------------
// Home

namespace {

Polygon rect_polygon(const Rect& r, const GridFrame& f) {
  auto w = [&](double x, double y) { return f.to_world({x, y}); };
  return Polygon{{w(r.x0, r.y0), w(r.x1, r.y0), w(r.x1, r.y1), w(r.x0, r.y1)}};
}

Mask rect_mask(const Rect& r, int w, int h) {
  Mask m(w, h);
  for (int y = std::max(0, r.y0); y < std::min(h, r.y1); ++y)
    for (int x = std::max(0, r.x0); x < std::min(w, r.x1); ++x) m.set(x, y);
  return m;
}

// Divider column / row of a door: the wall layer next to chamber_a.
bool on_divider_line(const Door& d, int x, int y) {
  const bool vertical = d.end_a.x == d.end_b.x;
  return vertical ? x == d.end_a.x : y == d.end_a.y;
}

}  // namespace

std::vector<CellState> Home::truth() const {
  std::vector<CellState> cells = structure;
  const int w = frame.width;
  for (const auto& d : doors) {
    if (d.open) continue;
    for (int y = d.gap.y0; y < d.gap.y1; ++y)
      for (int x = d.gap.x0; x < d.gap.x1; ++x) cells[static_cast<std::size_t>(y) * w + x] = CellState::Occupied;
  }
  for (const auto& c : clutter) {
    for (int y = c.center.y - c.radius; y <= c.center.y + c.radius; ++y)
      for (int x = c.center.x - c.radius; x <= c.center.x + c.radius; ++x) {
        if (!frame.contains(x, y)) continue;
        const int dx = x - c.center.x;
        const int dy = y - c.center.y;
        auto& cell = cells[static_cast<std::size_t>(y) * w + x];
        if (dx * dx + dy * dy <= c.radius * c.radius && cell == CellState::Free) cell = CellState::Occupied;
      }
  }
  return cells;
}

OccupancyGrid Home::sensed() const {
  std::vector<CellState> cells = truth();
  for (std::size_t i = 0; i < cells.size(); ++i)
    if (!explored[i]) cells[i] = CellState::Unknown;
  return OccupancyGrid(frame, std::move(cells));
}

std::vector<int> Home::room_truth() const {
  const std::vector<CellState> cells = truth();
  const int w = frame.width;
  std::vector<int> out(cells.size(), -1);
  auto put = [&](int x, int y, int id) {
    const std::size_t i = static_cast<std::size_t>(y) * w + x;
    if (cells[i] == CellState::Free) out[i] = id;
  };
  for (const auto& c : chambers)
    for (int y = c.interior.y0; y < c.interior.y1; ++y)
      for (int x = c.interior.x0; x < c.interior.x1; ++x) put(x, y, c.id);
  for (const auto& d : doors)
    for (int y = d.gap.y0; y < d.gap.y1; ++y)
      for (int x = d.gap.x0; x < d.gap.x1; ++x) put(x, y, on_divider_line(d, x, y) ? d.chamber_a : d.chamber_b);
  for (const auto& o : openings)
    for (int y = o.gap.y0; y < o.gap.y1; ++y)
      for (int x = o.gap.x0; x < o.gap.x1; ++x) put(x, y, o.chamber);
  return out;
}

std::vector<Divider> Home::ground_truth_dividers() const {
  std::vector<Divider> out;
  for (const auto& d : doors)
    out.push_back({d.id, frame.cell_center(d.end_a), frame.cell_center(d.end_b), DividerKind::User});
  return out;
}

const Chamber* Home::find_chamber(int id) const {
  for (const auto& c : chambers)
    if (c.id == id) return &c;
  return nullptr;
}

const Door* Home::find_door(int id) const {
  for (const auto& d : doors)
    if (d.id == id) return &d;
  return nullptr;
}

namespace {

struct SharedWall {
  bool vertical = false;  // wall runs along y
  int start = 0;          // first wall column (vertical) or row
  int lo = 0;             // overlap along the wall
  int hi = 0;
  bool a_first = false;   // chamber a lies left of / below the wall
};

std::optional<SharedWall> shared_wall(const Rect& a, const Rect& b, int t) {
  SharedWall s;
  if (a.x1 + t == b.x0 || b.x1 + t == a.x0) {
    s.vertical = true;
    s.a_first = a.x1 + t == b.x0;
    s.start = s.a_first ? a.x1 : b.x1;
    s.lo = std::max(a.y0, b.y0);
    s.hi = std::min(a.y1, b.y1);
  } else if (a.y1 + t == b.y0 || b.y1 + t == a.y0) {
    s.vertical = false;
    s.a_first = a.y1 + t == b.y0;
    s.start = s.a_first ? a.y1 : b.y1;
    s.lo = std::max(a.x0, b.x0);
    s.hi = std::min(a.x1, b.x1);
  } else {
    return std::nullopt;
  }
  if (s.hi - s.lo <= 0) return std::nullopt;
  return s;
}

class Builder {
 public:
  Builder(int w, int h, double res, int t = 2) {
    home_.frame = GridFrame{w, h, res, {}};
    home_.wall_thickness = t;
    home_.structure.assign(static_cast<std::size_t>(w) * h, CellState::Unknown);
    hidden_ = Mask(w, h);
  }

  int add_chamber(const Rect& r, bool hidden = false, bool hallway = false) {
    const int t = home_.wall_thickness;
    if (r.x0 - t < 0 || r.y0 - t < 0 || r.x1 + t > home_.frame.width || r.y1 + t > home_.frame.height)
      throw Error("chamber does not fit in the frame");
    for (int y = r.y0 - t; y < r.y1 + t; ++y)
      for (int x = r.x0 - t; x < r.x1 + t; ++x) {
        auto& c = at(x, y);
        if (r.contains(x, y)) c = CellState::Free;
        else if (c == CellState::Unknown) c = CellState::Occupied;
      }
    const int id = static_cast<int>(home_.chambers.size()) + 1;
    home_.chambers.push_back({id, r, hidden, hallway});
    return id;
  }

  const Rect& interior(int id) const { return home_.chambers[id - 1].interior; }

  std::optional<SharedWall> wall_between(int a, int b) const {
    return shared_wall(interior(a), interior(b), home_.wall_thickness);
  }

  /// `pos` is the first gap cell along the wall.
  int add_door(int a, int b, int pos, int width) {
    const auto sw = wall_between(a, b);
    if (!sw) throw Error("chambers do not share a wall");
    const int t = home_.wall_thickness;
    Door d;
    d.id = static_cast<int>(home_.doors.size()) + 1;
    d.chamber_a = a;
    d.chamber_b = b;
    const int line = sw->a_first ? sw->start : sw->start + t - 1;
    if (sw->vertical) {
      d.gap = {sw->start, pos, sw->start + t, pos + width};
      d.end_a = {line, pos - 1};
      d.end_b = {line, pos + width};
    } else {
      d.gap = {pos, sw->start, pos + width, sw->start + t};
      d.end_a = {pos - 1, line};
      d.end_b = {pos + width, line};
    }
    clear(d.gap);
    home_.doors.push_back(d);
    return d.id;
  }

  void add_opening(int chamber, int other, int pos, int width) {
    const auto sw = wall_between(chamber, other);
    if (!sw) throw Error("chambers do not share a wall");
    const int t = home_.wall_thickness;
    Opening o;
    o.chamber = chamber;
    o.gap = sw->vertical ? Rect{sw->start, pos, sw->start + t, pos + width}
                         : Rect{pos, sw->start, pos + width, sw->start + t};
    clear(o.gap);
    home_.openings.push_back(o);
  }

  void hide(const Rect& r) { hidden_ |= rect_mask(r, home_.frame.width, home_.frame.height); }

  Home finish() {
    // Openings stay visible: they are sensed from the room they belong to.
    for (const auto& o : home_.openings)
      for (int y = o.gap.y0; y < o.gap.y1; ++y)
        for (int x = o.gap.x0; x < o.gap.x1; ++x) hidden_.set(x, y, false);
    home_.explored = ~hidden_;
    return home_;
  }

  Home& home() { return home_; }

 private:
  CellState& at(int x, int y) { return home_.structure[static_cast<std::size_t>(y) * home_.frame.width + x]; }
  void clear(const Rect& r) {
    for (int y = r.y0; y < r.y1; ++y)
      for (int x = r.x0; x < r.x1; ++x) at(x, y) = CellState::Free;
  }

  Home home_;
  Mask hidden_;
};

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[static_cast<std::size_t>(rng.next() % i)]);
}

constexpr int kMargin = 3;

}  // namespace

Home generate_home(const HomeSpec& spec) {
  if (spec.chambers < 1 || spec.min_chamber < 4 || spec.door_min < 2 || spec.door_max < spec.door_min ||
      spec.corridor_min < 3 || spec.corridor_max < spec.corridor_min || spec.resolution <= 0)
    throw Error("invalid home spec");
  Rng rng(spec.seed);
  const int t = 2;
  Builder b(spec.width, spec.height, spec.resolution, t);

  const int X0 = kMargin + t;
  const int X1 = spec.width - kMargin - t;
  const int Y0 = kMargin + t;
  const int Y1 = spec.height - kMargin - t;
  Rect corridor{};
  Rect block{X0, Y0, X1, Y1};
  if (spec.hidden_corridor) {
    const int cw = rng.range(spec.corridor_min, spec.corridor_max);
    corridor = {X0, Y0, X1, Y0 + cw};
    block.y0 = Y0 + cw + t;
  }
  if (block.width() < spec.min_chamber || block.height() < spec.min_chamber)
    throw Error("infeasible home spec: frame too small");

  struct Piece {
    Rect r;
    bool hallway;
  };
  std::vector<Piece> pieces;
  const bool hallway = spec.hallway && spec.chambers >= 3;
  if (hallway) {
    const int hw = rng.range(spec.corridor_min, spec.corridor_max);
    const int lo = block.x0 + spec.min_chamber;
    const int hi = block.x1 - spec.min_chamber - 2 * t - hw;
    if (hi < lo) throw Error("infeasible home spec: no room for the hallway");
    const int s = rng.range(lo + (hi - lo) / 4, hi - (hi - lo) / 4);
    pieces.push_back({{block.x0, block.y0, s, block.y1}, false});
    pieces.push_back({{s + t, block.y0, s + t + hw, block.y1}, true});
    pieces.push_back({{s + 2 * t + hw, block.y0, block.x1, block.y1}, false});
  } else {
    pieces.push_back({block, false});
  }
  while (static_cast<int>(pieces.size()) < spec.chambers) {
    int best = -1;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      const Rect& r = pieces[i].r;
      if (pieces[i].hallway) continue;
      if (std::max(r.width(), r.height()) < 2 * spec.min_chamber + t) continue;
      if (best < 0 || r.area() > pieces[best].r.area()) best = static_cast<int>(i);
    }
    if (best < 0) throw Error("infeasible home spec: chambers do not fit");
    const Rect r = pieces[best].r;
    Rect a = r;
    Rect c = r;
    if (r.width() >= r.height()) {
      const int s = rng.range(r.x0 + spec.min_chamber, r.x1 - spec.min_chamber - t);
      a.x1 = s;
      c.x0 = s + t;
    } else {
      const int s = rng.range(r.y0 + spec.min_chamber, r.y1 - spec.min_chamber - t);
      a.y1 = s;
      c.y0 = s + t;
    }
    pieces[best].r = a;
    pieces.insert(pieces.begin() + best + 1, {c, false});
  }

  for (const auto& p : pieces) b.add_chamber(p.r, false, p.hallway);
  const int n = static_cast<int>(pieces.size());

  // Doors along a random spanning tree of the wall adjacency graph.
  std::vector<std::pair<int, int>> edges;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) {
      const auto sw = b.wall_between(i, j);
      if (sw && sw->hi - sw->lo >= spec.door_max + 4) edges.emplace_back(i, j);
    }
  shuffle(edges, rng);
  std::vector<int> parent(n + 1);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int joined = 0;
  std::vector<std::pair<int, int>> tree;
  for (const auto& [i, j] : edges) {
    const int ri = find(i);
    const int rj = find(j);
    if (ri == rj) continue;
    parent[ri] = rj;
    tree.emplace_back(i, j);
    ++joined;
  }
  if (joined != n - 1) throw Error("infeasible home spec: chambers not connected");
  std::sort(tree.begin(), tree.end());
  for (const auto& [i, j] : tree) {
    const auto sw = *b.wall_between(i, j);
    const int width = rng.range(spec.door_min, spec.door_max);
    const int pos = rng.range(sw.lo + 2, sw.hi - 2 - width);
    b.add_door(i, j, pos, width);
  }

  if (spec.hidden_corridor) {
    const int cid = b.add_chamber(corridor, true, false);
    std::vector<int> bottom;
    for (int i = 1; i <= n; ++i)
      if (b.interior(i).y0 == block.y0 && b.interior(i).width() >= spec.opening_min + 4) bottom.push_back(i);
    shuffle(bottom, rng);
    const int k = std::min<int>(static_cast<int>(bottom.size()), 2 + rng.range(0, 1));
    bottom.resize(k);
    std::sort(bottom.begin(), bottom.end());
    for (int i : bottom) {
      const Rect& r = b.interior(i);
      const int width = std::min(rng.range(spec.opening_min, spec.opening_max), r.width() - 4);
      const int pos = rng.range(r.x0 + 2, r.x1 - 2 - width);
      b.add_opening(i, cid, pos, width);
    }
    b.hide({kMargin, kMargin, spec.width - kMargin, corridor.y1});
  }
  return b.finish();
}

SemanticMap ground_truth_semantics(const Home& home, const Config& cfg) {
  SemanticMap map;
  map.version = 0;
  map.grid = home.sensed();
  map.labels = {map.grid.occupied(), Mask(home.frame.width, home.frame.height)};
  map.meta = MetaLayer::empty_for(home.frame);
  map.dividers = home.ground_truth_dividers();
  std::vector<TrackedRoom> seeds;
  int max_id = 0;
  for (const auto& c : home.chambers) {
    max_id = std::max(max_id, c.id);
    if (!c.hidden) seeds.push_back({c.id, default_room_label(c.id), rect_polygon(c.interior, home.frame)});
  }
  map.rooms = reconstruct_rooms(wall_mask(map.labels, map.meta), map.dividers, map.grid, map.meta, seeds, cfg,
                                max_id + 1);
  return map;
}

// ---------------------------------------------------------------------------
// Missions

std::string step_kind(const MissionStep& step) {
  struct V {
    std::string operator()(const JitterStep&) const { return "jitter"; }
    std::string operator()(const RemoveWallStep&) const { return "remove_wall"; }
    std::string operator()(const AddWallStep&) const { return "add_wall"; }
    std::string operator()(const ToggleDoorStep&) const { return "toggle_door"; }
    std::string operator()(const AddClutterStep&) const { return "add_clutter"; }
    std::string operator()(const RemoveClutterStep&) const { return "remove_clutter"; }
    std::string operator()(const ExploreStep&) const { return "explore"; }
  };
  return std::visit(V{}, step);
}

namespace {

// Mean of the cell centers inside the region; the frame center when none is.
Point region_pivot(const Polygon& region, const GridFrame& frame) {
  double sx = 0;
  double sy = 0;
  long n = 0;
  for (int y = 0; y < frame.height; ++y)
    for (int x = 0; x < frame.width; ++x) {
      const Point p = frame.cell_center({x, y});
      if (!contains_point(region, p)) continue;
      sx += p.x;
      sy += p.y;
      ++n;
    }
  if (n == 0) return frame.to_world({frame.width / 2.0, frame.height / 2.0});
  return {sx / n, sy / n};
}

Polygon everywhere() {
  constexpr double big = 1e12;
  return Polygon{{{-big, -big}, {big, -big}, {big, big}, {-big, big}}};
}

void apply_persistent(Home& home, const MissionStep& step) {
  if (const auto* s = std::get_if<ToggleDoorStep>(&step)) {
    auto it = std::find_if(home.doors.begin(), home.doors.end(), [&](const Door& d) { return d.id == s->door; });
    if (it == home.doors.end()) throw Error("unknown door id " + std::to_string(s->door));
    it->open = s->open;
  } else if (const auto* s = std::get_if<AddClutterStep>(&step)) {
    auto it = std::find_if(home.clutter.begin(), home.clutter.end(),
                           [&](const ClutterBlob& c) { return c.id == s->blob.id; });
    if (it != home.clutter.end()) throw Error("clutter id " + std::to_string(s->blob.id) + " already present");
    home.clutter.push_back(s->blob);
  } else if (const auto* s = std::get_if<RemoveClutterStep>(&step)) {
    auto it = std::find_if(home.clutter.begin(), home.clutter.end(),
                           [&](const ClutterBlob& c) { return c.id == s->id; });
    if (it == home.clutter.end()) throw Error("unknown clutter id " + std::to_string(s->id));
    home.clutter.erase(it);
  } else if (const auto* s = std::get_if<ExploreStep>(&step)) {
    if (!s->region.same_shape(home.explored)) throw Error("explore region does not match the home frame");
    home.explored |= s->region;
  }
}

}  // namespace

SimResult simulate_mission(const Home& home, const MissionScript& script) {
  SimResult out;
  out.next = home;
  for (const auto& step : script.steps) apply_persistent(out.next, step);

  const GridFrame& frame = home.frame;
  const int w = frame.width;
  const int h = frame.height;
  const OccupancyGrid base = out.next.sensed();
  std::vector<CellState> sensed(base.cells().begin(), base.cells().end());
  std::vector<int> labels = out.next.room_truth();
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (!out.next.explored[i]) labels[i] = -1;

  std::vector<RegionMotion> truth;
  std::vector<RegionMotion> reported;
  Rng noise(mix_seed(script.seed, 1));
  for (const auto& step : script.steps) {
    if (const auto* s = std::get_if<RemoveWallStep>(&step)) {
      for (int y = std::max(0, s->cells.y0); y < std::min(h, s->cells.y1); ++y)
        for (int x = std::max(0, s->cells.x0); x < std::min(w, s->cells.x1); ++x) {
          auto& c = sensed[static_cast<std::size_t>(y) * w + x];
          if (c == CellState::Occupied) c = CellState::Free;
        }
    } else if (const auto* s = std::get_if<AddWallStep>(&step)) {
      for (int y = std::max(0, s->cells.y0); y < std::min(h, s->cells.y1); ++y)
        for (int x = std::max(0, s->cells.x0); x < std::min(w, s->cells.x1); ++x) {
          auto& c = sensed[static_cast<std::size_t>(y) * w + x];
          if (c != CellState::Unknown) c = CellState::Occupied;
        }
    } else if (const auto* s = std::get_if<JitterStep>(&step)) {
      RegionMotion m;
      m.region = s->region.vertices.empty() ? everywhere() : s->region;
      m.pivot = region_pivot(m.region, frame);
      m.rotation = s->rotation;
      m.translation = s->translation;
      truth.push_back(m);
      m.translation.x += noise.normal(s->noise_sigma) * frame.resolution;
      m.translation.y += noise.normal(s->noise_sigma) * frame.resolution;
      reported.push_back(m);
    }
  }
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (sensed[i] != CellState::Free) labels[i] = -1;

  if (truth.empty()) {
    out.true_motion = MotionEstimate::identity();
    out.motion = MotionEstimate::identity();
  } else {
    out.true_motion.regions = truth;
    out.motion.regions = reported;
    std::vector<CellState> moved(sensed.size(), CellState::Unknown);
    std::vector<int> moved_labels(labels.size(), -1);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const Point p = frame.cell_center({x, y});
        Point q = truth.front().invert(p);
        for (const auto& m : truth) {
          const Point cand = m.invert(p);
          if (contains_point(m.region, cand)) {
            q = cand;
            break;
          }
        }
        const Cell src = frame.cell_of(q);
        if (!frame.contains(src.x, src.y)) continue;
        const std::size_t si = static_cast<std::size_t>(src.y) * w + src.x;
        const std::size_t di = static_cast<std::size_t>(y) * w + x;
        moved[di] = sensed[si];
        moved_labels[di] = labels[si];
      }
    }
    sensed = std::move(moved);
    labels = std::move(moved_labels);
  }

  if (script.dropout > 0) {
    Rng drop(mix_seed(script.seed, 2));
    for (auto& c : sensed)
      if (c == CellState::Occupied && drop.chance(script.dropout)) c = CellState::Free;
  }
  out.grid = OccupancyGrid(frame, std::move(sensed));
  out.room_truth = std::move(labels);
  return out;
}

// ---------------------------------------------------------------------------
// Mission generators shared by the corpus and the scenarios.

namespace {

struct WallSite {
  int a = 0;
  int b = 0;
  SharedWall wall;
};

std::vector<WallSite> wall_sites(const Home& home) {
  std::vector<WallSite> out;
  for (const auto& a : home.chambers)
    for (const auto& b : home.chambers) {
      if (a.id >= b.id || a.hidden || b.hidden) continue;
      if (auto sw = shared_wall(a.interior, b.interior, home.wall_thickness)) out.push_back({a.id, b.id, *sw});
    }
  return out;
}

// Door and opening cells (plus a margin) along the given wall line.
bool near_gap(const Home& home, const SharedWall& sw, int lo, int hi, int margin) {
  const int t = home.wall_thickness;
  auto overlaps = [&](const Rect& g) {
    const bool same_line = sw.vertical ? (g.x0 < sw.start + t && g.x1 > sw.start)
                                       : (g.y0 < sw.start + t && g.y1 > sw.start);
    if (!same_line) return false;
    const int g0 = sw.vertical ? g.y0 : g.x0;
    const int g1 = sw.vertical ? g.y1 : g.x1;
    return g0 < hi + margin && g1 > lo - margin;
  };
  for (const auto& d : home.doors)
    if (overlaps(d.gap)) return true;
  for (const auto& o : home.openings)
    if (overlaps(o.gap)) return true;
  return false;
}

std::optional<std::pair<WallSite, Rect>> pick_wall_gap(const Home& home, int length, Rng& rng) {
  auto sites = wall_sites(home);
  shuffle(sites, rng);
  const int t = home.wall_thickness;
  for (const auto& s : sites) {
    const int lo = s.wall.lo + 1;
    const int hi = s.wall.hi - 1 - length;
    if (hi < lo) continue;
    for (int attempt = 0; attempt < 24; ++attempt) {
      const int pos = rng.range(lo, hi);
      if (near_gap(home, s.wall, pos, pos + length, 2)) continue;
      const Rect r = s.wall.vertical ? Rect{s.wall.start, pos, s.wall.start + t, pos + length}
                                     : Rect{pos, s.wall.start, pos + length, s.wall.start + t};
      return std::make_pair(s, r);
    }
  }
  return std::nullopt;
}

// Two obstacles across the hallway at about a third and two thirds of its
// length, kept clear of doors on its walls.
std::vector<Rect> hallway_cuts(const Home& home, const Chamber& hall, Rng& rng) {
  const Rect& r = hall.interior;
  const bool vertical = r.height() >= r.width();
  const int len = vertical ? r.height() : r.width();
  const int base = vertical ? r.y0 : r.x0;
  auto blocked = [&](int p) {
    for (const auto& d : home.doors) {
      if (d.chamber_a != hall.id && d.chamber_b != hall.id) continue;
      const int g0 = vertical ? d.gap.y0 : d.gap.x0;
      const int g1 = vertical ? d.gap.y1 : d.gap.x1;
      if (g0 < p + 2 + 3 && g1 > p - 3) return true;
    }
    return false;
  };
  std::vector<Rect> cuts;
  for (int k = 1; k <= 2; ++k) {
    const int nominal = base + k * len / 3 + rng.range(-2, 2);
    for (int delta = 0; delta <= len / 8; ++delta) {
      int p = -1;
      if (!blocked(nominal + delta)) p = nominal + delta;
      else if (!blocked(nominal - delta)) p = nominal - delta;
      if (p < 0) continue;
      cuts.push_back(vertical ? Rect{r.x0, p, r.x1, p + 2} : Rect{p, r.y0, p + 2, r.y1});
      break;
    }
  }
  return cuts;
}

Polygon half_plane_region(const GridFrame& frame, bool right) {
  const double mid = frame.to_world({frame.width / 2.0, 0}).x;
  constexpr double big = 1e12;
  if (right) return Polygon{{{mid, -big}, {big, -big}, {big, big}, {mid, big}}};
  return Polygon{{{-big, -big}, {mid, -big}, {mid, big}, {-big, big}}};
}

void add_jitter(MissionScript& s, const Home& home, Rng& rng, double rot_sigma, double shift, double noise,
                bool two_regions) {
  const double res = home.frame.resolution;
  if (two_regions) {
    JitterStep right;
    right.region = half_plane_region(home.frame, true);
    right.rotation = rng.normal(rot_sigma);
    right.translation = {rng.uniform(-shift, shift) * res, rng.uniform(-shift, shift) * res};
    right.noise_sigma = noise;
    s.steps.push_back(right);
  }
  JitterStep all;
  all.rotation = rng.normal(rot_sigma);
  all.translation = {rng.uniform(-shift, shift) * res, rng.uniform(-shift, shift) * res};
  all.noise_sigma = noise;
  s.steps.push_back(all);
}

// Next hidden stretch to reveal: up to just past the second opening first,
// then the rest.
Mask next_reveal(const Home& home) {
  Mask hidden = ~home.explored;
  // Only cells inside the home structure, not the outside margin.
  Mask inside(home.frame.width, home.frame.height);
  for (std::size_t i = 0; i < home.structure.size(); ++i)
    if (home.structure[i] != CellState::Unknown) inside.set_index(i);
  hidden &= inside;
  if (hidden.none()) return hidden;
  std::vector<int> xs;
  for (const auto& o : home.openings) xs.push_back(o.gap.x1);
  std::sort(xs.begin(), xs.end());
  int cut = home.frame.width;
  int first_hidden_x = home.frame.width;
  for (int y = 0; y < home.frame.height; ++y)
    for (int x = 0; x < home.frame.width; ++x)
      if (hidden(x, y)) first_hidden_x = std::min(first_hidden_x, x);
  if (xs.size() >= 3 && first_hidden_x < xs[1]) cut = xs[1] + 4;
  Mask out(home.frame.width, home.frame.height);
  for (int y = 0; y < home.frame.height; ++y)
    for (int x = 0; x < std::min(cut, home.frame.width); ++x)
      if (hidden(x, y)) out.set(x, y);
  // Reveal the whole hidden region when the cut would leave a sliver.
  return out.any() ? out : hidden;
}

std::optional<ClutterBlob> place_clutter(const Home& home, int id, Rng& rng) {
  std::vector<const Chamber*> rooms;
  for (const auto& c : home.chambers)
    if (!c.hidden && !c.hallway && c.interior.width() >= 14 && c.interior.height() >= 14) rooms.push_back(&c);
  if (rooms.empty()) return std::nullopt;
  const Chamber& c = *rooms[static_cast<std::size_t>(rng.next() % rooms.size())];
  const int radius = rng.range(1, 2);
  const int m = 5 + radius;
  ClutterBlob b;
  b.id = id;
  b.radius = radius;
  b.center = {rng.range(c.interior.x0 + m, c.interior.x1 - 1 - m), rng.range(c.interior.y0 + m, c.interior.y1 - 1 - m)};
  return b;
}

MissionScript make_mission(const std::string& cls, const Home& home, Rng& rng, int& clutter_ids) {
  MissionScript s;
  s.seed = rng.next();
  s.mission_class = cls;
  if (cls == "jitter") {
    s.dropout = 0.02;
    add_jitter(s, home, rng, 0.003, 1.5, 0.3, rng.chance(0.5));
    if (rng.chance(0.4)) {
      if (auto blob = place_clutter(home, clutter_ids + 1, rng)) {
        ++clutter_ids;
        s.steps.push_back(AddClutterStep{*blob});
      }
    }
    if (!home.clutter.empty() && rng.chance(0.3))
      s.steps.push_back(RemoveClutterStep{home.clutter[rng.next() % home.clutter.size()].id});
    if (!home.doors.empty() && rng.chance(0.2)) {
      const Door& d = home.doors[rng.next() % home.doors.size()];
      s.steps.push_back(ToggleDoorStep{d.id, !d.open});
    }
    return s;
  }
  s.dropout = 0.01;
  add_jitter(s, home, rng, 0.0, 0.5, 0.15, false);
  if (cls == "disconnection") {
    if (auto gap = pick_wall_gap(home, rng.range(3, 8), rng)) s.steps.push_back(RemoveWallStep{gap->second});
  } else if (cls == "connection") {
    for (const auto& c : home.chambers)
      if (c.hallway)
        for (const Rect& r : hallway_cuts(home, c, rng)) s.steps.push_back(AddWallStep{r});
  } else if (cls == "exploration") {
    Mask reveal = next_reveal(home);
    if (reveal.any()) s.steps.push_back(ExploreStep{std::move(reveal)});
  } else {
    throw Error("unknown mission class '" + cls + "'");
  }
  return s;
}

}  // namespace

Corpus build_corpus(const CorpusSpec& spec) {
  if (spec.homes < 1 || spec.missions_per_home < 1) throw Error("corpus needs at least one home and mission");
  const double fractions[4] = {spec.jitter, spec.disconnection, spec.connection, spec.exploration};
  const double sum = fractions[0] + fractions[1] + fractions[2] + fractions[3];
  if (!(sum > 0) || std::any_of(std::begin(fractions), std::end(fractions), [](double f) { return f < 0; }))
    throw Error("invalid perturbation mix");
  const int total = spec.homes * spec.missions_per_home;
  int counts[4];
  double rem[4];
  int assigned = 0;
  for (int k = 0; k < 4; ++k) {
    const double exact = total * fractions[k] / sum;
    counts[k] = static_cast<int>(std::floor(exact));
    rem[k] = exact - counts[k];
    assigned += counts[k];
  }
  while (assigned < total) {
    int best = 0;
    for (int k = 1; k < 4; ++k)
      if (rem[k] > rem[best] + 1e-12) best = k;
    ++counts[best];
    rem[best] = -1;
    ++assigned;
  }

  Rng rng(spec.seed);
  const int m = spec.missions_per_home;
  std::vector<std::string> cls(static_cast<std::size_t>(total));
  // Explorations round-robin over homes, in the second half of a sequence.
  for (int e = 0; e < counts[3]; ++e) {
    const int home = e % spec.homes;
    std::vector<int> free_slots;
    for (int i = m / 2; i < m; ++i)
      if (cls[static_cast<std::size_t>(home * m + i)].empty()) free_slots.push_back(i);
    if (free_slots.empty())
      for (int i = 0; i < m; ++i)
        if (cls[static_cast<std::size_t>(home * m + i)].empty()) free_slots.push_back(i);
    if (free_slots.empty()) {
      // Every slot of this home is taken; fall back to any empty slot.
      for (int i = 0; i < total; ++i)
        if (cls[static_cast<std::size_t>(i)].empty()) {
          cls[static_cast<std::size_t>(i)] = "exploration";
          break;
        }
      continue;
    }
    const int slot = free_slots[static_cast<std::size_t>(rng.next() % free_slots.size())];
    cls[static_cast<std::size_t>(home * m + slot)] = "exploration";
  }
  std::vector<int> rest;
  for (int i = 0; i < total; ++i)
    if (cls[static_cast<std::size_t>(i)].empty()) rest.push_back(i);
  shuffle(rest, rng);
  std::size_t k = 0;
  const char* names[3] = {"disconnection", "connection", "jitter"};
  const int rest_counts[3] = {counts[1], counts[2], counts[0]};
  for (int c = 0; c < 3; ++c)
    for (int j = 0; j < rest_counts[c] && k < rest.size(); ++j) cls[static_cast<std::size_t>(rest[k++])] = names[c];

  Corpus corpus;
  corpus.spec = spec;
  for (int hidx = 0; hidx < spec.homes; ++hidx) {
    HomeSpec hs = spec.home;
    hs.seed = mix_seed(spec.seed, static_cast<std::uint64_t>(hidx) + 100);
    Home home;
    // A few specs are infeasible for an unlucky seed; re-draw deterministically.
    for (int attempt = 0;; ++attempt) {
      try {
        home = generate_home(hs);
        break;
      } catch (const Error&) {
        if (attempt > 16) throw;
        hs.seed = mix_seed(hs.seed, 7);
      }
    }
    corpus.homes.push_back(hs);
    Rng mrng(mix_seed(hs.seed, 3));
    int clutter_ids = 0;
    for (int i = 0; i < m; ++i) {
      CorpusMission cm;
      cm.home = hidx;
      cm.index = i + 1;
      cm.script = make_mission(cls[static_cast<std::size_t>(hidx * m + i)], home, mrng, clutter_ids);
      for (const auto& step : cm.script.steps) apply_persistent(home, step);
      corpus.missions.push_back(std::move(cm));
    }
  }
  return corpus;
}

// ---------------------------------------------------------------------------
// Scenarios

namespace {

Scenario from_home(Home home, MissionScript script, std::vector<int> focus) {
  Scenario s;
  s.prev = ground_truth_semantics(home);
  s.home = std::move(home);
  s.script = std::move(script);
  s.focus = std::move(focus);
  return s;
}

}  // namespace

Scenario scenario_three_rooms(std::uint64_t seed) {
  Rng rng(seed);
  const int h = rng.range(16, 24);
  const int w1 = rng.range(14, 22);
  const int w2 = rng.range(14, 22);
  const int w3 = rng.range(14, 22);
  const int t = 2;
  const int x0 = kMargin + t;
  const int y0 = kMargin + t;
  Builder b(x0 + w1 + w2 + w3 + 2 * t + t + kMargin, y0 + h + t + kMargin, 0.05, t);
  const int a = b.add_chamber({x0, y0, x0 + w1, y0 + h});
  const int c = b.add_chamber({x0 + w1 + t, y0, x0 + w1 + t + w2, y0 + h});
  const int d = b.add_chamber({x0 + w1 + w2 + 2 * t, y0, x0 + w1 + w2 + 2 * t + w3, y0 + h});
  b.add_door(a, c, y0 + rng.range(2, h - 7), 4);
  b.add_door(c, d, y0 + rng.range(2, h - 7), 4);
  return from_home(b.finish(), {}, {a, c, d});
}

Scenario scenario_jitter(std::uint64_t seed) {
  HomeSpec spec;
  spec.seed = seed;
  spec.hidden_corridor = false;
  Home home = generate_home(spec);
  Rng rng(mix_seed(seed, 11));
  MissionScript s;
  s.seed = rng.next();
  s.dropout = 0.02;
  s.mission_class = "jitter";
  add_jitter(s, home, rng, 0.003, 1.5, 0.3, true);
  return from_home(std::move(home), std::move(s), {});
}

Scenario scenario_wall_gap(std::uint64_t seed, int gap) {
  HomeSpec spec;
  spec.seed = seed;
  spec.hidden_corridor = false;
  Home home = generate_home(spec);
  Rng rng(mix_seed(seed, 12));
  auto site = pick_wall_gap(home, gap, rng);
  if (!site) throw Error("no wall long enough for a gap of " + std::to_string(gap));
  MissionScript s;
  s.seed = rng.next();
  s.mission_class = "disconnection";
  JitterStep shift;
  shift.translation = {home.frame.resolution, 0.0};
  s.steps.push_back(shift);
  s.steps.push_back(RemoveWallStep{site->second});
  return from_home(std::move(home), std::move(s), {site->first.a, site->first.b});
}

Scenario scenario_wall_gaps(std::uint64_t seed) {
  HomeSpec spec;
  spec.seed = seed;
  spec.hidden_corridor = false;
  spec.chambers = 7;
  Home home = generate_home(spec);
  Rng rng(mix_seed(seed, 13));
  MissionScript s;
  s.seed = rng.next();
  s.mission_class = "disconnection";
  s.dropout = 0.01;
  add_jitter(s, home, rng, 0.0, 1.0, 0.2, false);
  std::vector<int> focus;
  for (int k = 0; k < 3; ++k)
    if (auto site = pick_wall_gap(home, rng.range(4, 8), rng)) {
      s.steps.push_back(RemoveWallStep{site->second});
      focus.push_back(site->first.a);
      focus.push_back(site->first.b);
    }
  return from_home(std::move(home), std::move(s), focus);
}

Scenario scenario_absorbed_room(std::uint64_t seed) {
  Rng rng(seed);
  const int t = 2;
  const int x0 = kMargin + t;
  const int y0 = kMargin + t;
  const int wa = rng.range(28, 34);
  const int ha = rng.range(22, 26);
  const int wb = rng.range(18, 22);
  const int hh = rng.range(14, 16);
  Builder b(x0 + wa + t + wb + t + kMargin, y0 + hh + t + ha + t + kMargin, 0.05, t);
  const Rect ra{x0, y0 + hh + t, x0 + wa, y0 + hh + t + ha};
  const Rect rb{ra.x1 + t, ra.y0, ra.x1 + t + wb, ra.y1};
  const Rect rh{x0, y0, x0 + wa, y0 + hh};
  const int a = b.add_chamber(ra);
  const int bb = b.add_chamber(rb);
  const int hid = b.add_chamber(rh, true);
  b.add_door(a, bb, ra.y0 + 3, 4);
  const int ow = rng.range(5, 7);
  b.add_opening(a, hid, ra.x0 + rng.range(3, wa - ow - 3), ow);
  b.hide({kMargin, kMargin, rb.x1 + t, rh.y1});
  Home home = b.finish();

  MissionScript s;
  s.seed = rng.next();
  s.mission_class = "disconnection";
  const int gap = rng.range(6, 8);
  const int pos = ra.y0 + 10 + rng.range(0, ha - 10 - gap - 2);
  s.steps.push_back(RemoveWallStep{{ra.x1, pos, ra.x1 + t, pos + gap}});
  Mask reveal = ~home.explored;
  Mask inside(home.frame.width, home.frame.height);
  for (std::size_t i = 0; i < home.structure.size(); ++i)
    if (home.structure[i] != CellState::Unknown) inside.set_index(i);
  s.steps.push_back(ExploreStep{reveal & inside});
  return from_home(std::move(home), std::move(s), {bb, a});
}

Scenario scenario_split_hallway(std::uint64_t seed) {
  Rng rng(seed);
  const int t = 2;
  const int x0 = kMargin + t;
  const int y0 = kMargin + t;
  const int len = rng.range(54, 66);
  const int hw = rng.range(5, 6);
  const int above = rng.range(16, 20);
  const int split = len / 2 + rng.range(-4, 4);
  Builder b(x0 + len + t + kMargin, y0 + hw + t + above + t + kMargin, 0.05, t);
  const Rect hall{x0, y0, x0 + len, y0 + hw};
  const int hid = b.add_chamber(hall, false, true);
  const int l = b.add_chamber({x0, hall.y1 + t, x0 + split, hall.y1 + t + above});
  const int r = b.add_chamber({x0 + split + t, hall.y1 + t, x0 + len, hall.y1 + t + above});
  b.add_door(l, hid, x0 + 3, 4);
  b.add_door(r, hid, x0 + len - 7, 4);
  b.add_door(l, r, hall.y1 + t + 3, 4);
  Home home = b.finish();

  MissionScript s;
  s.seed = rng.next();
  s.mission_class = "connection";
  for (const Rect& c : hallway_cuts(home, *home.find_chamber(hid), rng)) s.steps.push_back(AddWallStep{c});
  return from_home(std::move(home), std::move(s), {hid});
}

Scenario scenario_new_passage(std::uint64_t seed) {
  Rng rng(mix_seed(seed, 14));
  const int t = 2;
  const int x0 = kMargin + t;
  const int y0 = kMargin + t;
  const int cw = rng.range(5, 7);
  const int h = rng.range(18, 24);
  int widths[3];
  for (int& w : widths) w = rng.range(18, 26);
  const int span = widths[0] + widths[1] + widths[2] + 2 * t;
  Builder b(x0 + span + t + kMargin, y0 + cw + t + h + t + kMargin, 0.05, t);
  // Hidden corridor along the bottom, one opening into each room above it.
  const Rect corridor{x0, y0, x0 + span, y0 + cw};
  const int top = y0 + cw + t;
  int rooms[3];
  int x = x0;
  for (int i = 0; i < 3; ++i) {
    rooms[i] = b.add_chamber({x, top, x + widths[i], top + h});
    x += widths[i] + t;
  }
  const int hid = b.add_chamber(corridor, true);
  b.add_door(rooms[0], rooms[1], top + rng.range(2, h - 7), 4);
  b.add_door(rooms[1], rooms[2], top + rng.range(2, h - 7), 4);
  for (int id : rooms) {
    const Rect& r = b.interior(id);
    const int ow = rng.range(4, 6);
    b.add_opening(id, hid, r.x0 + rng.range(2, r.x1 - r.x0 - ow - 2), ow);
  }
  b.hide({corridor.x0 - t, corridor.y0 - t, corridor.x1 + t, corridor.y1});
  Home home = b.finish();

  MissionScript s;
  s.seed = rng.next();
  s.mission_class = "exploration";
  Mask reveal = ~home.explored;
  Mask inside(home.frame.width, home.frame.height);
  for (std::size_t i = 0; i < home.structure.size(); ++i)
    if (home.structure[i] != CellState::Unknown) inside.set_index(i);
  s.steps.push_back(ExploreStep{reveal & inside});
  return from_home(std::move(home), std::move(s), {rooms[0], rooms[1], rooms[2]});
}

Scenario scenario_new_chamber(std::uint64_t seed) {
  Rng rng(seed);
  const int t = 2;
  const int x0 = kMargin + t;
  const int y0 = kMargin + t;
  const int h = rng.range(20, 24);
  const int w1 = rng.range(16, 20);
  const int w2 = rng.range(26, 32);
  const int w3 = rng.range(16, 20);
  // Hidden chamber below the middle room, 35-70% of its area.
  const int hw = w2 - rng.range(0, 6);
  const int hh = std::max(10, static_cast<int>(std::lround(h * w2 * rng.uniform(0.4, 0.7) / hw)));
  Builder b(x0 + w1 + w2 + w3 + 3 * t + kMargin, y0 + hh + t + h + t + kMargin, 0.05, t);
  const int top = y0 + hh + t;
  const int a = b.add_chamber({x0, top, x0 + w1, top + h});
  const int m = b.add_chamber({x0 + w1 + t, top, x0 + w1 + t + w2, top + h});
  const int c = b.add_chamber({x0 + w1 + w2 + 2 * t, top, x0 + w1 + w2 + 2 * t + w3, top + h});
  const Rect hr{x0 + w1 + t, y0, x0 + w1 + t + hw, y0 + hh};
  const int hid = b.add_chamber(hr, true);
  b.add_door(a, m, top + rng.range(2, h - 7), 4);
  b.add_door(m, c, top + rng.range(2, h - 7), 4);
  const int ow = rng.range(4, 6);
  b.add_opening(m, hid, hr.x0 + rng.range(3, hw - ow - 3), ow);
  b.hide({hr.x0 - t, hr.y0 - t, hr.x1 + t, hr.y1});
  Home home = b.finish();

  MissionScript s;
  s.seed = rng.next();
  s.mission_class = "exploration";
  Mask reveal = ~home.explored;
  Mask inside(home.frame.width, home.frame.height);
  for (std::size_t i = 0; i < home.structure.size(); ++i)
    if (home.structure[i] != CellState::Unknown) inside.set_index(i);
  s.steps.push_back(ExploreStep{reveal & inside});
  return from_home(std::move(home), std::move(s), {m});
}

}  // namespace semlife
