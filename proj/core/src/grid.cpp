#include "semlife/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace semlife {

Point GridFrame::to_cell_units(Point world) const {
  return {(world.x - origin.x) / resolution, (world.y - origin.y) / resolution};
}

Point GridFrame::to_world(Point cell_units) const {
  return {origin.x + cell_units.x * resolution, origin.y + cell_units.y * resolution};
}

Cell GridFrame::cell_of(Point world) const {
  const Point c = to_cell_units(world);
  return {static_cast<int>(std::floor(c.x)), static_cast<int>(std::floor(c.y))};
}

Point GridFrame::cell_center(Cell c) const { return to_world({c.x + 0.5, c.y + 0.5}); }

// ---------------------------------------------------------------------------

Mask::Mask(int width, int height, bool value) : width_(width), height_(height) {
  if (width < 0 || height < 0) throw Error("mask dimensions must be non-negative");
  bits_.assign(static_cast<std::size_t>(width) * height, value ? 1 : 0);
}

std::size_t Mask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

bool Mask::any() const {
  return std::any_of(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b != 0; });
}

void Mask::check_shape(const Mask& other) const {
  if (!same_shape(other)) throw Error("mask dimension mismatch");
}

Mask& Mask::operator|=(const Mask& other) {
  check_shape(other);
  for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] |= other.bits_[i];
  return *this;
}

Mask& Mask::operator&=(const Mask& other) {
  check_shape(other);
  for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] &= other.bits_[i];
  return *this;
}

Mask& Mask::operator-=(const Mask& other) {
  check_shape(other);
  for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] = bits_[i] && !other.bits_[i];
  return *this;
}

Mask Mask::operator~() const {
  Mask out = *this;
  for (auto& b : out.bits_) b = b ? 0 : 1;
  return out;
}

// ---------------------------------------------------------------------------

OccupancyGrid::OccupancyGrid(int width, int height, double resolution, Point origin, CellState fill)
    : frame_{width, height, resolution, origin} {
  if (width < 1 || height < 1) throw Error("grid dimensions must be at least 1x1");
  if (!(resolution > 0.0)) throw Error("grid resolution must be positive");
  cells_.assign(frame_.cell_count(), fill);
}

OccupancyGrid::OccupancyGrid(GridFrame frame, std::vector<CellState> cells)
    : frame_(frame), cells_(std::move(cells)) {
  if (frame.width < 1 || frame.height < 1) throw Error("grid dimensions must be at least 1x1");
  if (!(frame.resolution > 0.0)) throw Error("grid resolution must be positive");
  if (cells_.size() != frame.cell_count()) throw Error("cell count does not match width x height");
}

Mask OccupancyGrid::mask_of(CellState s) const {
  Mask m(width(), height());
  for (std::size_t i = 0; i < cells_.size(); ++i) m.set_index(i, cells_[i] == s);
  return m;
}

// ---------------------------------------------------------------------------

bool is_degenerate(const Polygon& poly) {
  std::vector<Point> distinct;
  for (const auto& p : poly.vertices) {
    if (std::find(distinct.begin(), distinct.end(), p) == distinct.end()) distinct.push_back(p);
    if (distinct.size() >= 3) break;
  }
  return distinct.size() < 3;
}

double signed_area(const Polygon& poly) {
  const auto& v = poly.vertices;
  double a = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& p = v[i];
    const auto& q = v[(i + 1) % v.size()];
    a += p.x * q.y - q.x * p.y;
  }
  return 0.5 * a;
}

// ---------------------------------------------------------------------------

Mask Labeling::component(int label) const {
  Mask m(width, height);
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) m.set_index(i);
  return m;
}

namespace {

constexpr int kDx8[] = {1, -1, 0, 0, 1, 1, -1, -1};
constexpr int kDy8[] = {0, 0, 1, -1, 1, -1, 1, -1};

int neighbour_count(Connectivity conn) { return conn == Connectivity::Four ? 4 : 8; }

}  // namespace

Labeling label_components(const Mask& mask, Connectivity conn) {
  Labeling out;
  out.width = mask.width();
  out.height = mask.height();
  out.labels.assign(mask.size(), -1);
  const int n = neighbour_count(conn);
  std::vector<Cell> stack;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      const std::size_t start = mask.index(x, y);
      if (!mask[start] || out.labels[start] >= 0) continue;
      const int label = out.count();
      std::size_t size = 0;
      out.labels[start] = label;
      stack.push_back({x, y});
      while (!stack.empty()) {
        const Cell c = stack.back();
        stack.pop_back();
        ++size;
        for (int k = 0; k < n; ++k) {
          const int nx = c.x + kDx8[k];
          const int ny = c.y + kDy8[k];
          if (!mask.contains(nx, ny)) continue;
          const std::size_t ni = mask.index(nx, ny);
          if (mask[ni] && out.labels[ni] < 0) {
            out.labels[ni] = label;
            stack.push_back({nx, ny});
          }
        }
      }
      out.sizes.push_back(size);
    }
  }
  return out;
}

std::vector<Mask> connected_components(const Mask& mask, Connectivity conn) {
  const Labeling lab = label_components(mask, conn);
  std::vector<Mask> out(lab.sizes.size(), Mask(mask.width(), mask.height()));
  for (std::size_t i = 0; i < lab.labels.size(); ++i)
    if (lab.labels[i] >= 0) out[lab.labels[i]].set_index(i);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// One-dimensional squared distance transform of a sampled function
// (lower envelope of parabolas).
void distance_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v,
                 std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  constexpr double inf = std::numeric_limits<double>::infinity();
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == inf) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -inf;
      z[1] = inf;
      continue;
    }
    double s = 0.0;
    while (true) {
      const int p = v[k];
      s = ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * q - 2.0 * p);
      if (s <= z[k]) {
        --k;
        if (k < 0) break;
      } else {
        break;
      }
    }
    ++k;
    v[k] = q;
    z[k] = k == 0 ? -inf : s;
    z[k + 1] = inf;
  }
  if (k < 0) {
    std::fill(d.begin(), d.end(), inf);
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q) ++j;
    const double diff = q - v[j];
    d[q] = diff * diff + f[v[j]];
  }
}

}  // namespace

DistanceField distance_field(const Mask& mask) {
  if (mask.none()) throw Error("no occupied cells");
  const int w = mask.width();
  const int h = mask.height();
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> sq(mask.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = mask[i] ? 0.0 : inf;

  const int n = std::max(w, h);
  std::vector<double> f(n), d(n), z(n + 1);
  std::vector<int> v(n);

  // Columns, then rows.
  f.resize(h);
  d.resize(h);
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) f[y] = sq[mask.index(x, y)];
    distance_1d(f, d, v, z);
    for (int y = 0; y < h; ++y) sq[mask.index(x, y)] = d[y];
  }
  f.resize(w);
  d.resize(w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) f[x] = sq[mask.index(x, y)];
    distance_1d(f, d, v, z);
    for (int x = 0; x < w; ++x) sq[mask.index(x, y)] = d[x];
  }
  for (auto& s : sq) s = std::sqrt(s);
  return DistanceField(w, h, std::move(sq));
}

// ---------------------------------------------------------------------------

bool contains_point(const Polygon& poly, Point p) {
  const auto& v = poly.vertices;
  bool inside = false;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    const Point& a = v[j];
    const Point& b = v[i];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double xi = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < xi) inside = !inside;
    }
  }
  return inside;
}

Mask rasterize_polygon(const Polygon& poly, const GridFrame& frame) {
  if (is_degenerate(poly)) throw Error("degenerate polygon: fewer than 3 distinct vertices");
  Mask out(frame.width, frame.height);
  std::vector<Point> v;
  v.reserve(poly.vertices.size());
  double ymin = std::numeric_limits<double>::infinity();
  double ymax = -ymin;
  for (const auto& p : poly.vertices) {
    v.push_back(frame.to_cell_units(p));
    ymin = std::min(ymin, v.back().y);
    ymax = std::max(ymax, v.back().y);
  }
  const int y0 = std::max(0, static_cast<int>(std::floor(ymin - 0.5)));
  const int y1 = std::min(frame.height - 1, static_cast<int>(std::ceil(ymax)));
  std::vector<double> xs;
  for (int y = y0; y <= y1; ++y) {
    const double cy = y + 0.5;
    xs.clear();
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
      const Point& a = v[j];
      const Point& b = v[i];
      if ((a.y > cy) != (b.y > cy)) xs.push_back(a.x + (cy - a.y) * (b.x - a.x) / (b.y - a.y));
    }
    std::sort(xs.begin(), xs.end());
    // Center cx is inside iff an odd number of crossings lie strictly to its
    // right, i.e. xs[2k] <= cx < xs[2k+1].
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      const int xa = std::max(0, static_cast<int>(std::ceil(xs[k] - 0.5)));
      int xb = static_cast<int>(std::ceil(xs[k + 1] - 0.5)) - 1;
      xb = std::min(xb, frame.width - 1);
      for (int x = xa; x <= xb; ++x) out.set(x, y);
    }
  }
  return out;
}

OverlapAreas overlap_areas(const Mask& a, const Mask& b) {
  if (!a.same_shape(b)) throw Error("mask dimension mismatch");
  OverlapAreas r;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] && b[i]) ++r.both;
    else if (a[i]) ++r.a_only;
    else if (b[i]) ++r.b_only;
  }
  return r;
}

OverlapAreas overlap_areas(const Polygon& prev_room, const Polygon& new_room, const GridFrame& frame) {
  return overlap_areas(rasterize_polygon(prev_room, frame), rasterize_polygon(new_room, frame));
}

// ---------------------------------------------------------------------------

namespace {

template <typename F>
void bresenham(Cell a, Cell b, F&& visit) {
  int x = a.x, y = a.y;
  const int dx = std::abs(b.x - a.x), sx = a.x < b.x ? 1 : -1;
  const int dy = -std::abs(b.y - a.y), sy = a.y < b.y ? 1 : -1;
  int err = dx + dy;
  while (true) {
    visit(Cell{x, y});
    if (x == b.x && y == b.y) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y += sy;
    }
  }
}

}  // namespace

std::vector<Cell> segment_cells(Point a, Point b, const GridFrame& frame) {
  std::vector<Cell> out;
  bresenham(frame.cell_of(a), frame.cell_of(b), [&](Cell c) {
    if (frame.contains(c.x, c.y)) out.push_back(c);
  });
  return out;
}

void draw_segment(Mask& mask, Point a, Point b, const GridFrame& frame) {
  for (const Cell& c : segment_cells(a, b, frame)) mask.set(c.x, c.y);
}

void draw_cells(Mask& mask, Cell a, Cell b) {
  bresenham(a, b, [&](Cell c) {
    if (mask.contains(c.x, c.y)) mask.set(c.x, c.y);
  });
}

// ---------------------------------------------------------------------------

Mask dilate(const Mask& mask, int radius) {
  if (radius <= 0) return mask;
  const int w = mask.width();
  const int h = mask.height();
  // Separable running-window maximum via prefix counts.
  std::vector<int> prefix(static_cast<std::size_t>(std::max(w, h)) + 1);
  Mask horiz(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) prefix[x + 1] = prefix[x] + (mask(x, y) ? 1 : 0);
    for (int x = 0; x < w; ++x) {
      const int lo = std::max(0, x - radius);
      const int hi = std::min(w - 1, x + radius);
      horiz.set(x, y, prefix[hi + 1] - prefix[lo] > 0);
    }
  }
  Mask out(w, h);
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) prefix[y + 1] = prefix[y] + (horiz(x, y) ? 1 : 0);
    for (int y = 0; y < h; ++y) {
      const int lo = std::max(0, y - radius);
      const int hi = std::min(h - 1, y + radius);
      out.set(x, y, prefix[hi + 1] - prefix[lo] > 0);
    }
  }
  return out;
}

Mask close_pinholes(const Mask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  // Dilation by B = {0,1}^2: D(p) = any X(p - b).
  Mask dil(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      dil.set(x, y, mask.get(x, y) || mask.get(x - 1, y) || mask.get(x, y - 1) || mask.get(x - 1, y - 1));
  // Erosion by B: E(p) = all D(p + b); cells beyond the frame count as set so
  // the border is not eroded.
  auto d = [&](int x, int y) { return !dil.contains(x, y) || dil(x, y); };
  Mask out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      out.set(x, y, mask(x, y) || (d(x, y) && d(x + 1, y) && d(x, y + 1) && d(x + 1, y + 1)));
  return out;
}

Mask boundary_ring(const Mask& raster) { return dilate(raster, 1) - raster; }

Mask fill_holes(const Mask& region) {
  const int w = region.width();
  const int h = region.height();
  // Background flood from a virtual 1-cell border, 8-connected.
  Mask outside(w, h);
  std::vector<Cell> stack;
  auto push = [&](int x, int y) {
    if (!region.contains(x, y) || region(x, y) || outside(x, y)) return;
    outside.set(x, y);
    stack.push_back({x, y});
  };
  for (int x = 0; x < w; ++x) {
    push(x, 0);
    push(x, h - 1);
  }
  for (int y = 0; y < h; ++y) {
    push(0, y);
    push(w - 1, y);
  }
  while (!stack.empty()) {
    const Cell c = stack.back();
    stack.pop_back();
    for (int k = 0; k < 8; ++k) push(c.x + kDx8[k], c.y + kDy8[k]);
  }
  return ~outside;
}

Mask flood_fill(const Mask& passable, Cell seed, Connectivity conn) {
  Mask out(passable.width(), passable.height());
  if (!passable.get(seed.x, seed.y)) return out;
  const int n = neighbour_count(conn);
  std::vector<Cell> stack{seed};
  out.set(seed.x, seed.y);
  while (!stack.empty()) {
    const Cell c = stack.back();
    stack.pop_back();
    for (int k = 0; k < n; ++k) {
      const int nx = c.x + kDx8[k];
      const int ny = c.y + kDy8[k];
      if (passable.get(nx, ny) && !out(nx, ny)) {
        out.set(nx, ny);
        stack.push_back({nx, ny});
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Directed boundary edge between integer lattice vertices.
struct Edge {
  int x0, y0, x1, y1;
  int dir() const {
    if (x1 > x0) return 0;  // +x
    if (y1 > y0) return 1;  // +y
    if (x1 < x0) return 2;  // -x
    return 3;               // -y
  }
};

}  // namespace

Polygon trace_outline(const Mask& region, const GridFrame& frame) {
  const Mask filled = fill_holes(region);
  // Outgoing edges keyed by start vertex. The interior is kept on the left.
  std::map<std::pair<int, int>, std::vector<std::size_t>> outgoing;
  std::vector<Edge> edges;
  for (int y = 0; y < filled.height(); ++y) {
    for (int x = 0; x < filled.width(); ++x) {
      if (!filled(x, y)) continue;
      if (!filled.get(x, y - 1)) edges.push_back({x, y, x + 1, y});
      if (!filled.get(x + 1, y)) edges.push_back({x + 1, y, x + 1, y + 1});
      if (!filled.get(x, y + 1)) edges.push_back({x + 1, y + 1, x, y + 1});
      if (!filled.get(x - 1, y)) edges.push_back({x, y + 1, x, y});
    }
  }
  if (edges.empty()) throw Error("cannot trace an empty region");
  for (std::size_t i = 0; i < edges.size(); ++i) outgoing[{edges[i].x0, edges[i].y0}].push_back(i);

  // Raster order guarantees edges[0] is the bottom edge of the lowest, then
  // leftmost, cell, which lies on the outer boundary.
  std::vector<char> used(edges.size(), 0);
  std::vector<Edge> loop;
  std::size_t cur = 0;
  while (!used[cur]) {
    used[cur] = 1;
    loop.push_back(edges[cur]);
    const Edge& e = edges[cur];
    const auto& cands = outgoing[{e.x1, e.y1}];
    // Prefer left turn, then straight, then right: keeps diagonal-only
    // contacts apart (4-connected interior).
    const int d = e.dir();
    std::size_t next = cur;
    int best_rank = 4;
    for (std::size_t c : cands) {
      if (used[c] && c != 0) continue;
      const int turn = (edges[c].dir() - d + 4) % 4;  // 1 = left, 0 = straight, 3 = right
      const int rank = turn == 1 ? 0 : turn == 0 ? 1 : turn == 3 ? 2 : 3;
      if (rank < best_rank) {
        best_rank = rank;
        next = c;
      }
    }
    if (next == cur) break;
    cur = next;
  }

  Polygon poly;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const Edge& prev = loop[(i + loop.size() - 1) % loop.size()];
    if (prev.dir() != loop[i].dir())
      poly.vertices.push_back(frame.to_world({double(loop[i].x0), double(loop[i].y0)}));
  }
  return poly;
}

double point_segment_distance(Point p, Point a, Point b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
  const double cx = a.x + t * dx - p.x;
  const double cy = a.y + t * dy - p.y;
  return std::sqrt(cx * cx + cy * cy);
}

bool is_convex(const Polygon& poly) {
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  if (n < 3) return false;
  int sign = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = v[i];
    const Point& b = v[(i + 1) % n];
    const Point& c = v[(i + 2) % n];
    const double cross = (b.x - a.x) * (c.y - b.y) - (b.y - a.y) * (c.x - b.x);
    if (cross == 0.0) continue;
    const int s = cross > 0 ? 1 : -1;
    if (sign != 0 && s != sign) return false;
    sign = s;
  }
  return sign != 0;
}

Polygon clip_convex(const Polygon& subject, const Polygon& clip) {
  std::vector<Point> out = subject.vertices;
  const auto& c = clip.vertices;
  const double orient = signed_area(clip) >= 0 ? 1.0 : -1.0;
  for (std::size_t i = 0; i < c.size() && !out.empty(); ++i) {
    const Point a = c[i];
    const Point b = c[(i + 1) % c.size()];
    auto side = [&](Point p) { return orient * ((b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x)); };
    std::vector<Point> in = std::move(out);
    out.clear();
    for (std::size_t k = 0; k < in.size(); ++k) {
      const Point p = in[k];
      const Point q = in[(k + 1) % in.size()];
      const double sp = side(p);
      const double sq = side(q);
      if (sp >= 0) out.push_back(p);
      if ((sp >= 0) != (sq >= 0)) {
        const double t = sp / (sp - sq);
        out.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
      }
    }
  }
  return Polygon{std::move(out)};
}

}  // namespace semlife
