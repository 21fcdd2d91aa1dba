#pragma once

// Independent reference implementations used to check the library. They
// favour obviousness over speed and share no code with core/.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "semlife/grid.hpp"

namespace oracle {

using semlife::Mask;
using semlife::Point;
using semlife::Polygon;

inline Mask random_mask(int w, int h, double density, std::uint32_t seed) {
  std::mt19937 gen(seed);
  std::bernoulli_distribution bit(density);
  Mask m(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) m.set(x, y, bit(gen));
  return m;
}

/// Component count by recursive depth-first fill.
inline int count_components(const Mask& m, bool eight) {
  std::vector<int> seen(m.size(), 0);
  std::function<void(int, int)> visit = [&](int x, int y) {
    if (!m.get(x, y) || seen[m.index(x, y)]) return;
    seen[m.index(x, y)] = 1;
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        if (!eight && dx != 0 && dy != 0) continue;
        visit(x + dx, y + dy);
      }
  };
  int n = 0;
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x)
      if (m(x, y) && !seen[m.index(x, y)]) {
        ++n;
        visit(x, y);
      }
  return n;
}

/// Exhaustive nearest set cell distance.
inline std::vector<double> brute_distance(const Mask& m) {
  std::vector<double> out(m.size(), std::numeric_limits<double>::infinity());
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x)
      for (int v = 0; v < m.height(); ++v)
        for (int u = 0; u < m.width(); ++u)
          if (m(u, v)) out[m.index(x, y)] = std::min(out[m.index(x, y)], std::hypot(double(x - u), double(y - v)));
  return out;
}

/// Even-odd test of a point against the polygon edges.
inline bool inside(const Polygon& poly, Point p) {
  bool in = false;
  const auto& v = poly.vertices;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    if ((v[i].y > p.y) != (v[j].y > p.y)) {
      const double xc = v[j].x + (p.y - v[j].y) * (v[i].x - v[j].x) / (v[i].y - v[j].y);
      if (p.x < xc) in = !in;
    }
  }
  return in;
}

/// Per-cell center containment on a unit frame at the origin.
inline Mask pixel_raster(const Polygon& poly, int w, int h) {
  Mask m(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) m.set(x, y, inside(poly, {x + 0.5, y + 0.5}));
  return m;
}

struct Counts {
  std::size_t a_only = 0, b_only = 0, both = 0;
};

inline Counts pixel_overlap(const Mask& a, const Mask& b) {
  Counts c;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] && b[i]) ++c.both;
    else if (a[i]) ++c.a_only;
    else if (b[i]) ++c.b_only;
  }
  return c;
}

/// Star-shaped random polygon around a center; vertices avoid half-integer
/// coordinates so no cell center lies on an edge.
inline Polygon random_polygon(std::mt19937& gen, double cx, double cy, double rmax) {
  std::uniform_int_distribution<int> nverts(3, 9);
  std::uniform_real_distribution<double> radius(rmax * 0.2, rmax);
  std::uniform_real_distribution<double> jitter(0.0, 0.6);
  const int n = nverts(gen);
  Polygon p;
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * 3.14159265358979323846 * (i + jitter(gen)) / n;
    const double r = radius(gen);
    p.vertices.push_back({cx + r * std::cos(a) + 1e-7, cy + r * std::sin(a) + 3e-7});
  }
  return p;
}

inline Polygon rect(double x0, double y0, double x1, double y1) {
  return Polygon{{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}};
}

}  // namespace oracle
