#pragma once

// Raster and polygon geometry shared by every stage of the semantic map
// pipeline.
//
// Coordinates: cell (x, y) covers [x, x+1) x [y, y+1) in cell units, with y
// growing "up". World coordinates are origin + cell_units * resolution.
// Polygons live in world coordinates.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace semlife {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class CellState : std::uint8_t { Free, Occupied, Unknown };

enum class Connectivity { Four = 4, Eight = 8 };

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

struct Cell {
  int x = 0;
  int y = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Placement of a raster in the world: size, meters per cell and the world
/// position of the lower-left corner of cell (0, 0).
struct GridFrame {
  int width = 0;
  int height = 0;
  double resolution = 1.0;
  Point origin{};

  friend bool operator==(const GridFrame&, const GridFrame&) = default;

  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
  std::size_t cell_count() const { return static_cast<std::size_t>(width) * height; }

  /// World point -> continuous cell coordinates.
  Point to_cell_units(Point world) const;
  /// Continuous cell coordinates -> world point.
  Point to_world(Point cell_units) const;
  /// Cell containing a world point (floor), possibly out of bounds.
  Cell cell_of(Point world) const;
  Point cell_center(Cell c) const;
};

class Mask {
 public:
  Mask() = default;
  Mask(int width, int height, bool value = false);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return bits_.size(); }

  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }
  bool operator()(int x, int y) const { return bits_[index(x, y)] != 0; }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  /// Out-of-bounds reads return false.
  bool get(int x, int y) const { return contains(x, y) && bits_[index(x, y)] != 0; }
  void set(int x, int y, bool value = true) { bits_[index(x, y)] = value ? 1 : 0; }
  void set_index(std::size_t i, bool value = true) { bits_[i] = value ? 1 : 0; }

  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }
  std::size_t count() const;
  bool any() const;
  bool none() const { return !any(); }
  bool same_shape(const Mask& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  std::span<const std::uint8_t> bits() const { return bits_; }

  Mask& operator|=(const Mask& other);
  Mask& operator&=(const Mask& other);
  /// Set difference.
  Mask& operator-=(const Mask& other);
  Mask operator~() const;

  friend Mask operator|(Mask a, const Mask& b) { return a |= b; }
  friend Mask operator&(Mask a, const Mask& b) { return a &= b; }
  friend Mask operator-(Mask a, const Mask& b) { return a -= b; }
  friend bool operator==(const Mask&, const Mask&) = default;

 private:
  void check_shape(const Mask& other) const;

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  OccupancyGrid(int width, int height, double resolution, Point origin = {},
                CellState fill = CellState::Unknown);
  OccupancyGrid(GridFrame frame, std::vector<CellState> cells);

  int width() const { return frame_.width; }
  int height() const { return frame_.height; }
  double resolution() const { return frame_.resolution; }
  Point origin() const { return frame_.origin; }
  const GridFrame& frame() const { return frame_; }
  bool contains(int x, int y) const { return frame_.contains(x, y); }

  CellState operator()(int x, int y) const { return cells_[index(x, y)]; }
  void set(int x, int y, CellState s) { cells_[index(x, y)] = s; }
  std::span<const CellState> cells() const { return cells_; }

  Mask mask_of(CellState s) const;
  Mask occupied() const { return mask_of(CellState::Occupied); }
  Mask free() const { return mask_of(CellState::Free); }
  Mask unknown() const { return mask_of(CellState::Unknown); }

  friend bool operator==(const OccupancyGrid&, const OccupancyGrid&) = default;

 private:
  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * frame_.width + x; }

  GridFrame frame_{};
  std::vector<CellState> cells_;
};

struct Polygon {
  std::vector<Point> vertices;

  friend bool operator==(const Polygon&, const Polygon&) = default;
};

/// True when fewer than three distinct vertices remain.
bool is_degenerate(const Polygon& poly);
double signed_area(const Polygon& poly);

struct OverlapAreas {
  std::size_t a_only = 0;
  std::size_t b_only = 0;
  std::size_t both = 0;

  friend bool operator==(const OverlapAreas&, const OverlapAreas&) = default;
};

struct Labeling {
  int width = 0;
  int height = 0;
  /// -1 for unset cells, otherwise the component index.
  std::vector<int> labels;
  std::vector<std::size_t> sizes;

  int count() const { return static_cast<int>(sizes.size()); }
  int operator()(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
  Mask component(int label) const;
};

/// Components are numbered in raster order of their first cell (row-major,
/// starting at y = 0).
Labeling label_components(const Mask& mask, Connectivity conn);
std::vector<Mask> connected_components(const Mask& mask, Connectivity conn);

/// Exact Euclidean distance (in cells) from each cell center to the nearest
/// set cell center, computed with the separable lower-envelope transform.
class DistanceField {
 public:
  DistanceField(int width, int height, std::vector<double> values)
      : width_(width), height_(height), values_(std::move(values)) {}

  int width() const { return width_; }
  int height() const { return height_; }
  double operator()(int x, int y) const { return values_[static_cast<std::size_t>(y) * width_ + x]; }
  std::span<const double> values() const { return values_; }

 private:
  int width_;
  int height_;
  std::vector<double> values_;
};

DistanceField distance_field(const Mask& mask);

/// Cells whose centers lie inside the polygon under the crossing-number
/// rule with half-open edges: a center on a left or bottom edge is inside, on
/// a right or top edge outside.
Mask rasterize_polygon(const Polygon& poly, const GridFrame& frame);
/// Per-point form of the same rule, in world coordinates.
bool contains_point(const Polygon& poly, Point p);

OverlapAreas overlap_areas(const Polygon& prev_room, const Polygon& new_room, const GridFrame& frame);
OverlapAreas overlap_areas(const Mask& a, const Mask& b);

/// Bresenham line between the cells containing a and b, clipped to the frame.
/// The result is 8-connected and therefore blocks 4-connected flood fill.
std::vector<Cell> segment_cells(Point a, Point b, const GridFrame& frame);
void draw_segment(Mask& mask, Point a, Point b, const GridFrame& frame);
void draw_cells(Mask& mask, Cell a, Cell b);

/// Square (Chebyshev) dilation; cells outside the frame count as unset.
Mask dilate(const Mask& mask, int radius);
/// Closing with a 2x2 structuring element. Bridges single-cell gaps and
/// nothing wider.
Mask close_pinholes(const Mask& mask);
/// Cells outside `raster` that touch it in the 8-neighbourhood.
Mask boundary_ring(const Mask& raster);
/// Region plus every enclosed pocket not reachable from the frame border
/// through 8-connected background.
Mask fill_holes(const Mask& region);
Mask flood_fill(const Mask& passable, Cell seed, Connectivity conn);

/// Outline of a non-empty 4-connected region at cell-edge granularity, with
/// collinear vertices removed. Holes are ignored: rasterizing the result gives
/// fill_holes(region) exactly. Counter-clockwise.
Polygon trace_outline(const Mask& region, const GridFrame& frame);

double point_segment_distance(Point p, Point a, Point b);

bool is_convex(const Polygon& poly);
/// Intersection of two convex polygons (Sutherland-Hodgman). The result may
/// be degenerate when they do not overlap.
Polygon clip_convex(const Polygon& subject, const Polygon& clip);

}  // namespace semlife
