#pragma once

// Small hand-built maps at 1 m per cell, so world and cell units coincide.

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "semlife/lifecycle.hpp"

namespace fixture {

using namespace semlife;

/// Free rectangle enclosed by a one-cell wall on the frame border.
inline OccupancyGrid box_grid(int w, int h) {
  OccupancyGrid g(w, h, 1.0, {}, CellState::Free);
  for (int x = 0; x < w; ++x) {
    g.set(x, 0, CellState::Occupied);
    g.set(x, h - 1, CellState::Occupied);
  }
  for (int y = 0; y < h; ++y) {
    g.set(0, y, CellState::Occupied);
    g.set(w - 1, y, CellState::Occupied);
  }
  return g;
}

/// Box of 24x14 split by a wall at x = 12 with a doorway at y = 5..8.
inline OccupancyGrid two_room_grid() {
  OccupancyGrid g = box_grid(24, 14);
  for (int y = 0; y < 14; ++y)
    if (y < 5 || y > 8) g.set(12, y, CellState::Occupied);
  return g;
}

inline Divider doorway_divider(int id = 1) { return Divider{id, {12.5, 4.5}, {12.5, 9.5}, DividerKind::User}; }

/// Every occupied cell is wall; rooms come from reconstruction.
inline SemanticMap make_map(const OccupancyGrid& grid, std::vector<Divider> dividers, const Config& cfg = {}) {
  SemanticMap m;
  m.grid = grid;
  m.labels = ObstacleLabels{grid.occupied(), Mask(grid.width(), grid.height())};
  m.meta = MetaLayer::empty_for(grid.frame());
  m.dividers = std::move(dividers);
  m.rooms = reconstruct_rooms(wall_mask(m.labels, m.meta), m.dividers, grid, m.meta, {}, cfg);
  return m;
}

inline SemanticMap two_room_map() { return make_map(two_room_grid(), {doorway_divider()}); }

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    std::random_device rd;
    std::ostringstream name;
    name << "semlife_test_" << std::hex << rd() << rd();
    path = std::filesystem::temp_directory_path() / name.str();
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

/// FNV-1a over every file path and its bytes below `dir`, in sorted order.
inline std::uint64_t hash_tree(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
  };
  for (const auto& f : files) {
    mix(std::filesystem::relative(f, dir).string());
    mix(slurp(f));
  }
  return h;
}

}  // namespace fixture
