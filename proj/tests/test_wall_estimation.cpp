#include <doctest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "semlife/wall_estimation.hpp"

using namespace semlife;

namespace {

// Free room x 1..18, y 1..14 enclosed by a one-cell ring; the tracked polygon
// is the room outline.
OccupancyGrid ring_grid() { return fixture::box_grid(20, 16); }
Polygon tracked_outline() { return oracle::rect(1.0, 1.0, 19.0, 15.0); }

}  // namespace

TEST_SUITE("wall_estimation") {
  TEST_CASE("ring on the tracked boundary is all wall") {
    const OccupancyGrid g = ring_grid();
    const ObstacleLabels l = classify_obstacles(g, {tracked_outline()}, MetaLayer::empty_for(g.frame()), Config{});
    CHECK(l.wall == g.occupied());
    CHECK(l.clutter.none());
  }

  TEST_CASE("blob at the room center is clutter") {
    OccupancyGrid g = ring_grid();
    for (int y = 7; y < 9; ++y)
      for (int x = 9; x < 11; ++x) g.set(x, y, CellState::Occupied);
    const ObstacleLabels l = classify_obstacles(g, {tracked_outline()}, MetaLayer::empty_for(g.frame()), Config{});
    CHECK(l.clutter.count() == 4);
    CHECK(l.clutter(9, 7));
    CHECK((l.wall | l.clutter) == g.occupied());
    CHECK((l.wall & l.clutter).none());
  }

  TEST_CASE("labels follow the distance to the tracked boundary") {
    OccupancyGrid g = ring_grid();
    // Obstacles at assorted depths inside the room.
    const Cell cells[] = {{2, 5}, {3, 8}, {4, 8}, {5, 10}, {9, 7}, {10, 7}, {9, 8}, {10, 8}, {17, 13}, {15, 3}};
    for (Cell c : cells) g.set(c.x, c.y, CellState::Occupied);
    const Config cfg;
    const ObstacleLabels l = classify_obstacles(g, {tracked_outline()}, MetaLayer::empty_for(g.frame()), cfg);
    // Boundary cells: the one-cell ring outside the room raster.
    const Mask room = oracle::pixel_raster(tracked_outline(), 20, 16);
    Mask ring(20, 16);
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 20; ++x) {
        if (room(x, y)) continue;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx)
            if (room.get(x + dx, y + dy)) ring.set(x, y);
      }
    const auto dist = oracle::brute_distance(ring);
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 20; ++x) {
        if (g(x, y) != CellState::Occupied) continue;
        const bool expect_wall = dist[g.occupied().index(x, y)] <= cfg.wall_distance + 1e-9 || !room(x, y);
        CHECK_MESSAGE(l.wall(x, y) == expect_wall, "cell " << x << "," << y);
        CHECK(l.clutter(x, y) == !expect_wall);
      }
  }

  TEST_CASE("no tracked rooms: every occupied cell is wall") {
    OccupancyGrid g = ring_grid();
    g.set(9, 7, CellState::Occupied);
    const ObstacleLabels l = classify_obstacles(g, {}, MetaLayer::empty_for(g.frame()), Config{});
    CHECK(l.wall == g.occupied());
    CHECK(l.clutter.none());
  }

  TEST_CASE("classification is deterministic and partitions effective occupancy") {
    OccupancyGrid g = ring_grid();
    g.set(9, 7, CellState::Occupied);
    g.set(3, 3, CellState::Occupied);
    MetaLayer meta = MetaLayer::empty_for(g.frame());
    meta.occupancy_wall.set(12, 12);
    meta.occupancy_free.set(0, 5);
    const auto a = classify_obstacles(g, {tracked_outline()}, meta, Config{});
    const auto b = classify_obstacles(g, {tracked_outline()}, meta, Config{});
    CHECK(a == b);
    CHECK((a.wall | a.clutter) == effective_occupancy(g, meta));
  }

  TEST_CASE("solid outline gives one closed polyline and the same raster") {
    const OccupancyGrid g = ring_grid();
    const ObstacleLabels l{g.occupied(), Mask(20, 16)};
    const WallEstimate w = estimate_walls(l, g, MetaLayer::empty_for(g.frame()));
    CHECK(w.mask == g.occupied());
    REQUIRE(w.polylines.size() == 1);
    CHECK(w.polylines[0].vertices.size() >= 4);
  }

  TEST_CASE("single pinhole is bridged and the room does not leak") {
    OccupancyGrid g = ring_grid();
    g.set(8, 0, CellState::Free);
    const ObstacleLabels l{g.occupied(), Mask(20, 16)};
    const WallEstimate w = estimate_walls(l, g, MetaLayer::empty_for(g.frame()));
    CHECK(w.mask(8, 0));
    const Mask reach = flood_fill(~w.mask, {9, 8}, Connectivity::Four);
    CHECK(reach.count() == 18u * 14u);
  }

  TEST_CASE("a four-cell gap stays open") {
    OccupancyGrid g = fixture::two_room_grid();
    const ObstacleLabels l{g.occupied(), Mask(24, 14)};
    const WallEstimate w = estimate_walls(l, g, MetaLayer::empty_for(g.frame()));
    for (int y = 5; y <= 8; ++y) CHECK_FALSE(w.mask(12, y));
  }

  TEST_CASE("no walls is an error") {
    const OccupancyGrid g(8, 8, 1.0, {}, CellState::Free);
    CHECK_THROWS_WITH_AS(estimate_walls(ObstacleLabels{Mask(8, 8), Mask(8, 8)}, g, MetaLayer::empty_for(g.frame())),
                         "no walls sensed", Error);
  }

  TEST_CASE("polyline vertices stay near occupied cells") {
    const OccupancyGrid g = fixture::two_room_grid();
    const ObstacleLabels l{g.occupied(), Mask(24, 14)};
    const WallEstimate w = estimate_walls(l, g, MetaLayer::empty_for(g.frame()));
    const auto dist = oracle::brute_distance(g.occupied());
    for (const auto& poly : w.polylines)
      for (const auto& v : poly.vertices) {
        const int x = std::clamp(static_cast<int>(v.x), 0, 23);
        const int y = std::clamp(static_cast<int>(v.y), 0, 13);
        CHECK(dist[g.occupied().index(x, y)] <= Config{}.wall_distance);
      }
  }

  TEST_CASE("adding meta wall cells never removes wall cells") {
    std::mt19937 gen(31);
    const OccupancyGrid g = fixture::two_room_grid();
    const ObstacleLabels l{g.occupied(), Mask(24, 14)};
    MetaLayer meta = MetaLayer::empty_for(g.frame());
    Mask previous = estimate_walls(l, g, meta).mask;
    for (int i = 0; i < 25; ++i) {
      const int x = static_cast<int>(gen() % 24);
      const int y = static_cast<int>(gen() % 14);
      meta.occupancy_wall.set(x, y);
      const Mask now = estimate_walls(l, g, meta).mask;
      CHECK((previous - now).none());
      previous = now;
    }
  }
}
