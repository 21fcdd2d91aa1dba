#include <doctest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "semlife/discovery.hpp"
#include "semlife/simulator.hpp"

using namespace semlife;

namespace {

// 40x12 box with an inner wall at column `split`.
OccupancyGrid partitioned(int split) {
  OccupancyGrid g = fixture::box_grid(40, 12);
  for (int y = 0; y < 12; ++y) g.set(split, y, CellState::Occupied);
  return g;
}

// Rebuild on another grid keeping the previous ids.
SemanticMap moved_wall(const SemanticMap& prev, int split) {
  SemanticMap m = fixture::make_map(partitioned(split), {});
  std::vector<TrackedRoom> tracked;
  for (const auto& r : prev.rooms) tracked.push_back({r.id, r.label, r.boundary});
  m.rooms = reconstruct_rooms(m.grid.occupied(), {}, m.grid, m.meta, tracked, Config{});
  m.version = prev.version + 1;
  return m;
}

// Two 20x20 chambers joined by a neck four cells wide and eight long.
OccupancyGrid dumbbell() {
  OccupancyGrid g(50, 22, 1.0, {}, CellState::Occupied);
  for (int y = 1; y <= 20; ++y)
    for (int x = 1; x <= 20; ++x) {
      g.set(x, y, CellState::Free);
      g.set(x + 28, y, CellState::Free);
    }
  for (int y = 9; y <= 12; ++y)
    for (int x = 21; x <= 28; ++x) g.set(x, y, CellState::Free);
  return g;
}

// Shortest run of free cells between two blocked cells along any horizontal,
// vertical or diagonal line through the neck.
int narrowest_chord(const Mask& free) {
  int best = 1 << 30;
  const int dirs[4][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
  for (int y = 9; y <= 12; ++y)
    for (int x = 21; x <= 28; ++x)
      for (const auto& d : dirs) {
        int n = 1;
        for (int s = 1; free.get(x + s * d[0], y + s * d[1]); ++s) ++n;
        for (int s = 1; free.get(x - s * d[0], y - s * d[1]); ++s) ++n;
        best = std::min(best, n);
      }
  return best;
}

}  // namespace

TEST_SUITE("discovery") {
  TEST_CASE("identical maps show no growth") {
    const SemanticMap m = fixture::make_map(partitioned(20), {});
    CHECK(detect_growth(m, m, Config{}).empty());
  }

  TEST_CASE("room grown by about 1.5x is reported with its new cells") {
    const SemanticMap prev = fixture::make_map(partitioned(20), {});
    const SemanticMap grown = moved_wall(prev, 29);
    const auto g = detect_growth(prev, grown, Config{});
    REQUIRE(g.size() == 1);
    const Room* before = prev.find_room(g[0].room_id);
    const Room* after = grown.find_room(g[0].room_id);
    REQUIRE(before != nullptr);
    REQUIRE(after != nullptr);
    const Mask want = oracle::pixel_raster(after->boundary, 40, 12) - oracle::pixel_raster(before->boundary, 40, 12);
    CHECK(g[0].mask == want);
    CHECK(want.count() == 90);
    CHECK_FALSE(g[0].whole);
  }

  TEST_CASE("growth of 1.1x is below the threshold") {
    const SemanticMap prev = fixture::make_map(partitioned(20), {});
    CHECK(detect_growth(prev, moved_wall(prev, 22), Config{}).empty());
  }

  TEST_CASE("convex region has no passage to cut") {
    const OccupancyGrid g = fixture::box_grid(30, 20);
    CHECK(estimate_dividers(g.free(), g.occupied(), Config{}, g.frame()).empty());
  }

  TEST_CASE("dumbbell gets one divider across the neck") {
    const OccupancyGrid g = dumbbell();
    const auto divs = estimate_dividers(g.free(), g.occupied(), Config{}, g.frame(), 5);
    REQUIRE(divs.size() == 1);
    CHECK(divs[0].id == 5);
    const Mask cut = divider_raster(divs, g.frame());
    CHECK((cut & g.free()).count() == static_cast<std::size_t>(narrowest_chord(g.free())));
    CHECK(narrowest_chord(g.free()) == 4);
    const auto parts = connected_components(g.free() - cut, Connectivity::Four);
    REQUIRE(parts.size() == 2);
    CHECK(std::min(parts[0].count(), parts[1].count()) >= 400);
    for (Point p : {divs[0].a, divs[0].b}) CHECK(g.occupied().get(g.frame().cell_of(p).x, g.frame().cell_of(p).y));
  }

  TEST_CASE("estimation is deterministic") {
    const OccupancyGrid g = dumbbell();
    CHECK(estimate_dividers(g.free(), g.occupied(), Config{}, g.frame()) ==
          estimate_dividers(g.free(), g.occupied(), Config{}, g.frame()));
  }

  TEST_CASE("no growth leaves the candidate unchanged") {
    const SemanticMap m = fixture::two_room_map();
    const Discovered d = discover(m, m, Config{});
    CHECK(d.map == m);
    CHECK(d.report.new_rooms.empty());
  }

  TEST_CASE("growth below the threshold just enlarges the room") {
    const SemanticMap prev = fixture::make_map(partitioned(20), {});
    const SemanticMap grown = moved_wall(prev, 22);
    const Discovered d = discover(prev, grown, Config{});
    CHECK(d.map.rooms.size() == prev.rooms.size());
    const Room* left = d.map.find_room(prev.rooms[0].id);
    REQUIRE(left != nullptr);
    CHECK(oracle::pixel_raster(left->boundary, 40, 12).count() == 210);
  }

  TEST_CASE("new chamber becomes one new room and keeps the old ones") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const Scenario sc = scenario_new_chamber(seed);
      const SimResult sim = simulate_mission(sc.home, sc.script);
      const Config cfg;
      const Resolved r = resolve_conflicts(sc.prev, sim.grid, sim.motion, cfg, Arm::Full);
      REQUIRE(r.report.success());
      const Discovered d = discover(sc.prev, r.candidate, cfg, &r.trace.tracked);
      CHECK(d.report.new_rooms.size() == 1);
      for (int id : d.report.new_rooms) CHECK(sc.prev.find_room(id) == nullptr);
      const ConflictReport after = detect_conflicts(sc.prev, d.map, cfg, &r.trace.tracked);
      CHECK(after.success());
      CHECK(validate_constraints(d.map, cfg).ok());
      for (int id : d.report.accepted) CHECK(d.map.find_divider(id) != nullptr);
    }
  }

  TEST_CASE("discovery is deterministic and additive on the passage fixture") {
    const Scenario sc = scenario_new_passage(3);
    const SimResult sim = simulate_mission(sc.home, sc.script);
    const Config cfg;
    const Resolved r = resolve_conflicts(sc.prev, sim.grid, sim.motion, cfg, Arm::Full);
    const Discovered a = discover(sc.prev, r.candidate, cfg, &r.trace.tracked);
    const Discovered b = discover(sc.prev, r.candidate, cfg, &r.trace.tracked);
    CHECK(a.map == b.map);
    CHECK(a.report.proposals == b.report.proposals);
    REQUIRE(r.report.success());
    {
      int fresh = 0;
      for (const auto& room : a.map.rooms) fresh += sc.prev.find_room(room.id) == nullptr;
      CHECK(fresh >= 1);
      for (const auto& g : a.report.grown)
        if (sc.prev.find_room(g.room_id) == nullptr) CHECK(g.whole);
      for (const auto& room : sc.prev.rooms) CHECK(a.map.find_room(room.id) != nullptr);
      CHECK(detect_conflicts(sc.prev, a.map, cfg, &r.trace.tracked).success());
    }
    CHECK(validate_constraints(a.map, cfg).ok());
  }
}
