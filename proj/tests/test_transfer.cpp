#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "semlife/conflict.hpp"
#include "semlife/simulator.hpp"

using namespace semlife;

namespace {

// p' = R(theta) (p - c) + c + t, written out by hand.
Point apply_rigid(Point p, double theta, Point c, Point t) {
  const double dx = p.x - c.x;
  const double dy = p.y - c.y;
  return {std::cos(theta) * dx - std::sin(theta) * dy + c.x + t.x,
          std::sin(theta) * dx + std::cos(theta) * dy + c.y + t.y};
}

double dist(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

}  // namespace

TEST_SUITE("transfer") {
  TEST_CASE("identity motion tracks geometry exactly") {
    const SemanticMap m = fixture::two_room_map();
    const TrackedSemantics t = track_semantics(m, MotionEstimate::identity());
    REQUIRE(t.rooms.size() == m.rooms.size());
    REQUIRE(t.dividers.size() == m.dividers.size());
    for (std::size_t i = 0; i < m.rooms.size(); ++i) CHECK(t.rooms[i].boundary == m.rooms[i].boundary);
    CHECK(t.dividers[0].a == m.dividers[0].a);
    CHECK(t.dividers[0].b == m.dividers[0].b);
  }

  TEST_CASE("global translation shifts every vertex") {
    const SemanticMap m = fixture::two_room_map();
    const TrackedSemantics t = track_semantics(m, MotionEstimate::global(0.0, {1.0, 0.0}));
    for (std::size_t i = 0; i < m.rooms.size(); ++i)
      for (std::size_t k = 0; k < m.rooms[i].boundary.vertices.size(); ++k) {
        CHECK(t.rooms[i].boundary.vertices[k].x == doctest::Approx(m.rooms[i].boundary.vertices[k].x + 1.0));
        CHECK(t.rooms[i].boundary.vertices[k].y == doctest::Approx(m.rooms[i].boundary.vertices[k].y));
      }
  }

  TEST_CASE("two-region jitter matches direct transform application, seed 11") {
    std::mt19937 gen(11);
    std::uniform_real_distribution<double> jit(-2.0, 2.0);
    std::uniform_real_distribution<double> rot(-0.05, 0.05);
    const SemanticMap m = fixture::two_room_map();
    MotionEstimate motion;
    RegionMotion left{rot(gen), {jit(gen), jit(gen)}, {6.0, 7.0}, oracle::rect(-1.0, -1.0, 12.0, 15.0)};
    RegionMotion right{rot(gen), {jit(gen), jit(gen)}, {18.0, 7.0}, oracle::rect(-100.0, -100.0, 100.0, 100.0)};
    motion.regions = {left, right};
    const TrackedSemantics t = track_semantics(m, motion);
    for (std::size_t i = 0; i < m.rooms.size(); ++i)
      for (std::size_t k = 0; k < m.rooms[i].boundary.vertices.size(); ++k) {
        const Point p = m.rooms[i].boundary.vertices[k];
        const RegionMotion& r = oracle::inside(left.region, p) ? left : right;
        const Point want = apply_rigid(p, r.rotation, r.pivot, r.translation);
        CHECK(dist(t.rooms[i].boundary.vertices[k], want) < 1e-9);
      }
  }

  TEST_CASE("untracked point is an error") {
    const SemanticMap m = fixture::two_room_map();
    MotionEstimate motion;
    motion.regions.push_back(RegionMotion{0.0, {}, {}, oracle::rect(100.0, 100.0, 101.0, 101.0)});
    CHECK_THROWS_WITH_AS(track_semantics(m, motion), "untracked point", Error);
  }

  TEST_CASE("motion inverse round trip") {
    const MotionEstimate motion = MotionEstimate::global(0.3, {2.0, -1.5}, {4.0, 4.0});
    for (Point p : {Point{0.0, 0.0}, Point{5.5, 3.25}, Point{-7.0, 12.0}}) {
      const auto back = motion.invert(motion.apply(p));
      REQUIRE(back.has_value());
      CHECK(dist(*back, p) < 1e-9);
    }
  }

  TEST_CASE("relative motion composes with the earlier motion") {
    const MotionEstimate first = MotionEstimate::global(0.1, {1.0, 2.0}, {5.0, 5.0});
    const MotionEstimate second = MotionEstimate::global(-0.2, {0.5, -1.0}, {3.0, 8.0});
    const MotionEstimate rel = relative_motion(first, second);
    for (Point p : {Point{1.0, 1.0}, Point{10.0, 3.0}, Point{-4.0, 6.5}}) {
      const Point via = rel.apply(first.apply(p));
      CHECK(dist(via, second.apply(p)) < 1e-9);
    }
  }

  TEST_CASE("endpoint already on a wall is a fixed point") {
    const SemanticMap m = fixture::two_room_map();
    const Mask walls = m.grid.occupied();
    const auto p = snap_point({12.5, 4.5}, walls, {}, 20.0, m.grid.frame());
    REQUIRE(p.has_value());
    CHECK(*p == Point{12.5, 4.5});
  }

  TEST_CASE("endpoint one cell off a straight wall moves perpendicular onto it") {
    const OccupancyGrid g = fixture::box_grid(20, 16);
    const auto p = snap_point({7.5, 1.5}, g.occupied(), {}, 20.0, g.frame());
    REQUIRE(p.has_value());
    CHECK(*p == Point{7.5, 0.5});
  }

  TEST_CASE("snap matches exhaustive nearest-target search with the (y, x) tie rule") {
    std::mt19937 gen(41);
    std::uniform_real_distribution<double> coord(0.0, 20.0);
    const OccupancyGrid g = fixture::box_grid(20, 16);
    Mask walls = g.occupied();
    walls.set(9, 8);
    walls.set(10, 8);
    // Exactly equidistant between two wall cells: the lower one wins.
    Mask pair = fixture::box_grid(16, 16).occupied();
    pair.set(7, 10);
    pair.set(7, 6);
    const auto tie = snap_point({7.5, 8.5}, pair, {}, 20.0, GridFrame{16, 16, 1.0, {}});
    REQUIRE(tie.has_value());
    CHECK(*tie == Point{7.5, 6.5});
    for (int i = 0; i < 200; ++i) {
      const Point q{coord(gen), coord(gen) * 0.8};
      double best = 1e18;
      Point want{};
      for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 20; ++x) {
          if (!walls(x, y)) continue;
          const double d = dist(q, {x + 0.5, y + 0.5});
          if (d < best - 1e-12) {
            best = d;
            want = {x + 0.5, y + 0.5};
          }
        }
      const auto got = snap_point(q, walls, {}, 40.0, g.frame());
      REQUIRE(got.has_value());
      CHECK(*got == want);
    }
  }

  TEST_CASE("far endpoints leave the divider unplaced") {
    OccupancyGrid g(80, 80, 1.0, {}, CellState::Free);
    g.set(0, 0, CellState::Occupied);
    const std::vector<TrackedDivider> tracked{{7, {60.5, 60.5}, {70.5, 60.5}}};
    const SnapResult r = snap_dividers(tracked, g.occupied(), {}, Config{}, g.frame());
    CHECK(r.placed.empty());
    REQUIRE(r.unplaced.size() == 1);
    CHECK(r.unplaced[0] == 7);
  }

  TEST_CASE("identical grid and identity motion reproduce every room") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      HomeSpec spec;
      spec.seed = seed;
      const Home home = generate_home(spec);
      const SemanticMap prev = ground_truth_semantics(home);
      const SemanticMap copy = prev;
      const TransferResult t = transfer_semantics(prev, prev.grid, MotionEstimate::identity(), Config{});
      CHECK(prev == copy);
      CHECK(t.candidate.version == prev.version + 1);
      CHECK(t.candidate.meta.empty());
      const ConflictReport rep = detect_conflicts(prev, t.candidate, Config{});
      for (const auto& r : rep.rooms) {
        CHECK(r.precision == 1.0);
        CHECK(r.recall == 1.0);
      }
      for (const auto& d : prev.dividers) {
        const Divider* n = t.candidate.find_divider(d.id);
        REQUIRE(n != nullptr);
        CHECK(dist(n->a, d.a) <= Config{}.snap_distance * prev.grid.resolution());
        CHECK(dist(n->b, d.b) <= Config{}.snap_distance * prev.grid.resolution());
      }
    }
  }

  TEST_CASE("jittered scenario transfers every room") {
    const Scenario sc = scenario_jitter(1);
    const SimResult sim = simulate_mission(sc.home, sc.script);
    const TransferResult t = transfer_semantics(sc.prev, sim.grid, sim.motion, Config{});
    const ConflictReport rep = detect_conflicts(sc.prev, t.candidate, Config{}, &t.trace.tracked);
    CHECK(rep.success());
  }

  TEST_CASE("wall gaps merge rooms and lose recall") {
    const Scenario sc = scenario_wall_gaps(3);
    const SimResult sim = simulate_mission(sc.home, sc.script);
    const TransferResult t = transfer_semantics(sc.prev, sim.grid, sim.motion, Config{});
    const ConflictReport rep = detect_conflicts(sc.prev, t.candidate, Config{}, &t.trace.tracked);
    bool low = false;
    for (const auto& r : rep.rooms) low = low || r.recall < 0.5;
    CHECK(low);
  }

  TEST_CASE("global rigid motion keeps rooms within a rasterization band") {
    HomeSpec spec;
    spec.seed = 5;
    const Home home = generate_home(spec);
    const SemanticMap prev = ground_truth_semantics(home);
    MissionScript script;
    script.steps.push_back(JitterStep{{}, 0.0, {3.0 * prev.grid.resolution(), -2.0 * prev.grid.resolution()}, 0.0});
    const SimResult sim = simulate_mission(home, script);
    const TransferResult t = transfer_semantics(prev, sim.grid, sim.motion, Config{});
    const GridFrame& f = prev.grid.frame();
    for (const auto& tr : t.trace.tracked.rooms) {
      const Room* c = t.candidate.find_room(tr.id);
      REQUIRE(c != nullptr);
      const Mask want = rasterize_polygon(tr.boundary, f);
      const Mask got = rasterize_polygon(c->boundary, f);
      const auto o = oracle::pixel_overlap(want, got);
      const double agree = static_cast<double>(o.both) / static_cast<double>(o.both + o.a_only + o.b_only);
      CHECK(agree >= 0.98);
    }
  }
}
