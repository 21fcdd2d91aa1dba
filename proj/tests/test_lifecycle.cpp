#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "semlife/io.hpp"
#include "semlife/lifecycle.hpp"
#include "semlife/simulator.hpp"

using namespace semlife;

namespace {

struct Robot {
  fixture::TempDir dir;
  Store store{dir.path};
  Scenario sc;
  Config cfg;

  explicit Robot(Scenario s) : sc(std::move(s)) { bootstrap(store, "r1", sc.prev.grid, sc.prev, cfg); }
};

// Everything that defines the current map: the manifest and every version.
std::uint64_t state_hash(const Store& store, const std::string& robot) {
  std::uint64_t h = 0;
  for (int v : store.versions(robot)) h = h * 31 + fixture::hash_tree(store.version_dir(robot, v));
  return h * 31 + std::hash<std::string>{}(fixture::slurp(store.robot_dir(robot) / "manifest.json"));
}

SimResult failing_mission(const Scenario& sc) { return simulate_mission(sc.home, sc.script); }

}  // namespace

TEST_SUITE("lifecycle") {
  TEST_CASE("identity mission is accepted and keeps the semantics") {
    Robot r(scenario_three_rooms(2));
    const SemanticMap before = r.store.load_current("r1");
    const MissionRecord rec =
        run_mission(r.store, "r1", before.grid, MotionEstimate::identity(), nullptr, r.cfg, Arm::Full);
    CHECK(rec.outcome == Outcome::Accepted);
    CHECK(rec.reason.empty());
    CHECK(rec.mission == 1);
    CHECK(rec.version_after == before.version + 1);
    const SemanticMap after = r.store.load_current("r1");
    CHECK(after.version == before.version + 1);
    REQUIRE(after.rooms.size() == before.rooms.size());
    for (const auto& room : before.rooms) {
      const Room* n = after.find_room(room.id);
      REQUIRE(n != nullptr);
      CHECK(n->label == room.label);
      CHECK(rasterize_polygon(n->boundary, after.grid.frame()) == rasterize_polygon(room.boundary, before.grid.frame()));
    }
    for (const auto& d : before.dividers) {
      const Divider* n = after.find_divider(d.id);
      REQUIRE(n != nullptr);
      const double tol = r.cfg.snap_distance * before.grid.resolution() + 1e-9;
      CHECK(std::hypot(n->a.x - d.a.x, n->a.y - d.a.y) <= tol);
      CHECK(std::hypot(n->b.x - d.b.x, n->b.y - d.b.y) <= tol);
    }
  }

  TEST_CASE("unresolvable merge is rejected and the store is untouched") {
    Robot r(scenario_wall_gap(2, 4));
    const std::uint64_t before = state_hash(r.store, "r1");
    const SimResult sim = failing_mission(r.sc);
    const MissionRecord rec = run_mission(r.store, "r1", sim.grid, sim.motion, nullptr, r.cfg, Arm::Baseline);
    CHECK(rec.outcome == Outcome::Rejected);
    CHECK(rec.reason.find("conflicts unresolved") != std::string::npos);
    CHECK(rec.version_after == rec.version_before);
    CHECK(r.store.current_version("r1") == 0);
    CHECK(state_hash(r.store, "r1") == before);
    CHECK(r.store.records("r1").size() == 1);
  }

  TEST_CASE("rename annotation is applied") {
    Robot r(scenario_three_rooms(1));
    const SemanticMap cur = r.store.load_current("r1");
    const int id = cur.rooms.front().id;
    AnnotationFile ann;
    ann.actions.push_back({"rename_room", id, "Kitchen", {}, {}});
    const MissionRecord rec = run_mission(r.store, "r1", cur.grid, MotionEstimate::identity(), &ann, r.cfg, Arm::Full);
    REQUIRE(rec.outcome == Outcome::Accepted);
    CHECK(rec.annotations.applied == std::vector<int>{0});
    CHECK(r.store.load_current("r1").find_room(id)->label == "Kitchen");
  }

  TEST_CASE("invalid annotations are reported and skipped") {
    SemanticMap m = fixture::two_room_map();
    const SemanticMap copy = m;
    AnnotationFile ann;
    ann.actions.push_back({"rename_room", 999, "Attic", {}, {}});
    ann.actions.push_back({"remove_divider", 42, "", {}, {}});
    ann.actions.push_back({"add_divider", -1, "", {3.5, 3.5}, {5.5, 5.5}});  // floats in free space
    ann.actions.push_back({"paint", -1, "", {}, {}});
    const AnnotationResult res = apply_annotations(m, ann, Config{});
    CHECK(res.applied.empty());
    REQUIRE(res.invalid.size() == 4);
    CHECK(res.invalid[0].second.find("999") != std::string::npos);
    CHECK(res.invalid[2].second.find("breaks constraint") != std::string::npos);
    CHECK(m == copy);
  }

  TEST_CASE("removing the doorway divider merges the rooms") {
    SemanticMap m = fixture::two_room_map();
    AnnotationFile ann;
    ann.actions.push_back({"remove_divider", 1, "", {}, {}});
    const AnnotationResult res = apply_annotations(m, ann, Config{});
    CHECK(res.applied == std::vector<int>{0});
    CHECK(m.dividers.empty());
    CHECK(m.rooms.size() == 1);
    CHECK(validate_constraints(m, Config{}).ok());
  }

  TEST_CASE("user can reject an otherwise clean update") {
    Robot r(scenario_three_rooms(3));
    const std::uint64_t before = state_hash(r.store, "r1");
    AnnotationFile ann;
    ann.actions.push_back({"reject_update", -1, "", {}, {}});
    const SemanticMap cur = r.store.load_current("r1");
    const MissionRecord rec = run_mission(r.store, "r1", cur.grid, MotionEstimate::identity(), &ann, r.cfg, Arm::Full);
    CHECK(rec.outcome == Outcome::Rejected);
    CHECK(rec.reason == "update rejected by user");
    CHECK(state_hash(r.store, "r1") == before);
  }

  TEST_CASE("bootstrap without a seed finds one room per chamber") {
    HomeSpec spec;
    spec.seed = 4;
    spec.chambers = 4;
    spec.hallway = false;
    spec.hidden_corridor = false;
    const Home home = generate_home(spec);
    const SemanticMap m = bootstrap_map(home.sensed(), std::nullopt, Config{});
    CHECK(m.version == 0);
    CHECK(m.rooms.size() == 4);
    CHECK(validate_constraints(m, Config{}).ok());
  }

  TEST_CASE("single enclosure bootstraps to one room") {
    const SemanticMap m = bootstrap_map(fixture::box_grid(30, 20), std::nullopt, Config{});
    REQUIRE(m.rooms.size() == 1);
    CHECK(m.dividers.empty());
  }

  TEST_CASE("seed semantics are kept verbatim") {
    const SemanticMap seed = fixture::two_room_map();
    const SemanticMap m = bootstrap_map(seed.grid, seed, Config{});
    CHECK(m.dividers == seed.dividers);
    REQUIRE(m.rooms.size() == seed.rooms.size());
    for (std::size_t i = 0; i < m.rooms.size(); ++i) {
      CHECK(m.rooms[i].id == seed.rooms[i].id);
      CHECK(m.rooms[i].label == seed.rooms[i].label);
    }
  }

  TEST_CASE("grid without enclosed free space cannot bootstrap") {
    const OccupancyGrid g(20, 20, 1.0, {}, CellState::Unknown);
    CHECK_THROWS_WITH_AS(bootstrap_map(g, std::nullopt, Config{}), "no enclosed free space", Error);
  }

  TEST_CASE("bootstrapping an existing robot is an error") {
    fixture::TempDir dir;
    Store store(dir.path);
    bootstrap(store, "r1", fixture::two_room_grid(), std::nullopt, Config{});
    CHECK_THROWS_AS(bootstrap(store, "r1", fixture::two_room_grid(), std::nullopt, Config{}), Error);
  }

  TEST_CASE("history of a fresh robot has version 0 and no records") {
    fixture::TempDir dir;
    Store store(dir.path);
    bootstrap(store, "r1", fixture::two_room_grid(), std::nullopt, Config{});
    const History h = history(store, "r1");
    CHECK(h.versions == std::vector<int>{0});
    CHECK(h.records.empty());
  }

  TEST_CASE("three accepted missions give four versions") {
    Robot r(scenario_three_rooms(1));
    for (int i = 0; i < 3; ++i) {
      const SemanticMap cur = r.store.load_current("r1");
      CHECK(run_mission(r.store, "r1", cur.grid, MotionEstimate::identity(), nullptr, r.cfg, Arm::Full).outcome ==
            Outcome::Accepted);
    }
    const History h = history(r.store, "r1");
    CHECK(h.versions == std::vector<int>{0, 1, 2, 3});
    CHECK(h.records.size() == 3);
  }

  TEST_CASE("accept, reject, accept") {
    Robot r(scenario_wall_gap(1, 4));
    const SimResult bad = failing_mission(r.sc);
    auto identity = [&] {
      const SemanticMap cur = r.store.load_current("r1");
      return run_mission(r.store, "r1", cur.grid, MotionEstimate::identity(), nullptr, r.cfg, Arm::Baseline);
    };
    CHECK(identity().outcome == Outcome::Accepted);
    CHECK(run_mission(r.store, "r1", bad.grid, bad.motion, nullptr, r.cfg, Arm::Baseline).outcome ==
          Outcome::Rejected);
    CHECK(identity().outcome == Outcome::Accepted);
    const History h = history(r.store, "r1");
    CHECK(h.versions == std::vector<int>{0, 1, 2});
    REQUIRE(h.records.size() == 3);
    CHECK(h.records[1].mission == 2);
    CHECK(h.records[1].outcome == Outcome::Rejected);
    CHECK(h.records[2].mission == 3);
    CHECK(h.records[2].version_after == 2);
    CHECK(mission_record_from_json(fixture::slurp(r.store.version_dir("r1", 2) / "record.json")).mission == 3);
  }

  TEST_CASE("second writer is locked out") {
    fixture::TempDir dir;
    Store store(dir.path);
    bootstrap(store, "r1", fixture::two_room_grid(), std::nullopt, Config{});
    {
      StoreLock held(store, "r1");
      CHECK_THROWS_AS(StoreLock(store, "r1"), Error);
      const OccupancyGrid g = fixture::two_room_grid();
      CHECK_THROWS_AS(run_mission(store, "r1", g, MotionEstimate::identity(), nullptr, Config{}, Arm::Full), Error);
    }
    StoreLock again(store, "r1");
  }

  TEST_CASE("unknown robot is an error") {
    fixture::TempDir dir;
    Store store(dir.path);
    CHECK_FALSE(store.has_robot("ghost"));
    CHECK_THROWS_AS(store.current_version("ghost"), Error);
    CHECK_THROWS_AS(history(store, "ghost"), Error);
  }
}
