#include <doctest.h>

#include <map>
#include <set>

#include "fixtures.hpp"
#include "semlife/io.hpp"
#include "semlife/simulator.hpp"

using namespace semlife;

TEST_SUITE("simulator") {
  TEST_CASE("two chambers give two rooms") {
    HomeSpec spec;
    spec.seed = 1;
    spec.chambers = 2;
    spec.hallway = false;
    spec.hidden_corridor = false;
    const Home home = generate_home(spec);
    CHECK(ground_truth_semantics(home).rooms.size() == 2);
  }

  TEST_CASE("same seed, same home") {
    HomeSpec spec;
    spec.seed = 77;
    CHECK(generate_home(spec).sensed() == generate_home(spec).sensed());
    spec.seed = 78;
    HomeSpec other = spec;
    other.seed = 79;
    CHECK_FALSE(generate_home(spec).sensed() == generate_home(other).sensed());
  }

  TEST_CASE("room adjacency of seed 42 is connected") {
    HomeSpec spec;
    spec.seed = 42;
    spec.chambers = 6;
    const Home home = generate_home(spec);
    // Reachability over door and opening links between visible chambers.
    std::map<int, std::set<int>> links;
    for (const auto& d : home.doors) {
      links[d.chamber_a].insert(d.chamber_b);
      links[d.chamber_b].insert(d.chamber_a);
    }
    std::set<int> visible;
    for (const auto& c : home.chambers)
      if (!c.hidden) visible.insert(c.id);
    REQUIRE(visible.size() == 6);
    std::set<int> seen{*visible.begin()};
    std::vector<int> stack{*visible.begin()};
    while (!stack.empty()) {
      const int c = stack.back();
      stack.pop_back();
      for (int n : links[c])
        if (visible.count(n) && seen.insert(n).second) stack.push_back(n);
    }
    CHECK(seen == visible);
  }

  TEST_CASE("infeasible spec is an error") {
    HomeSpec spec;
    spec.width = 30;
    spec.height = 30;
    spec.chambers = 12;
    CHECK_THROWS_AS(generate_home(spec), Error);
  }

  TEST_CASE("empty script: same grid, identity motion") {
    HomeSpec spec;
    spec.seed = 3;
    const Home home = generate_home(spec);
    const SimResult r = simulate_mission(home, MissionScript{});
    CHECK(r.grid == home.sensed());
    const Point p{1.234, 2.5};
    CHECK(r.motion.apply(p) == p);
  }

  TEST_CASE("removing a four-cell wall section frees four cells") {
    HomeSpec spec;
    spec.seed = 5;
    const Home home = generate_home(spec);
    const Chamber& c = home.chambers.front();
    MissionScript s;
    s.steps.push_back(RemoveWallStep{{c.interior.x0 + 2, c.interior.y0 - 1, c.interior.x0 + 6, c.interior.y0}});
    const SimResult r = simulate_mission(home, s);
    const Mask before = home.sensed().occupied();
    const Mask after = r.grid.occupied();
    CHECK((before - after).count() == 4);
    CHECK((after - before).none());
  }

  TEST_CASE("noise-free translation shifts the grid") {
    HomeSpec spec;
    spec.seed = 6;
    const Home home = generate_home(spec);
    MissionScript s;
    const double res = home.frame.resolution;
    s.steps.push_back(JitterStep{{}, 0.0, {3.0 * res, 0.0}, 0.0});
    const SimResult r = simulate_mission(home, s);
    const OccupancyGrid prev = home.sensed();
    int compared = 0;
    for (int y = 0; y < prev.height(); ++y)
      for (int x = 0; x + 3 < prev.width(); ++x) {
        CHECK(r.grid(x + 3, y) == prev(x, y));
        ++compared;
      }
    CHECK(compared > 0);
    const Point p{2.0, 1.0};
    const Point q = r.motion.apply(p);
    CHECK(q.x == doctest::Approx(p.x + 3.0 * res));
    CHECK(q.y == doctest::Approx(p.y));
  }

  TEST_CASE("jitter with zero noise aligns the tracked semantics") {
    HomeSpec spec;
    spec.seed = 8;
    const Home home = generate_home(spec);
    const SemanticMap prev = ground_truth_semantics(home);
    MissionScript s;
    s.steps.push_back(JitterStep{{}, 0.02, {2.0 * home.frame.resolution, -1.0 * home.frame.resolution}, 0.0});
    const SimResult r = simulate_mission(home, s);
    CHECK(r.motion == r.true_motion);
    const TransferResult t = transfer_semantics(prev, r.grid, r.motion, Config{});
    CHECK(detect_conflicts(prev, t.candidate, Config{}, &t.trace.tracked).success());
  }

  TEST_CASE("unknown door or clutter id is an error") {
    HomeSpec spec;
    const Home home = generate_home(spec);
    MissionScript s;
    s.steps.push_back(ToggleDoorStep{999, false});
    CHECK_THROWS_AS(simulate_mission(home, s), Error);
    MissionScript c;
    c.steps.push_back(RemoveClutterStep{999});
    CHECK_THROWS_AS(simulate_mission(home, c), Error);
  }

  TEST_CASE("replays are identical") {
    const Scenario sc = scenario_jitter(2);
    const SimResult a = simulate_mission(sc.home, sc.script);
    const SimResult b = simulate_mission(sc.home, sc.script);
    CHECK(a.grid == b.grid);
    CHECK(a.motion == b.motion);
    CHECK(a.room_truth == b.room_truth);
  }

  TEST_CASE("ground-truth rooms partition the free space") {
    const Scenario sc = scenario_new_chamber(1);
    const SimResult r = simulate_mission(sc.home, sc.script);
    for (const Home* h : {&sc.home, &r.next}) {
      const auto truth = h->truth();
      const auto rooms = h->room_truth();
      for (std::size_t i = 0; i < truth.size(); ++i) CHECK((truth[i] == CellState::Free) == (rooms[i] >= 0));
    }
  }

  TEST_CASE("corpus size and mix") {
    CorpusSpec spec;
    const Corpus c = build_corpus(spec);
    CHECK(c.missions.size() == 300);
    CHECK(c.homes.size() == 20);
    std::map<std::string, int> counts;
    for (const auto& m : c.missions) ++counts[m.script.mission_class];
    CHECK(std::abs(counts["jitter"] - 180) <= 1);
    CHECK(std::abs(counts["disconnection"] - 60) <= 1);
    CHECK(std::abs(counts["connection"] - 30) <= 1);
    CHECK(std::abs(counts["exploration"] - 30) <= 1);
  }

  TEST_CASE("two builds give identical manifests") {
    CorpusSpec spec;
    spec.homes = 3;
    spec.missions_per_home = 5;
    CHECK(corpus_manifest_json(build_corpus(spec)) == corpus_manifest_json(build_corpus(spec)));
    CorpusSpec other = spec;
    other.seed = spec.seed + 1;
    CHECK(corpus_manifest_json(build_corpus(spec)) != corpus_manifest_json(build_corpus(other)));
  }

  TEST_CASE("mission classes are counted from the written manifest") {
    fixture::TempDir dir;
    CorpusSpec spec;
    spec.homes = 4;
    spec.missions_per_home = 5;
    write_corpus(build_corpus(spec), dir.path);
    const Corpus back = read_corpus(dir.path);
    CHECK(back.missions.size() == 20);
    std::map<std::string, int> counts;
    for (const auto& m : back.missions) ++counts[m.script.mission_class];
    CHECK(std::abs(counts["jitter"] - 12) <= 1);
    CHECK(std::abs(counts["disconnection"] - 4) <= 1);
    CHECK(std::abs(counts["connection"] - 2) <= 1);
    CHECK(std::abs(counts["exploration"] - 2) <= 1);
  }
}
