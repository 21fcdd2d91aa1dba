#include <doctest.h>
#include <json.hpp>
#include <sys/wait.h>

#include <cstdlib>

#include "fixtures.hpp"
#include "semlife/io.hpp"

using namespace semlife;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run cli(const fs::path& work, const std::string& args) {
  const fs::path out = work / "stdout.txt";
  const fs::path err = work / "stderr.txt";
  const std::string cmd = std::string("\"") + SEMLIFE_CLI_PATH + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                          err.string() + "\"";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = fixture::slurp(out);
  r.err = fixture::slurp(err);
  return r;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

// Store with robot r1 bootstrapped from the scenario's version-0 map.
void seed_store(const fs::path& work, const Scenario& sc) {
  write_grid(sc.prev.grid, work / "grid0.pgm");
  fixture::spit(work / "sem0.json", semantics_to_json(sc.prev, Config{}));
  const Run r = cli(work, "bootstrap --store " + q(work / "store") + " --robot r1 --grid " + q(work / "grid0.pgm") +
                              " --semantics " + q(work / "sem0.json"));
  REQUIRE_MESSAGE(r.code == 0, r.err);
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("help exits 0") {
    fixture::TempDir dir;
    CHECK(cli(dir.path, "--help").code == 0);
    CHECK(cli(dir.path, "run --help").code == 0);
  }

  TEST_CASE("unknown subcommand or missing option exits 1") {
    fixture::TempDir dir;
    CHECK(cli(dir.path, "frobnicate").code == 1);
    CHECK(cli(dir.path, "run --robot r1").code == 1);
  }

  TEST_CASE("identity run is accepted") {
    fixture::TempDir dir;
    const Scenario sc = scenario_three_rooms(1);
    seed_store(dir.path, sc);
    const Run r = cli(dir.path, "run --store " + q(dir.path / "store") + " --robot r1 --grid " + q(dir.path / "grid0.pgm"));
    CHECK(r.code == 0);
    const MissionRecord rec = mission_record_from_json(r.out);
    CHECK(rec.outcome == Outcome::Accepted);
    CHECK(rec.version_after == 1);
    CHECK(Store(dir.path / "store").current_version("r1") == 1);
  }

  TEST_CASE("unresolvable run exits 2 and keeps the version") {
    fixture::TempDir dir;
    const Scenario sc = scenario_wall_gap(2, 4);
    seed_store(dir.path, sc);
    const SimResult sim = simulate_mission(sc.home, sc.script);
    write_grid(sim.grid, dir.path / "grid1.pgm");
    fixture::spit(dir.path / "motion.json", to_json(sim.motion));
    const Run r = cli(dir.path, "run --store " + q(dir.path / "store") + " --robot r1 --grid " +
                                    q(dir.path / "grid1.pgm") + " --motion " + q(dir.path / "motion.json") +
                                    " --arm baseline");
    CHECK(r.code == 2);
    CHECK(mission_record_from_json(r.out).outcome == Outcome::Rejected);
    CHECK(Store(dir.path / "store").current_version("r1") == 0);
  }

  TEST_CASE("malformed PGM exits 1 and names the offset") {
    fixture::TempDir dir;
    const Scenario sc = scenario_three_rooms(1);
    seed_store(dir.path, sc);
    fixture::spit(dir.path / "bad.pgm", "P5\n10 zz\n255\n");
    const Run r = cli(dir.path, "run --store " + q(dir.path / "store") + " --robot r1 --grid " + q(dir.path / "bad.pgm"));
    CHECK(r.code == 1);
    CHECK(r.err.find("byte offset") != std::string::npos);
  }

  TEST_CASE("validate: pristine, corrupted, garbage") {
    fixture::TempDir dir;
    const Scenario sc = scenario_three_rooms(2);
    seed_store(dir.path, sc);
    const fs::path v0 = Store(dir.path / "store").version_dir("r1", 0);
    CHECK(cli(dir.path, "validate " + q(v0)).code == 0);

    REQUIRE_FALSE(sc.prev.dividers.empty());
    auto doc = nlohmann::json::parse(fixture::slurp(v0 / "semantics.json"));
    auto& div = doc["dividers"][0];
    const int id = div["id"];
    // Pull one endpoint well away from any wall.
    const Room& room = sc.prev.rooms.front();
    const auto c = rasterize_polygon(room.boundary, sc.prev.grid.frame());
    Point inner{};
    double best = -1.0;
    const Mask walls = sc.prev.grid.occupied();
    const auto dist = distance_field(walls);
    for (int y = 0; y < c.height(); ++y)
      for (int x = 0; x < c.width(); ++x)
        if (c(x, y) && dist(x, y) > best) {
          best = dist(x, y);
          inner = sc.prev.grid.frame().cell_center({x, y});
        }
    div["b"] = {inner.x, inner.y};
    fixture::spit(v0 / "semantics.json", doc.dump(2));
    const Run bad = cli(dir.path, "validate " + q(v0));
    CHECK(bad.code == 2);
    CHECK(bad.out.find("\"id\": " + std::to_string(id)) != std::string::npos);

    fixture::spit(v0 / "semantics.json", "{\"dividers\": [ {\"a\": 3");
    CHECK(cli(dir.path, "validate " + q(v0)).code == 1);
  }

  TEST_CASE("render writes SVG; unknown version exits 1") {
    fixture::TempDir dir;
    seed_store(dir.path, scenario_three_rooms(1));
    const fs::path v0 = Store(dir.path / "store").version_dir("r1", 0);
    CHECK(cli(dir.path, "render " + q(v0) + " --out " + q(dir.path / "m.svg")).code == 0);
    CHECK(fixture::slurp(dir.path / "m.svg").find("<svg ") != std::string::npos);
    const Run r = cli(dir.path, "render " + q(v0.parent_path() / "v0042") + " --out " + q(dir.path / "x.svg"));
    CHECK(r.code == 1);
    CHECK(r.err.find("error:") != std::string::npos);
  }

  TEST_CASE("corpus tools") {
    fixture::TempDir dir;
    CHECK(cli(dir.path, "bench --corpus " + q(dir.path / "nowhere")).code == 1);
    const fs::path corpus = dir.path / "corpus";
    REQUIRE(cli(dir.path, "build-corpus --out " + q(corpus) + " --homes 1 --missions 2").code == 0);
    const Run b = cli(dir.path, "bench --corpus " + q(corpus) + " --arms baseline,full --table --out " +
                                    q(dir.path / "bench.json"));
    CHECK(b.code == 0);
    CHECK(b.out.find("baseline") != std::string::npos);
    CHECK(bench_report_from_json(fixture::slurp(dir.path / "bench.json")).arms.size() == 2);
    CHECK(cli(dir.path, "bench --corpus " + q(corpus) + " --arms sideways").code == 1);
    const Run s = cli(dir.path, "simulate --corpus " + q(corpus) + " --home 0 --out " + q(dir.path / "home0"));
    CHECK(s.code == 0);
    CHECK(fs::exists(dir.path / "home0" / "grid.pgm"));
    CHECK(fs::exists(dir.path / "home0" / "mission_01" / "motion.json"));
  }
}
