#include "semlife/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <iomanip>
#include <map>
#include <sstream>
#include <thread>

namespace semlife {

const ArmSummary* BenchReport::find(const std::string& arm) const {
  for (const auto& a : arms)
    if (a.arm == arm) return &a;
  return nullptr;
}

namespace {

using Clock = std::chrono::steady_clock;

std::vector<MissionResult> run_home(const Corpus& corpus, int h, Arm arm, const Config& cfg) {
  std::vector<MissionResult> out;
  Home home = generate_home(corpus.homes[static_cast<std::size_t>(h)]);
  SemanticMap map = bootstrap_map(home.sensed(), ground_truth_semantics(home, cfg), cfg);
  // Motion of the mission whose grid the current version was built on.
  MotionEstimate map_motion = MotionEstimate::identity();
  std::vector<const CorpusMission*> missions;
  for (const auto& m : corpus.missions)
    if (m.home == h) missions.push_back(&m);
  std::stable_sort(missions.begin(), missions.end(),
                   [](const CorpusMission* a, const CorpusMission* b) { return a->index < b->index; });

  for (const CorpusMission* m : missions) {
    const auto t0 = Clock::now();
    SimResult sim = simulate_mission(home, m->script);
    const MotionEstimate motion = relative_motion(map_motion, sim.motion);
    MissionOutcome outcome = process_mission(map, sim.grid, motion, nullptr, cfg, arm);

    MissionResult r;
    r.home = h;
    r.index = m->index;
    r.mission_class = m->script.mission_class;
    r.outcome = outcome.record.outcome;
    r.reason = outcome.record.reason;
    r.failed_rooms = outcome.record.conflicts.failed_rooms();
    r.passes = outcome.record.conflicts.passes;
    if (outcome.map) {
      map = std::move(*outcome.map);
      map_motion = sim.motion;
    }
    home = std::move(sim.next);
    r.elapsed_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

BenchReport run_benchmark(const Corpus& corpus, const std::vector<Arm>& arms, const Config& cfg, int threads) {
  cfg.validate();
  BenchReport report;
  report.spec = corpus.spec;
  report.config = cfg;
  const int homes = static_cast<int>(corpus.homes.size());
  const int workers = std::clamp(threads, 1, std::max(1, homes));

  for (Arm arm : arms) {
    const auto t0 = Clock::now();
    std::vector<std::vector<MissionResult>> per_home(static_cast<std::size_t>(homes));
    std::vector<std::string> errors(static_cast<std::size_t>(homes));
    std::atomic<int> next{0};
    auto work = [&] {
      for (int h = next++; h < homes; h = next++) {
        try {
          per_home[static_cast<std::size_t>(h)] = run_home(corpus, h, arm, cfg);
        } catch (const std::exception& e) {
          errors[static_cast<std::size_t>(h)] = e.what();
        }
      }
    };
    if (workers == 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (int i = 0; i < workers; ++i) pool.emplace_back(work);
      for (auto& t : pool) t.join();
    }
    for (int h = 0; h < homes; ++h)
      if (!errors[static_cast<std::size_t>(h)].empty())
        throw Error("home " + std::to_string(h) + ": " + errors[static_cast<std::size_t>(h)]);

    ArmSummary s;
    s.arm = to_string(arm);
    std::map<std::string, ClassCount> classes;
    for (auto& results : per_home)
      for (auto& r : results) {
        ClassCount& c = classes[r.mission_class];
        c.mission_class = r.mission_class;
        ++c.missions;
        ++s.missions;
        if (r.outcome == Outcome::Rejected) {
          ++c.failed;
          ++s.failed;
        }
        s.results.push_back(std::move(r));
      }
    for (auto& [name, c] : classes) s.by_class.push_back(c);
    s.error_rate = s.missions == 0 ? 0.0 : static_cast<double>(s.failed) / s.missions;
    s.elapsed_s = std::chrono::duration<double>(Clock::now() - t0).count();
    report.arms.push_back(std::move(s));
  }
  return report;
}

std::string format_table(const BenchReport& report) {
  std::ostringstream os;
  os << std::left << std::setw(10) << "arm" << std::right << std::setw(10) << "missions" << std::setw(8) << "failed"
     << std::setw(10) << "error %";
  std::vector<std::string> classes;
  for (const auto& a : report.arms)
    for (const auto& c : a.by_class)
      if (std::find(classes.begin(), classes.end(), c.mission_class) == classes.end())
        classes.push_back(c.mission_class);
  for (const auto& c : classes) os << std::setw(16) << c;
  os << "\n";
  for (const auto& a : report.arms) {
    os << std::left << std::setw(10) << a.arm << std::right << std::setw(10) << a.missions << std::setw(8) << a.failed
       << std::setw(10) << std::fixed << std::setprecision(2) << 100.0 * a.error_rate;
    for (const auto& name : classes) {
      std::string cell = "-";
      for (const auto& c : a.by_class)
        if (c.mission_class == name) cell = std::to_string(c.failed) + "/" + std::to_string(c.missions);
      os << std::setw(16) << cell;
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace semlife
