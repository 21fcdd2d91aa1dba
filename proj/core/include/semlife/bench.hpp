#pragma once

// Corpus evaluation: replay every home's mission sequence through the
// lifecycle and count failed updates per arm.

#include <string>
#include <vector>

#include "semlife/lifecycle.hpp"
#include "semlife/simulator.hpp"

namespace semlife {

struct MissionResult {
  int home = 0;
  int index = 0;
  std::string mission_class;
  Outcome outcome = Outcome::Rejected;
  std::string reason;
  std::vector<int> failed_rooms;
  int passes = 0;
  double elapsed_ms = 0.0;  ///< wall clock; not part of golden output
};

struct ClassCount {
  std::string mission_class;
  int missions = 0;
  int failed = 0;
};

struct ArmSummary {
  std::string arm;
  int missions = 0;
  int failed = 0;
  double error_rate = 0.0;  ///< failed / missions
  std::vector<ClassCount> by_class;
  std::vector<MissionResult> results;
  double elapsed_s = 0.0;  ///< wall clock; not part of golden output
};

struct BenchReport {
  CorpusSpec spec;
  Config config;
  std::vector<ArmSummary> arms;

  const ArmSummary* find(const std::string& arm) const;
};

/// Each home starts from its ground-truth semantics. A mission's motion is
/// taken relative to the mission that produced the current map version, so
/// a rejected mission leaves the next one tracking from the older frame.
/// Homes run on up to `threads` worker threads; results do not depend on
/// the thread count.
BenchReport run_benchmark(const Corpus& corpus, const std::vector<Arm>& arms, const Config& cfg, int threads = 1);

/// Fixed-width text table of the per-arm error rates.
std::string format_table(const BenchReport& report);

}  // namespace semlife
