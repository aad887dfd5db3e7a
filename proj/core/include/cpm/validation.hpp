#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace cpm {

struct CriterionResult {
  int index = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct ValidationOptions {
  long mc_trajectories = 100000;
  std::uint64_t seed = 20240817;
  int threads = 0;  // 0: hardware concurrency
};

/// Runs the full cross-validation suite (normalization, moment consistency,
/// Monte Carlo agreement, K-factor constants and limits, dual-path closed
/// forms, counting-time scaling, waiting-time regimes, dead-time truncation
/// probe, cavity damping, superoperator identities, determinism).
std::vector<CriterionResult> run_acceptance_criteria(
    const ValidationOptions& options = {});

/// One line per criterion; returns true when everything passed.
bool print_report(std::ostream& os, const std::vector<CriterionResult>& results);

}  // namespace cpm
