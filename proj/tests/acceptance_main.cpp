// Acceptance suite runner: one pass/fail line per criterion, exit 1 on any
// failure. Optional arguments: [n_trajectories] [seed] [threads].
#include <cstdlib>
#include <iostream>

#include "cpm/validation.hpp"

int main(int argc, char** argv) {
  cpm::ValidationOptions options;
  if (argc > 1) options.mc_trajectories = std::atol(argv[1]);
  if (argc > 2) options.seed = std::strtoull(argv[2], nullptr, 10);
  if (argc > 3) options.threads = std::atoi(argv[3]);

  const auto results = cpm::run_acceptance_criteria(options);
  const bool ok = cpm::print_report(std::cout, results);
  return ok ? 0 : 1;
}
