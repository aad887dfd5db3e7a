#pragma once

#include <cstdint>
#include <string>

#include "cpm/table.hpp"

namespace cpm::tools {

/// Shared experiment configuration; negative values mean "per-command
/// default". Time arguments are the dimensionless lambda*t (lambda itself is
/// never needed as an absolute rate).
struct ExperimentConfig {
  std::string model = "both";      // sd | e | both
  std::string state = "all";       // coherent | number | thermal | all
  double nbar = -1.0;
  double eta = 0.6;
  double dark = 5e-3;
  double cavity = 0.0;
  double tmin = -1.0;
  double tmax = -1.0;
  int points = -1;
  int nmax = -1;
  int mmax = -1;
  long traj = 100000;
  std::uint64_t seed = 20240817;
  int threads = 0;
  std::string out;
  std::string format = "csv";      // csv | json

  std::string to_json() const;
};

/// Mean registered counts versus time, per state family, for nbar 50 and 100
/// (or the single value given); the number-proportional model's column is
/// state independent.
Table figure1_table(const ExperimentConfig& config);

/// Normalized second factorial moment K_t versus time for the number and
/// thermal states (the coherent state sits at K = 1 for both models).
Table figure2_table(const ExperimentConfig& config);

/// Mean waiting time and cavity photon number versus time for the number and
/// thermal states, both models.
Table figure3_table(const ExperimentConfig& config);

/// Monte Carlo count moments with standard errors next to the analytic
/// values, for a single model and state.
Table trajectories_table(const ExperimentConfig& config);

}  // namespace cpm::tools
