#pragma once

#include <vector>

namespace cpm {

/// Detector and cavity parameters. All rates are expressed through the ideal
/// counting rate lambda; eta is the quantum efficiency, dark the dark-count
/// rate ratio, cavity the cavity-damping rate ratio, and dead_time the
/// detector blind interval after a click (used only by the divergence probe).
struct DetectorParams {
  double lambda = 1.0;
  double eta = 1.0;
  double dark = 0.0;
  double cavity = 0.0;
  double dead_time = 0.0;

  double q() const { return 1.0 - eta; }            // undetected fraction
  double p() const { return 1.0 + cavity; }          // total damping ratio
  double q_tilde() const { return 1.0 - eta + cavity; }

  void validate() const;
};

/// Probabilities P(m) of registering exactly m counts in (0, t), for
/// m = 0..m_max, plus the residual mass beyond m_max.
struct CountDistribution {
  std::vector<double> probs;
  double tail = 0.0;
  double t = 0.0;

  int m_max() const { return static_cast<int>(probs.size()) - 1; }
  double mean() const;
  double second_factorial() const;
};

/// Waiting-time density sampled on a uniform tau grid, together with its
/// window normalization and normalized mean.
struct WaitingTimeCurve {
  std::vector<double> tau;
  std::vector<double> density;
  double normalization = 0.0;
  double mean_tau = 0.0;
};

/// Composite Simpson weightings for the fixed grids used by the waiting-time
/// averages. `values` must have odd size >= 3; returns the integral over the
/// uniform grid with spacing h.
double simpson(const std::vector<double>& values, double h);

}  // namespace cpm
