#pragma once

#include <optional>
#include <vector>

#include "cpm/detector.hpp"
#include "cpm/fock.hpp"

// Photodetection statistics for the jump superoperator J rho = lambda (eta
// a rho a^dagger + dark rho): no-count and unconditioned evolution, counting
// distribution and moments, waiting-time density, cavity photon number, the
// cavity-damped variant, and the dead-time truncation probe.
namespace cpm::sd {

/// phi_t = 1 - e^{-lambda t}.
double phi_t(const DetectorParams& params, double t);

/// No-count evolution; the trace of the result is the probability of zero
/// registered counts in (0, t). Not trace preserving.
DiagonalFockState no_count(const DiagonalFockState& state,
                           const DetectorParams& params, double t);

/// Unconditioned time evolution (detector on, outcomes discarded);
/// trace preserving.
DiagonalFockState ute(const DiagonalFockState& state,
                      const DetectorParams& params, double t);

/// P(m) for m registered counts in (0, t). m_max < 0 grows the support until
/// the captured mass exceeds 1 - 1e-12, capped at n_max + ceil(10 d lambda t) + 20;
/// any remainder is reported in CountDistribution::tail.
CountDistribution count_distribution(const DiagonalFockState& state,
                                     const DetectorParams& params, double t,
                                     int m_max = -1);

/// Phi_k(b, x) = sum_{n>=k} rho_n n!/(n-k)! (x + e^{-lambda b})^{n-k}.
double phi_k(const DiagonalFockState& state, const DetectorParams& params,
             double b, double x, int k);

/// Mean registered counts d lambda t + eta nbar phi_t.
double mean_counts(const DiagonalFockState& state, const DetectorParams& params,
                   double t);

/// Second factorial moment of the count distribution, closed form.
double second_factorial_moment(const DiagonalFockState& state,
                               const DetectorParams& params, double t);

/// K_t = m(m-1) / mean^2; empty when the mean is below 1e-12 (undefined at
/// the origin).
std::optional<double> k_factor(const DiagonalFockState& state,
                               const DetectorParams& params, double t);

/// Non-normalized waiting-time density W_t(tau) for consecutive clicks, the
/// first at time t (in units of lambda^2).
double waiting_density(const DiagonalFockState& state,
                       const DetectorParams& params, double t, double tau);

/// W_t(tau) sampled on a uniform grid over [0, window] with composite-Simpson
/// normalization and mean.
WaitingTimeCurve waiting_curve(const DiagonalFockState& state,
                               const DetectorParams& params, double t,
                               double window);

/// Mean waiting time over a finite averaging window; empty when the window
/// normalization vanishes.
std::optional<double> mean_waiting(const DiagonalFockState& state,
                                   const DetectorParams& params, double t,
                                   double window);

/// Mean cavity photon number at time t: nbar e^{-lambda t}.
double n_cav(const DiagonalFockState& state, const DetectorParams& params,
             double t);

/// No-count evolution with cavity damping lambda c; reduces to no_count for
/// c = 0.
DiagonalFockState no_count_damped(const DiagonalFockState& state,
                                  const DetectorParams& params, double t);

/// First moment of the dead-time counting formula evaluated at each Fock
/// truncation in `schedule`. The state is rebuilt at every truncation. A
/// sequence that keeps growing with the truncation exhibits the
/// non-normalizability of the dead-time construction for this model.
std::vector<double> dead_time_divergence_probe(const StateKind& kind,
                                               const DetectorParams& params,
                                               double t, double x,
                                               const std::vector<int>& schedule);

/// Phi_k of the waiting-time expansion, generic sum.
double phi_k_w(const DiagonalFockState& state, const DetectorParams& params,
               double t, double tau, int k);

/// Same quantity from the per-family closed form.
double phi_k_w_closed(const StateKind& kind, const DetectorParams& params,
                      double t, double tau, int k);

}  // namespace cpm::sd
