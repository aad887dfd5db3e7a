#pragma once

#include <optional>

#include "cpm/detector.hpp"
#include "cpm/fock.hpp"

// Photodetection statistics for the jump superoperator J rho = lambda (eta
// E_- rho E_+ + dark rho), where the click rate tracks the probability of
// having any photon at all rather than the photon number. The no-count map
// has a vacuum-projector correction on top of R_t = e^{-lambda t (1 - q Eps)};
// everything downstream is assembled from that structure.
//
// The Xi_k, Omega and Psi_k functionals come in two flavours: the generic
// Fock sums below, and per-family closed forms (xi_k_closed, ...) used as the
// independent evaluation route.
namespace cpm::emodel {

DiagonalFockState no_count(const DiagonalFockState& state,
                           const DetectorParams& params, double t);

/// Trace-preserving unconditioned evolution (eta = dark = 0 limit of the
/// no-count map).
DiagonalFockState ute(const DiagonalFockState& state,
                      const DetectorParams& params, double t);

/// P(m) for m registered counts in (0, t). Same support policy as the other
/// model: m_max < 0 grows until mass 1 - 1e-12 is captured, capped at
/// n_max + ceil(10 d lambda t) + 20.
CountDistribution count_distribution(const DiagonalFockState& state,
                                     const DetectorParams& params, double t,
                                     int m_max = -1);

/// Xi_k(t) = (e^{-lt}/nbar) sum_{n,m} (n+1) (lt)^m/m! rho_{n+m+k}, k >= 1.
/// Empty when the state has no photons (nbar = 0).
std::optional<double> xi_k(const DiagonalFockState& state,
                           const DetectorParams& params, double t, int k);

/// Omega(t) = (e^{-lt}/M2) sum_{n,m} n(n-1) (lt)^m/m! rho_{n+m} with
/// M2 the second factorial moment; empty when M2 = 0.
std::optional<double> omega(const DiagonalFockState& state,
                            const DetectorParams& params, double t);

/// Psi_k(q, beta) = sum_{n,l} q^n (lambda beta)^l / l! rho_{n+l+k}; the time
/// enters only through lambda_beta = lambda * beta.
double psi_k(const DiagonalFockState& state, double q, double lambda_beta,
             int k);

/// Mean counts d lambda t + eta nbar (1 - Xi_1). The (1 - Xi_1) factor is
/// accumulated from Poisson survival terms so it keeps full relative
/// accuracy at small t.
double mean_counts(const DiagonalFockState& state, const DetectorParams& params,
                   double t);

/// Second factorial moment (dlt)^2 + 2 eta nbar dlt (1 - Xi_1)
/// + eta^2 [M2 (1 - Omega) - 2 nbar lt Xi_2], with the bracket evaluated in
/// a rearranged form whose terms are all positive (the O(t) parts of the two
/// contributions cancel exactly).
double second_factorial_moment(const DiagonalFockState& state,
                               const DetectorParams& params, double t);

/// K_t = m(m-1)/mean^2; empty when the mean is below 1e-12.
std::optional<double> k_factor(const DiagonalFockState& state,
                               const DetectorParams& params, double t);

/// Small-t limit of K_t at zero dark rate: (1 - rho_0 - rho_1)/(1 - rho_0)^2.
/// Empty for states with no photons.
std::optional<double> k_limit_origin(const DiagonalFockState& state);

/// Non-normalized waiting-time density W_t(tau) (includes the lambda^2 scale
/// of the two jump factors).
double waiting_density(const DiagonalFockState& state,
                       const DetectorParams& params, double t, double tau);

WaitingTimeCurve waiting_curve(const DiagonalFockState& state,
                               const DetectorParams& params, double t,
                               double window);

std::optional<double> mean_waiting(const DiagonalFockState& state,
                                   const DetectorParams& params, double t,
                                   double window);

/// Averaging window 10/(eta lambda) used for the mean-waiting-time scans.
double default_waiting_window(const DetectorParams& params);

/// Mean cavity photon number nbar Xi_1(t); zero for the vacuum.
double n_cav(const DiagonalFockState& state, const DetectorParams& params,
             double t);

/// Closed forms per state family (Bessel series for coherent states,
/// incomplete-gamma ratios for number states, scalar eigenrelation for
/// thermal states).
double xi_k_closed(const StateKind& kind, const DetectorParams& params,
                   double t, int k);
double omega_closed(const StateKind& kind, const DetectorParams& params,
                    double t);
double psi_k_closed(const StateKind& kind, double q, double lambda_beta, int k);

}  // namespace cpm::emodel
