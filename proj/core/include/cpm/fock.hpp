#pragma once

#include <string>
#include <vector>

namespace cpm {

/// Default bound on the exact tail mass discarded when truncating a state.
inline constexpr double kDefaultTailEps = 1e-12;

/// Diagonal density operator on a truncated Fock space: probs[n] is the
/// weight of |n><n| for n = 0..n_max. Superoperators in this library are
/// generally not trace preserving, so a state may carry total weight below 1;
/// `normalized` records whether the weights are meant to sum to one.
struct DiagonalFockState {
  std::vector<double> probs;
  double tail_mass = 0.0;  // exact mass of the untruncated state beyond n_max
  bool normalized = false;

  int n_max() const { return static_cast<int>(probs.size()) - 1; }
  double trace() const;
  double mean() const;

  double operator[](int n) const { return probs[static_cast<std::size_t>(n)]; }
  double& operator[](int n) { return probs[static_cast<std::size_t>(n)]; }
};

enum class StateFamily { coherent, number, thermal };

/// A named initial field state: family plus mean photon number.
struct StateKind {
  StateFamily family;
  double nbar;

  static StateKind coherent(double nbar) { return {StateFamily::coherent, nbar}; }
  static StateKind number(int n) { return {StateFamily::number, static_cast<double>(n)}; }
  static StateKind thermal(double nbar) { return {StateFamily::thermal, nbar}; }
};

std::string to_string(StateFamily family);

/// Poisson photon-number weights with mean nbar, renormalized over the
/// truncation window; the discarded exact tail mass is recorded.
DiagonalFockState coherent_state(double nbar, int n_max);

/// Point mass at photon number n. Throws if n does not fit the truncation.
DiagonalFockState number_state(int n, int n_max);

/// Geometric weights probs[n] ~ alpha^n with alpha = nbar/(nbar+1),
/// renormalized over the truncation window.
DiagonalFockState thermal_state(double nbar, int n_max);

/// Smallest n_max whose exact (untruncated) tail mass is below epsilon.
/// Number states return their photon number.
int truncation_for_tail(const StateKind& kind, double epsilon);

/// Convenience constructor; n_max < 0 selects truncation_for_tail(kind, eps).
DiagonalFockState make_state(const StateKind& kind, int n_max = -1,
                             double epsilon = kDefaultTailEps);

/// k-th factorial moment sum_n probs[n] * n!/(n-k)!, k >= 1. Terms with
/// n < k vanish. Evaluated through log-gamma so large n and k are safe.
double factorial_moment(const DiagonalFockState& state, int k);

}  // namespace cpm
