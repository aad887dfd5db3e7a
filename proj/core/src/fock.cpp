#include "cpm/fock.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cpm/special.hpp"

namespace cpm {

double DiagonalFockState::trace() const {
  return std::accumulate(probs.begin(), probs.end(), 0.0);
}

double DiagonalFockState::mean() const {
  double m = 0.0;
  for (std::size_t n = 1; n < probs.size(); ++n) m += n * probs[n];
  return m;
}

std::string to_string(StateFamily family) {
  switch (family) {
    case StateFamily::coherent: return "coherent";
    case StateFamily::number: return "number";
    case StateFamily::thermal: return "thermal";
  }
  return "?";
}

DiagonalFockState coherent_state(double nbar, int n_max) {
  if (nbar < 0.0) throw std::domain_error("coherent_state: nbar < 0");
  if (n_max < 0) throw std::domain_error("coherent_state: n_max < 0");
  DiagonalFockState s;
  s.probs.resize(n_max + 1);
  if (nbar == 0.0) {
    s.probs[0] = 1.0;
  } else {
    const double lnbar = std::log(nbar);
    for (int n = 0; n <= n_max; ++n) {
      s.probs[n] = std::exp(n * lnbar - nbar - special::log_factorial(n));
    }
  }
  const double kept = s.trace();
  s.tail_mass = std::max(0.0, 1.0 - kept);
  for (double& p : s.probs) p /= kept;
  s.normalized = true;
  return s;
}

DiagonalFockState number_state(int n, int n_max) {
  if (n < 0) throw std::domain_error("number_state: n < 0");
  if (n > n_max) throw std::domain_error("number_state: n exceeds truncation");
  DiagonalFockState s;
  s.probs.assign(n_max + 1, 0.0);
  s.probs[n] = 1.0;
  s.tail_mass = 0.0;
  s.normalized = true;
  return s;
}

DiagonalFockState thermal_state(double nbar, int n_max) {
  if (nbar < 0.0) throw std::domain_error("thermal_state: nbar < 0");
  if (n_max < 0) throw std::domain_error("thermal_state: n_max < 0");
  DiagonalFockState s;
  s.probs.resize(n_max + 1);
  if (nbar == 0.0) {
    s.probs[0] = 1.0;
  } else {
    const double alpha = nbar / (nbar + 1.0);
    double w = 1.0 / (nbar + 1.0);  // (1 - alpha) alpha^n
    for (int n = 0; n <= n_max; ++n, w *= alpha) s.probs[n] = w;
  }
  const double kept = s.trace();
  s.tail_mass = std::max(0.0, 1.0 - kept);
  for (double& p : s.probs) p /= kept;
  s.normalized = true;
  return s;
}

int truncation_for_tail(const StateKind& kind, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::domain_error("truncation_for_tail: need 0 < epsilon < 1");
  }
  const double nbar = kind.nbar;
  if (nbar < 0.0) throw std::domain_error("truncation_for_tail: nbar < 0");

  switch (kind.family) {
    case StateFamily::number:
      return static_cast<int>(std::llround(nbar));
    case StateFamily::coherent: {
      if (nbar == 0.0) return 0;
      // Forward scan of the Poisson mass until the remainder drops below
      // epsilon.
      double pmf = std::exp(-nbar);
      double cum = pmf;
      int n = 0;
      while (1.0 - cum >= epsilon && n < 100000) {
        ++n;
        pmf *= nbar / n;
        cum += pmf;
      }
      return n;
    }
    case StateFamily::thermal: {
      if (nbar == 0.0) return 0;
      // Tail mass beyond N is alpha^{N+1}; solve for the smallest N and then
      // nudge against the closed form to absorb rounding.
      const double alpha = nbar / (nbar + 1.0);
      int n = static_cast<int>(std::ceil(std::log(epsilon) / std::log(alpha))) - 1;
      n = std::max(n, 0);
      while (std::pow(alpha, n + 1) >= epsilon) ++n;
      while (n > 0 && std::pow(alpha, n) < epsilon) --n;
      return n;
    }
  }
  throw std::logic_error("truncation_for_tail: unknown family");
}

DiagonalFockState make_state(const StateKind& kind, int n_max, double epsilon) {
  const int n = n_max >= 0 ? n_max : truncation_for_tail(kind, epsilon);
  switch (kind.family) {
    case StateFamily::coherent: return coherent_state(kind.nbar, n);
    case StateFamily::number:
      return number_state(static_cast<int>(std::llround(kind.nbar)), n);
    case StateFamily::thermal: return thermal_state(kind.nbar, n);
  }
  throw std::logic_error("make_state: unknown family");
}

double factorial_moment(const DiagonalFockState& state, int k) {
  if (k < 1) throw std::domain_error("factorial_moment: k < 1");
  double sum = 0.0;
  for (int n = k; n <= state.n_max(); ++n) {
    const double p = state[n];
    if (p == 0.0) continue;
    sum += std::exp(special::log_factorial(n) - special::log_factorial(n - k) +
                    std::log(p));
  }
  return sum;
}

}  // namespace cpm
