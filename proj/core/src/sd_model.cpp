#include "cpm/sd_model.hpp"

#include <cmath>
#include <stdexcept>

#include "cpm/special.hpp"
#include "cpm/superops.hpp"

namespace cpm::sd {

namespace {

using special::log_factorial;

// sum_{n>=k} rho_n n!/(n-k)! u^{n-k} for 0 <= u <= 1. Small k stays in
// linear arithmetic (falling factorials up to n^k); large k goes through the
// log domain where n!/(n-k)! would overflow on its own.
double phi_sum(const DiagonalFockState& state, double u, int k) {
  const int top = state.n_max();
  if (k > top) return 0.0;
  if (u == 0.0) return state[k] * std::exp(log_factorial(k));
  if (k <= 4) {
    double ff = std::exp(log_factorial(k));  // n!/(n-k)! at n = k
    double upow = 1.0;
    double sum = state[k] * ff;
    for (int n = k + 1; n <= top; ++n) {
      ff *= n / static_cast<double>(n - k);
      upow *= u;
      sum += state[n] * ff * upow;
    }
    return sum;
  }
  const double lu = std::log(u);
  double sum = 0.0;
  for (int n = k; n <= top; ++n) {
    const double p = state[n];
    if (p == 0.0) continue;
    sum += std::exp(log_factorial(n) - log_factorial(n - k) + (n - k) * lu +
                    std::log(p));
  }
  return sum;
}

// log of phi_sum, for the count-distribution assembly where the values
// themselves overflow (thermal states make Phi_j grow like j!).
double log_phi_sum(const DiagonalFockState& state, double u, int j) {
  const int top = state.n_max();
  if (j > top) return -std::numeric_limits<double>::infinity();
  if (u == 0.0) {
    const double p = state[j];
    return p > 0.0 ? log_factorial(j) + std::log(p)
                   : -std::numeric_limits<double>::infinity();
  }
  const double lu = std::log(u);
  double max_lt = -std::numeric_limits<double>::infinity();
  double scaled = 0.0;
  for (int n = j; n <= top; ++n) {
    const double p = state[n];
    if (p == 0.0) continue;
    const double lt = log_factorial(n) - log_factorial(n - j) + (n - j) * lu +
                      std::log(p);
    if (lt > max_lt) {
      scaled = scaled * std::exp(max_lt - lt) + 1.0;
      max_lt = lt;
    } else {
      scaled += std::exp(lt - max_lt);
    }
  }
  if (scaled == 0.0) return -std::numeric_limits<double>::infinity();
  return max_lt + std::log(scaled);
}

DiagonalFockState no_count_impl(const DiagonalFockState& state, double dark_lt,
                                double damp_lt, double y) {
  DiagonalFockState out = apply_u(apply_exp_a(state, y), damp_lt);
  const double scale = std::exp(-dark_lt);
  for (double& p : out.probs) p *= scale;
  return out;
}

}  // namespace

double phi_t(const DetectorParams& params, double t) {
  if (t < 0.0) throw std::domain_error("phi_t: t < 0");
  return -std::expm1(-params.lambda * t);
}

DiagonalFockState no_count(const DiagonalFockState& state,
                           const DetectorParams& params, double t) {
  const double lt = params.lambda * t;
  return no_count_impl(state, params.dark * lt, lt, params.q() * phi_t(params, t));
}

DiagonalFockState ute(const DiagonalFockState& state,
                      const DetectorParams& params, double t) {
  const double lt = params.lambda * t;
  DiagonalFockState out = apply_u(apply_exp_a(state, phi_t(params, t)), lt);
  out.normalized = state.normalized;
  return out;
}

CountDistribution count_distribution(const DiagonalFockState& state,
                                     const DetectorParams& params, double t,
                                     int m_max) {
  params.validate();
  if (t < 0.0) throw std::domain_error("count_distribution: t < 0");
  const double lt = params.lambda * t;
  const double dlt = params.dark * lt;
  const double phi = phi_t(params, t);
  const double eta_phi = params.eta * phi;
  const double u = 1.0 - eta_phi;  // q phi + e^{-lt}

  const int cap = m_max >= 0
                      ? m_max
                      : state.n_max() + static_cast<int>(std::ceil(10.0 * dlt)) + 20;
  const bool adaptive = m_max < 0;

  // P(m) = sum_k Poisson(dlt)_k * F_{m-k},  F_j = (eta phi)^j / j! Phi_j.
  std::vector<double> dark_pmf{std::exp(-dlt)};
  std::vector<double> photon_f;
  const double log_eta_phi = eta_phi > 0.0 ? std::log(eta_phi) : 0.0;

  CountDistribution dist;
  dist.t = t;
  double cum = 0.0;
  for (int m = 0; m <= cap; ++m) {
    if (m > 0) dark_pmf.push_back(dark_pmf.back() * dlt / m);
    const int j = m;
    if (eta_phi == 0.0) {
      photon_f.push_back(j == 0 ? phi_sum(state, u, 0) : 0.0);
    } else {
      photon_f.push_back(std::exp(j * log_eta_phi - log_factorial(j) +
                                  log_phi_sum(state, u, j)));
    }
    double p = 0.0;
    for (int k = 0; k <= m; ++k) p += dark_pmf[k] * photon_f[m - k];
    dist.probs.push_back(std::max(0.0, p));
    cum += dist.probs.back();
    if (adaptive && cum >= 1.0 - 1e-12) break;
  }
  dist.tail = std::max(0.0, 1.0 - cum);
  return dist;
}

double phi_k(const DiagonalFockState& state, const DetectorParams& params,
             double b, double x, int k) {
  if (k < 0) throw std::domain_error("phi_k: k < 0");
  return phi_sum(state, x + std::exp(-params.lambda * b), k);
}

double mean_counts(const DiagonalFockState& state, const DetectorParams& params,
                   double t) {
  const double lt = params.lambda * t;
  return params.dark * lt + params.eta * state.mean() * phi_t(params, t);
}

double second_factorial_moment(const DiagonalFockState& state,
                               const DetectorParams& params, double t) {
  const double lt = params.lambda * t;
  const double dlt = params.dark * lt;
  const double ep = params.eta * phi_t(params, t);
  return dlt * dlt + 2.0 * ep * state.mean() * dlt +
         ep * ep * factorial_moment(state, 2);
}

std::optional<double> k_factor(const DiagonalFockState& state,
                               const DetectorParams& params, double t) {
  const double mean = mean_counts(state, params, t);
  if (mean < 1e-12) return std::nullopt;
  return second_factorial_moment(state, params, t) / (mean * mean);
}

double waiting_density(const DiagonalFockState& state,
                       const DetectorParams& params, double t, double tau) {
  if (t < 0.0 || tau < 0.0) throw std::domain_error("waiting_density: negative time");
  const double lt = params.lambda * t;
  const double ltau = params.lambda * tau;
  const double eta = params.eta;
  const double d = params.dark;
  const double elt = std::exp(-lt);
  const double eltau = std::exp(-ltau);
  const double u = 1.0 - eta * elt * (-std::expm1(-ltau));

  const double term2 = phi_sum(state, u, 2);
  const double term1 = phi_sum(state, u, 1);
  const double term0 = phi_sum(state, u, 0);
  return std::exp(-d * ltau) *
         (eta * eta * std::exp(-(2.0 * lt + ltau)) * term2 +
          eta * d * elt * (1.0 + eltau) * term1 + d * d * term0);
}

WaitingTimeCurve waiting_curve(const DiagonalFockState& state,
                               const DetectorParams& params, double t,
                               double window) {
  if (window <= 0.0) throw std::domain_error("waiting_curve: window <= 0");
  double step = window / 2000.0;
  if (params.eta > 0.0) step = std::min(step, 0.01 / (params.eta * params.lambda));
  int n = static_cast<int>(std::ceil(window / step));
  if (n % 2 == 1) ++n;
  const double h = window / n;

  WaitingTimeCurve curve;
  curve.tau.resize(n + 1);
  curve.density.resize(n + 1);
  std::vector<double> tau_weighted(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double tau = i * h;
    curve.tau[i] = tau;
    curve.density[i] = waiting_density(state, params, t, tau);
    tau_weighted[i] = tau * curve.density[i];
  }
  curve.normalization = simpson(curve.density, h);
  curve.mean_tau =
      curve.normalization > 0.0 ? simpson(tau_weighted, h) / curve.normalization : 0.0;
  return curve;
}

std::optional<double> mean_waiting(const DiagonalFockState& state,
                                   const DetectorParams& params, double t,
                                   double window) {
  const WaitingTimeCurve curve = waiting_curve(state, params, t, window);
  if (curve.normalization <= 0.0) return std::nullopt;
  return curve.mean_tau;
}

double n_cav(const DiagonalFockState& state, const DetectorParams& params,
             double t) {
  return state.mean() * std::exp(-params.lambda * t);
}

DiagonalFockState no_count_damped(const DiagonalFockState& state,
                                  const DetectorParams& params, double t) {
  const double lt = params.lambda * t;
  const double p = params.p();
  const double phi_damped = -std::expm1(-p * lt) / p;
  return no_count_impl(state, params.dark * lt, p * lt,
                       params.q_tilde() * phi_damped);
}

std::vector<double> dead_time_divergence_probe(const StateKind& kind,
                                               const DetectorParams& params,
                                               double t, double x,
                                               const std::vector<int>& schedule) {
  if (x < 0.0 || t < 0.0) throw std::domain_error("divergence_probe: negative time");
  const double lt = params.lambda * t;
  const double lx = params.lambda * x;
  const double p = params.p();
  const double phi_x = -std::expm1(-lx);
  const double eta = params.eta;
  const double dlt = params.dark * lt;
  const double phi_damped = -std::expm1(-p * lt) / p;

  std::vector<double> probe;
  probe.reserve(schedule.size());
  for (const int n_trunc : schedule) {
    const DiagonalFockState rho = make_state(kind, n_trunc);

    // B is the photon part of the per-count operator: eta phi~_t A at x = 0,
    // otherwise e^{d lambda x} z / (p phi_x) with
    // z = exp(eta phi_x A) - exp(eta phi_x e^{-p lambda t} A).
    const auto apply_b = [&](const DiagonalFockState& s) {
      if (lx == 0.0) {
        DiagonalFockState out = apply_a(s);
        for (double& v : out.probs) v *= eta * phi_damped;
        return out;
      }
      const double y1 = eta * phi_x;
      const double y2 = y1 * std::exp(-p * lt);
      const double c = std::exp(params.dark * lx) / (p * phi_x);
      DiagonalFockState hi = apply_exp_a(s, y1);
      const DiagonalFockState lo = apply_exp_a(s, y2);
      for (int n = 0; n <= s.n_max(); ++n) hi[n] = c * (hi[n] - lo[n]);
      return hi;
    };

    // First moment: e^{d lt} [ d lt Tr(S_t e^B rho) + Tr(S_t B e^B rho) ].
    DiagonalFockState term = rho;
    DiagonalFockState exp_b = rho;
    for (int j = 1; j <= n_trunc; ++j) {
      term = apply_b(term);
      double largest = 0.0;
      for (int n = 0; n <= n_trunc; ++n) {
        term[n] /= j;
        exp_b[n] += term[n];
        largest = std::max(largest, std::abs(term[n]));
      }
      if (largest < 1e-300) break;
    }
    const double tr_exp = no_count_damped(exp_b, params, t).trace();
    const double tr_b_exp = no_count_damped(apply_b(exp_b), params, t).trace();
    probe.push_back(std::exp(dlt) * (dlt * tr_exp + tr_b_exp));
  }
  return probe;
}

double phi_k_w(const DiagonalFockState& state, const DetectorParams& params,
               double t, double tau, int k) {
  const double x =
      1.0 - std::exp(-params.lambda * t) *
                (params.eta + params.q() * std::exp(-params.lambda * tau));
  return phi_k(state, params, t + tau, x, k);
}

double phi_k_w_closed(const StateKind& kind, const DetectorParams& params,
                      double t, double tau, int k) {
  const double nbar = kind.nbar;
  const double w = params.eta * std::exp(-params.lambda * t) *
                   (-std::expm1(-params.lambda * tau));
  const double u = 1.0 - w;
  switch (kind.family) {
    case StateFamily::coherent:
      return std::pow(nbar, k) * std::exp(-nbar * w);
    case StateFamily::number: {
      const int n = static_cast<int>(std::llround(nbar));
      if (k > n) return 0.0;
      return std::exp(special::log_factorial(n) - special::log_factorial(n - k) +
                      (n - k) * std::log(u));
    }
    case StateFamily::thermal: {
      const double alpha = nbar / (nbar + 1.0);
      return std::exp(special::log_factorial(k)) * (1.0 - alpha) *
             std::pow(alpha, k) / std::pow(1.0 - alpha * u, k + 1);
    }
  }
  throw std::logic_error("phi_k_w_closed: unknown family");
}

}  // namespace cpm::sd
