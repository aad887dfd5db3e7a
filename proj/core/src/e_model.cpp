#include "cpm/e_model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "cpm/special.hpp"
#include "cpm/superops.hpp"

namespace cpm::emodel {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

using special::log_factorial;

// Suffix sums T[l] = sum_{n >= l} v_n.
std::vector<double> suffix_sums(const std::vector<double>& v) {
  std::vector<double> out(v.size() + 1, 0.0);
  for (int n = static_cast<int>(v.size()) - 1; n >= 0; --n) {
    out[n] = out[n + 1] + v[n];
  }
  out.pop_back();
  return out;
}

// Geometric suffix sums V[l] = sum_{j >= 0} q^j v_{j+l} (Horner).
std::vector<double> geometric_sums(const std::vector<double>& v, double q) {
  std::vector<double> out(v.size());
  double acc = 0.0;
  for (int n = static_cast<int>(v.size()) - 1; n >= 0; --n) {
    acc = v[n] + q * acc;
    out[n] = acc;
  }
  return out;
}

// Weights w_l = e^{-lt} (q lt)^l / l!, folded so large lt underflows cleanly.
std::vector<double> folded_poisson_weights(double lt, double q, int top) {
  std::vector<double> w(top + 1, 0.0);
  const double y = q * lt;
  const double w0 = std::exp(-lt);
  if (w0 > 0.0 && y <= 600.0) {
    w[0] = w0;
    for (int l = 1; l <= top; ++l) w[l] = w[l - 1] * y / l;
  } else if (y > 0.0) {
    const double ly = std::log(y);
    for (int l = 0; l <= top; ++l) {
      w[l] = std::exp(-lt + l * ly - log_factorial(l));
    }
  } else {
    w[0] = w0;
  }
  return w;
}

// log gamma(a, x) for a = 1..a_top, built by the downward recurrence
// gamma(a, x) = (gamma(a+1, x) + x^a e^{-x}) / a from a series seed at the
// top; every step only adds positive quantities.
std::vector<double> log_lower_gamma_table(int a_top, double x) {
  std::vector<double> lg(a_top + 1, kNegInf);
  if (x <= 0.0) return lg;
  const double lx = std::log(x);
  lg[a_top] = special::log_lower_gamma(a_top, x);
  for (int a = a_top - 1; a >= 1; --a) {
    const double log_pow = a * lx - x;
    const double hi = std::max(lg[a + 1], log_pow);
    lg[a] = hi + std::log(std::exp(lg[a + 1] - hi) + std::exp(log_pow - hi)) -
            std::log(static_cast<double>(a));
  }
  return lg;
}

struct DistTables {
  std::vector<double> w1;      // e^{-lt} Psi_k(1, q t)
  std::vector<double> wq;      // e^{-lt} Psi_k(q, q t)
  std::vector<double> v;       // Psi_k(q, 0) = sum_j q^j rho_{j+k}
  std::vector<double> log_s;   // log sum_i q^i/i! gamma(i+j+1, lt) v_{i+j+1}
};

DistTables build_dist_tables(const DiagonalFockState& state, double lt,
                             double q, int k_top) {
  const int top = state.n_max();
  DistTables tb;
  tb.v = geometric_sums(state.probs, q);
  const std::vector<double> tails = suffix_sums(state.probs);
  const std::vector<double> w = folded_poisson_weights(lt, q, top);

  tb.w1.assign(k_top + 1, 0.0);
  tb.wq.assign(k_top + 1, 0.0);
  for (int k = 0; k <= k_top; ++k) {
    double acc1 = 0.0, accq = 0.0;
    for (int l = 0; l + k <= top; ++l) {
      acc1 += w[l] * tails[l + k];
      accq += w[l] * tb.v[l + k];
    }
    tb.w1[k] = acc1;
    tb.wq[k] = accq;
  }

  // The gamma factors reach e^{a log lt} for a up to n_max, so the j-table
  // has to stay in log scale.
  tb.log_s.assign(k_top + 1, kNegInf);
  if (lt > 0.0) {
    const std::vector<double> lg = log_lower_gamma_table(top + 1, lt);
    const double lq = q > 0.0 ? std::log(q) : 0.0;
    for (int j = 0; j <= k_top; ++j) {
      double max_lt = kNegInf;
      double scaled = 0.0;
      const int i_top = top - j - 1;
      for (int i = 0; i <= i_top; ++i) {
        if (q == 0.0 && i > 0) break;
        const double vk = tb.v[i + j + 1];
        if (vk <= 0.0) continue;
        const double term =
            i * lq - log_factorial(i) + lg[i + j + 1] + std::log(vk);
        if (term > max_lt) {
          scaled = scaled * std::exp(max_lt - term) + 1.0;
          max_lt = term;
        } else {
          scaled += std::exp(term - max_lt);
        }
      }
      if (scaled > 0.0) tb.log_s[j] = max_lt + std::log(scaled);
    }
  }
  return tb;
}

// nbar (1 - Xi_1) assembled from Poisson survival and cdf terms; every
// contribution is positive, so the small-t cancellation of 1 - Xi_1 never
// happens in floating point.
double nbar_one_minus_xi1(const DiagonalFockState& state, double lt) {
  const int top = state.n_max();
  if (lt == 0.0) return 0.0;
  const std::vector<double> surv = special::poisson_survival_table(lt, top);
  const std::vector<double> cdf = special::poisson_cdf_table(lt, top);
  double sum = 0.0;
  for (int j = 1; j <= top; ++j) {
    const double p = state[j];
    if (p == 0.0) continue;
    const double cdf_jm2 = j >= 2 ? cdf[j - 2] : 0.0;
    sum += p * (j * surv[j - 1] + lt * cdf_jm2);
  }
  return sum;
}

// M2 (1 - Omega) - 2 nbar lt Xi_2 in the rearranged, all-positive form
// sum_j rho_j [ j(j-1) P(X > j) + lt^2 P(X <= j-2) ].
double second_moment_bracket(const DiagonalFockState& state, double lt) {
  const int top = state.n_max();
  if (lt == 0.0) return 0.0;
  const std::vector<double> surv = special::poisson_survival_table(lt, top);
  const std::vector<double> cdf = special::poisson_cdf_table(lt, top);
  double sum = 0.0;
  for (int j = 2; j <= top; ++j) {
    const double p = state[j];
    if (p == 0.0) continue;
    sum += p * (static_cast<double>(j) * (j - 1.0) * surv[j] +
                lt * lt * cdf[j - 2]);
  }
  return sum;
}

}  // namespace

DiagonalFockState no_count(const DiagonalFockState& state,
                           const DetectorParams& params, double t) {
  if (t < 0.0) throw std::domain_error("no_count: t < 0");
  const double lt = params.lambda * t;
  const double q = params.q();
  DiagonalFockState out = apply_r(state, lt, q);
  // Vacuum correction Lambda_0 (1 - R_t)/(1 - q Eps) Lambda_0.
  double corr = 0.0;
  for (int n = out.n_max(); n >= 0; --n) {
    corr = (state[n] - out[n]) + q * corr;
  }
  out[0] += corr;
  const double scale = std::exp(-params.dark * lt);
  for (double& p : out.probs) p *= scale;
  return out;
}

DiagonalFockState ute(const DiagonalFockState& state,
                      const DetectorParams& params, double t) {
  DetectorParams free = params;
  free.eta = 0.0;
  free.dark = 0.0;
  DiagonalFockState out = no_count(state, free, t);
  out.normalized = state.normalized;
  return out;
}

CountDistribution count_distribution(const DiagonalFockState& state,
                                     const DetectorParams& params, double t,
                                     int m_max) {
  params.validate();
  if (t < 0.0) throw std::domain_error("count_distribution: t < 0");
  const double lt = params.lambda * t;
  const double q = params.q();
  const double eta = params.eta;
  const double d = params.dark;
  const double dlt = d * lt;

  const int cap = m_max >= 0
                      ? m_max
                      : state.n_max() + static_cast<int>(std::ceil(10.0 * dlt)) + 20;
  const bool adaptive = m_max < 0;

  const DistTables tb = build_dist_tables(state, lt, q, cap);
  const double log_lt = lt > 0.0 ? std::log(lt) : 0.0;
  const double log_d = d > 0.0 ? std::log(d) : 0.0;
  const double log_eta = eta > 0.0 ? std::log(eta) : 0.0;
  const double log_dlt = dlt > 0.0 ? std::log(dlt) : 0.0;
  const double global = std::exp(-dlt);

  CountDistribution dist;
  dist.t = t;
  double cum = 0.0;
  for (int m = 0; m <= cap; ++m) {
    // Term 1: counts while never projected onto the vacuum.
    double term1 = 0.0;
    if (lt > 0.0 || m == 0) {
      for (int k = 0; k <= m; ++k) {
        if (d == 0.0 && k < m) continue;
        if (eta == 0.0 && k > 0) break;
        const double dw = tb.w1[k] - tb.wq[k];
        if (dw <= 0.0) continue;
        const double log_coef = m * log_lt - log_factorial(m) +
                                special::log_binomial(m, k) +
                                (m - k) * log_d + k * log_eta;
        term1 += std::exp(log_coef + std::log(dw));
      }
    }
    // Term 2: dark counts accumulated in the vacuum component.
    double term2 = 0.0;
    if (m == 0) {
      term2 = tb.v[0];
    } else if (dlt > 0.0) {
      term2 = std::exp(m * log_dlt - log_factorial(m) + std::log(tb.v[0]));
    }
    // Term 3: the final photon was absorbed at some x < t; the x-integral
    // is the incomplete-gamma content of log_s.
    double term3 = 0.0;
    if (m >= 1 && eta > 0.0) {
      for (int j = 0; j <= m - 1; ++j) {
        if (d == 0.0 && j < m - 1) continue;
        if (tb.log_s[j] == kNegInf) continue;
        const double log_coef = (m - 1 - j) * log_dlt -
                                log_factorial(m - 1 - j) - log_factorial(j) +
                                (j + 1) * log_eta;
        term3 += std::exp(log_coef + tb.log_s[j]);
      }
    }
    dist.probs.push_back(std::max(0.0, global * (term1 + term2 + term3)));
    cum += dist.probs.back();
    if (adaptive && cum >= 1.0 - 1e-12) break;
  }
  dist.tail = std::max(0.0, 1.0 - cum);
  return dist;
}

std::optional<double> xi_k(const DiagonalFockState& state,
                           const DetectorParams& params, double t, int k) {
  if (k < 1) throw std::domain_error("xi_k: k < 1");
  const double nbar = state.mean();
  if (nbar == 0.0) return std::nullopt;
  const double lt = params.lambda * t;
  const int top = state.n_max();
  const std::vector<double> pmf = special::poisson_pmf_table(lt, top);
  double sum = 0.0;
  for (int j = k; j <= top; ++j) {
    const double p = state[j];
    if (p == 0.0) continue;
    double inner = 0.0;
    for (int m = 0; m <= j - k; ++m) inner += (j - k - m + 1.0) * pmf[m];
    sum += p * inner;
  }
  return sum / nbar;
}

std::optional<double> omega(const DiagonalFockState& state,
                            const DetectorParams& params, double t) {
  const double m2 = factorial_moment(state, 2);
  if (m2 == 0.0) return std::nullopt;
  const double lt = params.lambda * t;
  const int top = state.n_max();
  const std::vector<double> pmf = special::poisson_pmf_table(lt, top);
  double sum = 0.0;
  for (int j = 2; j <= top; ++j) {
    const double p = state[j];
    if (p == 0.0) continue;
    double inner = 0.0;
    for (int m = 0; m <= j - 2; ++m) {
      inner += (j - m) * (j - m - 1.0) * pmf[m];
    }
    sum += p * inner;
  }
  return sum / m2;
}

double psi_k(const DiagonalFockState& state, double q, double lambda_beta,
             int k) {
  if (q < 0.0 || q > 1.0) throw std::domain_error("psi_k: q outside [0,1]");
  if (lambda_beta < 0.0 || k < 0) throw std::domain_error("psi_k: bad argument");
  const int top = state.n_max();
  if (k > top) return 0.0;
  std::vector<double> w(top + 1, 0.0);
  w[0] = 1.0;
  if (lambda_beta > 0.0 && lambda_beta <= 600.0) {
    for (int l = 1; l <= top; ++l) w[l] = w[l - 1] * lambda_beta / l;
  } else if (lambda_beta > 600.0) {
    const double lb = std::log(lambda_beta);
    for (int l = 1; l <= top; ++l) w[l] = std::exp(l * lb - log_factorial(l));
  }
  double sum = 0.0;
  double qn = 1.0;
  for (int n = 0; n + k <= top; ++n, qn *= q) {
    if (qn == 0.0) break;
    double inner = 0.0;
    for (int l = 0; n + l + k <= top; ++l) inner += w[l] * state[n + l + k];
    sum += qn * inner;
    if (q == 0.0) break;
  }
  return sum;
}

double mean_counts(const DiagonalFockState& state, const DetectorParams& params,
                   double t) {
  const double lt = params.lambda * t;
  return params.dark * lt + params.eta * nbar_one_minus_xi1(state, lt);
}

double second_factorial_moment(const DiagonalFockState& state,
                               const DetectorParams& params, double t) {
  const double lt = params.lambda * t;
  const double dlt = params.dark * lt;
  const double eta = params.eta;
  return dlt * dlt + 2.0 * eta * dlt * nbar_one_minus_xi1(state, lt) +
         eta * eta * second_moment_bracket(state, lt);
}

std::optional<double> k_factor(const DiagonalFockState& state,
                               const DetectorParams& params, double t) {
  const double mean = mean_counts(state, params, t);
  if (mean < 1e-12) return std::nullopt;
  return second_factorial_moment(state, params, t) / (mean * mean);
}

std::optional<double> k_limit_origin(const DiagonalFockState& state) {
  const double rho0 = state[0];
  const double rho1 = state.n_max() >= 1 ? state[1] : 0.0;
  const double denom = 1.0 - rho0;
  if (denom <= 0.0) return std::nullopt;
  return (1.0 - rho0 - rho1) / (denom * denom);
}

namespace {

// Shared per-(state, t) precomputation for tau sweeps of the waiting-time
// density: sigma = J R_t^0 rho with its suffix and geometric sums.
struct WaitingContext {
  double lambda, eta, dark, q;
  double vacuum_weight;               // (lambda d)^2 [1 - Tr(R_t^0 rho)]
  std::vector<double> tails;          // suffix sums of sigma
  std::vector<double> geom;           // geometric sums of sigma
  int top;

  WaitingContext(const DiagonalFockState& state, const DetectorParams& params,
                 double t) {
    lambda = params.lambda;
    eta = params.eta;
    dark = params.dark;
    q = params.q();
    top = state.n_max();
    const DiagonalFockState r0 = apply_r(state, lambda * t, 1.0);
    std::vector<double> sigma(top + 1, 0.0);
    for (int n = 0; n <= top; ++n) {
      const double eps_part = n < top ? r0[n + 1] : 0.0;
      sigma[n] = lambda * (eta * eps_part + dark * r0[n]);
    }
    const double ld = lambda * dark;
    vacuum_weight = ld * ld * (1.0 - r0.trace());
    tails = suffix_sums(sigma);
    geom = geometric_sums(sigma, q);
  }

  double density(double tau) const {
    const double ltau = lambda * tau;
    const std::vector<double> w = folded_poisson_weights(ltau, q, top);
    double tr_r = 0.0, tr_eps_r = 0.0, vac_r = 0.0;
    for (int l = 0; l <= top; ++l) {
      tr_r += w[l] * tails[l];
      if (l + 1 <= top) tr_eps_r += w[l] * tails[l + 1];
      vac_r += w[l] * geom[l];
    }
    const double vac = geom[0] - vac_r;
    return std::exp(-dark * ltau) *
           (vacuum_weight + lambda * (eta * tr_eps_r + dark * tr_r) +
            lambda * dark * vac);
  }
};

}  // namespace

double waiting_density(const DiagonalFockState& state,
                       const DetectorParams& params, double t, double tau) {
  if (t < 0.0 || tau < 0.0) throw std::domain_error("waiting_density: negative time");
  return WaitingContext(state, params, t).density(tau);
}

WaitingTimeCurve waiting_curve(const DiagonalFockState& state,
                               const DetectorParams& params, double t,
                               double window) {
  if (window <= 0.0) throw std::domain_error("waiting_curve: window <= 0");
  const WaitingContext ctx(state, params, t);
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
    curve.density[i] = ctx.density(tau);
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

double default_waiting_window(const DetectorParams& params) {
  if (params.eta <= 0.0) {
    throw std::domain_error("default_waiting_window: eta must be positive");
  }
  return 10.0 / (params.eta * params.lambda);
}

double n_cav(const DiagonalFockState& state, const DetectorParams& params,
             double t) {
  const double lt = params.lambda * t;
  const int top = state.n_max();
  const std::vector<double> pmf = special::poisson_pmf_table(lt, top);
  // nbar Xi_1 without the nbar division, so the vacuum is handled too.
  double sum = 0.0;
  for (int j = 1; j <= top; ++j) {
    const double p = state[j];
    if (p == 0.0) continue;
    double inner = 0.0;
    for (int m = 0; m <= j - 1; ++m) inner += (j - m) * pmf[m];
    sum += p * inner;
  }
  return sum;
}

double xi_k_closed(const StateKind& kind, const DetectorParams& params,
                   double t, int k) {
  if (k < 1) throw std::domain_error("xi_k_closed: k < 1");
  const double nbar = kind.nbar;
  const double lt = params.lambda * t;
  switch (kind.family) {
    case StateFamily::thermal: {
      const double alpha = nbar / (nbar + 1.0);
      return std::pow(alpha, k - 1) * std::exp(-lt * (1.0 - alpha));
    }
    case StateFamily::number: {
      const int n = static_cast<int>(std::llround(nbar));
      if (k > n) return 0.0;
      const int m = n - k;
      const double log_norm = std::log(nbar) + log_factorial(m);
      const double a = std::exp(special::log_upper_gamma(m + 2, lt) - log_norm);
      const double b =
          lt > 0.0 ? lt * std::exp(special::log_upper_gamma(m + 1, lt) - log_norm)
                   : 0.0;
      return a - b;
    }
    case StateFamily::coherent: {
      if (lt == 0.0) {
        // (n+k)-photon weights only: Xi_k(0) = (1/nbar) sum (n+1) rho_{n+k}.
        double sum = 0.0;
        const double lnb = std::log(nbar);
        for (int n = 0; n < 100000; ++n) {
          const double term =
              (n + 1.0) * std::exp((n + k) * lnb - nbar - log_factorial(n + k));
          sum += term;
          if (n > nbar && term < sum * 1e-18) break;
        }
        return sum / nbar;
      }
      const double z = 2.0 * std::sqrt(nbar * lt);
      const double half_log_ratio = 0.5 * (std::log(nbar) - std::log(lt));
      double sum = 0.0;
      for (int n = 0; n < 100000; ++n) {
        const double term =
            (n + 1.0) * std::exp((n + k) * half_log_ratio - lt - nbar +
                                 special::log_bessel_i(n + k, z));
        sum += term;
        if (term < sum * 1e-18 && n > 2.0 * std::sqrt(nbar * lt) - k) break;
      }
      return sum / nbar;
    }
  }
  throw std::logic_error("xi_k_closed: unknown family");
}

double omega_closed(const StateKind& kind, const DetectorParams& params,
                    double t) {
  const double nbar = kind.nbar;
  const double lt = params.lambda * t;
  switch (kind.family) {
    case StateFamily::thermal: {
      const double alpha = nbar / (nbar + 1.0);
      return std::exp(-lt * (1.0 - alpha));
    }
    case StateFamily::number: {
      const int n = static_cast<int>(std::llround(nbar));
      if (n < 2) throw std::domain_error("omega_closed: number state needs n >= 2");
      const double log_norm =
          std::log(nbar) + std::log(nbar - 1.0) + log_factorial(n - 2);
      const double a = std::exp(special::log_upper_gamma(n + 1, lt) - log_norm);
      const double b =
          lt > 0.0
              ? 2.0 * lt * std::exp(special::log_upper_gamma(n, lt) - log_norm)
              : 0.0;
      const double c =
          lt > 0.0 ? lt * lt *
                         std::exp(special::log_upper_gamma(n - 1, lt) - log_norm)
                   : 0.0;
      return a - b + c;
    }
    case StateFamily::coherent: {
      if (lt == 0.0) return 1.0;
      const double z = 2.0 * std::sqrt(nbar * lt);
      const double half_log_ratio = 0.5 * (std::log(nbar) - std::log(lt));
      double sum = 0.0;
      for (int n = 2; n < 100000; ++n) {
        const double term =
            n * (n - 1.0) * std::exp(n * half_log_ratio - lt - nbar +
                                     special::log_bessel_i(n, z));
        sum += term;
        if (term < sum * 1e-18 && n > 2.0 * std::sqrt(nbar * lt)) break;
      }
      return sum / (nbar * nbar);
    }
  }
  throw std::logic_error("omega_closed: unknown family");
}

double psi_k_closed(const StateKind& kind, double q, double lambda_beta,
                    int k) {
  if (q < 0.0 || q > 1.0) throw std::domain_error("psi_k_closed: q outside [0,1]");
  const double nbar = kind.nbar;
  switch (kind.family) {
    case StateFamily::thermal: {
      const double alpha = nbar / (nbar + 1.0);
      return (1.0 - alpha) * std::pow(alpha, k) * std::exp(lambda_beta * alpha) /
             (1.0 - q * alpha);
    }
    case StateFamily::number: {
      const int n = static_cast<int>(std::llround(nbar));
      if (k > n) return 0.0;
      const int m = n - k;
      if (q == 0.0) {
        // Only the l = m term of the beta series survives.
        if (lambda_beta == 0.0) return m == 0 ? 1.0 : 0.0;
        return std::exp(m * std::log(lambda_beta) - log_factorial(m));
      }
      const double x = lambda_beta / q;
      return std::exp(m * std::log(q) + x + special::log_upper_gamma(m + 1, x) -
                      log_factorial(m));
    }
    case StateFamily::coherent: {
      const double lnb = std::log(nbar);
      if (lambda_beta == 0.0) {
        double sum = 0.0;
        double qn = 1.0;
        for (int n = 0; n < 100000; ++n, qn *= q) {
          const double term =
              qn * std::exp((n + k) * lnb - nbar - log_factorial(n + k));
          sum += term;
          if (qn == 0.0 || (n > nbar && term < sum * 1e-18)) break;
          if (q == 0.0) break;
        }
        return sum;
      }
      const double z = 2.0 * std::sqrt(nbar * lambda_beta);
      const double half_log_ratio = 0.5 * (lnb - std::log(lambda_beta));
      const double lq = q > 0.0 ? std::log(q) : 0.0;
      double sum = 0.0;
      for (int n = 0; n < 100000; ++n) {
        if (q == 0.0 && n > 0) break;
        const double term = std::exp(n * lq + (n + k) * half_log_ratio - nbar +
                                     special::log_bessel_i(n + k, z));
        sum += term;
        if (term < sum * 1e-18 && n > 2.0 * std::sqrt(nbar * lambda_beta) - k) break;
      }
      return sum;
    }
  }
  throw std::logic_error("psi_k_closed: unknown family");
}

}  // namespace cpm::emodel
