#include "cpm/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cpm::special {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

const std::vector<double>& log_factorial_table() {
  static const std::vector<double> table = [] {
    std::vector<double> t(4097);
    t[0] = 0.0;
    for (std::size_t n = 1; n < t.size(); ++n) {
      t[n] = t[n - 1] + std::log(static_cast<double>(n));
    }
    return t;
  }();
  return table;
}

// Streaming log-sum-exp accumulator for series with positive terms.
class LogSum {
 public:
  void add(double log_term) {
    if (log_term == kNegInf) return;
    if (log_term > max_) {
      sum_ = sum_ * std::exp(max_ - log_term) + 1.0;
      max_ = log_term;
    } else {
      sum_ += std::exp(log_term - max_);
    }
  }
  double log() const {
    if (max_ == kNegInf) return kNegInf;
    return max_ + std::log(sum_);
  }

 private:
  double max_ = kNegInf;
  double sum_ = 0.0;
};

// log of the ascending series for gamma(a, x):
//   gamma(a,x) = x^a e^{-x} sum_{k>=0} x^k / (a (a+1) ... (a+k)).
double log_lower_gamma_series(int a, double x) {
  if (x == 0.0) return kNegInf;
  double term = 1.0 / a;  // k = 0
  double sum = term;
  for (int k = 1; k < 100000; ++k) {
    term *= x / (a + k);
    sum += term;
    if (term < sum * 1e-18) break;
  }
  return a * std::log(x) - x + std::log(sum);
}

// log of e^{x} Gamma(a, x) / (a-1)! = sum_{k<a} x^k/k!, via log terms.
double log_upper_gamma_sum(int a, double x) {
  if (x == 0.0) return 0.0;  // sum = 1 (k = 0 term)
  const double lx = std::log(x);
  LogSum acc;
  for (int k = 0; k < a; ++k) {
    acc.add(k * lx - log_factorial(k));
  }
  return acc.log();
}

}  // namespace

double log_factorial(int n) {
  if (n < 0) throw std::domain_error("log_factorial: negative argument");
  const auto& table = log_factorial_table();
  if (static_cast<std::size_t>(n) < table.size()) return table[n];
  return std::lgamma(static_cast<double>(n) + 1.0);
}

double log_binomial(int n, int k) {
  if (k < 0 || k > n) throw std::domain_error("log_binomial: need 0 <= k <= n");
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

double log_bessel_i(int n, double x) {
  if (n < 0 || x < 0.0) throw std::domain_error("bessel_i: need n >= 0, x >= 0");
  if (x == 0.0) return n == 0 ? 0.0 : kNegInf;
  const double lh = std::log(0.5 * x);
  LogSum acc;
  double max_seen = kNegInf;
  for (int m = 0; m < 100000; ++m) {
    const double lt = (2 * m + n) * lh - log_factorial(m) - log_factorial(m + n);
    acc.add(lt);
    max_seen = std::max(max_seen, lt);
    // Terms peak near m ~ x/2; stop once well past the peak and negligible.
    if (2 * m > x && lt < max_seen - 46.0) break;
  }
  return acc.log();
}

double bessel_i(int n, double x) { return std::exp(log_bessel_i(n, x)); }

double log_upper_gamma(int a, double x) {
  if (a < 1 || x < 0.0) throw std::domain_error("upper_gamma: need a >= 1, x >= 0");
  return log_factorial(a - 1) - x + log_upper_gamma_sum(a, x);
}

double upper_gamma(int a, double x) { return std::exp(log_upper_gamma(a, x)); }

double log_lower_gamma(int a, double x) {
  if (a < 1 || x < 0.0) throw std::domain_error("lower_gamma: need a >= 1, x >= 0");
  if (x == 0.0) return kNegInf;
  if (x < a) return log_lower_gamma_series(a, x);
  // x >= a: the complement is not the dominant part, subtract safely in
  // linear space on the regularized scale.
  const double lg_a = log_factorial(a - 1);
  const double q = std::exp(log_upper_gamma(a, x) - lg_a);
  const double p = 1.0 - q;
  if (p <= 0.0) return kNegInf;
  return lg_a + std::log(p);
}

double lower_gamma(int a, double x) { return std::exp(log_lower_gamma(a, x)); }

double poisson_pmf(int m, double x) {
  if (m < 0 || x < 0.0) throw std::domain_error("poisson_pmf: need m >= 0, x >= 0");
  if (x == 0.0) return m == 0 ? 1.0 : 0.0;
  return std::exp(m * std::log(x) - x - log_factorial(m));
}

std::vector<double> poisson_pmf_table(double x, int m_top) {
  if (m_top < 0) throw std::domain_error("poisson_pmf_table: m_top < 0");
  std::vector<double> pmf(m_top + 1);
  if (x == 0.0) {
    pmf[0] = 1.0;
    return pmf;
  }
  // Seed at the mode and multiply outward; avoids underflowing e^{-x} for
  // large x while keeping the recurrences cheap.
  const int mode = std::min<int>(m_top, static_cast<int>(x));
  pmf[mode] = poisson_pmf(mode, x);
  for (int m = mode + 1; m <= m_top; ++m) pmf[m] = pmf[m - 1] * x / m;
  for (int m = mode - 1; m >= 0; --m) pmf[m] = pmf[m + 1] * (m + 1) / x;
  return pmf;
}

std::vector<double> poisson_cdf_table(double x, int m_top) {
  std::vector<double> cdf = poisson_pmf_table(x, m_top);
  for (int m = 1; m <= m_top; ++m) cdf[m] += cdf[m - 1];
  for (int m = 0; m <= m_top; ++m) cdf[m] = std::min(cdf[m], 1.0);
  return cdf;
}

std::vector<double> poisson_survival_table(double x, int m_top) {
  if (m_top < 0) throw std::domain_error("poisson_survival_table: m_top < 0");
  const std::vector<double> pmf = poisson_pmf_table(x, m_top);
  std::vector<double> q(m_top + 1);

  // Below the median P(X > m) is large; 1 - cdf loses nothing there.
  int split = 0;
  double cdf = 0.0;
  while (split <= m_top) {
    cdf += pmf[split];
    if (cdf > 0.5) break;
    q[split] = 1.0 - cdf;
    ++split;
  }
  if (split > m_top) return q;

  // Above the median, sum the tail directly: seed at m_top and walk down so
  // every entry is a sum of positive terms.
  double tail = 0.0;
  double term = pmf[m_top] * x / (m_top + 1);  // pmf at m_top + 1
  for (int k = m_top + 1; k < m_top + 100000; ++k) {
    tail += term;
    if (term < tail * 1e-18 || term == 0.0) break;
    term *= x / (k + 1);
  }
  q[m_top] = tail;
  for (int m = m_top - 1; m >= split; --m) q[m] = q[m + 1] + pmf[m + 1];
  return q;
}

}  // namespace cpm::special
