#pragma once

#include <vector>

// Special functions needed by the closed-form Fock sums: integer-order
// modified Bessel functions, integer-order incomplete gamma functions, and
// Poisson pmf/cdf/survival tables. Everything here is pure and reentrant.
//
// Linear-scale results overflow once factorials pass ~170!; every function
// with that risk has a log-scale twin that is safe for arguments up to a few
// thousand.
namespace cpm::special {

/// log(n!) with a cached table for small n.
double log_factorial(int n);

/// log C(n, k); requires 0 <= k <= n.
double log_binomial(int n, int k);

/// Modified Bessel function I_n(x) of integer order n >= 0, x >= 0,
/// evaluated by its power series with log-domain terms.
/// Relative error is a few ulps times the term count (~1e-13 for x <= 300).
double bessel_i(int n, double x);

/// log I_n(x); returns -inf for I_n(0) with n >= 1.
double log_bessel_i(int n, double x);

/// Upper incomplete gamma Gamma(a, x) = (a-1)! e^{-x} sum_{k<a} x^k/k!
/// for integer a >= 1, x >= 0. Overflows for a > ~170; see log twin.
double upper_gamma(int a, double x);
double log_upper_gamma(int a, double x);

/// Lower incomplete gamma gamma(a, x) = (a-1)! - Gamma(a, x). For x < a the
/// subtraction cancels badly, so this switches to the ascending series,
/// which has positive terms only.
double lower_gamma(int a, double x);
double log_lower_gamma(int a, double x);

/// Poisson(x) pmf at m, seeded through exp(log pmf) so it stays finite for
/// any m, x >= 0.
double poisson_pmf(int m, double x);

/// pmf[m] for m = 0..m_top.
std::vector<double> poisson_pmf_table(double x, int m_top);

/// cdf[m] = P(X <= m) for m = 0..m_top, forward-accumulated (positive sums,
/// no cancellation).
std::vector<double> poisson_cdf_table(double x, int m_top);

/// q[m] = P(X > m) for m = 0..m_top. Computed without forming 1 - cdf in the
/// regime where the survival probability is small: above the median the
/// table is built by summing the upper tail directly, so entries remain
/// accurate in relative terms down to the underflow floor.
std::vector<double> poisson_survival_table(double x, int m_top);

}  // namespace cpm::special
