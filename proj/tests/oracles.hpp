#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "cpm/detector.hpp"
#include "cpm/fock.hpp"

// Test-only reference implementations, independent of the library's
// evaluation paths: classical master-equation integration for the diagonal
// dynamics, and adaptive Simpson quadrature. Deliberately brute force.
namespace oracle {

struct UteTrace {
  double mean_photons = 0.0;       // E[n] at the end time
  double vacuum_prob = 0.0;        // rho_0 at the end time
  double mean_counts = 0.0;        // integral of lambda (eta g(t) + d) dt
};

// Integrates d rho_n/dt = -lambda g_n rho_n + lambda g_{n+1} rho_{n+1} with
// g_n = n (absorption rate proportional to the photon number) or
// g_n = [n >= 1] (rate saturating at one photon), accumulating the expected
// number of registered counts along the way. Fixed-step RK4.
inline UteTrace integrate_ute(const cpm::DiagonalFockState& initial,
                              const cpm::DetectorParams& params, double t_end,
                              bool number_proportional, int steps = 60000) {
  const int top = initial.n_max();
  std::vector<double> rho = initial.probs;
  const auto g = [&](int n) {
    return number_proportional ? static_cast<double>(n) : (n >= 1 ? 1.0 : 0.0);
  };
  const auto deriv = [&](const std::vector<double>& r, std::vector<double>& dr) {
    for (int n = 0; n <= top; ++n) {
      const double gain = n < top ? g(n + 1) * r[n + 1] : 0.0;
      dr[n] = params.lambda * (gain - g(n) * r[n]);
    }
  };
  const auto click_rate = [&](const std::vector<double>& r) {
    double active = 0.0;
    for (int n = 1; n <= top; ++n) active += g(n) * r[n];
    return params.lambda * (params.eta * active + params.dark);
  };

  // RK4 on the system (rho, m) with dm/dt = click_rate(rho).
  const double h = t_end / steps;
  std::vector<double> k1(top + 1), k2(top + 1), k3(top + 1), k4(top + 1),
      tmp(top + 1);
  double counts = 0.0;
  for (int s = 0; s < steps; ++s) {
    deriv(rho, k1);
    const double m1 = click_rate(rho);
    for (int n = 0; n <= top; ++n) tmp[n] = rho[n] + 0.5 * h * k1[n];
    deriv(tmp, k2);
    const double m2 = click_rate(tmp);
    for (int n = 0; n <= top; ++n) tmp[n] = rho[n] + 0.5 * h * k2[n];
    deriv(tmp, k3);
    const double m3 = click_rate(tmp);
    for (int n = 0; n <= top; ++n) tmp[n] = rho[n] + h * k3[n];
    deriv(tmp, k4);
    const double m4 = click_rate(tmp);
    for (int n = 0; n <= top; ++n) {
      rho[n] += h / 6.0 * (k1[n] + 2.0 * k2[n] + 2.0 * k3[n] + k4[n]);
    }
    counts += h / 6.0 * (m1 + 2.0 * m2 + 2.0 * m3 + m4);
  }
  UteTrace out;
  for (int n = 1; n <= top; ++n) out.mean_photons += n * rho[n];
  out.vacuum_prob = rho[0];
  out.mean_counts = counts;
  return out;
}

// Adaptive Simpson quadrature.
inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double tol, int depth = 40) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  std::function<double(double, double, double, double, double, double, int)> rec =
      [&](double x0, double x2, double f0, double f1, double f2, double whole,
          int d) -> double {
    const double x1l = 0.5 * (x0 + 0.5 * (x0 + x2));
    const double xm = 0.5 * (x0 + x2);
    const double x1r = 0.5 * (xm + x2);
    const double fl = f(x1l), fr = f(x1r);
    const double left = (xm - x0) / 6.0 * (f0 + 4.0 * fl + f1);
    const double right = (x2 - xm) / 6.0 * (f1 + 4.0 * fr + f2);
    if (d <= 0 || std::fabs(left + right - whole) < 15.0 * tol) {
      return left + right + (left + right - whole) / 15.0;
    }
    return rec(x0, xm, f0, fl, f1, left, d - 1) +
           rec(xm, x2, f1, fr, f2, right, d - 1);
  };
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return rec(a, b, fa, fm, fb, whole, depth);
}

}  // namespace oracle
