#include "cpm/superops.hpp"

#include <cmath>
#include <stdexcept>

#include "cpm/special.hpp"

namespace cpm {

namespace {

DiagonalFockState like(const DiagonalFockState& s) {
  DiagonalFockState out;
  out.probs.assign(s.probs.size(), 0.0);
  out.tail_mass = s.tail_mass;
  out.normalized = false;
  return out;
}

}  // namespace

DiagonalFockState apply_a(const DiagonalFockState& s) {
  DiagonalFockState out = like(s);
  const int top = s.n_max();
  for (int n = 0; n < top; ++n) out[n] = (n + 1.0) * s[n + 1];
  return out;
}

DiagonalFockState apply_eps(const DiagonalFockState& s) {
  DiagonalFockState out = like(s);
  const int top = s.n_max();
  for (int n = 0; n < top; ++n) out[n] = s[n + 1];
  return out;
}

DiagonalFockState apply_u(const DiagonalFockState& s, double lt) {
  if (lt < 0.0) throw std::domain_error("apply_u: lt < 0");
  DiagonalFockState out = like(s);
  for (int n = 0; n <= s.n_max(); ++n) out[n] = std::exp(-lt * n) * s[n];
  return out;
}

DiagonalFockState apply_exp_a(const DiagonalFockState& s, double y) {
  if (y < 0.0) throw std::domain_error("apply_exp_a: y < 0");
  DiagonalFockState out = like(s);
  const int top = s.n_max();
  if (y == 0.0) {
    out.probs = s.probs;
    return out;
  }
  // Per-term log domain: C(n+l, n) alone overflows long before the products
  // C(n+l, n) y^l in[n+l] do.
  const double ly = std::log(y);
  for (int n = 0; n <= top; ++n) {
    double acc = s[n];
    for (int l = 1; l + n <= top; ++l) {
      const double p = s[n + l];
      if (p == 0.0) continue;
      acc += std::exp(special::log_binomial(n + l, n) + l * ly + std::log(p));
    }
    out[n] = acc;
  }
  return out;
}

DiagonalFockState apply_exp_eps(const DiagonalFockState& s, double y) {
  if (y < 0.0) throw std::domain_error("apply_exp_eps: y < 0");
  DiagonalFockState out = like(s);
  const int top = s.n_max();
  if (y <= 600.0) {
    // Weights y^l/l! stay below e^600; plain recurrence.
    std::vector<double> w(top + 1);
    w[0] = 1.0;
    for (int l = 1; l <= top; ++l) w[l] = w[l - 1] * y / l;
    for (int n = 0; n <= top; ++n) {
      double acc = 0.0;
      for (int l = 0; l + n <= top; ++l) acc += w[l] * s[n + l];
      out[n] = acc;
    }
    return out;
  }
  const double ly = std::log(y);
  for (int n = 0; n <= top; ++n) {
    double acc = 0.0;
    for (int l = 0; l + n <= top; ++l) {
      const double p = s[n + l];
      if (p == 0.0) continue;
      acc += std::exp(l * ly - special::log_factorial(l) + std::log(p));
    }
    out[n] = acc;
  }
  return out;
}

DiagonalFockState apply_resolvent_eps(const DiagonalFockState& s, double q) {
  if (q < 0.0 || q > 1.0) throw std::domain_error("apply_resolvent_eps: q outside [0,1]");
  DiagonalFockState out = like(s);
  const int top = s.n_max();
  out[top] = s[top];
  for (int n = top - 1; n >= 0; --n) out[n] = s[n] + q * out[n + 1];
  return out;
}

DiagonalFockState apply_r(const DiagonalFockState& s, double lt, double q) {
  if (lt < 0.0) throw std::domain_error("apply_r: lt < 0");
  if (q < 0.0 || q > 1.0) throw std::domain_error("apply_r: q outside [0,1]");
  DiagonalFockState out = like(s);
  const int top = s.n_max();
  const double y = lt * q;
  // Fold the e^{-lt} prefactor into the series weights so large lt underflows
  // to zero instead of producing inf * 0.
  std::vector<double> w(top + 1);
  const double w0 = std::exp(-lt);
  if (w0 > 0.0 && y <= 600.0) {
    w[0] = w0;
    for (int l = 1; l <= top; ++l) w[l] = w[l - 1] * y / l;
  } else {
    const double ly = y > 0.0 ? std::log(y) : 0.0;
    for (int l = 0; l <= top; ++l) {
      w[l] = y == 0.0 ? (l == 0 ? w0 : 0.0)
                      : std::exp(-lt + l * ly - special::log_factorial(l));
    }
  }
  for (int n = 0; n <= top; ++n) {
    double acc = 0.0;
    for (int l = 0; l + n <= top; ++l) acc += w[l] * s[n + l];
    out[n] = acc;
  }
  return out;
}

}  // namespace cpm
