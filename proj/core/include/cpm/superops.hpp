#pragma once

#include "cpm/fock.hpp"

// Elementary superoperators acting on diagonal Fock states. All of them are
// linear maps on the weight vector; none preserves the trace in general, so
// outputs are returned with normalized = false. Series operators terminate
// exactly at the truncation edge (the shift operators are nilpotent there);
// the input's recorded tail mass propagates unchanged as the error estimate.
namespace cpm {

/// Photon absorption a rho a^dagger: out[n] = (n+1) in[n+1], out[n_max] = 0.
DiagonalFockState apply_a(const DiagonalFockState& s);

/// Exponential-phase absorption E_- rho E_+: out[n] = in[n+1], out[n_max] = 0.
DiagonalFockState apply_eps(const DiagonalFockState& s);

/// Number-damping e^{-lt n/2} rho e^{-lt n/2}: out[n] = e^{-lt n} in[n].
DiagonalFockState apply_u(const DiagonalFockState& s, double lt);

/// exp(y A): out[n] = sum_l C(n+l, n) y^l in[n+l], y >= 0.
DiagonalFockState apply_exp_a(const DiagonalFockState& s, double y);

/// exp(y Eps): out[n] = sum_l y^l/l! in[n+l], y >= 0.
DiagonalFockState apply_exp_eps(const DiagonalFockState& s, double y);

/// (1 - q Eps)^{-1}: out[n] = sum_l q^l in[n+l], 0 <= q <= 1.
DiagonalFockState apply_resolvent_eps(const DiagonalFockState& s, double q);

/// R(lt, q) = e^{-lt (1 - q Eps)}: out = e^{-lt} exp(lt q Eps) in.
DiagonalFockState apply_r(const DiagonalFockState& s, double lt, double q);

}  // namespace cpm
