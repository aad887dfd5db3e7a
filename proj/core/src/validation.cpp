#include "cpm/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <ostream>
#include <sstream>

#include "cpm/e_model.hpp"
#include "cpm/fock.hpp"
#include "cpm/rng.hpp"
#include "cpm/sd_model.hpp"
#include "cpm/special.hpp"
#include "cpm/superops.hpp"
#include "cpm/table.hpp"
#include "cpm/trajectories.hpp"

namespace cpm {

namespace {

DetectorParams base_params() {
  DetectorParams p;
  p.eta = 0.6;
  p.dark = 5e-3;
  return p;
}

std::string fmt(const char* format, ...) {
  char buf[256];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

double rel_diff(double a, double b) {
  const double scale = std::max({std::fabs(a), std::fabs(b), 1e-280});
  return std::fabs(a - b) / scale;
}

const std::vector<StateKind> kFamilies50 = {
    StateKind::coherent(50.0), StateKind::number(50), StateKind::thermal(50.0)};

// ---------------------------------------------------------------------------
// 1. Count distributions sum to one.

CriterionResult criterion_normalization() {
  const DetectorParams params = base_params();
  double worst = 0.0;
  for (const StateKind& kind : kFamilies50) {
    const DiagonalFockState state = make_state(kind);
    for (const double lt : {0.1, 1.0, 5.0}) {
      const CountDistribution dist = sd::count_distribution(state, params, lt);
      double sum = 0.0;
      for (const double p : dist.probs) sum += p;
      worst = std::max(worst, std::fabs(sum - 1.0));
    }
    for (const double lt : {1.0, 50.0, 200.0}) {
      const CountDistribution dist = emodel::count_distribution(state, params, lt);
      double sum = 0.0;
      for (const double p : dist.probs) sum += p;
      worst = std::max(worst, std::fabs(sum - 1.0));
    }
  }
  return {1, "normalization", worst < 1e-9,
          fmt("max |sum_m P(m) - 1| = %.3e (tol 1e-9)", worst), 0.0};
}

// ---------------------------------------------------------------------------
// 2. Distribution moments equal the closed-form moments.

CriterionResult criterion_moment_consistency() {
  const DetectorParams params = base_params();
  double worst = 0.0;
  for (const StateKind& kind : kFamilies50) {
    const DiagonalFockState state = make_state(kind);
    for (const double lt : {0.1, 1.0, 5.0}) {
      const CountDistribution dist = sd::count_distribution(state, params, lt);
      worst = std::max(worst, rel_diff(dist.mean(), sd::mean_counts(state, params, lt)));
      worst = std::max(worst, rel_diff(dist.second_factorial(),
                                       sd::second_factorial_moment(state, params, lt)));
    }
    for (const double lt : {1.0, 50.0, 200.0}) {
      const CountDistribution dist = emodel::count_distribution(state, params, lt);
      worst = std::max(worst,
                       rel_diff(dist.mean(), emodel::mean_counts(state, params, lt)));
      worst = std::max(worst,
                       rel_diff(dist.second_factorial(),
                                emodel::second_factorial_moment(state, params, lt)));
    }
  }
  return {2, "moment-consistency", worst < 1e-8,
          fmt("max relative moment mismatch = %.3e (tol 1e-8)", worst), 0.0};
}

// ---------------------------------------------------------------------------
// 3. Trajectory ensembles agree with the analytic means within 3 sigma.

CriterionResult criterion_monte_carlo(const ValidationOptions& options) {
  const DetectorParams params = base_params();
  double worst_z = 0.0;
  int checks = 0;
  for (const StateKind& kind : kFamilies50) {
    const DiagonalFockState state = make_state(kind);
    for (const traj::Model model : {traj::Model::sd, traj::Model::e}) {
      std::vector<double> grid;
      for (int i = 1; i <= 10; ++i) {
        grid.push_back(model == traj::Model::sd ? 0.5 * i : 20.0 * i);
      }
      const traj::EnsembleStats stats = traj::estimate_count_moments(
          state, params, model, grid, options.mc_trajectories, options.seed,
          options.threads);
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const double analytic = model == traj::Model::sd
                                    ? sd::mean_counts(state, params, grid[k])
                                    : emodel::mean_counts(state, params, grid[k]);
        const double se = stats.mean_counts[k].std_error;
        if (se <= 0.0) return {3, "monte-carlo-mean", false, "zero standard error", 0.0};
        worst_z = std::max(worst_z, std::fabs(stats.mean_counts[k].value - analytic) / se);
        ++checks;
      }
    }
  }
  return {3, "monte-carlo-mean", worst_z <= 3.0,
          fmt("worst |z| = %.2f over %d grid checks (tol 3 sigma, %ld traj)",
              worst_z, checks, options.mc_trajectories),
          0.0};
}

// ---------------------------------------------------------------------------
// 4. Zero-dark K factor is the state constant, independent of time.

CriterionResult criterion_sd_k_constants() {
  DetectorParams params = base_params();
  params.dark = 0.0;
  const std::vector<double> grid = {0.01, 0.05, 0.1, 0.5, 1.0, 2.0, 5.0};
  struct Case {
    StateKind kind;
    double expected;
    double eps;
  };
  const std::vector<Case> cases = {
      {StateKind::thermal(50.0), 2.0, 1e-14},
      {StateKind::number(50), 0.98, kDefaultTailEps},
      {StateKind::coherent(50.0), 1.0, kDefaultTailEps},
  };
  double worst_err = 0.0, worst_spread = 0.0;
  for (const Case& c : cases) {
    const DiagonalFockState state = make_state(c.kind, -1, c.eps);
    double lo = 1e300, hi = -1e300;
    for (const double lt : grid) {
      const double k = sd::k_factor(state, params, lt).value();
      lo = std::min(lo, k);
      hi = std::max(hi, k);
      worst_err = std::max(worst_err, std::fabs(k - c.expected));
    }
    worst_spread = std::max(worst_spread, hi - lo);
  }
  return {4, "sd-k-constants", worst_err < 1e-9 && worst_spread < 1e-10,
          fmt("max |K - K_state| = %.3e (tol 1e-9), max spread = %.3e (tol 1e-10)",
              worst_err, worst_spread),
          0.0};
}

// ---------------------------------------------------------------------------
// 5. Small-time limit of the E-model K factor.

CriterionResult criterion_e_k_origin() {
  DetectorParams params = base_params();
  params.dark = 0.0;
  const double lt = 1e-6;
  double worst = 0.0;
  for (const StateKind& kind : kFamilies50) {
    const DiagonalFockState state = make_state(kind);
    const double k = emodel::k_factor(state, params, lt).value();
    const double limit = emodel::k_limit_origin(state).value();
    worst = std::max(worst, std::fabs(k - limit));
  }
  const DiagonalFockState number = make_state(StateKind::number(50));
  const double number_limit = emodel::k_limit_origin(number).value();
  const bool number_exact = number_limit == 1.0;
  return {5, "e-k-origin", worst < 1e-6 && number_exact,
          fmt("max |K(1e-6) - K_0| = %.3e (tol 1e-6); number-state limit = %.17g",
              worst, number_limit),
          0.0};
}

// ---------------------------------------------------------------------------
// 6. Generic Fock sums against the per-family closed forms.

CriterionResult criterion_dual_path() {
  const DetectorParams params = base_params();
  double worst = 0.0;
  for (const double nbar : {10.0, 50.0, 100.0}) {
    const std::vector<StateKind> kinds = {StateKind::coherent(nbar),
                                          StateKind::number(static_cast<int>(nbar)),
                                          StateKind::thermal(nbar)};
    for (const StateKind& kind : kinds) {
      // The grid reaches lambda t (and lambda beta) = 50; the generic sums
      // carry Poisson(lambda t) weights, so the truncation must cover that
      // peak as well as the state's own tail. The second-moment sums weight
      // the thermal tail by j^2, hence the tighter target there.
      const double tail_eps =
          kind.family == StateFamily::thermal ? 1e-17 : 1e-15;
      const int top =
          std::max(truncation_for_tail(kind, tail_eps),
                   kind.family == StateFamily::number ? 0 : 170);
      const DiagonalFockState state = make_state(kind, top);
      for (const double lt : {0.1, 1.0, 10.0, 50.0}) {
        for (const int k : {1, 2}) {
          worst = std::max(worst, rel_diff(emodel::xi_k(state, params, lt, k).value(),
                                           emodel::xi_k_closed(kind, params, lt, k)));
        }
        worst = std::max(worst, rel_diff(emodel::omega(state, params, lt).value(),
                                         emodel::omega_closed(kind, params, lt)));
      }
      for (const double q : {0.0, 0.4, 1.0}) {
        for (const double lb : {0.0, 0.5, 5.0, 50.0}) {
          for (const int k : {0, 1, 3}) {
            worst = std::max(worst, rel_diff(emodel::psi_k(state, q, lb, k),
                                             emodel::psi_k_closed(kind, q, lb, k)));
          }
        }
      }
      for (const auto& [lt, ltau] : std::vector<std::pair<double, double>>{
               {0.1, 0.5}, {1.0, 1.0}, {5.0, 0.2}}) {
        for (const int k : {0, 1, 2}) {
          worst = std::max(worst, rel_diff(sd::phi_k_w(state, params, lt, ltau, k),
                                           sd::phi_k_w_closed(kind, params, lt, ltau, k)));
        }
      }
    }
  }
  return {6, "dual-path-closed-forms", worst < 1e-10,
          fmt("max relative mismatch = %.3e (tol 1e-10)", worst), 0.0};
}

// ---------------------------------------------------------------------------
// 7. Effective counting time scales with nbar in one model only.

double effective_counting_time(bool e_model, double nbar) {
  DetectorParams params = base_params();
  params.dark = 0.0;
  const DiagonalFockState state = make_state(StateKind::coherent(nbar));
  const double target = 0.95 * params.eta * state.mean();
  const auto mean = [&](double t) {
    return e_model ? emodel::mean_counts(state, params, t)
                   : sd::mean_counts(state, params, t);
  };
  double hi = 1.0;
  while (mean(hi) < target && hi < 1e6) hi *= 2.0;
  double lo = 0.0;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mean(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

CriterionResult criterion_counting_time() {
  const double e_ratio =
      effective_counting_time(true, 100.0) / effective_counting_time(true, 50.0);
  const double sd_ratio =
      effective_counting_time(false, 100.0) / effective_counting_time(false, 50.0);
  const bool pass = e_ratio >= 1.7 && e_ratio <= 2.3 && sd_ratio >= 0.95 &&
                    sd_ratio <= 1.05;
  return {7, "counting-time-scaling", pass,
          fmt("t_E(100)/t_E(50): E = %.3f (want [1.7,2.3]), SD = %.3f (want [0.95,1.05])",
              e_ratio, sd_ratio),
          0.0};
}

// ---------------------------------------------------------------------------
// 8. Mean-waiting-time regimes versus the cavity photon number.

CriterionResult criterion_waiting_regimes() {
  const DetectorParams params = base_params();
  const DiagonalFockState state = make_state(StateKind::number(100));
  const double window = emodel::default_waiting_window(params);

  // E model: flat plateau while photons remain; after the cavity empties
  // (N_CAV below 0.3) the dark counts take over and the mean gap climbs past
  // three times the plateau.
  const std::vector<double> e_grid = {1,   5,   10,  20,  40,  60,  80,  90,
                                      100, 110, 120, 130, 140, 150, 170, 200};
  double plateau = -1.0, plateau_lo = 1e300, plateau_hi = -1e300;
  double rise = -1.0;
  for (const double lt : e_grid) {
    const double ncav = emodel::n_cav(state, params, lt);
    const double tau = emodel::mean_waiting(state, params, lt, window).value();
    if (ncav > 5.0) {
      if (plateau < 0.0) plateau = tau;
      plateau_lo = std::min(plateau_lo, tau);
      plateau_hi = std::max(plateau_hi, tau);
    } else if (ncav < 0.3) {
      rise = std::max(rise, tau);
    }
  }
  const double flatness = (plateau_hi - plateau_lo) / plateau;
  const bool e_ok = plateau > 0.0 && rise > 0.0 && flatness < 0.05 &&
                    rise > 3.0 * plateau;

  // The other model: strictly increasing over the same N_CAV range (5..0.3
  // corresponds to lambda t in [3.0, 5.9] for nbar = 100).
  bool sd_increasing = true;
  double prev = -1.0;
  for (int i = 0; i < 10; ++i) {
    const double lt = 3.0 + i * (5.9 - 3.0) / 9.0;
    const double tau = sd::mean_waiting(state, params, lt, window).value();
    if (tau <= prev) sd_increasing = false;
    prev = tau;
  }

  // Dark-only limit: the mean gap approaches the dark-count spacing.
  DetectorParams dark_only = params;
  dark_only.eta = 0.0;
  const DiagonalFockState one = make_state(StateKind::number(1));
  const double dark_window = 100.0 / (dark_only.dark * dark_only.lambda);
  const double expected = 1.0 / (dark_only.dark * dark_only.lambda);
  const double tau_sd = sd::mean_waiting(one, dark_only, 1.0, dark_window).value();
  const double tau_e = emodel::mean_waiting(one, dark_only, 1.0, dark_window).value();
  const double dark_err =
      std::max(std::fabs(tau_sd - expected), std::fabs(tau_e - expected)) / expected;

  const bool pass = e_ok && sd_increasing && dark_err < 0.02;
  return {8, "waiting-regimes", pass,
          fmt("E plateau spread %.2f%% (tol 5%%), rise/plateau = %.2f (want > 3); "
              "SD increasing = %s; dark-only err = %.2f%% (tol 2%%)",
              100.0 * flatness, rise / plateau, sd_increasing ? "yes" : "no",
              100.0 * dark_err),
          0.0};
}

// ---------------------------------------------------------------------------
// 9. Dead-time first moment keeps growing with the truncation.

CriterionResult criterion_dead_time() {
  const DetectorParams params = base_params();
  const std::vector<int> schedule = {40, 80, 160};
  const std::vector<double> probe = sd::dead_time_divergence_probe(
      StateKind::coherent(10.0), params, 1.0, 0.01, schedule);
  const bool increasing = probe[0] < probe[1] && probe[1] < probe[2];
  const double growth = probe.back() / probe.front();
  return {9, "dead-time-divergence", increasing && growth > 2.0,
          fmt("moment sequence {%.6g, %.6g, %.6g}, last/first = %.3g "
              "(want strictly increasing and > 2)",
              probe[0], probe[1], probe[2], growth),
          0.0};
}

// ---------------------------------------------------------------------------
// 10. Cavity damping: exact reduction at c = 0, small effect at c = 0.1.

CriterionResult criterion_cavity_damping() {
  const DetectorParams params = base_params();
  const DiagonalFockState coh = make_state(StateKind::coherent(50.0));
  double worst_elem = 0.0;
  for (const double lt : {0.1, 1.0, 3.0}) {
    const DiagonalFockState a = sd::no_count(coh, params, lt);
    const DiagonalFockState b = sd::no_count_damped(coh, params, lt);
    for (int n = 0; n <= a.n_max(); ++n) {
      worst_elem = std::max(worst_elem, std::fabs(a[n] - b[n]));
    }
  }

  DetectorParams damped = params;
  damped.cavity = 0.1;
  const DiagonalFockState one = make_state(StateKind::number(1));
  double worst_rel = 0.0;
  for (const double lt : {0.25, 0.5, 1.0}) {
    const double p0 = sd::no_count(one, params, lt).trace();
    const double p0_damped = sd::no_count_damped(one, damped, lt).trace();
    worst_rel = std::max(worst_rel, std::fabs(p0_damped - p0) / p0);
  }
  return {10, "cavity-damping", worst_elem <= 1e-15 && worst_rel < 0.05,
          fmt("c=0 elementwise diff = %.2e (tol 1e-15); c=0.1 zero-count shift = "
              "%.2f%% (tol 5%%)",
              worst_elem, 100.0 * worst_rel),
          0.0};
}

// ---------------------------------------------------------------------------
// 11. Superoperator commutation identities on random states.

CriterionResult criterion_superop_identities() {
  SplitMix64 rng(0xC0FFEEULL);
  double worst = 0.0;
  const auto elem_diff = [](const DiagonalFockState& a, const DiagonalFockState& b) {
    double w = 0.0;
    for (int n = 0; n <= a.n_max(); ++n) {
      w = std::max(w, std::fabs(a[n] - b[n]) /
                          std::max({1.0, std::fabs(a[n]), std::fabs(b[n])}));
    }
    return w;
  };
  for (int trial = 0; trial < 100; ++trial) {
    const int top = 5 + static_cast<int>(rng.next_unit() * 96);
    DiagonalFockState s;
    s.probs.resize(top + 1);
    double sum = 0.0;
    for (double& p : s.probs) sum += (p = rng.next_unit());
    for (double& p : s.probs) p /= sum;
    const double lt = 5.0 * rng.next_unit();
    const double y = 2.0 * rng.next_unit();
    const double q = rng.next_unit();

    // A U_t = e^{-lt} U_t A.
    DiagonalFockState lhs = apply_a(apply_u(s, lt));
    DiagonalFockState rhs = apply_u(apply_a(s), lt);
    for (double& p : rhs.probs) p *= std::exp(-lt);
    worst = std::max(worst, elem_diff(lhs, rhs));

    // e^{yA} U_t = U_t e^{y e^{-lt} A}.
    lhs = apply_exp_a(apply_u(s, lt), y);
    rhs = apply_u(apply_exp_a(s, y * std::exp(-lt)), lt);
    worst = std::max(worst, elem_diff(lhs, rhs));

    // Eps-series operators commute pairwise.
    lhs = apply_exp_eps(apply_resolvent_eps(s, q), y);
    rhs = apply_resolvent_eps(apply_exp_eps(s, y), q);
    worst = std::max(worst, elem_diff(lhs, rhs));
    lhs = apply_r(apply_exp_eps(s, y), lt, q);
    rhs = apply_exp_eps(apply_r(s, lt, q), y);
    worst = std::max(worst, elem_diff(lhs, rhs));

    // Resolvent inverts (1 - q Eps) on the truncated space.
    DiagonalFockState shifted = apply_eps(s);
    DiagonalFockState u = s;
    for (int n = 0; n <= top; ++n) u[n] -= q * shifted[n];
    worst = std::max(worst, elem_diff(apply_resolvent_eps(u, q), s));
  }
  return {11, "superop-identities", worst < 1e-12,
          fmt("max elementwise mismatch = %.3e over 100 random states (tol 1e-12)",
              worst),
          0.0};
}

// ---------------------------------------------------------------------------
// 12. Bit-identical ensembles and serialized tables for any thread count.

CriterionResult criterion_determinism(const ValidationOptions& options) {
  const DetectorParams params = base_params();
  const DiagonalFockState state = make_state(StateKind::coherent(20.0));
  const std::vector<double> grid = {0.5, 1.0, 2.0, 3.0, 4.0, 5.0};
  const long n_traj = 20000;
  const traj::EnsembleStats serial = traj::estimate_count_moments(
      state, params, traj::Model::sd, grid, n_traj, options.seed, 1);
  const traj::EnsembleStats parallel = traj::estimate_count_moments(
      state, params, traj::Model::sd, grid, n_traj, options.seed, 8);
  const traj::EnsembleStats repeat = traj::estimate_count_moments(
      state, params, traj::Model::sd, grid, n_traj, options.seed, 8);

  const auto to_table = [&](const traj::EnsembleStats& stats) {
    Table table;
    table.columns = {"lambda_t", "mc_mean", "mc_mean_se"};
    for (std::size_t k = 0; k < grid.size(); ++k) {
      table.rows.push_back({grid[k], stats.mean_counts[k].value,
                            stats.mean_counts[k].std_error});
    }
    return to_csv(table);
  };
  const bool stats_equal = serial == parallel && parallel == repeat;
  const bool bytes_equal = to_table(serial) == to_table(parallel);
  return {12, "determinism", stats_equal && bytes_equal,
          fmt("serial/parallel ensembles identical = %s, serialized bytes identical = %s",
              stats_equal ? "yes" : "no", bytes_equal ? "yes" : "no"),
          0.0};
}

}  // namespace

std::vector<CriterionResult> run_acceptance_criteria(const ValidationOptions& options) {
  using Runner = std::function<CriterionResult()>;
  const std::vector<Runner> runners = {
      [] { return criterion_normalization(); },
      [] { return criterion_moment_consistency(); },
      [&] { return criterion_monte_carlo(options); },
      [] { return criterion_sd_k_constants(); },
      [] { return criterion_e_k_origin(); },
      [] { return criterion_dual_path(); },
      [] { return criterion_counting_time(); },
      [] { return criterion_waiting_regimes(); },
      [] { return criterion_dead_time(); },
      [] { return criterion_cavity_damping(); },
      [] { return criterion_superop_identities(); },
      [&] { return criterion_determinism(options); },
  };
  std::vector<CriterionResult> results;
  results.reserve(runners.size());
  for (const Runner& run : runners) {
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r = run();
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                    .count();
    results.push_back(std::move(r));
  }
  return results;
}

bool print_report(std::ostream& os, const std::vector<CriterionResult>& results) {
  bool all = true;
  for (const CriterionResult& r : results) {
    char line[512];
    std::snprintf(line, sizeof(line), "[%2d/%zu] %s  %-26s %s (%.2f s)\n", r.index,
                  results.size(), r.passed ? "PASS" : "FAIL", r.name.c_str(),
                  r.detail.c_str(), r.seconds);
    os << line;
    all = all && r.passed;
  }
  os << (all ? "acceptance: all criteria passed\n"
             : "acceptance: FAILURES present\n");
  return all;
}

}  // namespace cpm
