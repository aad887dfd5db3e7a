#include <cmath>

#include "cpm/e_model.hpp"
#include "cpm/special.hpp"
#include "cpm/fock.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cpm;

namespace {

DetectorParams standard_params() {
  DetectorParams p;
  p.eta = 0.6;
  p.dark = 5e-3;
  return p;
}

}  // namespace

TEST_SUITE_BEGIN("e_model");

TEST_CASE("no_count") {
  SUBCASE("identity at t = 0") {
    DetectorParams p = standard_params();
    const DiagonalFockState s = make_state(StateKind::coherent(5.0));
    const DiagonalFockState out = emodel::no_count(s, p, 0.0);
    for (int n = 0; n <= s.n_max(); ++n) {
      CHECK(out[n] == doctest::Approx(s[n]).epsilon(1e-15));
    }
  }
  SUBCASE("ideal single photon") {
    DetectorParams p;  // eta = 1, dark = 0
    const DiagonalFockState one = number_state(1, 4);
    for (const double t : {0.3, 1.0, 2.5}) {
      CHECK(emodel::no_count(one, p, t).trace() ==
            doctest::Approx(std::exp(-t)).epsilon(1e-12));
    }
  }
  SUBCASE("thermal eigenrelation gives a scalar zero-count probability") {
    DetectorParams p = standard_params();
    const double nbar = 12.0;
    const double alpha = nbar / (nbar + 1.0);
    const DiagonalFockState th = make_state(StateKind::thermal(nbar));
    for (const double t : {0.5, 3.0, 20.0}) {
      const double r = std::exp(-t * (1.0 - p.q() * alpha));
      const double expected =
          std::exp(-p.dark * t) *
          (r + (1.0 - r) * (1.0 - alpha) / (1.0 - p.q() * alpha));
      CHECK(emodel::no_count(th, p, t).trace() ==
            doctest::Approx(expected).epsilon(1e-10));
    }
  }
}

TEST_CASE("count distribution") {
  SUBCASE("no time, no counts") {
    DetectorParams p = standard_params();
    const CountDistribution d =
        emodel::count_distribution(make_state(StateKind::thermal(5.0)), p, 0.0);
    CHECK(d.probs[0] == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("ideal single photon at lambda t = ln 2") {
    DetectorParams p;
    const CountDistribution d =
        emodel::count_distribution(number_state(1, 4), p, std::log(2.0));
    REQUIRE(d.m_max() >= 1);
    CHECK(d.probs[0] == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(d.probs[1] == doctest::Approx(0.5).epsilon(1e-13));
  }
  SUBCASE("probabilities sum to one") {
    DetectorParams p = standard_params();
    for (const StateKind& kind :
         {StateKind::coherent(20.0), StateKind::number(20), StateKind::thermal(20.0)}) {
      const DiagonalFockState s = make_state(kind);
      for (const double t : {1.0, 20.0, 80.0}) {
        const CountDistribution d = emodel::count_distribution(s, p, t);
        double sum = 0.0;
        for (const double v : d.probs) sum += v;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("xi_k") {
  DetectorParams p = standard_params();
  SUBCASE("t = 0 collapses to a single shifted sum") {
    const DiagonalFockState s = make_state(StateKind::coherent(8.0));
    for (const int k : {1, 2, 3}) {
      double expected = 0.0;
      for (int n = 0; n + k <= s.n_max(); ++n) expected += (n + 1.0) * s[n + k];
      expected /= s.mean();
      CHECK(emodel::xi_k(s, p, 0.0, k).value() ==
            doctest::Approx(expected).epsilon(1e-12));
    }
  }
  SUBCASE("thermal closed form") {
    const DiagonalFockState th = make_state(StateKind::thermal(25.0), -1, 1e-15);
    for (const double t : {0.2, 5.0, 60.0}) {
      for (const int k : {1, 2}) {
        CHECK(emodel::xi_k(th, p, t, k).value() ==
              doctest::Approx(emodel::xi_k_closed(StateKind::thermal(25.0), p, t, k))
                  .epsilon(1e-12));
      }
    }
  }
  SUBCASE("number-state incomplete-gamma form") {
    const DiagonalFockState num = make_state(StateKind::number(50));
    for (const double t : {1.0, 30.0, 80.0}) {
      CHECK(emodel::xi_k(num, p, t, 1).value() ==
            doctest::Approx(emodel::xi_k_closed(StateKind::number(50), p, t, 1))
                .epsilon(1e-10));
    }
  }
  SUBCASE("undefined on the vacuum") {
    CHECK_FALSE(emodel::xi_k(number_state(0, 3), p, 1.0, 1));
  }
  SUBCASE("monotone decay inside [0, 1]") {
    const DiagonalFockState s = make_state(StateKind::coherent(15.0));
    double prev = 1.0 + 1e-12;
    for (double t = 0.0; t <= 40.0; t += 2.0) {
      const double xi = emodel::xi_k(s, p, t, 1).value();
      CHECK(xi >= 0.0);
      CHECK(xi <= prev);
      prev = xi;
    }
  }
}

TEST_CASE("omega") {
  DetectorParams p = standard_params();
  const DiagonalFockState num = make_state(StateKind::number(50));
  CHECK(emodel::omega(num, p, 0.0).value() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(emodel::omega(num, p, 500.0).value() < 1e-12);
  SUBCASE("dual path at lambda t = 50") {
    CHECK(emodel::omega(num, p, 50.0).value() ==
          doctest::Approx(emodel::omega_closed(StateKind::number(50), p, 50.0))
              .epsilon(1e-10));
  }
  SUBCASE("undefined below two photons") {
    CHECK_FALSE(emodel::omega(number_state(1, 2), p, 1.0));
  }
}

TEST_CASE("psi_k") {
  SUBCASE("point evaluations") {
    const DiagonalFockState s = make_state(StateKind::thermal(4.0));
    CHECK(emodel::psi_k(s, 0.0, 0.0, 2) == doctest::Approx(s[2]).epsilon(1e-14));
    CHECK(emodel::psi_k(number_state(5, 9), 1.0, 0.0, 0) ==
          doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("coherent Bessel form") {
    const DiagonalFockState coh = make_state(StateKind::coherent(50.0), -1, 1e-15);
    for (const double q : {0.0, 0.4, 1.0}) {
      for (const double lb : {0.0, 1.0, 20.0}) {
        CHECK(emodel::psi_k(coh, q, lb, 1) ==
              doctest::Approx(emodel::psi_k_closed(StateKind::coherent(50.0), q, lb, 1))
                  .epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("counting moments") {
  DetectorParams p = standard_params();
  SUBCASE("vacuum counts only darks") {
    const DiagonalFockState vac = number_state(0, 0);
    for (const double t : {0.5, 10.0}) {
      CHECK(emodel::mean_counts(vac, p, t) ==
            doctest::Approx(p.dark * t).epsilon(1e-14));
    }
  }
  SUBCASE("every photon is eventually seen with probability eta") {
    DetectorParams ideal = p;
    ideal.dark = 0.0;
    const DiagonalFockState num = make_state(StateKind::number(50));
    CHECK(emodel::mean_counts(num, ideal, 500.0) ==
          doctest::Approx(0.6 * 50.0).epsilon(1e-9));
  }
  SUBCASE("master-equation integration oracle") {
    const DiagonalFockState s = make_state(StateKind::coherent(12.0));
    for (const double t : {0.5, 2.0, 10.0}) {
      const oracle::UteTrace trace = oracle::integrate_ute(s, p, t, false, 40000);
      CHECK(emodel::mean_counts(s, p, t) ==
            doctest::Approx(trace.mean_counts).epsilon(1e-8));
    }
  }
  SUBCASE("second moment vanishes at t = 0") {
    CHECK(emodel::second_factorial_moment(make_state(StateKind::thermal(9.0)), p,
                                          0.0) == 0.0);
  }
  SUBCASE("thermal scalars reproduce the assembled second moment") {
    const StateKind kind = StateKind::thermal(30.0);
    const DiagonalFockState th = make_state(kind, -1, 1e-15);
    const double m2 = factorial_moment(th, 2);
    const double nbar = th.mean();
    for (const double t : {0.4, 3.0, 25.0}) {
      const double xi1 = emodel::xi_k_closed(kind, p, t, 1);
      const double xi2 = emodel::xi_k_closed(kind, p, t, 2);
      const double om = emodel::omega_closed(kind, p, t);
      const double dlt = p.dark * t;
      const double expected =
          dlt * dlt + 2.0 * p.eta * nbar * dlt * (1.0 - xi1) +
          p.eta * p.eta * (m2 * (1.0 - om) - 2.0 * nbar * t * xi2);
      CHECK(emodel::second_factorial_moment(th, p, t) ==
            doctest::Approx(expected).epsilon(1e-9));
    }
  }
}

TEST_CASE("k factor") {
  SUBCASE("number states start exactly at one") {
    const DiagonalFockState num = make_state(StateKind::number(50));
    CHECK(emodel::k_limit_origin(num).value() == 1.0);
  }
  SUBCASE("ideal coherent counting is a censored Poisson race") {
    // With unit efficiency and no darks the count is min(n0, N_t) with
    // independent Poisson n0 and N_t: the clock ticks at rate lambda while
    // photons remain. Exact enumeration of that censored pair is a fully
    // independent route to both moments.
    DetectorParams ideal;  // eta = 1, dark = 0
    const double nbar = 30.0;
    const DiagonalFockState coh = make_state(StateKind::coherent(nbar));
    const int top = 400;
    for (const double t : {2.0, 20.0, 30.0, 60.0}) {
      std::vector<double> sn(top + 1, 0.0), st(top + 1, 0.0);
      for (int k = top - 1; k >= 0; --k) {
        sn[k] = sn[k + 1] + special::poisson_pmf(k, nbar);
        st[k] = st[k + 1] + special::poisson_pmf(k, t);
      }
      double mean = 0.0, second = 0.0;
      for (int k = 1; k < top; ++k) {
        const double p_ge = sn[k] * st[k];  // P(min >= k)
        mean += p_ge;
        second += 2.0 * (k - 1.0) * p_ge;
      }
      CHECK(emodel::mean_counts(coh, ideal, t) ==
            doctest::Approx(mean).epsilon(1e-10));
      CHECK(emodel::second_factorial_moment(coh, ideal, t) ==
            doctest::Approx(second).epsilon(1e-9));
    }
  }
  SUBCASE("coherent K sits at one outside the drain crossover") {
    DetectorParams ideal;
    ideal.eta = 0.6;
    ideal.dark = 0.0;
    const DiagonalFockState coh = make_state(StateKind::coherent(30.0));
    CHECK(emodel::k_factor(coh, ideal, 0.1).value() ==
          doctest::Approx(1.0).epsilon(1e-9));
    CHECK(emodel::k_factor(coh, ideal, 0.5).value() ==
          doctest::Approx(1.0).epsilon(1e-9));
    CHECK(emodel::k_factor(coh, ideal, 100.0).value() ==
          doctest::Approx(1.0).epsilon(1e-9));
    CHECK(emodel::k_factor(coh, ideal, 500.0).value() ==
          doctest::Approx(1.0).epsilon(1e-9));
    // In the crossover the censoring bites slightly; the dip stays small.
    for (const double t : {20.0, 30.0, 60.0}) {
      CHECK(std::fabs(emodel::k_factor(coh, ideal, t).value() - 1.0) < 0.02);
    }
  }
  SUBCASE("origin limit from the state weights") {
    DetectorParams ideal;
    ideal.eta = 0.6;
    ideal.dark = 0.0;
    const DiagonalFockState th = make_state(StateKind::thermal(50.0));
    const double limit = emodel::k_limit_origin(th).value();
    CHECK(limit ==
          doctest::Approx((1.0 - th[0] - th[1]) / ((1.0 - th[0]) * (1.0 - th[0])))
              .epsilon(1e-14));
    CHECK(emodel::k_factor(th, ideal, 1e-6).value() ==
          doctest::Approx(limit).epsilon(1e-7));
  }
  SUBCASE("undefined at the origin") {
    DetectorParams p = standard_params();
    CHECK_FALSE(emodel::k_factor(make_state(StateKind::coherent(5.0)), p, 0.0));
  }
}

TEST_CASE("waiting time density") {
  SUBCASE("silent vacuum") {
    DetectorParams ideal;
    ideal.dark = 0.0;
    const DiagonalFockState vac = number_state(0, 0);
    for (const double tau : {0.0, 1.0, 5.0}) {
      CHECK(emodel::waiting_density(vac, ideal, 1.0, tau) == 0.0);
    }
  }
  SUBCASE("zero efficiency leaves a pure dark renewal") {
    DetectorParams dark;
    dark.eta = 0.0;
    dark.dark = 5e-3;
    const DiagonalFockState s = make_state(StateKind::thermal(8.0));
    const double ld = dark.dark;
    for (const double tau : {0.2, 5.0, 50.0}) {
      CHECK(emodel::waiting_density(s, dark, 2.0, tau) ==
            doctest::Approx(ld * ld * std::exp(-ld * tau)).epsilon(1e-10));
    }
  }
  SUBCASE("nonnegative on a grid") {
    DetectorParams p = standard_params();
    const DiagonalFockState s = make_state(StateKind::number(40));
    const WaitingTimeCurve curve =
        emodel::waiting_curve(s, p, 2.0, emodel::default_waiting_window(p));
    for (const double w : curve.density) CHECK(w >= 0.0);
  }
}

TEST_CASE("mean waiting time regimes") {
  DetectorParams p = standard_params();
  const double window = emodel::default_waiting_window(p);
  const DiagonalFockState s = make_state(StateKind::number(100));
  const double early = emodel::mean_waiting(s, p, 1.0, window).value();
  const double mid = emodel::mean_waiting(s, p, 50.0, window).value();
  const double late = emodel::mean_waiting(s, p, 140.0, window).value();
  CHECK(std::fabs(mid - early) / early < 0.05);  // flat while photons remain
  CHECK(late > 3.0 * early);                     // dark-dominated rise
  SUBCASE("dark-only limit") {
    DetectorParams dark = p;
    dark.eta = 0.0;
    const double w = 100.0 / dark.dark;
    CHECK(emodel::mean_waiting(number_state(1, 1), dark, 1.0, w).value() ==
          doctest::Approx(1.0 / dark.dark).epsilon(0.02));
  }
}

TEST_CASE("cavity photon number") {
  DetectorParams p = standard_params();
  SUBCASE("initial value") {
    const DiagonalFockState s = make_state(StateKind::coherent(50.0));
    CHECK(emodel::n_cav(s, p, 0.0) == doctest::Approx(s.mean()).epsilon(1e-12));
  }
  SUBCASE("number-state dual path") {
    const DiagonalFockState num = make_state(StateKind::number(50));
    for (const double t : {1.0, 40.0, 70.0}) {
      CHECK(emodel::n_cav(num, p, t) ==
            doctest::Approx(50.0 *
                            emodel::xi_k_closed(StateKind::number(50), p, t, 1))
                .epsilon(1e-10));
    }
  }
  SUBCASE("master-equation integration oracle") {
    const DiagonalFockState s = make_state(StateKind::coherent(12.0));
    const oracle::UteTrace trace = oracle::integrate_ute(s, p, 5.0, false, 40000);
    CHECK(emodel::n_cav(s, p, 5.0) ==
          doctest::Approx(trace.mean_photons).epsilon(1e-8));
    CHECK(emodel::ute(s, p, 5.0).mean() ==
          doctest::Approx(trace.mean_photons).epsilon(1e-8));
  }
}

TEST_CASE("omega and xi stay ordered in time") {
  DetectorParams p = standard_params();
  const DiagonalFockState th = make_state(StateKind::thermal(20.0));
  double prev = 1.0 + 1e-12;
  for (double t = 0.0; t <= 100.0; t += 5.0) {
    const double om = emodel::omega(th, p, t).value();
    CHECK(om >= 0.0);
    CHECK(om <= prev);
    prev = om;
  }
}

TEST_SUITE_END();
