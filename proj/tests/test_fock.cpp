#include <cmath>

#include "cpm/fock.hpp"
#include "cpm/rng.hpp"
#include "cpm/special.hpp"
#include "doctest.h"

using namespace cpm;

TEST_SUITE_BEGIN("fock");

TEST_CASE("coherent state") {
  SUBCASE("vacuum limit") {
    const DiagonalFockState s = coherent_state(0.0, 10);
    CHECK(s[0] == 1.0);
    for (int n = 1; n <= 10; ++n) CHECK(s[n] == 0.0);
  }
  SUBCASE("weight ratio at nbar = 1") {
    const DiagonalFockState s = coherent_state(1.0, 40);
    CHECK(s[1] / s[0] == doctest::Approx(1.0).epsilon(1e-13));
  }
  SUBCASE("auto truncation keeps the mass and the mean") {
    const int top = truncation_for_tail(StateKind::coherent(50.0), 1e-12);
    const DiagonalFockState s = coherent_state(50.0, top);
    CHECK(std::fabs(s.trace() - 1.0) < 1e-12);
    CHECK(std::fabs(s.mean() - 50.0) < 1e-9);
  }
  SUBCASE("negative nbar rejected") {
    CHECK_THROWS_AS(coherent_state(-1.0, 10), std::domain_error);
  }
}

TEST_CASE("number state") {
  const DiagonalFockState vac = number_state(0, 5);
  CHECK(vac[0] == 1.0);
  const DiagonalFockState s = number_state(50, 60);
  for (int n = 0; n <= 60; ++n) CHECK(s[n] == (n == 50 ? 1.0 : 0.0));
  CHECK_THROWS_AS(number_state(3, 2), std::domain_error);
}

TEST_CASE("thermal state") {
  SUBCASE("vacuum limit") {
    const DiagonalFockState s = thermal_state(0.0, 8);
    CHECK(s[0] == 1.0);
  }
  SUBCASE("geometric ratio") {
    const DiagonalFockState s = make_state(StateKind::thermal(50.0));
    for (const int n : {0, 1, 7, 100, 500}) {
      CHECK(s[n + 1] / s[n] == doctest::Approx(50.0 / 51.0).epsilon(1e-13));
    }
  }
  SUBCASE("second factorial moment") {
    const DiagonalFockState s = make_state(StateKind::thermal(50.0));
    CHECK(factorial_moment(s, 2) == doctest::Approx(5000.0).epsilon(1e-8));
  }
}

TEST_CASE("factorial moments") {
  CHECK(factorial_moment(make_state(StateKind::coherent(50.0)), 2) ==
        doctest::Approx(2500.0).epsilon(1e-9));
  CHECK(factorial_moment(make_state(StateKind::number(50)), 1) ==
        doctest::Approx(50.0).epsilon(1e-14));
  SUBCASE("k = 1 equals the direct weighted mean") {
    SplitMix64 rng(4242);
    for (int trial = 0; trial < 30; ++trial) {
      DiagonalFockState s;
      s.probs.resize(3 + static_cast<int>(rng.next_unit() * 80));
      double sum = 0.0;
      for (double& p : s.probs) sum += (p = rng.next_unit());
      for (double& p : s.probs) p /= sum;
      CHECK(factorial_moment(s, 1) == doctest::Approx(s.mean()).epsilon(1e-12));
    }
  }
}

TEST_CASE("truncation_for_tail") {
  CHECK(truncation_for_tail(StateKind::number(50), 1e-12) == 50);

  SUBCASE("coherent: brute-force tail around the cut") {
    const double eps = 1e-12;
    const int top = truncation_for_tail(StateKind::coherent(50.0), eps);
    const auto tail_beyond = [](int n_max) {
      double tail = 0.0;
      for (int n = n_max + 1; n < n_max + 600; ++n) {
        tail += special::poisson_pmf(n, 50.0);
      }
      return tail;
    };
    CHECK(tail_beyond(top) < eps);
    CHECK(tail_beyond(top - 1) >= eps);
  }

  SUBCASE("thermal: geometric tail around the cut") {
    const double eps = 1e-12;
    const double alpha = 50.0 / 51.0;
    const int top = truncation_for_tail(StateKind::thermal(50.0), eps);
    CHECK(std::pow(alpha, top + 1) < eps);       // tail mass beyond top
    CHECK(std::pow(alpha, top) >= eps);          // one level lower is too fat
  }
}

TEST_CASE("constructors satisfy the state invariants") {
  for (const StateKind& kind :
       {StateKind::coherent(12.5), StateKind::number(17), StateKind::thermal(3.0)}) {
    const DiagonalFockState s = make_state(kind);
    CHECK(std::fabs(s.trace() - 1.0) <= 1e-12);
    for (int n = 0; n <= s.n_max(); ++n) CHECK(s[n] >= 0.0);
    CHECK(s.normalized);
    if (kind.family != StateFamily::number) {
      CHECK(std::fabs(s.mean() - kind.nbar) < 10.0 * kDefaultTailEps * (s.n_max() + 1));
    }
  }
}

TEST_SUITE_END();
