#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "cpm/e_model.hpp"
#include "cpm/fock.hpp"
#include "cpm/sd_model.hpp"
#include "cpm/table.hpp"
#include "cpm/trajectories.hpp"
#include "doctest.h"

using namespace cpm;
using traj::EventKind;
using traj::Model;

namespace {

DetectorParams standard_params() {
  DetectorParams p;
  p.eta = 0.6;
  p.dark = 5e-3;
  return p;
}

}  // namespace

TEST_SUITE_BEGIN("trajectories");

TEST_CASE("single ideal photon clicks at an exponential time") {
  DetectorParams p;  // eta = 1, dark = 0
  const DiagonalFockState one = number_state(1, 1);
  const long n = 100000;
  std::vector<double> times;
  times.reserve(n);
  for (long i = 0; i < n; ++i) {
    const traj::TrajectoryRecord rec = traj::sample_trajectory(one, p, Model::sd, 50.0, 7, i);
    REQUIRE(rec.events.size() == 1);
    CHECK(rec.events[0].kind == EventKind::detected_absorption);
    times.push_back(rec.events[0].time);
  }
  std::sort(times.begin(), times.end());
  double ks = 0.0;
  for (long i = 0; i < n; ++i) {
    const double cdf = 1.0 - std::exp(-times[i]);
    ks = std::max(ks, std::fabs(cdf - (i + 1.0) / n));
    ks = std::max(ks, std::fabs(cdf - static_cast<double>(i) / n));
  }
  CHECK(ks < 1.95 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("vacuum produces a pure dark renewal") {
  DetectorParams p;
  p.dark = 0.2;
  const DiagonalFockState vac = number_state(0, 0);
  const double horizon = 10.0;
  long total = 0;
  const long n = 20000;
  for (long i = 0; i < n; ++i) {
    const traj::TrajectoryRecord rec =
        traj::sample_trajectory(vac, p, Model::e, horizon, 11, i);
    for (const auto& e : rec.events) CHECK(e.kind == EventKind::dark_count);
    total += static_cast<long>(rec.events.size());
  }
  const double mean = static_cast<double>(total) / n;
  const double expected = p.dark * horizon;
  CHECK(std::fabs(mean - expected) < 3.0 * std::sqrt(expected / n));
}

TEST_CASE("zero efficiency never registers an absorption") {
  DetectorParams p = standard_params();
  p.eta = 0.0;
  const DiagonalFockState s = make_state(StateKind::coherent(10.0));
  for (long i = 0; i < 500; ++i) {
    const traj::TrajectoryRecord rec =
        traj::sample_trajectory(s, p, Model::sd, 5.0, 3, i);
    for (const auto& e : rec.events) {
      CHECK(e.kind != EventKind::detected_absorption);
    }
  }
}

TEST_CASE("records are consistent") {
  DetectorParams p = standard_params();
  const DiagonalFockState s = make_state(StateKind::thermal(6.0));
  for (long i = 0; i < 300; ++i) {
    const traj::TrajectoryRecord rec =
        traj::sample_trajectory(s, p, Model::sd, 4.0, 99, i);
    int absorptions = 0, registered = 0;
    double prev = 0.0;
    for (const auto& e : rec.events) {
      CHECK(e.time > prev);
      CHECK(e.time <= rec.horizon);
      prev = e.time;
      if (e.kind != EventKind::dark_count) ++absorptions;
      if (e.kind != EventKind::undetected_absorption) ++registered;
    }
    CHECK(absorptions <= rec.initial_n);
    CHECK(registered == rec.registered_count());
  }
}

TEST_CASE("ensemble determinism across thread counts") {
  DetectorParams p = standard_params();
  const DiagonalFockState s = make_state(StateKind::coherent(15.0));
  const std::vector<double> grid = {0.5, 1.0, 3.0};
  const auto serial = traj::estimate_count_moments(s, p, Model::e, grid, 12000, 41, 1);
  const auto parallel = traj::estimate_count_moments(s, p, Model::e, grid, 12000, 41, 6);
  CHECK(serial == parallel);
  const auto again = traj::estimate_count_moments(s, p, Model::e, grid, 12000, 41, 6);
  CHECK(parallel == again);
}

TEST_CASE("two-photon count distributions match the analytic models") {
  // The central cross-validation: empirical count histograms against the
  // closed-form distributions, both models, within 4 sigma per bin.
  DetectorParams p = standard_params();
  const DiagonalFockState two = number_state(2, 2);
  const long n = 1000000;
  for (const Model model : {Model::sd, Model::e}) {
    for (const double t : {0.5, 1.0}) {
      const auto stats =
          traj::estimate_count_moments(two, p, model, {t}, n, 20240817, 0);
      const CountDistribution analytic =
          model == Model::sd ? sd::count_distribution(two, p, t, 8)
                             : emodel::count_distribution(two, p, t, 8);
      for (int m = 0; m <= 4; ++m) {
        const double expected = analytic.probs[m];
        const double observed =
            static_cast<double>(stats.count_histogram[0][m]) / n;
        const double sigma = std::sqrt(expected * (1.0 - expected) / n);
        CHECK(std::fabs(observed - expected) <= 4.0 * sigma + 1e-12);
      }
    }
  }
}

TEST_CASE("ensemble means track the closed forms") {
  DetectorParams p = standard_params();
  const DiagonalFockState s = make_state(StateKind::coherent(20.0));
  const std::vector<double> sd_grid = {0.5, 1.0, 2.0, 4.0};
  const auto sd_stats =
      traj::estimate_count_moments(s, p, Model::sd, sd_grid, 40000, 5, 0);
  for (std::size_t k = 0; k < sd_grid.size(); ++k) {
    const double analytic = sd::mean_counts(s, p, sd_grid[k]);
    CHECK(std::fabs(sd_stats.mean_counts[k].value - analytic) <=
          3.0 * sd_stats.mean_counts[k].std_error);
    const double analytic2 = sd::second_factorial_moment(s, p, sd_grid[k]);
    CHECK(std::fabs(sd_stats.second_factorial[k].value - analytic2) <=
          3.0 * sd_stats.second_factorial[k].std_error);
  }
  const std::vector<double> e_grid = {5.0, 20.0, 50.0};
  const auto e_stats =
      traj::estimate_count_moments(s, p, Model::e, e_grid, 40000, 5, 0);
  for (std::size_t k = 0; k < e_grid.size(); ++k) {
    const double analytic = emodel::mean_counts(s, p, e_grid[k]);
    CHECK(std::fabs(e_stats.mean_counts[k].value - analytic) <=
          3.0 * e_stats.mean_counts[k].std_error);
  }
}

TEST_CASE("waiting-gap estimator in the dark-renewal limit") {
  DetectorParams dark;
  dark.eta = 0.0;
  dark.dark = 0.05;
  const DiagonalFockState vac = number_state(0, 0);
  const double window = 100.0 / dark.dark;
  traj::WaitingOptions opt;
  opt.click_tolerance = 2.0;
  const auto stats =
      traj::estimate_waiting(vac, dark, Model::sd, 20.0, window, 40000, 13, opt);
  REQUIRE(stats.n_kept > 2000);
  const double expected = 1.0 / dark.dark;
  CHECK(std::fabs(stats.mean_gap.value - expected) <
        0.02 * expected + 3.0 * stats.mean_gap.std_error);
}

TEST_CASE("waiting gaps flat in one model, growing in the other") {
  DetectorParams p = standard_params();
  const DiagonalFockState s = make_state(StateKind::number(60));
  const double window = emodel::default_waiting_window(p);
  const auto e_early =
      traj::estimate_waiting(s, p, Model::e, 2.0, window, 60000, 17);
  const auto e_late =
      traj::estimate_waiting(s, p, Model::e, 40.0, window, 60000, 17);
  REQUIRE(e_early.n_kept > 500);
  REQUIRE(e_late.n_kept > 500);
  const double band = 3.0 * (e_early.mean_gap.std_error + e_late.mean_gap.std_error);
  CHECK(std::fabs(e_late.mean_gap.value - e_early.mean_gap.value) < band + 0.05);

  const auto sd_early =
      traj::estimate_waiting(s, p, Model::sd, 0.5, window, 60000, 17);
  const auto sd_late =
      traj::estimate_waiting(s, p, Model::sd, 3.5, window, 60000, 17);
  REQUIRE(sd_early.n_kept > 500);
  REQUIRE(sd_late.n_kept > 500);
  CHECK(sd_late.mean_gap.value >
        sd_early.mean_gap.value + 3.0 * (sd_early.mean_gap.std_error +
                                         sd_late.mean_gap.std_error));
}

TEST_CASE("waiting-time histograms match the analytic densities") {
  DetectorParams p = standard_params();
  const DiagonalFockState s = make_state(StateKind::number(100));
  const double t_click = 1.0;
  const long n = 100000;
  for (const Model model : {Model::sd, Model::e}) {
    traj::WaitingOptions opt;
    opt.histogram_bins = 16;
    // The absorption rate is large in the number-proportional model; shrink
    // the conditioning bin so at most one click lands in it.
    opt.click_tolerance = model == Model::sd ? 0.002 : 0.05;
    const double window =
        model == Model::sd ? 2.0 : emodel::default_waiting_window(p);
    const auto stats =
        traj::estimate_waiting(s, p, model, t_click, window, n, 20240819, opt);
    REQUIRE(stats.n_kept > 3000);

    // Expected bin masses from the analytic density, normalized over the
    // window (fine Simpson per bin).
    const int bins = opt.histogram_bins;
    std::vector<double> mass(bins, 0.0);
    double total = 0.0;
    for (int b = 0; b < bins; ++b) {
      const double lo = window * b / bins;
      const double hi = window * (b + 1) / bins;
      const int steps = 64;
      std::vector<double> f(steps + 1);
      for (int i = 0; i <= steps; ++i) {
        const double tau = lo + (hi - lo) * i / steps;
        f[i] = model == Model::sd ? sd::waiting_density(s, p, t_click, tau)
                                  : emodel::waiting_density(s, p, t_click, tau);
      }
      mass[b] = simpson(f, (hi - lo) / steps);
      total += mass[b];
    }
    for (int b = 0; b < bins; ++b) {
      const double expected = mass[b] / total;
      const double observed =
          static_cast<double>(stats.gap_histogram[b]) / stats.n_kept;
      const double sigma =
          std::sqrt(expected * (1.0 - expected) / stats.n_kept);
      CHECK(std::fabs(observed - expected) <= 3.0 * sigma + 2e-3);
    }
  }
}

TEST_CASE("record dump format") {
  DetectorParams p = standard_params();
  const DiagonalFockState s = make_state(StateKind::coherent(3.0));
  std::ostringstream os;
  traj::dump_records(os, s, p, Model::sd, 2.0, 5, 123);
  std::istringstream is(os.str());
  std::string line;
  int lines = 0;
  while (std::getline(is, line)) {
    ++lines;
    const auto first_tab = line.find('\t');
    const auto second_tab = line.find('\t', first_tab + 1);
    REQUIRE(first_tab != std::string::npos);
    REQUIRE(second_tab != std::string::npos);
    const std::string kind = line.substr(second_tab + 1);
    CHECK((kind == "detected" || kind == "undetected" || kind == "dark"));
  }
  CHECK(lines > 0);
}

TEST_CASE("table serialization is stable") {
  Table t;
  t.columns = {"a", "b"};
  t.rows = {{1.0, 0.5}, {2.0, 0.25}};
  t.config_json = "{\"seed\": 1}";
  const std::string csv = to_csv(t);
  CHECK(csv == "# config: {\"seed\": 1}\na,b\n1,0.5\n2,0.25\n");
  const std::string json = to_json(t);
  CHECK(json.find("\"columns\": [\"a\", \"b\"]") != std::string::npos);
  CHECK(to_csv(t) == csv);
}

TEST_SUITE_END();
