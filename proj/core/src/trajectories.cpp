#include "cpm/trajectories.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "cpm/rng.hpp"

namespace cpm::traj {

namespace {

constexpr long kBlockSize = 4096;  // fixed reduction blocks, thread-agnostic

int resolve_threads(int threads) {
  if (threads > 0) return threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::vector<double> cumulative(const DiagonalFockState& state) {
  std::vector<double> cdf(state.probs.size());
  double acc = 0.0;
  for (std::size_t n = 0; n < state.probs.size(); ++n) {
    acc += state.probs[n];
    cdf[n] = acc;
  }
  cdf.back() = std::max(cdf.back(), 1.0);
  return cdf;
}

int draw_initial(const std::vector<double>& cdf, SplitMix64& rng) {
  const double u = rng.next_unit();
  const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
  return static_cast<int>(it - cdf.begin());
}

// Core jump loop; events are appended to `out` (cleared first).
void simulate_into(std::vector<TrajectoryEvent>& out, int initial_n,
                   const DetectorParams& params, Model model, double horizon,
                   SplitMix64& rng) {
  out.clear();
  const double lambda = params.lambda;
  const double eta = params.eta;
  const double dark_rate = lambda * params.dark;
  int n = initial_n;
  double t = 0.0;
  while (true) {
    const double absorb_rate =
        model == Model::sd ? lambda * n : (n >= 1 ? lambda : 0.0);
    const double total = absorb_rate + dark_rate;
    if (total <= 0.0) break;
    t += rng.next_exponential(total);
    if (t > horizon) break;
    const double u = rng.next_unit() * total;
    if (u < absorb_rate * eta) {
      out.push_back({t, EventKind::detected_absorption});
      --n;
    } else if (u < absorb_rate) {
      out.push_back({t, EventKind::undetected_absorption});
      --n;
    } else {
      out.push_back({t, EventKind::dark_count});
    }
  }
}

// Runs fn(block_begin, block_end, block_index) over fixed-size blocks on a
// thread pool; the block layout is independent of the thread count.
template <class Fn>
void for_each_block(long n_traj, int threads, Fn&& fn) {
  const long n_blocks = (n_traj + kBlockSize - 1) / kBlockSize;
  std::atomic<long> next{0};
  auto worker = [&] {
    while (true) {
      const long b = next.fetch_add(1);
      if (b >= n_blocks) return;
      const long begin = b * kBlockSize;
      const long end = std::min(n_traj, begin + kBlockSize);
      fn(begin, end, b);
    }
  };
  const int n_threads = std::min<long>(resolve_threads(threads), n_blocks);
  if (n_threads <= 1) {
    worker();
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace

int TrajectoryRecord::registered_count() const {
  int m = 0;
  for (const TrajectoryEvent& e : events) {
    if (e.kind != EventKind::undetected_absorption) ++m;
  }
  return m;
}

TrajectoryRecord sample_trajectory(const DiagonalFockState& state,
                                   const DetectorParams& params, Model model,
                                   double horizon, std::uint64_t seed,
                                   std::uint64_t stream) {
  params.validate();
  if (horizon < 0.0) throw std::domain_error("sample_trajectory: horizon < 0");
  SplitMix64 rng = SplitMix64::for_stream(seed, stream);
  TrajectoryRecord rec;
  rec.horizon = horizon;
  rec.initial_n = draw_initial(cumulative(state), rng);
  simulate_into(rec.events, rec.initial_n, params, model, horizon, rng);
  return rec;
}

EnsembleStats estimate_count_moments(const DiagonalFockState& state,
                                     const DetectorParams& params, Model model,
                                     const std::vector<double>& t_grid,
                                     long n_traj, std::uint64_t seed,
                                     int threads) {
  params.validate();
  if (n_traj < 1) throw std::domain_error("estimate_count_moments: n_traj < 1");
  if (t_grid.empty()) throw std::domain_error("estimate_count_moments: empty grid");
  if (!std::is_sorted(t_grid.begin(), t_grid.end())) {
    throw std::invalid_argument("estimate_count_moments: grid must be sorted");
  }
  const double horizon = t_grid.back();
  const std::size_t n_t = t_grid.size();
  const int hist_top = std::max(8, state.n_max() + 8);

  struct Block {
    std::vector<double> sum_m, sum_m2, sum_f, sum_f2;
    std::vector<std::int64_t> hist;  // n_t * (hist_top + 1)
  };
  const long n_blocks = (n_traj + kBlockSize - 1) / kBlockSize;
  std::vector<Block> blocks(n_blocks);

  const std::vector<double> cdf = cumulative(state);
  for_each_block(n_traj, threads, [&](long begin, long end, long b) {
    Block& blk = blocks[b];
    blk.sum_m.assign(n_t, 0.0);
    blk.sum_m2.assign(n_t, 0.0);
    blk.sum_f.assign(n_t, 0.0);
    blk.sum_f2.assign(n_t, 0.0);
    blk.hist.assign(n_t * (hist_top + 1), 0);
    std::vector<TrajectoryEvent> events;
    for (long i = begin; i < end; ++i) {
      SplitMix64 rng = SplitMix64::for_stream(seed, static_cast<std::uint64_t>(i));
      const int n0 = draw_initial(cdf, rng);
      simulate_into(events, n0, params, model, horizon, rng);
      std::size_t ev = 0;
      long m = 0;
      for (std::size_t k = 0; k < n_t; ++k) {
        while (ev < events.size() && events[ev].time <= t_grid[k]) {
          if (events[ev].kind != EventKind::undetected_absorption) ++m;
          ++ev;
        }
        const double md = static_cast<double>(m);
        const double f = md * (md - 1.0);
        blk.sum_m[k] += md;
        blk.sum_m2[k] += md * md;
        blk.sum_f[k] += f;
        blk.sum_f2[k] += f * f;
        ++blk.hist[k * (hist_top + 1) + std::min<long>(m, hist_top)];
      }
    }
  });

  EnsembleStats stats;
  stats.n_traj = n_traj;
  stats.seed = seed;
  stats.t_grid = t_grid;
  stats.mean_counts.resize(n_t);
  stats.second_factorial.resize(n_t);
  stats.count_histogram.assign(n_t, std::vector<std::int64_t>(hist_top + 1, 0));

  std::vector<double> sum_m(n_t, 0.0), sum_m2(n_t, 0.0), sum_f(n_t, 0.0),
      sum_f2(n_t, 0.0);
  for (long b = 0; b < n_blocks; ++b) {  // fixed merge order
    for (std::size_t k = 0; k < n_t; ++k) {
      sum_m[k] += blocks[b].sum_m[k];
      sum_m2[k] += blocks[b].sum_m2[k];
      sum_f[k] += blocks[b].sum_f[k];
      sum_f2[k] += blocks[b].sum_f2[k];
      for (int m = 0; m <= hist_top; ++m) {
        stats.count_histogram[k][m] += blocks[b].hist[k * (hist_top + 1) + m];
      }
    }
  }
  const double n = static_cast<double>(n_traj);
  for (std::size_t k = 0; k < n_t; ++k) {
    const double mean = sum_m[k] / n;
    const double var_m = std::max(0.0, (sum_m2[k] - n * mean * mean) / (n - 1.0));
    stats.mean_counts[k] = {mean, std::sqrt(var_m / n)};
    const double fmean = sum_f[k] / n;
    const double var_f = std::max(0.0, (sum_f2[k] - n * fmean * fmean) / (n - 1.0));
    stats.second_factorial[k] = {fmean, std::sqrt(var_f / n)};
  }
  return stats;
}

EnsembleStats estimate_waiting(const DiagonalFockState& state,
                               const DetectorParams& params, Model model,
                               double t_click, double window, long n_traj,
                               std::uint64_t seed,
                               const WaitingOptions& options) {
  params.validate();
  if (window <= 0.0) throw std::domain_error("estimate_waiting: window <= 0");
  if (n_traj < 1) throw std::domain_error("estimate_waiting: n_traj < 1");
  const double delta = options.click_tolerance >= 0.0
                           ? options.click_tolerance
                           : 0.05 / params.lambda;
  const int bins = options.histogram_bins;
  if (bins < 1) throw std::domain_error("estimate_waiting: bins < 1");
  const double horizon = t_click + delta + window;

  struct Block {
    std::int64_t conditioned = 0, kept = 0;
    double sum = 0.0, sum2 = 0.0;
    std::vector<std::int64_t> hist;
  };
  const long n_blocks = (n_traj + kBlockSize - 1) / kBlockSize;
  std::vector<Block> blocks(n_blocks);

  const std::vector<double> cdf = cumulative(state);
  for_each_block(n_traj, options.threads, [&](long begin, long end, long b) {
    Block& blk = blocks[b];
    blk.hist.assign(bins, 0);
    std::vector<TrajectoryEvent> events;
    std::vector<double> clicks;
    for (long i = begin; i < end; ++i) {
      SplitMix64 rng = SplitMix64::for_stream(seed, static_cast<std::uint64_t>(i));
      const int n0 = draw_initial(cdf, rng);
      simulate_into(events, n0, params, model, horizon, rng);
      clicks.clear();
      for (const TrajectoryEvent& e : events) {
        if (e.kind != EventKind::undetected_absorption) clicks.push_back(e.time);
      }
      for (std::size_t c = 0; c < clicks.size(); ++c) {
        if (clicks[c] < t_click - delta) continue;
        if (clicks[c] > t_click + delta) break;
        ++blk.conditioned;
        if (c + 1 >= clicks.size()) continue;  // no follow-up click observed
        const double gap = clicks[c + 1] - clicks[c];
        if (gap > window) continue;  // outside the averaging interval
        ++blk.kept;
        blk.sum += gap;
        blk.sum2 += gap * gap;
        ++blk.hist[std::min(bins - 1, static_cast<int>(gap / window * bins))];
      }
    }
  });

  EnsembleStats stats;
  stats.n_traj = n_traj;
  stats.seed = seed;
  stats.window = window;
  stats.gap_histogram.assign(bins, 0);
  double sum = 0.0, sum2 = 0.0;
  for (long b = 0; b < n_blocks; ++b) {
    stats.n_conditioned += blocks[b].conditioned;
    stats.n_kept += blocks[b].kept;
    sum += blocks[b].sum;
    sum2 += blocks[b].sum2;
    for (int j = 0; j < bins; ++j) stats.gap_histogram[j] += blocks[b].hist[j];
  }
  if (stats.n_kept > 1) {
    const double n = static_cast<double>(stats.n_kept);
    const double mean = sum / n;
    const double var = std::max(0.0, (sum2 - n * mean * mean) / (n - 1.0));
    stats.mean_gap = {mean, std::sqrt(var / n)};
  } else if (stats.n_kept == 1) {
    stats.mean_gap = {sum, 0.0};
  }
  return stats;
}

void dump_records(std::ostream& os, const DiagonalFockState& state,
                  const DetectorParams& params, Model model, double horizon,
                  long n_traj, std::uint64_t seed) {
  const std::vector<double> cdf = cumulative(state);
  std::vector<TrajectoryEvent> events;
  char line[96];
  for (long i = 0; i < n_traj; ++i) {
    SplitMix64 rng = SplitMix64::for_stream(seed, static_cast<std::uint64_t>(i));
    const int n0 = draw_initial(cdf, rng);
    simulate_into(events, n0, params, model, horizon, rng);
    for (const TrajectoryEvent& e : events) {
      const char* kind = e.kind == EventKind::detected_absorption ? "detected"
                         : e.kind == EventKind::undetected_absorption
                             ? "undetected"
                             : "dark";
      std::snprintf(line, sizeof(line), "%ld\t%.17g\t%s\n", i, e.time, kind);
      os << line;
    }
  }
}

}  // namespace cpm::traj
