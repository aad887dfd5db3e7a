#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "cpm/detector.hpp"
#include "cpm/fock.hpp"

// Stochastic oracle for both detection models. On diagonal states the
// dynamics is a classical jump process: from n photons the competing clocks
// are photon absorption (detected with probability eta, undetected with
// 1 - eta) and field-independent dark counts. Registered counts are the
// detected absorptions plus the dark counts; undetected absorptions remove a
// photon silently.
namespace cpm::traj {

enum class Model { sd, e };

enum class EventKind { detected_absorption, undetected_absorption, dark_count };

struct TrajectoryEvent {
  double time;
  EventKind kind;
};

struct TrajectoryRecord {
  int initial_n = 0;
  double horizon = 0.0;
  std::vector<TrajectoryEvent> events;  // strictly increasing times

  int registered_count() const;
};

/// One realization, deterministic in (seed, stream).
TrajectoryRecord sample_trajectory(const DiagonalFockState& state,
                                   const DetectorParams& params, Model model,
                                   double horizon, std::uint64_t seed,
                                   std::uint64_t stream = 0);

struct MomentEstimate {
  double value = 0.0;
  double std_error = 0.0;

  bool operator==(const MomentEstimate&) const = default;
};

/// Ensemble summary. Histograms hold raw trajectory counts so merging is
/// exact; count_histogram[k][m] counts trajectories with m registered counts
/// at t_grid[k] (the last bin absorbs everything above).
struct EnsembleStats {
  long n_traj = 0;
  std::uint64_t seed = 0;
  std::vector<double> t_grid;
  std::vector<MomentEstimate> mean_counts;
  std::vector<MomentEstimate> second_factorial;
  std::vector<std::vector<std::int64_t>> count_histogram;

  // Waiting-gap estimation (filled by estimate_waiting).
  double window = 0.0;
  std::int64_t n_conditioned = 0;  // clicks found near the requested time
  std::int64_t n_kept = 0;         // gaps within the window
  MomentEstimate mean_gap;
  std::vector<std::int64_t> gap_histogram;

  bool operator==(const EnsembleStats&) const = default;
};

/// Registered-count mean and second factorial moment on a time grid, with
/// standard errors, from n_traj independent trajectories (common random
/// numbers across grid times). threads = 0 uses the hardware count; the
/// result is bit-identical for any thread count.
EnsembleStats estimate_count_moments(const DiagonalFockState& state,
                                     const DetectorParams& params, Model model,
                                     const std::vector<double>& t_grid,
                                     long n_traj, std::uint64_t seed,
                                     int threads = 0);

struct WaitingOptions {
  double click_tolerance = -1.0;  // < 0: 0.05 / lambda
  int histogram_bins = 40;
  int threads = 0;
};

/// Gaps between a registered click near t_click (within the tolerance) and
/// the next registered click; gaps beyond the window are discarded from the
/// average, mirroring a finite experimental averaging interval.
EnsembleStats estimate_waiting(const DiagonalFockState& state,
                               const DetectorParams& params, Model model,
                               double t_click, double window, long n_traj,
                               std::uint64_t seed,
                               const WaitingOptions& options = {});

/// Raw record dump, one line per event: trajectory_id <tab> time <tab> kind.
void dump_records(std::ostream& os, const DiagonalFockState& state,
                  const DetectorParams& params, Model model, double horizon,
                  long n_traj, std::uint64_t seed);

}  // namespace cpm::traj
