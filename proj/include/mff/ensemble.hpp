#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mff/observables.hpp"
#include "mff/params.hpp"

namespace mff {

inline constexpr const char* kVersionTag = "0.1.0";

// One ensemble run: trajectories stepped to t_equil = t_equil_factor * L^2,
// then sampled every sample_stride time units until t_equil + t_avg_window.
struct RunConfig {
  ModelParams params;
  int n_traj = 1;
  std::uint64_t master_seed = 1;
  double t_equil_factor = 1.0;
  double t_avg_window = 200.0;
  double sample_stride = 1.0;
  std::vector<std::string> observables;  // empty = all
  std::string output_path;

  double t_equil() const { return t_equil_factor * params.L * params.L; }
  ObservableSelection selection() const;
  void finalize() { params.finalize(); }
  void validate() const;
};

struct ScalarStat {
  double mean = 0.0;
  double std_error = 0.0;  // NaN when n = 1 (undefined marker)
  int n = 0;
};

// Per-trajectory time-window means; one independent sample per trajectory.
struct TrajectoryMean {
  int trajectory_id = 0;
  int n_samples = 0;
  double S_half = 0.0, C2_half = 0.0, C4_half = 0.0, G_AB = 0.0;
  Eigen::VectorXd Cbar, Cq;
};

struct EnsembleResult {
  RunConfig config;
  std::uint64_t config_hash = 0;
  std::string version;
  int n_completed = 0;
  std::vector<int> aborted_ids;
  std::vector<std::string> abort_diagnostics;

  ScalarStat S_half, C2_half, C4_half, G_AB;
  std::vector<ScalarStat> Cbar, Cq;  // per momentum/distance component

  std::vector<TrajectoryMean> per_trajectory;
};

// Deterministic in (config, trajectory_id); throws degeneracy_error upward.
std::vector<ObservableRecord> run_trajectory(const RunConfig& config,
                                             int trajectory_id);

TrajectoryMean trajectory_window_mean(const RunConfig& config, int trajectory_id);

// Parallel over trajectories; the aggregate is independent of worker count
// and completion order. Fails loudly when more than 1% of trajectories abort.
EnsembleResult run_ensemble(const RunConfig& config, int n_threads = 0);

// Merge per-trajectory means from ensembles with identical configs (split
// runs); equals the single full ensemble for all means.
EnsembleResult merge_ensembles(const EnsembleResult& a, const EnsembleResult& b);

// Aggregate statistics from per-trajectory means (exposed for merging tests).
void aggregate(EnsembleResult& result);

std::uint64_t config_hash(const RunConfig& config);

}  // namespace mff
