#include "mff/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "mff/dynamics.hpp"
#include "mff/errors.hpp"
#include "mff/io.hpp"
#include "mff/rng.hpp"

namespace mff {

ObservableSelection RunConfig::selection() const {
  if (observables.empty()) return {};
  ObservableSelection sel{false, false, false};
  for (const auto& name : observables) {
    if (name == "all") return {};
    if (name == "entropy" || name == "cumulants") sel.entropy_cumulants = true;
    else if (name == "correlations") sel.correlations = true;
    else if (name == "covariance") sel.covariance = true;
    else throw parameter_error("unknown observable selector: " + name);
  }
  return sel;
}

void RunConfig::validate() const {
  params.validate();
  if (n_traj < 1) throw parameter_error("n_traj must be >= 1");
  if (!(t_avg_window >= 0.0)) throw parameter_error("t_avg_window must be >= 0");
  if (!(sample_stride > 0.0)) throw parameter_error("sample_stride must be > 0");
  if (!(t_equil_factor >= 0.0)) throw parameter_error("t_equil_factor must be >= 0");
  (void)selection();
}

namespace {

long long steps_for_time(double t, double dt) {
  return std::llround(t / dt);
}

std::vector<ObservableRecord> run_trajectory_impl(const RunConfig& config,
                                                  int trajectory_id,
                                                  const Propagator& prop) {
  const ModelParams& p = config.params;
  const std::uint64_t occ_seed =
      derive_seed(config.master_seed, trajectory_id, /*salt=*/1);
  GaussianState state = init_random_occupation(p, occ_seed);
  NoiseStream noise(config.master_seed, trajectory_id);
  Stepper stepper(p, prop);

  const long long n_equil = steps_for_time(config.t_equil(), p.dt);
  const long long n_stride = std::max<long long>(1, steps_for_time(config.sample_stride, p.dt));
  const long long n_window = steps_for_time(config.t_avg_window, p.dt);
  const auto sel = config.selection();

  std::vector<ObservableRecord> records;
  for (long long s = 0; s < n_equil; ++s) stepper.step(state, noise);
  long long since_equil = 0;
  records.push_back(compute_record(correlation_matrix(state), state.t, sel));
  while (since_equil + n_stride <= n_window) {
    for (long long s = 0; s < n_stride; ++s) stepper.step(state, noise);
    since_equil += n_stride;
    records.push_back(compute_record(correlation_matrix(state), state.t, sel));
  }
  return records;
}

TrajectoryMean mean_of_records(const std::vector<ObservableRecord>& records,
                               int trajectory_id) {
  TrajectoryMean m;
  m.trajectory_id = trajectory_id;
  m.n_samples = static_cast<int>(records.size());
  if (records.empty()) return m;
  const int L = static_cast<int>(records.front().Cbar.size());
  m.Cbar = Eigen::VectorXd::Zero(L);
  m.Cq = Eigen::VectorXd::Zero(L);
  for (const auto& r : records) {
    m.S_half += r.S_half;
    m.C2_half += r.C2_half;
    m.C4_half += r.C4_half;
    m.G_AB += r.G_AB;
    if (L > 0) {
      m.Cbar += r.Cbar;
      m.Cq += r.Cq;
    }
  }
  const double inv = 1.0 / m.n_samples;
  m.S_half *= inv;
  m.C2_half *= inv;
  m.C4_half *= inv;
  m.G_AB *= inv;
  if (L > 0) {
    m.Cbar *= inv;
    m.Cq *= inv;
  }
  return m;
}

ScalarStat stat_over(const std::vector<TrajectoryMean>& means,
                     double TrajectoryMean::*field) {
  ScalarStat s;
  s.n = static_cast<int>(means.size());
  if (s.n == 0) return s;
  for (const auto& m : means) s.mean += m.*field;
  s.mean /= s.n;
  if (s.n == 1) {
    s.std_error = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  double var = 0.0;
  for (const auto& m : means) {
    const double d = m.*field - s.mean;
    var += d * d;
  }
  var /= (s.n - 1);
  s.std_error = std::sqrt(var / s.n);
  return s;
}

std::vector<ScalarStat> stat_over_vector(const std::vector<TrajectoryMean>& means,
                                         Eigen::VectorXd TrajectoryMean::*field) {
  std::vector<ScalarStat> out;
  if (means.empty() || (means.front().*field).size() == 0) return out;
  const int L = static_cast<int>((means.front().*field).size());
  const int n = static_cast<int>(means.size());
  out.resize(L);
  for (int i = 0; i < L; ++i) {
    double mean = 0.0;
    for (const auto& m : means) mean += (m.*field)(i);
    mean /= n;
    double se = std::numeric_limits<double>::quiet_NaN();
    if (n > 1) {
      double var = 0.0;
      for (const auto& m : means) {
        const double d = (m.*field)(i) - mean;
        var += d * d;
      }
      se = std::sqrt(var / (n - 1) / n);
    }
    out[i] = {mean, se, n};
  }
  return out;
}

}  // namespace

std::vector<ObservableRecord> run_trajectory(const RunConfig& config,
                                             int trajectory_id) {
  RunConfig c = config;
  c.finalize();
  c.validate();
  Propagator prop(c.params.L, c.params.J, c.params.dt);
  return run_trajectory_impl(c, trajectory_id, prop);
}

TrajectoryMean trajectory_window_mean(const RunConfig& config, int trajectory_id) {
  return mean_of_records(run_trajectory(config, trajectory_id), trajectory_id);
}

void aggregate(EnsembleResult& result) {
  const auto& means = result.per_trajectory;
  result.n_completed = static_cast<int>(means.size());
  result.S_half = stat_over(means, &TrajectoryMean::S_half);
  result.C2_half = stat_over(means, &TrajectoryMean::C2_half);
  result.C4_half = stat_over(means, &TrajectoryMean::C4_half);
  result.G_AB = stat_over(means, &TrajectoryMean::G_AB);
  result.Cbar = stat_over_vector(means, &TrajectoryMean::Cbar);
  result.Cq = stat_over_vector(means, &TrajectoryMean::Cq);
}

EnsembleResult run_ensemble(const RunConfig& config, int n_threads) {
  RunConfig c = config;
  c.finalize();
  c.validate();

  if (n_threads <= 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    n_threads = hw ? static_cast<int>(hw) : 1;
  }
  n_threads = std::min(n_threads, c.n_traj);

  const Propagator prop(c.params.L, c.params.J, c.params.dt);

  struct Slot {
    bool aborted = false;
    std::string diagnostic;
    TrajectoryMean mean;
  };
  std::vector<Slot> slots(c.n_traj);
  std::atomic<int> next{0};

  auto worker = [&]() {
    for (;;) {
      const int id = next.fetch_add(1);
      if (id >= c.n_traj) return;
      try {
        slots[id].mean = mean_of_records(run_trajectory_impl(c, id, prop), id);
      } catch (const degeneracy_error& e) {
        slots[id].aborted = true;
        slots[id].diagnostic = e.what();
      }
    }
  };
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  EnsembleResult result;
  result.config = c;
  result.config_hash = config_hash(c);
  result.version = kVersionTag;
  for (int id = 0; id < c.n_traj; ++id) {
    if (slots[id].aborted) {
      result.aborted_ids.push_back(id);
      result.abort_diagnostics.push_back(slots[id].diagnostic);
    } else {
      result.per_trajectory.push_back(std::move(slots[id].mean));
    }
  }
  if (100 * static_cast<long long>(result.aborted_ids.size()) >
      static_cast<long long>(c.n_traj))
    throw degeneracy_error(
        "ensemble failed: more than 1% of trajectories aborted (" +
        std::to_string(result.aborted_ids.size()) + " of " +
        std::to_string(c.n_traj) + "); first diagnostic: " +
        result.abort_diagnostics.front());
  aggregate(result);
  return result;
}

EnsembleResult merge_ensembles(const EnsembleResult& a, const EnsembleResult& b) {
  RunConfig ca = a.config, cb = b.config;
  ca.n_traj = cb.n_traj = 0;  // halves of a split run differ only here
  if (config_hash(ca) != config_hash(cb))
    throw parameter_error("cannot merge ensembles with different configs");
  EnsembleResult out = a;
  out.per_trajectory.insert(out.per_trajectory.end(), b.per_trajectory.begin(),
                            b.per_trajectory.end());
  std::sort(out.per_trajectory.begin(), out.per_trajectory.end(),
            [](const TrajectoryMean& x, const TrajectoryMean& y) {
              return x.trajectory_id < y.trajectory_id;
            });
  out.aborted_ids.insert(out.aborted_ids.end(), b.aborted_ids.begin(),
                         b.aborted_ids.end());
  out.abort_diagnostics.insert(out.abort_diagnostics.end(),
                               b.abort_diagnostics.begin(),
                               b.abort_diagnostics.end());
  aggregate(out);
  return out;
}

}  // namespace mff
