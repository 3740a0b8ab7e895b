#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "mff/ensemble.hpp"
#include "mff/fit.hpp"

namespace mff {

// Config document keys (exactly): L, N, J, gamma, theta_over_pi, dt,
// measurement_only, n_traj, master_seed, t_equil_factor, t_avg_window,
// sample_stride, observables, output_path. Unknown keys are rejected; absent
// keys take defaults.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);
nlohmann::json config_to_json(const RunConfig& config);

// FNV-1a hash of the canonical serialized config (provenance).
std::uint64_t config_hash(const RunConfig& config);

nlohmann::json ensemble_to_json(const EnsembleResult& result);
EnsembleResult ensemble_from_json(const nlohmann::json& doc);

nlohmann::json fit_to_json(const FitResult& fit);

// Writes into `path` (created if needed):
//   ensemble.json    full EnsembleResult with provenance
//   observables.csv  one scalar-observable row
//   cq.csv           L rows [q, q_tilde, q_tilde_ell0, Cq, Cq_err]
// CSV: UTF-8, header row, '.' decimal, no thousands separators.
void emit_outputs(const EnsembleResult& result, const std::string& path);

// Appends/creates a combined observables.csv from several ensembles (sweeps).
void emit_observables_csv(const std::vector<EnsembleResult>& results,
                          const std::string& file);

// Theory overlay table (on request): Cq branches on the sampled momenta.
void emit_theory_cq_csv(const RunConfig& config, const std::string& file);

}  // namespace mff
