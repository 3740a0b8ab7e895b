// Command-line driver: ensemble runs, parameter sweeps, analytic prediction
// tables, exact-oracle certification, and curve fits.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure,
// 4 certification failure (oracle-check above tolerance).

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <thread>

#include "mff/ensemble.hpp"
#include "mff/errors.hpp"
#include "mff/fit.hpp"
#include "mff/fock.hpp"
#include "mff/io.hpp"
#include "mff/rng.hpp"
#include "mff/theory.hpp"

namespace {

using nlohmann::json;

struct CliConfig {
  std::string config_file;
  // command-line overrides; NaN/INT_MIN = not set
  double J = NAN, gamma = NAN, theta_over_pi = NAN, dt = NAN;
  double t_equil_factor = NAN, t_avg_window = NAN, sample_stride = NAN;
  int L = -1, N = -1, n_traj = -1;
  long long master_seed = -1;
  bool measurement_only = false;
  std::string output_path;
  int threads = 0;
};

void add_config_flags(CLI::App* cmd, CliConfig& c) {
  cmd->add_option("--config", c.config_file, "JSON config document");
  cmd->add_option("--L", c.L, "site count (even)");
  cmd->add_option("--N", c.N, "particle count (default L/2)");
  cmd->add_option("--J", c.J, "hopping amplitude");
  cmd->add_option("--gamma", c.gamma, "measurement strength");
  cmd->add_option("--theta_over_pi", c.theta_over_pi, "misalignment / pi");
  cmd->add_option("--dt", c.dt, "time step (default by gamma)");
  cmd->add_flag("--measurement_only", c.measurement_only,
                "measurement-only dynamics (J = 0)");
  cmd->add_option("--n_traj", c.n_traj, "trajectory count");
  cmd->add_option("--master_seed", c.master_seed, "master seed");
  cmd->add_option("--t_equil_factor", c.t_equil_factor,
                  "equilibration time = factor * L^2");
  cmd->add_option("--t_avg_window", c.t_avg_window, "averaging window");
  cmd->add_option("--sample_stride", c.sample_stride, "time between samples");
  cmd->add_option("--output_path", c.output_path, "output directory");
  cmd->add_option("--threads", c.threads, "worker threads (0 = hardware)");
}

mff::RunConfig build_config(const CliConfig& c, bool require_valid = true) {
  mff::RunConfig cfg;
  if (!c.config_file.empty()) cfg = mff::load_config(c.config_file);
  if (c.L >= 0) cfg.params.L = c.L;
  if (c.N >= 0) cfg.params.N = c.N;
  if (!std::isnan(c.J)) cfg.params.J = c.J;
  if (!std::isnan(c.gamma)) cfg.params.gamma = c.gamma;
  if (!std::isnan(c.theta_over_pi)) cfg.params.theta = c.theta_over_pi * M_PI;
  if (!std::isnan(c.dt)) cfg.params.dt = c.dt;
  if (c.measurement_only) cfg.params.measurement_only = true;
  if (c.n_traj >= 0) cfg.n_traj = c.n_traj;
  if (c.master_seed >= 0) cfg.master_seed = static_cast<std::uint64_t>(c.master_seed);
  if (!std::isnan(c.t_equil_factor)) cfg.t_equil_factor = c.t_equil_factor;
  if (!std::isnan(c.t_avg_window)) cfg.t_avg_window = c.t_avg_window;
  if (!std::isnan(c.sample_stride)) cfg.sample_stride = c.sample_stride;
  if (!c.output_path.empty()) cfg.output_path = c.output_path;
  if (require_valid) {
    cfg.finalize();
    cfg.validate();
  }
  return cfg;
}

int cmd_run(const CliConfig& cli) {
  mff::RunConfig cfg = build_config(cli);
  const auto result = mff::run_ensemble(cfg, cli.threads);
  std::printf("L=%d gamma=%g theta/pi=%g n=%d  S_half=%.6g(%.2g)  "
              "C2_half=%.6g(%.2g)  G_AB=%.6g(%.2g)\n",
              cfg.params.L, cfg.params.gamma, cfg.params.theta / M_PI,
              result.n_completed, result.S_half.mean, result.S_half.std_error,
              result.C2_half.mean, result.C2_half.std_error, result.G_AB.mean,
              result.G_AB.std_error);
  if (!cfg.output_path.empty()) {
    mff::emit_outputs(result, cfg.output_path);
    std::printf("wrote %s/{ensemble.json,observables.csv,cq.csv}\n",
                cfg.output_path.c_str());
  }
  return 0;
}

int cmd_sweep(const CliConfig& cli, const std::vector<int>& Ls,
              const std::vector<double>& gammas,
              const std::vector<double>& thetas, bool theory_overlay) {
  mff::RunConfig base = build_config(cli, /*require_valid=*/false);
  std::vector<mff::RunConfig> grid;
  for (int L : Ls.empty() ? std::vector<int>{base.params.L} : Ls)
    for (double g : gammas.empty() ? std::vector<double>{base.params.gamma} : gammas)
      for (double th : thetas.empty()
               ? std::vector<double>{base.params.theta / M_PI}
               : thetas) {
        mff::RunConfig c = base;
        c.params.L = L;
        c.params.N = 0;  // re-derive half filling per L
        c.params.gamma = g;
        c.params.theta = th * M_PI;
        if (std::isnan(cli.dt)) c.params.dt = 0.0;  // re-derive default per gamma
        c.master_seed = mff::derive_seed(base.master_seed, grid.size(), 77);
        c.finalize();
        grid.push_back(c);
      }
  std::vector<mff::EnsembleResult> results;
  for (const auto& c : grid) {
    results.push_back(mff::run_ensemble(c, cli.threads));
    const auto& r = results.back();
    std::printf("L=%d gamma=%g theta/pi=%.3f  S_half=%.6g(%.2g) G_AB=%.6g\n",
                c.params.L, c.params.gamma, c.params.theta / M_PI,
                r.S_half.mean, r.S_half.std_error, r.G_AB.mean);
  }
  if (!base.output_path.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(base.output_path);
    mff::emit_observables_csv(
        results, (fs::path(base.output_path) / "observables.csv").string());
    for (size_t i = 0; i < grid.size(); ++i) {
      char sub[128];
      std::snprintf(sub, sizeof(sub), "L%03d_g%.3f_t%.3f", grid[i].params.L,
                    grid[i].params.gamma, grid[i].params.theta / M_PI);
      const auto dir = (fs::path(base.output_path) / sub).string();
      mff::emit_outputs(results[i], dir);
      if (theory_overlay)
        mff::emit_theory_cq_csv(grid[i], (fs::path(dir) / "cq_theory.csv").string());
    }
    std::printf("wrote %s\n", base.output_path.c_str());
  }
  return 0;
}

int cmd_theory(const std::string& table, double J, double gamma,
               double theta_over_pi, int L, const std::string& output) {
  namespace th = mff::theory;
  const double theta = theta_over_pi * M_PI;
  std::string csv;
  if (table == "scalars") {
    csv = "name,value\n";
    char buf[256];
    const double D = th::diffusion_coefficient(J, gamma, theta);
    const double ell0 = th::mean_free_path(J, gamma, theta);
    std::snprintf(buf, sizeof(buf), "D,%.12g\nell0,%.12g\n", D, ell0);
    csv += buf;
    const auto cl = th::coupling_and_loc_length(J, gamma, theta);
    std::snprintf(buf, sizeof(buf), "g,%.12g\nell_star,%.12g\nell_loc,%.12g\n",
                  cl.g, cl.ell_star, cl.ell_loc);
    csv += buf;
    std::snprintf(buf, sizeof(buf), "c0_3_2,%.12g\nc_3_2_half,%.12g\n",
                  th::wiener_hopf_c0(1.5), th::c_alpha_r(1.5, 0.5));
    csv += buf;
    if (theta == M_PI && L > 0) {
      std::snprintf(buf, sizeof(buf), "C2_half_pred,%.12g\nS_half_pred,%.12g\n",
                    th::second_cumulant(J, gamma, L, 0.5, 1.5),
                    th::entropy_prediction(J, gamma, L, 0.5, 1.5));
      csv += buf;
    }
  } else if (table == "gammak") {
    csv = "k,gamma_k\n";
    for (int n = 0; n <= 256; ++n) {
      const double k = -M_PI + 2.0 * M_PI * n / 256;
      csv += std::to_string(k) + "," + std::to_string(th::gamma_k(gamma, theta, k)) + "\n";
    }
  } else if (table == "kernel") {
    csv = "omega,abs_B,re_B\n";
    for (int n = 1; n <= 200; ++n) {
      const double w = gamma * n / 50.0;
      const auto B = th::diffuson_kernel(gamma, theta, w);
      csv += std::to_string(w) + "," + std::to_string(std::abs(B)) + "," +
             std::to_string(B.real()) + "\n";
    }
  } else if (table == "cq") {
    if (L <= 0) throw mff::parameter_error("theory cq table needs --L");
    mff::RunConfig cfg;
    cfg.params.L = L;
    cfg.params.J = J;
    cfg.params.gamma = gamma;
    cfg.params.theta = theta;
    cfg.finalize();
    if (output.empty()) throw mff::parameter_error("theory cq table needs --output");
    mff::emit_theory_cq_csv(cfg, output);
    std::printf("wrote %s\n", output.c_str());
    return 0;
  } else if (table == "calpha") {
    csv = "r,c_3_2\n";
    for (int i = 1; i <= 50; ++i) {
      const double r = 0.01 * i / 2.0 + 1e-9;
      csv += std::to_string(r) + "," + std::to_string(th::c_alpha_r(1.5, std::min(r, 0.5))) + "\n";
    }
  } else {
    throw mff::parameter_error("unknown theory table: " + table);
  }
  if (output.empty()) {
    std::fputs(csv.c_str(), stdout);
  } else {
    std::ofstream out(output);
    if (!out) throw mff::parameter_error("cannot write " + output);
    out << csv;
    std::printf("wrote %s\n", output.c_str());
  }
  return 0;
}

int cmd_oracle_check(const CliConfig& cli, int steps, double tol, bool strict) {
  mff::RunConfig cfg = build_config(cli);
  mff::OracleCompareOptions opt;
  opt.strict = strict;
  const auto report = mff::oracle_trajectory_compare(
      cfg.params, steps, cfg.master_seed, opt);
  json doc{{"max_deviation", report.max_deviation},
           {"steps", report.steps},
           {"max_expectation_mismatch", report.max_expectation_mismatch},
           {"params", mff::config_to_json(cfg)}};
  std::cout << doc.dump(2) << std::endl;
  if (!(report.max_deviation < tol)) {
    std::fprintf(stderr, "oracle-check FAILED: %.3e >= %.3e\n",
                 report.max_deviation, tol);
    return 4;
  }
  return 0;
}

std::vector<std::pair<double, double>> load_xy_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw mff::parameter_error("cannot open " + path);
  std::vector<std::pair<double, double>> data;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double x, y;
    if (std::sscanf(line.c_str(), "%lf,%lf", &x, &y) == 2) data.emplace_back(x, y);
  }
  if (data.empty()) throw mff::parameter_error("no numeric x,y rows in " + path);
  return data;
}

int cmd_fit(const std::string& model, const std::string& input, double lmin) {
  const auto data = load_xy_csv(input);
  mff::FitResult fit;
  if (model == "corrected_power_law") fit = mff::fit_corrected_power_law(data);
  else if (model == "exponential_decay") fit = mff::fit_exponential_decay(data, lmin);
  else if (model == "power_law") fit = mff::fit_power_law(data);
  else throw mff::parameter_error("unknown fit model: " + model);
  std::cout << mff::fit_to_json(fit).dump(2) << std::endl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monitored free-fermion chain simulator"};
  app.require_subcommand(1);

  CliConfig cli;

  auto* run = app.add_subcommand("run", "run one ensemble");
  add_config_flags(run, cli);

  auto* sweep = app.add_subcommand("sweep", "cartesian grid over L/gamma/theta");
  add_config_flags(sweep, cli);
  std::vector<int> sweep_L;
  std::vector<double> sweep_gamma, sweep_theta;
  bool theory_overlay = false;
  sweep->add_option("--L-list", sweep_L, "L grid");
  sweep->add_option("--gamma-list", sweep_gamma, "gamma grid");
  sweep->add_option("--theta-list", sweep_theta, "theta/pi grid");
  sweep->add_flag("--theory-overlay", theory_overlay, "emit theory Cq tables");

  auto* theory = app.add_subcommand("theory", "analytic prediction tables");
  std::string table = "scalars", theory_out;
  double tj = 1.0, tg = 1.0, tth = 1.0;
  int tL = 0;
  theory->add_option("--table", table, "scalars|gammak|kernel|cq|calpha");
  theory->add_option("--J", tj, "hopping");
  theory->add_option("--gamma", tg, "measurement strength");
  theory->add_option("--theta_over_pi", tth, "misalignment / pi");
  theory->add_option("--L", tL, "system size (cq table)");
  theory->add_option("--output", theory_out, "output CSV (stdout if empty)");

  auto* oracle = app.add_subcommand("oracle-check",
                                    "certify against the exact Fock engine");
  add_config_flags(oracle, cli);
  int steps = 50;
  double tol = 1e-8;
  bool no_strict = false;
  oracle->add_option("--steps", steps, "number of time steps");
  oracle->add_option("--tol", tol, "max |G_fock - G_gauss| tolerance");
  oracle->add_flag("--no-strict", no_strict, "skip the <M_k> agreement check");

  auto* fit = app.add_subcommand("fit", "fit a model to x,y CSV data");
  std::string fit_model = "power_law", fit_input;
  double fit_lmin = 0.0;
  fit->add_option("--model", fit_model,
                  "corrected_power_law|exponential_decay|power_law");
  fit->add_option("--input", fit_input, "CSV with x,y rows")->required();
  fit->add_option("--lmin", fit_lmin, "minimum L for exponential fit");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(cli);
    if (sweep->parsed())
      return cmd_sweep(cli, sweep_L, sweep_gamma, sweep_theta, theory_overlay);
    if (theory->parsed()) return cmd_theory(table, tj, tg, tth, tL, theory_out);
    if (oracle->parsed()) return cmd_oracle_check(cli, steps, tol, !no_strict);
    if (fit->parsed()) return cmd_fit(fit_model, fit_input, fit_lmin);
  } catch (const mff::parameter_error& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  }
  return 0;
}
