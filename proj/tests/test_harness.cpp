#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>

#include "mff/ensemble.hpp"
#include "mff/errors.hpp"
#include "mff/fit.hpp"
#include "mff/io.hpp"

using namespace mff;
using nlohmann::json;

namespace {

RunConfig small_config() {
  RunConfig c;
  c.params.L = 8;
  c.params.N = 4;
  c.params.J = 1.0;
  c.params.gamma = 1.0;
  c.params.theta = M_PI;
  c.params.dt = 0.05;
  c.n_traj = 4;
  c.master_seed = 12345;
  c.t_equil_factor = 0.25;  // t_equil = 16
  c.t_avg_window = 10.0;
  c.sample_stride = 1.0;
  return c;
}

}  // namespace

TEST_CASE("trajectories are deterministic and respect the sampling window") {
  auto c = small_config();
  const auto a = run_trajectory(c, 2);
  const auto b = run_trajectory(c, 2);
  REQUIRE(a.size() == b.size());
  CHECK(a.size() == 11);  // samples at t_equil + {0..10}
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].S_half == b[i].S_half);
    CHECK(a[i].G_AB == b[i].G_AB);
    CHECK(a[i].Cq == b[i].Cq);
  }
  const auto other = run_trajectory(c, 3);
  CHECK(a.front().S_half != other.front().S_half);
}

TEST_CASE("zero averaging window means exactly one sample at t_equil") {
  auto c = small_config();
  c.t_avg_window = 0.0;
  const auto records = run_trajectory(c, 0);
  REQUIRE(records.size() == 1);
  CHECK(records.front().t == doctest::Approx(16.0));
}

TEST_CASE("unitary-only trajectories conserve the trace") {
  auto c = small_config();
  c.params.gamma = 0.0;
  c.params.dt = 0.05;
  const auto records = run_trajectory(c, 1);
  for (const auto& r : records) {
    // trace G = sum over Cbar(0)*L ... use S>=0 and C(q=0)=0 as proxies
    CHECK(std::abs(r.Cq(0)) < 1e-8);
    CHECK(r.S_half >= 0.0);
  }
}

TEST_CASE("ensemble statistics and scheduler independence") {
  auto c = small_config();
  const auto r1 = run_ensemble(c, 1);
  const auto r2 = run_ensemble(c, 2);
  CHECK(r1.n_completed == 4);
  CHECK(r1.S_half.mean == r2.S_half.mean);
  CHECK(r1.S_half.std_error == r2.S_half.std_error);
  CHECK(r1.C2_half.mean == r2.C2_half.mean);
  CHECK(r1.G_AB.mean == r2.G_AB.mean);
  REQUIRE(r1.Cq.size() == 8);
  for (int n = 0; n < 8; ++n) CHECK(r1.Cq[n].mean == r2.Cq[n].mean);
}

TEST_CASE("single-trajectory ensembles mark errors undefined") {
  auto c = small_config();
  c.n_traj = 1;
  const auto r = run_ensemble(c, 1);
  CHECK(r.S_half.n == 1);
  CHECK(std::isnan(r.S_half.std_error));
  CHECK(r.S_half.mean == trajectory_window_mean(c, 0).S_half);
}

TEST_CASE("merging two half-ensembles reproduces the full means") {
  auto c = small_config();
  c.n_traj = 6;
  const auto full = run_ensemble(c, 2);
  EnsembleResult ha = full, hb = full;
  ha.per_trajectory.assign(full.per_trajectory.begin(),
                           full.per_trajectory.begin() + 3);
  hb.per_trajectory.assign(full.per_trajectory.begin() + 3,
                           full.per_trajectory.end());
  aggregate(ha);
  aggregate(hb);
  const auto merged = merge_ensembles(ha, hb);
  CHECK(merged.S_half.mean == doctest::Approx(full.S_half.mean).epsilon(1e-15));
  CHECK(merged.C2_half.mean == doctest::Approx(full.C2_half.mean).epsilon(1e-15));
  CHECK(merged.G_AB.mean == doctest::Approx(full.G_AB.mean).epsilon(1e-15));
}

TEST_CASE("ensembles fail loudly when trajectories abort") {
  auto c = small_config();
  c.params.dt = 5.0;  // gamma dt = 250: guaranteed Kraus blowup
  c.params.gamma = 50.0;
  c.t_equil_factor = 1.0;
  c.n_traj = 3;
  CHECK_THROWS_AS(run_ensemble(c, 1), degeneracy_error);
}

TEST_CASE("config schema: exact keys, defaults, unknown-key rejection") {
  json doc{{"L", 16},          {"gamma", 2.0},      {"theta_over_pi", 1.0},
           {"n_traj", 3},      {"master_seed", 9},  {"t_equil_factor", 0.5},
           {"t_avg_window", 5.0}};
  auto c = parse_config(doc);
  c.finalize();
  CHECK(c.params.L == 16);
  CHECK(c.params.N == 8);            // default half filling
  CHECK(c.params.dt == 0.02);        // default for gamma >= 1
  CHECK(c.params.theta == doctest::Approx(M_PI));
  CHECK(c.n_traj == 3);

  json bad = doc;
  bad["renorm"] = 1;
  CHECK_THROWS_AS(parse_config(bad), parameter_error);
  json wrong_type = doc;
  wrong_type["L"] = "sixteen";
  CHECK_THROWS_AS(parse_config(wrong_type), parameter_error);
}

TEST_CASE("ensemble JSON round trip is exact") {
  auto c = small_config();
  c.n_traj = 2;
  const auto r = run_ensemble(c, 1);
  const json doc = ensemble_to_json(r);
  const auto back = ensemble_from_json(json::parse(doc.dump()));
  CHECK(back.config_hash == r.config_hash);
  CHECK(back.S_half.mean == r.S_half.mean);
  CHECK(back.S_half.std_error == r.S_half.std_error);
  CHECK(back.C4_half.mean == r.C4_half.mean);
  REQUIRE(back.per_trajectory.size() == r.per_trajectory.size());
  for (size_t i = 0; i < r.per_trajectory.size(); ++i) {
    CHECK(back.per_trajectory[i].S_half == r.per_trajectory[i].S_half);
    CHECK(back.per_trajectory[i].Cq == r.per_trajectory[i].Cq);
  }
  CHECK(ensemble_to_json(back).dump() == doc.dump());
}

TEST_CASE("emit_outputs writes the three files with the pinned formats") {
  auto c = small_config();
  c.n_traj = 2;
  const auto r = run_ensemble(c, 1);
  const auto dir = std::filesystem::temp_directory_path() / "mff_emit_test";
  std::filesystem::remove_all(dir);
  emit_outputs(r, dir.string());

  std::ifstream ens(dir / "ensemble.json");
  REQUIRE(ens.good());
  json parsed;
  ens >> parsed;
  CHECK(ensemble_from_json(parsed).S_half.mean == r.S_half.mean);

  std::ifstream cq(dir / "cq.csv");
  REQUIRE(cq.good());
  std::string header;
  std::getline(cq, header);
  CHECK(header == "q,q_tilde,q_tilde_ell0,Cq,Cq_err");
  int rows = 0;
  std::string line;
  while (std::getline(cq, line)) {
    if (line.empty()) continue;
    double q, qt, qtl, v, e;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf", &q, &qt, &qtl, &v,
                        &e) == 5);
    CHECK(qt == doctest::Approx(2.0 * std::sin(q / 2.0)).epsilon(1e-9));
    ++rows;
  }
  CHECK(rows == 8);  // one row per momentum

  std::ifstream obs(dir / "observables.csv");
  REQUIRE(obs.good());
  std::getline(obs, header);
  CHECK(header ==
        "L,gamma,theta_over_pi,J,dt,n_traj,S_half,S_half_err,C2_half,"
        "C2_half_err,C4_half,C4_half_err,G_AB,G_AB_err");
  std::filesystem::remove_all(dir);
}

TEST_CASE("corrected power law: exact model recovery") {
  std::vector<std::pair<double, double>> data;
  for (double L : {16, 24, 32, 48, 64, 96, 128, 256})
    data.emplace_back(L, 2.0 * (std::pow(L, 1.0 / 3.0) - 1.5));
  const auto fit = fit_corrected_power_law(data);
  CHECK(fit.parameters[0] == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(fit.parameters[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
  CHECK(fit.parameters[2] == doctest::Approx(1.5).epsilon(1e-6));
  CHECK(fit.log_derivative.size() == data.size());
}

TEST_CASE("corrected power law: pure power law recovers alpha sharply") {
  std::vector<std::pair<double, double>> data;
  for (double L : {16, 32, 64, 128, 256, 512})
    data.emplace_back(L, 0.7 * std::pow(L, 0.41));
  const auto fit = fit_corrected_power_law(data);
  CHECK(fit.parameters[1] == doctest::Approx(0.41).epsilon(1e-8));
  CHECK(std::abs(fit.parameters[2]) < 1e-6);
}

TEST_CASE("corrected power law is scale equivariant") {
  std::vector<std::pair<double, double>> data, scaled;
  for (double L : {16, 24, 48, 96, 192}) {
    const double S = 1.3 * (std::pow(L, 0.27) - 0.8);
    data.emplace_back(L, S);
    scaled.emplace_back(L, 10.0 * S);
  }
  const auto a = fit_corrected_power_law(data);
  const auto b = fit_corrected_power_law(scaled);
  CHECK(b.parameters[0] == doctest::Approx(10.0 * a.parameters[0]).epsilon(1e-9));
  CHECK(b.parameters[1] == doctest::Approx(a.parameters[1]).epsilon(1e-9));
  CHECK(b.parameters[2] == doctest::Approx(a.parameters[2]).epsilon(1e-9));
}

TEST_CASE("corrected power law rejects bad data") {
  CHECK_THROWS_AS(fit_corrected_power_law({{16, 1.0}, {32, 2.0}, {64, 3.0}}),
                  parameter_error);
  CHECK_THROWS_AS(
      fit_corrected_power_law({{16, 1.0}, {32, 2.0}, {64, 1.5}, {128, 3.0}}),
      parameter_error);
  CHECK_THROWS_AS(
      fit_corrected_power_law({{16, -1.0}, {32, 2.0}, {64, 2.5}, {128, 3.0}}),
      parameter_error);
}

TEST_CASE("exponential decay fit") {
  std::vector<std::pair<double, double>> data;
  for (double L : {32, 48, 64, 96, 128}) data.emplace_back(L, std::exp(-L / 40.0));
  const auto fit = fit_exponential_decay(data, 0.0);
  CHECK_FALSE(fit.no_localization);
  CHECK(fit.parameters[0] == doctest::Approx(10.0).epsilon(1e-10));

  // growing data -> no localization marker
  std::vector<std::pair<double, double>> grow;
  for (double L : {32, 48, 64, 96}) grow.emplace_back(L, std::pow(L, 1.0 / 3.0));
  CHECK(fit_exponential_decay(grow, 0.0).no_localization);

  CHECK_THROWS_AS(fit_exponential_decay(data, 100.0), parameter_error);
}

TEST_CASE("power law fit") {
  std::vector<std::pair<double, double>> sq, inv;
  for (double x : {1.0, 2.0, 3.5, 7.0, 11.0}) {
    sq.emplace_back(x, 3.0 * x * x);
    inv.emplace_back(x, 5.0 / std::pow(x, 1.5));
  }
  CHECK(fit_power_law(sq).parameters[0] == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(fit_power_law(inv).parameters[0] == doctest::Approx(-1.5).epsilon(1e-10));
  CHECK(fit_power_law(sq).parameters[1] == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("config hash is stable and sensitive") {
  const auto c = small_config();
  auto d = c;
  CHECK(config_hash(c) == config_hash(d));
  d.master_seed += 1;
  CHECK(config_hash(c) != config_hash(d));
}
