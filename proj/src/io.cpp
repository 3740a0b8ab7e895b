#include "mff/io.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>

#include "mff/errors.hpp"
#include "mff/theory.hpp"

namespace mff {

using nlohmann::json;

namespace {

const std::vector<std::string> kConfigKeys = {
    "L", "N", "J", "gamma", "theta_over_pi", "dt", "measurement_only",
    "n_traj", "master_seed", "t_equil_factor", "t_avg_window",
    "sample_stride", "observables", "output_path"};

}  // namespace

RunConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw parameter_error("config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (std::find(kConfigKeys.begin(), kConfigKeys.end(), key) == kConfigKeys.end())
      throw parameter_error("unknown config key: " + key);
  }
  RunConfig c;
  try {
    c.params.L = doc.at("L").get<int>();
    if (doc.contains("N")) c.params.N = doc["N"].get<int>();
    if (doc.contains("J")) c.params.J = doc["J"].get<double>();
    if (doc.contains("gamma")) c.params.gamma = doc["gamma"].get<double>();
    if (doc.contains("theta_over_pi"))
      c.params.theta = doc["theta_over_pi"].get<double>() * M_PI;
    if (doc.contains("dt")) c.params.dt = doc["dt"].get<double>();
    if (doc.contains("measurement_only"))
      c.params.measurement_only = doc["measurement_only"].get<bool>();
    if (doc.contains("n_traj")) c.n_traj = doc["n_traj"].get<int>();
    if (doc.contains("master_seed"))
      c.master_seed = doc["master_seed"].get<std::uint64_t>();
    if (doc.contains("t_equil_factor"))
      c.t_equil_factor = doc["t_equil_factor"].get<double>();
    if (doc.contains("t_avg_window"))
      c.t_avg_window = doc["t_avg_window"].get<double>();
    if (doc.contains("sample_stride"))
      c.sample_stride = doc["sample_stride"].get<double>();
    if (doc.contains("observables"))
      c.observables = doc["observables"].get<std::vector<std::string>>();
    if (doc.contains("output_path"))
      c.output_path = doc["output_path"].get<std::string>();
  } catch (const json::exception& e) {
    throw parameter_error(std::string("malformed config: ") + e.what());
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parameter_error("cannot open config file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw parameter_error(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

json config_to_json(const RunConfig& c) {
  return json{{"L", c.params.L},
              {"N", c.params.N},
              {"J", c.params.J},
              {"gamma", c.params.gamma},
              {"theta_over_pi", c.params.theta / M_PI},
              {"dt", c.params.dt},
              {"measurement_only", c.params.measurement_only},
              {"n_traj", c.n_traj},
              {"master_seed", c.master_seed},
              {"t_equil_factor", c.t_equil_factor},
              {"t_avg_window", c.t_avg_window},
              {"sample_stride", c.sample_stride},
              {"observables", c.observables},
              {"output_path", c.output_path}};
}

std::uint64_t config_hash(const RunConfig& config) {
  const std::string s = config_to_json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

json stat_to_json(const ScalarStat& s) {
  json j{{"mean", s.mean}, {"n", s.n}};
  if (std::isnan(s.std_error))
    j["std_error"] = nullptr;
  else
    j["std_error"] = s.std_error;
  return j;
}

ScalarStat stat_from_json(const json& j) {
  ScalarStat s;
  s.mean = j.at("mean").get<double>();
  s.n = j.at("n").get<int>();
  s.std_error = j.at("std_error").is_null()
                    ? std::numeric_limits<double>::quiet_NaN()
                    : j.at("std_error").get<double>();
  return s;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Eigen::VectorXd vector_from_json(const json& arr) {
  Eigen::VectorXd v(arr.size());
  for (size_t i = 0; i < arr.size(); ++i) v(i) = arr[i].get<double>();
  return v;
}

json stats_to_json(const std::vector<ScalarStat>& stats) {
  json means = json::array(), errs = json::array();
  for (const auto& s : stats) {
    means.push_back(s.mean);
    if (std::isnan(s.std_error))
      errs.push_back(nullptr);
    else
      errs.push_back(s.std_error);
  }
  return json{{"mean", means}, {"std_error", errs}};
}

std::vector<ScalarStat> stats_from_json(const json& j, int n) {
  std::vector<ScalarStat> out;
  const auto& means = j.at("mean");
  const auto& errs = j.at("std_error");
  for (size_t i = 0; i < means.size(); ++i) {
    ScalarStat s;
    s.mean = means[i].get<double>();
    s.std_error = errs[i].is_null() ? std::numeric_limits<double>::quiet_NaN()
                                    : errs[i].get<double>();
    s.n = n;
    out.push_back(s);
  }
  return out;
}

}  // namespace

json ensemble_to_json(const EnsembleResult& r) {
  json traj = json::array();
  for (const auto& m : r.per_trajectory) {
    traj.push_back(json{{"trajectory_id", m.trajectory_id},
                        {"n_samples", m.n_samples},
                        {"S_half", m.S_half},
                        {"C2_half", m.C2_half},
                        {"C4_half", m.C4_half},
                        {"G_AB", m.G_AB},
                        {"Cbar", vector_to_json(m.Cbar)},
                        {"Cq", vector_to_json(m.Cq)}});
  }
  return json{{"config", config_to_json(r.config)},
              {"provenance",
               json{{"config_hash", r.config_hash}, {"version", r.version}}},
              {"n_completed", r.n_completed},
              {"aborted_ids", r.aborted_ids},
              {"abort_diagnostics", r.abort_diagnostics},
              {"S_half", stat_to_json(r.S_half)},
              {"C2_half", stat_to_json(r.C2_half)},
              {"C4_half", stat_to_json(r.C4_half)},
              {"G_AB", stat_to_json(r.G_AB)},
              {"Cbar", stats_to_json(r.Cbar)},
              {"Cq", stats_to_json(r.Cq)},
              {"per_trajectory", traj}};
}

EnsembleResult ensemble_from_json(const json& doc) {
  EnsembleResult r;
  r.config = parse_config(doc.at("config"));
  r.config.finalize();
  r.config_hash = doc.at("provenance").at("config_hash").get<std::uint64_t>();
  r.version = doc.at("provenance").at("version").get<std::string>();
  r.n_completed = doc.at("n_completed").get<int>();
  r.aborted_ids = doc.at("aborted_ids").get<std::vector<int>>();
  r.abort_diagnostics =
      doc.at("abort_diagnostics").get<std::vector<std::string>>();
  r.S_half = stat_from_json(doc.at("S_half"));
  r.C2_half = stat_from_json(doc.at("C2_half"));
  r.C4_half = stat_from_json(doc.at("C4_half"));
  r.G_AB = stat_from_json(doc.at("G_AB"));
  r.Cbar = stats_from_json(doc.at("Cbar"), r.n_completed);
  r.Cq = stats_from_json(doc.at("Cq"), r.n_completed);
  for (const auto& t : doc.at("per_trajectory")) {
    TrajectoryMean m;
    m.trajectory_id = t.at("trajectory_id").get<int>();
    m.n_samples = t.at("n_samples").get<int>();
    m.S_half = t.at("S_half").get<double>();
    m.C2_half = t.at("C2_half").get<double>();
    m.C4_half = t.at("C4_half").get<double>();
    m.G_AB = t.at("G_AB").get<double>();
    m.Cbar = vector_from_json(t.at("Cbar"));
    m.Cq = vector_from_json(t.at("Cq"));
    r.per_trajectory.push_back(std::move(m));
  }
  return r;
}

json fit_to_json(const FitResult& f) {
  json params = json::object();
  for (size_t i = 0; i < f.parameter_names.size(); ++i)
    params[f.parameter_names[i]] = f.parameters[i];
  json cov = json::array();
  for (int i = 0; i < f.covariance.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < f.covariance.cols(); ++j) row.push_back(f.covariance(i, j));
    cov.push_back(row);
  }
  json out{{"model", f.model},
           {"parameters", params},
           {"covariance", cov},
           {"residual_norm", f.residual_norm},
           {"fit_range", json::array({f.fit_range.first, f.fit_range.second})},
           {"no_localization", f.no_localization}};
  if (!f.log_derivative.empty()) {
    out["log_derivative"] =
        json{{"x", f.log_derivative_x}, {"value", f.log_derivative}};
  }
  return out;
}

namespace {

void write_file(const std::string& file, const std::string& content) {
  std::ofstream out(file);
  if (!out) throw parameter_error("cannot write to " + file);
  out << content;
  if (!out) throw parameter_error("write failed for " + file);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string observables_csv_row(const EnsembleResult& r) {
  const auto& p = r.config.params;
  std::string row;
  for (const std::string& cell :
       {fmt(p.L), fmt(p.gamma), fmt(p.theta / M_PI), fmt(p.J), fmt(p.dt),
        fmt(r.config.n_traj), fmt(r.S_half.mean), fmt(r.S_half.std_error),
        fmt(r.C2_half.mean), fmt(r.C2_half.std_error), fmt(r.C4_half.mean),
        fmt(r.C4_half.std_error), fmt(r.G_AB.mean), fmt(r.G_AB.std_error)}) {
    if (!row.empty()) row += ",";
    row += cell;
  }
  return row;
}

constexpr const char* kObservablesHeader =
    "L,gamma,theta_over_pi,J,dt,n_traj,S_half,S_half_err,C2_half,C2_half_err,"
    "C4_half,C4_half_err,G_AB,G_AB_err";

}  // namespace

void emit_observables_csv(const std::vector<EnsembleResult>& results,
                          const std::string& file) {
  std::string csv = std::string(kObservablesHeader) + "\n";
  for (const auto& r : results) csv += observables_csv_row(r) + "\n";
  write_file(file, csv);
}

void emit_outputs(const EnsembleResult& result, const std::string& path) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec && !fs::is_directory(path))
    throw parameter_error("cannot create output directory " + path);

  write_file((fs::path(path) / "ensemble.json").string(),
             ensemble_to_json(result).dump(2) + "\n");
  emit_observables_csv({result}, (fs::path(path) / "observables.csv").string());

  const auto& p = result.config.params;
  const double ell0 =
      (p.gamma > 0) ? theory::mean_free_path(p.J, p.gamma, p.theta)
                    : std::numeric_limits<double>::quiet_NaN();
  std::string csv = "q,q_tilde,q_tilde_ell0,Cq,Cq_err\n";
  for (size_t n = 0; n < result.Cq.size(); ++n) {
    const double q = 2.0 * M_PI * static_cast<double>(n) / p.L;
    const double qt = q_tilde(q);
    csv += fmt(q) + "," + fmt(qt) + "," + fmt(qt * ell0) + "," +
           fmt(result.Cq[n].mean) + "," + fmt(result.Cq[n].std_error) + "\n";
  }
  write_file((fs::path(path) / "cq.csv").string(), csv);
}

void emit_theory_cq_csv(const RunConfig& config, const std::string& file) {
  const auto& p = config.params;
  const double ell0 = theory::mean_free_path(p.J, p.gamma, p.theta);
  std::string csv = "q,q_tilde,q_tilde_ell0,Cq_piecewise,Cq_smooth\n";
  for (int n = 0; n < p.L; ++n) {
    const double q = 2.0 * M_PI * n / p.L;
    const double qt = q_tilde(q);
    const double qq = std::min(q, 2.0 * M_PI - q);  // fold to [0, pi]
    csv += fmt(q) + "," + fmt(qt) + "," + fmt(qt * ell0) + "," +
           fmt(theory::Cq_piecewise(p.J, p.gamma, p.theta, qq)) + "," +
           fmt(theory::Cq_smooth(p.J, p.gamma, p.theta, qq)) + "\n";
  }
  write_file(file, csv);
}

}  // namespace mff
