#include "mff/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mff/errors.hpp"

namespace mff {

namespace {

// Least squares y ~ p*x - q for fixed alpha (x = L^alpha); returns
// (p, q, rss).
struct LinSolve {
  double p, q, rss;
};

LinSolve solve_at_alpha(const std::vector<std::pair<double, double>>& data,
                        double alpha) {
  const int n = static_cast<int>(data.size());
  double sxx = 0, sx = 0, sxy = 0, sy = 0;
  for (const auto& [L, S] : data) {
    const double x = std::pow(L, alpha);
    sxx += x * x;
    sx += x;
    sxy += x * S;
    sy += S;
  }
  const double det = sxx * n - sx * sx;
  const double p = (sxy * n - sx * sy) / det;
  const double q = -(sxx * sy - sx * sxy) / det;
  double rss = 0;
  for (const auto& [L, S] : data) {
    const double r = p * std::pow(L, alpha) - q - S;
    rss += r * r;
  }
  return {p, q, rss};
}

// Simple weighted linear regression y = a + m x; returns (a, m, var_m, rss).
struct LinReg {
  double a, m, var_m, rss;
};

LinReg linear_regression(const std::vector<std::pair<double, double>>& xy) {
  const int n = static_cast<int>(xy.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : xy) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double det = n * sxx - sx * sx;
  const double m = (n * sxy - sx * sy) / det;
  const double a = (sy * sxx - sx * sxy) / det;
  double rss = 0;
  for (const auto& [x, y] : xy) {
    const double r = a + m * x - y;
    rss += r * r;
  }
  const double sigma2 = (n > 2) ? rss / (n - 2) : 0.0;
  return {a, m, sigma2 * n / det, rss};
}

}  // namespace

FitResult fit_corrected_power_law(
    const std::vector<std::pair<double, double>>& input) {
  auto data = input;
  std::sort(data.begin(), data.end());
  data.erase(std::unique(data.begin(), data.end()), data.end());
  if (data.size() < 4)
    throw parameter_error("corrected power-law fit needs >= 4 distinct L values");
  for (size_t i = 0; i < data.size(); ++i) {
    if (!(data[i].second > 0.0))
      throw parameter_error("corrected power-law fit needs positive S data");
    if (i > 0 && !(data[i].second > data[i - 1].second))
      throw parameter_error("corrected power-law fit needs monotone S data");
  }

  double best_alpha = 0.1, best_rss = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 180; ++i) {
    const double alpha = 0.1 + 0.005 * i;
    const double rss = solve_at_alpha(data, alpha).rss;
    if (rss < best_rss) {
      best_rss = rss;
      best_alpha = alpha;
    }
  }
  // golden-section refinement on [best - step, best + step]
  double lo = std::max(0.02, best_alpha - 0.005), hi = best_alpha + 0.005;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = solve_at_alpha(data, x1).rss, f2 = solve_at_alpha(data, x2).rss;
  for (int it = 0; it < 80; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = solve_at_alpha(data, x1).rss;
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = solve_at_alpha(data, x2).rss;
    }
  }
  const double alpha = 0.5 * (lo + hi);
  const auto sol = solve_at_alpha(data, alpha);
  const double s = sol.p;
  const double b = sol.q / sol.p;

  FitResult res;
  res.model = "corrected_power_law";
  res.parameter_names = {"s", "alpha", "b"};
  res.parameters = {s, alpha, b};
  res.residual_norm = std::sqrt(sol.rss);
  res.fit_range = {data.front().first, data.back().first};

  // Gauss-Newton covariance from the Jacobian of s(L^alpha - b)
  const int n = static_cast<int>(data.size());
  Eigen::MatrixXd Jac(n, 3);
  for (int i = 0; i < n; ++i) {
    const double L = data[i].first;
    const double x = std::pow(L, alpha);
    Jac(i, 0) = x - b;
    Jac(i, 1) = s * x * std::log(L);
    Jac(i, 2) = -s;
  }
  const double dof = std::max(1, n - 3);
  const double sigma2 = sol.rss / dof;
  Eigen::MatrixXd jtj = Jac.transpose() * Jac;
  res.covariance = sigma2 * jtj.inverse();

  // centered differences of ln S on ln L (one-sided at the ends)
  std::vector<double> lnL(n), lnS(n);
  for (int i = 0; i < n; ++i) {
    lnL[i] = std::log(data[i].first);
    lnS[i] = std::log(data[i].second);
  }
  for (int i = 0; i < n; ++i) {
    const int a = std::max(0, i - 1), c = std::min(n - 1, i + 1);
    res.log_derivative_x.push_back(data[i].first);
    res.log_derivative.push_back((lnS[c] - lnS[a]) / (lnL[c] - lnL[a]));
  }
  return res;
}

FitResult fit_exponential_decay(
    const std::vector<std::pair<double, double>>& data, double L_min) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& [L, g] : data) {
    if (L < L_min) continue;
    if (!(g > 0.0))
      throw parameter_error("exponential fit needs positive G_AB values");
    pts.emplace_back(L, std::log(g));
  }
  if (pts.size() < 3)
    throw parameter_error("exponential fit needs >= 3 points with L >= L_min");
  std::sort(pts.begin(), pts.end());
  const auto reg = linear_regression(pts);

  FitResult res;
  res.model = "exponential_decay";
  res.fit_range = {pts.front().first, pts.back().first};
  res.residual_norm = std::sqrt(reg.rss);
  if (reg.m >= 0.0) {
    res.no_localization = true;
    res.parameter_names = {"slope"};
    res.parameters = {reg.m};
    res.covariance = Eigen::MatrixXd::Constant(1, 1, reg.var_m);
    return res;
  }
  const double ell = -1.0 / (4.0 * reg.m);
  res.parameter_names = {"ell_loc", "slope", "intercept"};
  res.parameters = {ell, reg.m, reg.a};
  res.covariance = Eigen::MatrixXd::Zero(3, 3);
  // var(ell) propagated through ell = -1/(4m)
  res.covariance(0, 0) = reg.var_m * std::pow(1.0 / (4.0 * reg.m * reg.m), 2);
  res.covariance(1, 1) = reg.var_m;
  return res;
}

FitResult fit_power_law(const std::vector<std::pair<double, double>>& data) {
  if (data.size() < 2) throw parameter_error("power-law fit needs >= 2 points");
  std::vector<std::pair<double, double>> pts;
  for (const auto& [x, y] : data) {
    if (!(x > 0.0 && y > 0.0))
      throw parameter_error("power-law fit needs positive data");
    pts.emplace_back(std::log(x), std::log(y));
  }
  const auto reg = linear_regression(pts);
  FitResult res;
  res.model = "power_law";
  res.parameter_names = {"exponent", "prefactor", "exponent_err"};
  res.parameters = {reg.m, std::exp(reg.a), std::sqrt(std::max(0.0, reg.var_m))};
  res.covariance = Eigen::MatrixXd::Constant(1, 1, reg.var_m);
  res.residual_norm = std::sqrt(reg.rss);
  std::vector<double> xs;
  for (const auto& [x, y] : data) xs.push_back(x);
  res.fit_range = {*std::min_element(xs.begin(), xs.end()),
                   *std::max_element(xs.begin(), xs.end())};
  return res;
}

}  // namespace mff
