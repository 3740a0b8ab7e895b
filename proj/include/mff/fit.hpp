#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

namespace mff {

struct FitResult {
  std::string model;
  std::vector<std::string> parameter_names;
  std::vector<double> parameters;
  Eigen::MatrixXd covariance;      // Gauss-Newton estimate at the optimum
  double residual_norm = 0.0;      // sqrt(RSS)
  std::pair<double, double> fit_range{0.0, 0.0};
  bool no_localization = false;    // exponential fit: nonnegative slope marker
  // corrected power law extras: discrete d ln S / d ln L series
  std::vector<double> log_derivative_x;
  std::vector<double> log_derivative;
};

// S(L) = s (L^alpha - b): grid scan over alpha in [0.1, 1.0] step 0.005 with a
// linear solve for (s, s b) at each alpha, then golden-section refinement.
// Also emits the centered-difference log-derivative series.
// Throws parameter_error on fewer than 4 distinct L, non-positive or
// non-monotone S.
FitResult fit_corrected_power_law(const std::vector<std::pair<double, double>>& data);

// ln G_AB = a + m L for points with L >= L_min; ell_loc = -1/(4 m).
// Nonnegative slope sets no_localization instead of a length.
FitResult fit_exponential_decay(const std::vector<std::pair<double, double>>& data,
                                double L_min);

// Log-log linear regression, exponent with standard error.
FitResult fit_power_law(const std::vector<std::pair<double, double>>& data);

}  // namespace mff
