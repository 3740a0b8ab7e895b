#include "mff/state.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mff/errors.hpp"
#include "mff/rng.hpp"

namespace mff {

void ModelParams::validate() const {
  if (L < 2 || L % 2 != 0)
    throw parameter_error("L must be a positive even integer");
  if (N < 1 || N > L) throw parameter_error("N must satisfy 1 <= N <= L");
  if (!(theta >= 0.0 && theta <= M_PI))
    throw parameter_error("theta must lie in [0, pi]");
  if (!(dt > 0.0)) throw parameter_error("dt must be positive");
  if (!(gamma >= 0.0)) throw parameter_error("gamma must be nonnegative");
  if (measurement_only && J != 0.0)
    throw parameter_error("measurement_only forces J = 0");
  if (!std::isfinite(J) || !std::isfinite(gamma) || !std::isfinite(dt))
    throw parameter_error("parameters must be finite");
}

GaussianState init_occupation(int L, const std::vector<int>& occupied) {
  const int N = static_cast<int>(occupied.size());
  if (L < 1 || N < 1 || N > L)
    throw parameter_error("occupation size must satisfy 1 <= N <= L");
  std::vector<int> sites = occupied;
  std::sort(sites.begin(), sites.end());
  if (std::adjacent_find(sites.begin(), sites.end()) != sites.end())
    throw parameter_error("occupied sites must be distinct");
  if (sites.front() < 0 || sites.back() >= L)
    throw parameter_error("occupied site out of range");

  GaussianState s;
  s.U = Eigen::MatrixXcd::Zero(L, N);
  for (int c = 0; c < N; ++c) s.U(sites[c], c) = 1.0;
  s.t = 0.0;
  return s;
}

GaussianState init_random_occupation(const ModelParams& params, std::uint64_t seed) {
  params.validate();
  std::mt19937_64 eng(seed);
  std::vector<int> pool(params.L);
  std::iota(pool.begin(), pool.end(), 0);
  for (int k = 0; k < params.N; ++k) {
    const int j = k + static_cast<int>(bounded_uint(eng, params.L - k));
    std::swap(pool[k], pool[j]);
  }
  pool.resize(params.N);
  return init_occupation(params.L, pool);
}

GaussianState state_from_modes(Eigen::MatrixXcd modes, double t) {
  const Eigen::MatrixXcd gram = modes.adjoint() * modes;
  const double dev =
      (gram - Eigen::MatrixXcd::Identity(gram.rows(), gram.cols()))
          .cwiseAbs()
          .maxCoeff();
  if (dev > 1e-10)
    throw parameter_error("provided modes are not orthonormal (deviation " +
                          std::to_string(dev) + ")");
  GaussianState s;
  s.U = modes;
  s.t = t;
  return s;
}

namespace {

// One Cholesky-QR pass: U <- U R^{-1} with R = chol(U^dag U)^dag. R carries a
// real positive diagonal, so this realizes exactly the gauge-fixed thin QR
// factor. Returns (min, max) of the R diagonal.
std::pair<double, double> cholesky_qr_pass(ModeMatrix& U) {
  const int N = static_cast<int>(U.cols());
  Eigen::MatrixXcd gram = U.adjoint() * U;
  Eigen::LLT<Eigen::MatrixXcd> llt(gram);
  if (llt.info() != Eigen::Success)
    throw degeneracy_error(
        "mode matrix numerically rank deficient (Cholesky of the Gram matrix "
        "failed); dt too large or invalid state");
  Eigen::MatrixXcd R = llt.matrixL().adjoint();
  double dmin = R(0, 0).real(), dmax = dmin;
  for (int j = 1; j < N; ++j) {
    const double d = R(j, j).real();
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
  }
  if (!(dmin >= 1e-13) || !std::isfinite(dmax))
    throw degeneracy_error(
        "mode matrix numerically rank deficient (smallest R diagonal " +
        std::to_string(dmin) + "); dt too large or invalid state");
  R.triangularView<Eigen::Upper>().solveInPlace<Eigen::OnTheRight>(U);
  return {dmin, dmax};
}

}  // namespace

void normalize(GaussianState& state) {
  auto [dmin, dmax] = cholesky_qr_pass(state.U);
  // A single pass leaves an orthonormality residual ~ (dmax/dmin)^2 * eps;
  // refine once when the layer stretched the columns appreciably.
  if (dmax / dmin > 10.0) cholesky_qr_pass(state.U);
}

CorrelationMatrix correlation_matrix(const GaussianState& state) {
  return state.U.conjugate() * state.U.transpose();
}

std::vector<int> occupied_sites(const GaussianState& state) {
  std::vector<int> sites;
  sites.reserve(state.N());
  for (int c = 0; c < state.N(); ++c) {
    int best = 0;
    double mag = 0.0;
    for (int i = 0; i < state.L(); ++i) {
      const double a = std::abs(state.U(i, c));
      if (a > mag) {
        mag = a;
        best = i;
      }
    }
    if (mag < 1.0 - 1e-12)
      throw parameter_error("state is not a computational-basis occupation");
    sites.push_back(best);
  }
  std::sort(sites.begin(), sites.end());
  return sites;
}

}  // namespace mff
