#include "mff/dynamics.hpp"

#include <cmath>

#include "mff/errors.hpp"

namespace mff {

double measurement_expectation(const GaussianState& state, int bond, double theta) {
  const int L = state.L();
  if (bond < 0 || bond >= L) throw parameter_error("bond index out of range");
  const double c = std::cos(theta / 4.0);
  const double s = std::sin(theta / 4.0);
  const int k = bond;
  const int kp = (bond + 1) % L;
  return (c * state.U.row(k) + s * state.U.row(kp)).squaredNorm();
}

std::vector<BondCoefficient> layer_coefficients(const GaussianState& state,
                                                Parity parity,
                                                const ModelParams& params,
                                                NoiseStream& noise) {
  const int L = state.L();
  const int first = (parity == Parity::Even) ? 0 : 1;
  const double gdt = params.gamma * params.dt;
  const double amp = std::sqrt(gdt);
  std::vector<BondCoefficient> coeffs;
  coeffs.reserve(L / 2);
  for (int b = first; b < L; b += 2) {
    const double m = measurement_expectation(state, b, params.theta);
    const double dxi = amp * noise.normal();
    coeffs.push_back({b, m, (2.0 * m - 1.0) * gdt + dxi});
  }
  return coeffs;
}

void apply_layer_update(GaussianState& state,
                        const std::vector<BondCoefficient>& coeffs,
                        double theta) {
  const int L = state.L();
  const double c = std::cos(theta / 4.0);
  const double s = std::sin(theta / 4.0);
  Eigen::RowVectorXcd w(state.N());
  for (const auto& bc : coeffs) {
    const int k = bc.bond;
    const int kp = (bc.bond + 1) % L;
    const double f = std::expm1(bc.A);
    w = c * state.U.row(k) + s * state.U.row(kp);
    state.U.row(k).noalias() += (f * c) * w;
    state.U.row(kp).noalias() += (f * s) * w;
  }
}

void apply_measurement_layer(GaussianState& state, Parity parity,
                             const ModelParams& params, NoiseStream& noise) {
  const auto coeffs = layer_coefficients(state, parity, params, noise);
  apply_layer_update(state, coeffs, params.theta);
  normalize(state);
}

void apply_hopping(GaussianState& state, const Propagator& prop) {
  prop.apply(state);
}

Stepper::Stepper(const ModelParams& params, const Propagator& prop,
                 StepOptions options)
    : params_(params), prop_(prop), options_(options) {
  params_.validate();
  if (options_.renorm_stride < 1)
    throw parameter_error("renorm_stride must be >= 1");
  if (prop.L() != params_.L)
    throw parameter_error("propagator/params dimension mismatch");
}

void Stepper::maybe_normalize(GaussianState& state) {
  ++layer_count_;
  if (layer_count_ % options_.renorm_stride == 0) normalize(state);
}

void Stepper::step(GaussianState& state, NoiseStream& noise) {
  if (!params_.measurement_only && params_.J != 0.0) prop_.apply(state);

  if (options_.sequential) {
    // Comparison mode: bonds left to right, <M> refreshed before every bond.
    // Adjacent bonds overlap, so the state must be renormalized per bond.
    const double gdt = params_.gamma * params_.dt;
    const double amp = std::sqrt(gdt);
    for (int b = 0; b < params_.L; ++b) {
      const double m = measurement_expectation(state, b, params_.theta);
      const double A = (2.0 * m - 1.0) * gdt + amp * noise.normal();
      apply_layer_update(state, {{b, m, A}}, params_.theta);
      normalize(state);
    }
  } else {
    auto even = layer_coefficients(state, Parity::Even, params_, noise);
    apply_layer_update(state, even, params_.theta);
    maybe_normalize(state);
    auto odd = layer_coefficients(state, Parity::Odd, params_, noise);
    apply_layer_update(state, odd, params_.theta);
    maybe_normalize(state);
  }
  state.t += params_.dt;
}

}  // namespace mff
