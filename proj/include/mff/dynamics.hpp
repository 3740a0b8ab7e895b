#pragma once

#include <vector>

#include "mff/params.hpp"
#include "mff/propagator.hpp"
#include "mff/rng.hpp"
#include "mff/state.hpp"

namespace mff {

enum class Parity { Even, Odd };

// Stochastic Kraus coefficient of one bond in one layer:
//   A = (2 <M> - 1) gamma dt + dxi,   dxi = sqrt(gamma dt) * normal draw.
struct BondCoefficient {
  int bond;            // 0-based; couples sites (bond, bond+1 mod L)
  double expectation;  // <M_bond> in the state at the layer start
  double A;
};

// <M_k> = sum_l |U_{k,l} cos(theta/4) + U_{k+1,l} sin(theta/4)|^2, in [0, 1].
// Requires orthonormal columns.
double measurement_expectation(const GaussianState& state, int bond, double theta);

// Coefficients for all bonds of one parity, ascending bond order; consumes one
// normal draw per bond (also when gamma = 0, keeping streams aligned).
std::vector<BondCoefficient> layer_coefficients(const GaussianState& state,
                                                Parity parity,
                                                const ModelParams& params,
                                                NoiseStream& noise);

// exp(M^(k)) = I + (e^A - 1) v v^T with v the real unit vector carrying
// cos(theta/4) at site k and sin(theta/4) at site k+1; exact because v v^T is
// a projector. O(N) per bond; same-parity bonds touch disjoint rows.
// Does not renormalize.
void apply_layer_update(GaussianState& state,
                        const std::vector<BondCoefficient>& coeffs,
                        double theta);

// One full measurement layer for the given parity: coefficients from the
// state at the layer start, rank-1 updates, then one renormalization.
void apply_measurement_layer(GaussianState& state, Parity parity,
                             const ModelParams& params, NoiseStream& noise);

// e^{i dt H} factor of one step (identity when J = 0).
void apply_hopping(GaussianState& state, const Propagator& prop);

struct StepOptions {
  // Renormalize after every m-th measurement layer; 1 reproduces the
  // normative protocol exactly, larger values trade fidelity for speed.
  int renorm_stride = 1;
  // Left-to-right single-bond protocol instead of the even/odd split
  // (comparison mode; overlapping bonds force one QR per bond).
  bool sequential = false;
};

// One full discrete time step:
//   N[ exp(sum odd M) N[ exp(sum even M) e^{i dt H} U ] ],  t advanced by dt.
// The hopping factor is skipped in measurement-only mode.
class Stepper {
 public:
  Stepper(const ModelParams& params, const Propagator& prop,
          StepOptions options = {});

  void step(GaussianState& state, NoiseStream& noise);

  const ModelParams& params() const { return params_; }

 private:
  void maybe_normalize(GaussianState& state);

  ModelParams params_;
  const Propagator& prop_;
  StepOptions options_;
  long layer_count_ = 0;
};

}  // namespace mff
