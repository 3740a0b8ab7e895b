#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "mff/params.hpp"

namespace mff {

// G_ij = <c_i^dagger c_j>; Hermitian, rank-N projector (conjugated) for a
// pure Gaussian state, trace N.
using CorrelationMatrix = Eigen::MatrixXcd;

// Row-major so the per-bond rank-1 updates touch contiguous memory; the FFT
// over the site index runs batched with stride N.
using ModeMatrix = Eigen::Matrix<std::complex<double>, Eigen::Dynamic,
                                 Eigen::Dynamic, Eigen::RowMajor>;

// Pure Gaussian state of N fermions on L sites: the columns of U are
// orthonormal single-particle modes,  |psi> = prod_n (sum_i U_in c_i^dag) |0>.
struct GaussianState {
  ModeMatrix U;  // L x N, orthonormal columns
  double t = 0.0;

  int L() const { return static_cast<int>(U.rows()); }
  int N() const { return static_cast<int>(U.cols()); }
};

// Computational-basis state with N particles on a uniformly random N-subset
// of sites; columns ordered by ascending site index. Deterministic in seed.
GaussianState init_random_occupation(const ModelParams& params, std::uint64_t seed);

// Same, with the occupation prescribed (testing and oracle lockstep).
GaussianState init_occupation(int L, const std::vector<int>& occupied_sites);

// Hook for arbitrary caller-provided orthonormal modes (testing).
// Throws parameter_error if the columns are not orthonormal to 1e-10.
GaussianState state_from_modes(Eigen::MatrixXcd modes, double t = 0.0);

// Re-orthonormalize the columns: U <- Q of the thin QR factorization with the
// R diagonal real and nonnegative, so U itself (not only U U^dag) is
// deterministic. Throws degeneracy_error when the smallest R diagonal
// magnitude drops below 1e-13 (dt too large or invalid state).
void normalize(GaussianState& state);

// G = conj(U U^dag), i.e. G_ij = sum_n conj(U_in) U_jn.
CorrelationMatrix correlation_matrix(const GaussianState& state);

// Sites occupied in a computational-basis state (ascending). Used to lift the
// same initial condition into the exact many-body engine.
std::vector<int> occupied_sites(const GaussianState& state);

}  // namespace mff
