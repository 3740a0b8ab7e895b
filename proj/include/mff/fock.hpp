#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <vector>

#include "mff/params.hpp"
#include "mff/state.hpp"

namespace mff {

// Exact many-body state in the fixed-N sector, used to certify the Gaussian
// engine at small L. Basis states are site-occupation bitmasks in ascending
// numeric order; the amplitude convention applies creation operators in
// ascending site order.
struct FockState {
  int L = 0;
  int N = 0;
  std::vector<std::uint64_t> basis;  // ascending masks, popcount == N
  Eigen::VectorXcd amp;

  int dim() const { return static_cast<int>(basis.size()); }
  int index_of(std::uint64_t mask) const;  // binary search; throws if absent
  void renormalize();                      // amp / ||amp||
};

// Practical cap on the sector dimension binom(L, N).
inline constexpr int kFockDimensionCap = 20000;

// Unit amplitude on the basis element with the given occupied sites.
FockState lift_basis_state(int L, const std::vector<int>& occupied_sites);

// Exact many-body amplitudes of an arbitrary Gaussian state: the amplitude on
// a basis mask is the determinant of the corresponding row submatrix of U.
FockState lift_gaussian(const GaussianState& state);

// Dense eigendecomposition of the many-body hopping Hamiltonian
// H = J sum_b (c^dag_{b+1} c_b + h.c.) over periodic bonds, precomputed once.
class ManyBodyHopping {
 public:
  ManyBodyHopping(const FockState& prototype, double J);
  void apply(FockState& state, double dt) const;  // amp <- exp(i dt H) amp

 private:
  double J_;
  Eigen::MatrixXcd evecs_;
  Eigen::VectorXd evals_;
};

// amp <- [1 + (e^A - 1) M_k] amp, then renormalize; exact because the
// many-body M_k = d_k^dag d_k is a projector.
void apply_many_body_kraus(FockState& state, int bond, double A, double theta);

// <M_k> = amp^dag M_k amp for the normalized state.
double fock_measurement_expectation(const FockState& state, int bond, double theta);

// G_ij = <c_i^dag c_j> with fermionic signs from the ordering convention.
CorrelationMatrix fock_correlation_matrix(const FockState& state);

// Von Neumann entropy of the reduced density matrix of `region` (exact trace
// over the complement, via SVD of the bipartite amplitude matrix).
double fock_entanglement_entropy(const FockState& state,
                                 const std::vector<int>& region);

// Full counting statistics of N_region from |amp|^2 marginals.
std::map<int, double> fock_number_distribution(const FockState& state,
                                               const std::vector<int>& region);

// Cumulants (C2, C4) of that distribution.
std::pair<double, double> fock_charge_cumulants(const FockState& state,
                                                const std::vector<int>& region);

// <N_A><N_B> - <N_A N_B> from the exact state.
double fock_number_covariance(const FockState& state, const std::vector<int>& A,
                              const std::vector<int>& B);

struct OracleCompareOptions {
  bool strict = true;  // recompute <M_k> from the Fock state and require
                       // agreement with the Gaussian value to 1e-10
};

struct OracleCompareReport {
  int steps = 0;
  double max_deviation = 0.0;             // max over steps of ||G_fock - G_gauss||_max
  double max_expectation_mismatch = 0.0;  // strict mode diagnostic
  std::uint64_t noise_draws = 0;
};

// Runs the Gaussian engine and the exact engine in lockstep with identical
// params, initial occupation, noise stream and Trotter order. The Kraus
// coefficients A_k (including the <M_k> shift) are computed by the Gaussian
// engine and fed to both.
OracleCompareReport oracle_trajectory_compare(const ModelParams& params,
                                              int steps,
                                              std::uint64_t master_seed,
                                              const OracleCompareOptions& opt = {});

}  // namespace mff
