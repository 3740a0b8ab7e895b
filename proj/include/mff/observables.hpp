#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mff/state.hpp"

namespace mff {

// Contiguous site ranges used throughout: [first, first+count) mod L.
std::vector<int> contiguous_region(int first, int count, int L);
std::vector<int> half_region(int L);        // [0, L/2)
std::vector<int> antipodal_region_a(int L); // [0, L/4)
std::vector<int> antipodal_region_b(int L); // [L/2, 3L/4)

// Eigenvalues of the region submatrix of G, clamped to [0, 1].
// Throws consistency_error if the submatrix is non-Hermitian beyond 1e-10.
Eigen::VectorXd region_spectrum(const CorrelationMatrix& G,
                                const std::vector<int>& region);

// Von Neumann entanglement entropy in nats,
//   S = -sum[ lambda ln lambda + (1-lambda) ln(1-lambda) ],
// eigenvalues within 1e-12 of {0,1} contribute zero.
double entanglement_entropy(const CorrelationMatrix& G,
                            const std::vector<int>& region);
double entropy_from_spectrum(const Eigen::VectorXd& lambdas);

// Charge cumulants of the region from the same spectrum:
//   C2 = sum l(1-l),   C4 = sum l(1-l)(1 - 6l + 6l^2).
std::pair<double, double> charge_cumulants(const CorrelationMatrix& G,
                                           const std::vector<int>& region);
std::pair<double, double> cumulants_from_spectrum(const Eigen::VectorXd& lambdas);

// Translation-averaged pair density correlation
//   Cbar(x) = (1/L) sum_i C_{i,i+x},  C_ij = G_ij delta_ij - G_ij G_ji.
Eigen::VectorXd pair_correlation(const CorrelationMatrix& G);

// C(q_n) = sum_x exp(-i q_n x) Cbar(x), q_n = 2 pi n / L; real since Cbar is
// even in x.
Eigen::VectorXd momentum_correlation(const Eigen::VectorXd& cbar);

// Rescaled lattice momentum used on all momentum axes.
inline double q_tilde(double q) { return 2.0 * std::sin(q / 2.0); }

// G_AB = sum_{i in A, j in B} |G_ij|^2 = -Cov(N_A, N_B) for disjoint regions.
double number_covariance(const CorrelationMatrix& G, const std::vector<int>& A,
                         const std::vector<int>& B);

// One time sample of everything the harness reports.
struct ObservableRecord {
  double t = 0.0;
  double S_half = 0.0;
  double C2_half = 0.0;
  double C4_half = 0.0;
  double G_AB = 0.0;
  Eigen::VectorXd Cbar;  // length L (empty if not requested)
  Eigen::VectorXd Cq;    // length L (empty if not requested)
};

struct ObservableSelection {
  bool entropy_cumulants = true;  // S_half, C2_half, C4_half
  bool correlations = true;       // Cbar, Cq
  bool covariance = true;         // G_AB
};

ObservableRecord compute_record(const CorrelationMatrix& G, double t,
                                const ObservableSelection& sel = {});

}  // namespace mff
