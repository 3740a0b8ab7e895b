#include "mff/observables.hpp"

#include <cmath>
#include <complex>

#include "mff/errors.hpp"

namespace mff {

std::vector<int> contiguous_region(int first, int count, int L) {
  std::vector<int> r(count);
  for (int i = 0; i < count; ++i) r[i] = (first + i) % L;
  return r;
}

std::vector<int> half_region(int L) { return contiguous_region(0, L / 2, L); }
std::vector<int> antipodal_region_a(int L) { return contiguous_region(0, L / 4, L); }
std::vector<int> antipodal_region_b(int L) {
  return contiguous_region(L / 2, L / 4, L);
}

Eigen::VectorXd region_spectrum(const CorrelationMatrix& G,
                                const std::vector<int>& region) {
  const int n = static_cast<int>(region.size());
  if (n == 0) throw parameter_error("region must be non-empty");
  Eigen::MatrixXcd sub(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) sub(a, b) = G(region[a], region[b]);
  const double herm_dev = (sub - sub.adjoint()).cwiseAbs().maxCoeff();
  if (herm_dev > 1e-10)
    throw consistency_error("correlation submatrix non-Hermitian (deviation " +
                            std::to_string(herm_dev) + ")");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sub,
                                                     Eigen::EigenvaluesOnly);
  Eigen::VectorXd lam = es.eigenvalues();
  return lam.cwiseMax(0.0).cwiseMin(1.0);
}

double entropy_from_spectrum(const Eigen::VectorXd& lambdas) {
  double s = 0.0;
  for (int i = 0; i < lambdas.size(); ++i) {
    const double l = lambdas(i);
    if (l < 1e-12 || l > 1.0 - 1e-12) continue;
    s -= l * std::log(l) + (1.0 - l) * std::log(1.0 - l);
  }
  return s;
}

double entanglement_entropy(const CorrelationMatrix& G,
                            const std::vector<int>& region) {
  return entropy_from_spectrum(region_spectrum(G, region));
}

std::pair<double, double> cumulants_from_spectrum(const Eigen::VectorXd& lambdas) {
  double c2 = 0.0, c4 = 0.0;
  for (int i = 0; i < lambdas.size(); ++i) {
    const double l = lambdas(i);
    const double p = l * (1.0 - l);
    c2 += p;
    c4 += p * (1.0 - 6.0 * l + 6.0 * l * l);
  }
  return {c2, c4};
}

std::pair<double, double> charge_cumulants(const CorrelationMatrix& G,
                                           const std::vector<int>& region) {
  return cumulants_from_spectrum(region_spectrum(G, region));
}

Eigen::VectorXd pair_correlation(const CorrelationMatrix& G) {
  const int L = static_cast<int>(G.rows());
  Eigen::VectorXd cbar = Eigen::VectorXd::Zero(L);
  for (int i = 0; i < L; ++i) {
    const double ni = G(i, i).real();
    cbar(0) += ni * (1.0 - ni);
  }
  for (int x = 1; x < L; ++x) {
    double s = 0.0;
    for (int i = 0; i < L; ++i) s += std::norm(G(i, (i + x) % L));
    cbar(x) = -s;
  }
  return cbar / static_cast<double>(L);
}

Eigen::VectorXd momentum_correlation(const Eigen::VectorXd& cbar) {
  const int L = static_cast<int>(cbar.size());
  Eigen::VectorXd cq(L);
  for (int n = 0; n < L; ++n) {
    const double q = 2.0 * M_PI * n / L;
    double re = 0.0;
    for (int x = 0; x < L; ++x) re += cbar(x) * std::cos(q * x);
    cq(n) = re;
  }
  return cq;
}

double number_covariance(const CorrelationMatrix& G, const std::vector<int>& A,
                         const std::vector<int>& B) {
  for (int a : A)
    for (int b : B)
      if (a == b) throw parameter_error("regions A and B must be disjoint");
  double s = 0.0;
  for (int a : A)
    for (int b : B) s += std::norm(G(a, b));
  return s;
}

ObservableRecord compute_record(const CorrelationMatrix& G, double t,
                                const ObservableSelection& sel) {
  const int L = static_cast<int>(G.rows());
  ObservableRecord rec;
  rec.t = t;
  if (sel.entropy_cumulants) {
    const auto lam = region_spectrum(G, half_region(L));
    rec.S_half = entropy_from_spectrum(lam);
    std::tie(rec.C2_half, rec.C4_half) = cumulants_from_spectrum(lam);
  }
  if (sel.correlations) {
    rec.Cbar = pair_correlation(G);
    rec.Cq = momentum_correlation(rec.Cbar);
  }
  if (sel.covariance) {
    rec.G_AB = number_covariance(G, antipodal_region_a(L), antipodal_region_b(L));
  }
  return rec;
}

}  // namespace mff
