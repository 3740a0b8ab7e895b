#include "mff/fock.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>

#include "mff/dynamics.hpp"
#include "mff/errors.hpp"
#include "mff/propagator.hpp"
#include "mff/rng.hpp"

namespace mff {

namespace {

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t r = 1;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

// Parity sign from the occupied sites strictly below position p.
inline double jw_sign(std::uint64_t mask, int p) {
  const std::uint64_t below = mask & ((std::uint64_t{1} << p) - 1);
  return (std::popcount(below) & 1) ? -1.0 : 1.0;
}

// c^dag_p c_q |mask>: returns (sign, new mask) or sign 0 if annihilated.
inline std::pair<double, std::uint64_t> hop(std::uint64_t mask, int p, int q) {
  if (!(mask >> q & 1)) return {0.0, 0};
  double sign = jw_sign(mask, q);
  std::uint64_t m = mask ^ (std::uint64_t{1} << q);
  if (m >> p & 1) return {0.0, 0};
  sign *= jw_sign(m, p);
  return {sign, m | (std::uint64_t{1} << p)};
}

std::vector<std::uint64_t> build_basis(int L, int N) {
  const std::uint64_t dim = binomial(L, N);
  if (dim > kFockDimensionCap)
    throw parameter_error("Fock sector dimension " + std::to_string(dim) +
                          " exceeds the cap of " +
                          std::to_string(kFockDimensionCap));
  std::vector<std::uint64_t> basis;
  basis.reserve(dim);
  // smallest mask with N bits, then next-combination stepping
  std::uint64_t v = (std::uint64_t{1} << N) - 1;
  const std::uint64_t limit = std::uint64_t{1} << L;
  while (v < limit) {
    basis.push_back(v);
    const std::uint64_t t = v | (v - 1);
    v = (t + 1) | (((~t & -~t) - 1) >> (std::countr_zero(v) + 1));
    if (v == 0) break;
  }
  return basis;
}

}  // namespace

int FockState::index_of(std::uint64_t mask) const {
  auto it = std::lower_bound(basis.begin(), basis.end(), mask);
  if (it == basis.end() || *it != mask)
    throw consistency_error("basis mask not found");
  return static_cast<int>(it - basis.begin());
}

void FockState::renormalize() {
  const double n = amp.norm();
  if (n <= 0.0) throw degeneracy_error("many-body amplitude vanished");
  amp /= n;
}

FockState lift_basis_state(int L, const std::vector<int>& occupied) {
  const int N = static_cast<int>(occupied.size());
  if (N < 1 || N > L) throw parameter_error("need 1 <= N <= L occupied sites");
  if (L > 62) throw parameter_error("Fock oracle limited to L <= 62");
  FockState s;
  s.L = L;
  s.N = N;
  s.basis = build_basis(L, N);
  s.amp = Eigen::VectorXcd::Zero(s.dim());
  std::uint64_t mask = 0;
  for (int site : occupied) {
    if (site < 0 || site >= L) throw parameter_error("occupied site out of range");
    if (mask >> site & 1) throw parameter_error("occupied sites must be distinct");
    mask |= std::uint64_t{1} << site;
  }
  s.amp(s.index_of(mask)) = 1.0;
  return s;
}

FockState lift_gaussian(const GaussianState& gs) {
  FockState s;
  s.L = gs.L();
  s.N = gs.N();
  if (s.L > 62) throw parameter_error("Fock oracle limited to L <= 62");
  s.basis = build_basis(s.L, s.N);
  s.amp = Eigen::VectorXcd::Zero(s.dim());
  Eigen::MatrixXcd sub(s.N, s.N);
  for (int a = 0; a < s.dim(); ++a) {
    const std::uint64_t m = s.basis[a];
    int r = 0;
    for (int i = 0; i < s.L; ++i)
      if ((m >> i) & 1) sub.row(r++) = gs.U.row(i);
    s.amp(a) = sub.determinant();
  }
  s.renormalize();  // unit norm holds exactly for orthonormal U
  return s;
}

ManyBodyHopping::ManyBodyHopping(const FockState& prototype, double J) : J_(J) {
  const int dim = prototype.dim();
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
  for (int a = 0; a < dim; ++a) {
    const std::uint64_t m = prototype.basis[a];
    for (int b = 0; b < prototype.L; ++b) {
      const int i = b, j = (b + 1) % prototype.L;
      // J (c^dag_j c_i + c^dag_i c_j)
      for (auto [p, q] : {std::pair{j, i}, std::pair{i, j}}) {
        auto [sign, m2] = hop(m, p, q);
        if (sign != 0.0) H(prototype.index_of(m2), a) += J * sign;
      }
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  evals_ = es.eigenvalues();
  evecs_ = es.eigenvectors().cast<std::complex<double>>();
}

void ManyBodyHopping::apply(FockState& state, double dt) const {
  if (J_ == 0.0 || dt == 0.0) return;
  Eigen::VectorXcd coeff = evecs_.adjoint() * state.amp;
  for (int i = 0; i < coeff.size(); ++i)
    coeff(i) *= std::polar(1.0, dt * evals_(i));
  state.amp = evecs_ * coeff;
}

namespace {

// y += M_k x with M_k = cos^2 n_k + sin^2 n_{k+1} + sin cos (c^dag_k c_{k+1} + h.c.)
void accumulate_measurement_apply(const FockState& s, int bond, double theta,
                                  const Eigen::VectorXcd& x, Eigen::VectorXcd& y) {
  const int k = bond, kp = (bond + 1) % s.L;
  const double c = std::cos(theta / 4.0), sn = std::sin(theta / 4.0);
  const double c2 = c * c, s2 = sn * sn, cs = c * sn;
  for (int a = 0; a < s.dim(); ++a) {
    if (x(a) == std::complex<double>(0.0, 0.0)) continue;
    const std::uint64_t m = s.basis[a];
    const double diag = c2 * ((m >> k) & 1) + s2 * ((m >> kp) & 1);
    if (diag != 0.0) y(a) += diag * x(a);
    if (cs != 0.0) {
      for (auto [p, q] : {std::pair{k, kp}, std::pair{kp, k}}) {
        auto [sign, m2] = hop(m, p, q);
        if (sign != 0.0) y(s.index_of(m2)) += cs * sign * x(a);
      }
    }
  }
}

}  // namespace

void apply_many_body_kraus(FockState& state, int bond, double A, double theta) {
  if (bond < 0 || bond >= state.L) throw parameter_error("bond out of range");
  if (A != 0.0) {
    Eigen::VectorXcd mx = Eigen::VectorXcd::Zero(state.dim());
    accumulate_measurement_apply(state, bond, theta, state.amp, mx);
    state.amp += std::expm1(A) * mx;
  }
  state.renormalize();
}

double fock_measurement_expectation(const FockState& state, int bond, double theta) {
  Eigen::VectorXcd mx = Eigen::VectorXcd::Zero(state.dim());
  accumulate_measurement_apply(state, bond, theta, state.amp, mx);
  return state.amp.dot(mx).real();
}

CorrelationMatrix fock_correlation_matrix(const FockState& state) {
  const int L = state.L;
  CorrelationMatrix G = CorrelationMatrix::Zero(L, L);
  for (int a = 0; a < state.dim(); ++a) {
    if (state.amp(a) == std::complex<double>(0.0, 0.0)) continue;
    const std::uint64_t m = state.basis[a];
    for (int j = 0; j < L; ++j) {
      if (!((m >> j) & 1)) continue;
      for (int i = 0; i < L; ++i) {
        auto [sign, m2] = hop(m, i, j);
        if (sign == 0.0) continue;
        G(i, j) += sign * std::conj(state.amp(state.index_of(m2))) * state.amp(a);
      }
    }
  }
  return G;
}

double fock_entanglement_entropy(const FockState& state,
                                 const std::vector<int>& region) {
  std::uint64_t amask = 0;
  for (int site : region) {
    if (site < 0 || site >= state.L) throw parameter_error("region site out of range");
    amask |= std::uint64_t{1} << site;
  }
  // compressed indices for subsets of A and of its complement
  std::map<std::uint64_t, int> aidx, bidx;
  for (int a = 0; a < state.dim(); ++a) {
    const std::uint64_t m = state.basis[a];
    aidx.emplace(m & amask, 0);
    bidx.emplace(m & ~amask, 0);
  }
  int na = 0;
  for (auto& kv : aidx) kv.second = na++;
  int nb = 0;
  for (auto& kv : bidx) kv.second = nb++;

  Eigen::MatrixXcd psi = Eigen::MatrixXcd::Zero(na, nb);
  for (int a = 0; a < state.dim(); ++a) {
    const std::uint64_t m = state.basis[a];
    const std::uint64_t ma = m & amask, mb = m & ~amask;
    // sign of reordering ascending sites into (A part)(B part): one swap per
    // pair (i in A-part, j in B-part) with j < i
    int inversions = 0;
    for (int i = 0; i < state.L; ++i) {
      if (!((ma >> i) & 1)) continue;
      inversions += std::popcount(mb & ((std::uint64_t{1} << i) - 1));
    }
    const double sign = (inversions & 1) ? -1.0 : 1.0;
    psi(aidx[ma], bidx[mb]) = sign * state.amp(a);
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(psi);
  double S = 0.0;
  for (int i = 0; i < svd.singularValues().size(); ++i) {
    const double p = svd.singularValues()(i) * svd.singularValues()(i);
    if (p > 1e-14) S -= p * std::log(p);
  }
  return S;
}

std::map<int, double> fock_number_distribution(const FockState& state,
                                               const std::vector<int>& region) {
  std::uint64_t amask = 0;
  for (int site : region) amask |= std::uint64_t{1} << site;
  std::map<int, double> dist;
  for (int a = 0; a < state.dim(); ++a)
    dist[std::popcount(state.basis[a] & amask)] += std::norm(state.amp(a));
  return dist;
}

std::pair<double, double> fock_charge_cumulants(const FockState& state,
                                                const std::vector<int>& region) {
  const auto dist = fock_number_distribution(state, region);
  double mean = 0.0;
  for (auto [n, p] : dist) mean += n * p;
  double m2 = 0.0, m4 = 0.0;
  for (auto [n, p] : dist) {
    const double d = n - mean;
    m2 += d * d * p;
    m4 += d * d * d * d * p;
  }
  return {m2, m4 - 3.0 * m2 * m2};
}

double fock_number_covariance(const FockState& state, const std::vector<int>& A,
                              const std::vector<int>& B) {
  std::uint64_t amask = 0, bmask = 0;
  for (int site : A) amask |= std::uint64_t{1} << site;
  for (int site : B) bmask |= std::uint64_t{1} << site;
  if (amask & bmask) throw parameter_error("regions A and B must be disjoint");
  double na = 0.0, nb = 0.0, nab = 0.0;
  for (int a = 0; a < state.dim(); ++a) {
    const double p = std::norm(state.amp(a));
    const int ca = std::popcount(state.basis[a] & amask);
    const int cb = std::popcount(state.basis[a] & bmask);
    na += ca * p;
    nb += cb * p;
    nab += static_cast<double>(ca) * cb * p;
  }
  return na * nb - nab;
}

OracleCompareReport oracle_trajectory_compare(const ModelParams& params,
                                              int steps,
                                              std::uint64_t master_seed,
                                              const OracleCompareOptions& opt) {
  ModelParams p = params;
  p.finalize();
  p.validate();
  if (steps < 1) throw parameter_error("steps must be positive");

  const std::uint64_t occ_seed = derive_seed(master_seed, 0, /*salt=*/1);
  GaussianState gauss = init_random_occupation(p, occ_seed);
  FockState fock = lift_basis_state(p.L, occupied_sites(gauss));

  const Propagator prop(p.L, p.J, p.dt);
  const ManyBodyHopping mb_hop(fock, p.J);
  NoiseStream noise(master_seed, 0);

  OracleCompareReport report;
  report.steps = steps;

  for (int s = 0; s < steps; ++s) {
    if (!p.measurement_only && p.J != 0.0) {
      prop.apply(gauss);
      mb_hop.apply(fock, p.dt);
    }
    for (Parity parity : {Parity::Even, Parity::Odd}) {
      const auto coeffs = layer_coefficients(gauss, parity, p, noise);
      if (opt.strict) {
        for (const auto& bc : coeffs) {
          const double mf = fock_measurement_expectation(fock, bc.bond, p.theta);
          const double mismatch = std::abs(mf - bc.expectation);
          report.max_expectation_mismatch =
              std::max(report.max_expectation_mismatch, mismatch);
          if (mismatch > 1e-10)
            throw consistency_error(
                "Gaussian and exact <M_k> disagree by " + std::to_string(mismatch));
        }
      }
      apply_layer_update(gauss, coeffs, p.theta);
      normalize(gauss);
      for (const auto& bc : coeffs)
        apply_many_body_kraus(fock, bc.bond, bc.A, p.theta);
    }
    gauss.t += p.dt;

    const CorrelationMatrix gg = correlation_matrix(gauss);
    const CorrelationMatrix gf = fock_correlation_matrix(fock);
    report.max_deviation =
        std::max(report.max_deviation, (gg - gf).cwiseAbs().maxCoeff());
  }

  const std::uint64_t expected_draws = static_cast<std::uint64_t>(steps) * p.L;
  report.noise_draws = noise.draws();
  if (report.noise_draws != expected_draws)
    throw consistency_error("noise stream desynchronized: consumed " +
                            std::to_string(report.noise_draws) + ", expected " +
                            std::to_string(expected_draws));
  return report;
}

}  // namespace mff
