#include "mff/theory.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "mff/errors.hpp"

namespace mff::theory {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kCatalan = 0.9159655941772190150546035149324;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Gauss-Legendre nodes/weights on [a, b] by Newton iteration on P_n.
struct GaussLegendre {
  std::vector<double> x, w;
  GaussLegendre(int n, double a, double b) : x(n), w(n) {
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
      double pp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = 0.0;
        for (int j = 0; j < n; ++j) {
          const double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
        }
        pp = n * (z * p0 - p1) / (z * z - 1.0);
        const double dz = p0 / pp;
        z -= dz;
        if (std::abs(dz) < 1e-15) break;
      }
      const double xm = 0.5 * (b + a), xl = 0.5 * (b - a);
      x[i] = xm - xl * z;
      x[n - 1 - i] = xm + xl * z;
      w[i] = 2.0 * xl / ((1.0 - z * z) * pp * pp);
      w[n - 1 - i] = w[i];
    }
  }
};

}  // namespace

double gamma_k(double gamma, double theta, double k) {
  return gamma * (1.0 + std::sin(theta / 2.0) * std::cos(k));
}

// |cos(theta/2)| evaluated as |sin((pi - theta)/2)|: identical analytically,
// exact at the endpoints theta = 0 and theta = pi in floating point.
static double abs_cos_half(double theta) {
  return std::abs(std::sin(0.5 * (M_PI - theta)));
}

double diffusion_coefficient(double J, double gamma, double theta) {
  if (!(gamma > 0.0))
    throw parameter_error("diffusion coefficient diverges at gamma = 0");
  const double ac = abs_cos_half(theta);
  return 4.0 * J * J / gamma / (1.0 + ac) + 0.25 * gamma * (1.0 - ac);
}

double mean_free_path(double J, double gamma, double theta) {
  return std::sqrt(diffusion_coefficient(J, gamma, theta) / gamma);
}

std::complex<double> diffuson_kernel(double gamma, double theta, double omega) {
  const double s = gamma * std::sin(theta / 2.0);
  const std::complex<double> a(gamma, -omega);
  const std::complex<double> rad = a * a - s * s;
  if (rad == std::complex<double>(0.0, 0.0))
    return {kInf, 0.0};
  return 1.0 / std::sqrt(rad);
}

double wiener_hopf_c0(double alpha) {
  if (!(alpha > 1.0 && alpha <= 2.0))
    throw parameter_error("wiener_hopf_c0 requires alpha in (1, 2]");
  const double s = std::sin(kPi / alpha);
  if (s <= 0.0) return kInf;
  return 1.0 / s;
}

namespace {

// ln g(x); the inner y-integral is split at min(1, 1/x) so the log kink of
// ln(1 + (x y)^alpha) is resolved for large x, and the second half is mapped
// back to [0,1] by y -> 1/y, which produces the Catalan constant term.
double ln_g(double x, double alpha, const GaussLegendre& gl) {
  const double brk = (x > 1.0) ? 1.0 / x : 1.0;
  double acc = 0.0;
  auto panel = [&](double lo, double hi) {
    const double mid = 0.5 * (hi + lo), half = 0.5 * (hi - lo);
    for (size_t i = 0; i < gl.x.size(); ++i) {
      const double y = mid + half * gl.x[i];
      const double t = std::log1p(std::pow(x * y, alpha)) +
                       std::log(std::pow(y, alpha) + std::pow(x, alpha));
      acc += half * gl.w[i] * t / (1.0 + y * y);
    }
  };
  if (brk < 1.0) {
    panel(0.0, brk);
    panel(brk, 1.0);
  } else {
    panel(0.0, 1.0);
  }
  return -(acc + alpha * kCatalan) / kPi;
}

}  // namespace

double wiener_hopf_c0_quadrature(double alpha) {
  if (!(alpha > 1.0 && alpha < 2.0))
    throw parameter_error("quadrature route requires alpha in (1, 2)");
  static const GaussLegendre gl(64, -1.0, 1.0);
  // Outer integral over x = e^t: both tails decay exponentially for
  // alpha in (1, 2); trapezoid on a wide uniform grid.
  const double tmin = -60.0, tmax = 80.0;
  const int npts = 4001;
  const double h = (tmax - tmin) / (npts - 1);
  double sum = 0.0;
  for (int i = 0; i < npts; ++i) {
    const double t = tmin + i * h;
    const double v = std::exp((alpha - 1.0) * t + ln_g(std::exp(t), alpha, gl));
    sum += (i == 0 || i == npts - 1) ? 0.5 * v : v;
  }
  return std::sin(kPi * alpha / 2.0) / kPi * h * sum;
}

double riemann_zeta(double s) {
  if (!(s > 1.0)) throw parameter_error("riemann_zeta requires s > 1");
  const int M = 40;
  double sum = 0.0;
  for (int k = 1; k <= M; ++k) sum += std::pow(k, -s);
  const double Ms = std::pow(M, -s);
  sum += std::pow(M, 1.0 - s) / (s - 1.0) - 0.5 * Ms + s * Ms / M / 12.0 -
         s * (s + 1.0) * (s + 2.0) * Ms / std::pow(M, 3) / 720.0;
  return sum;
}

double polylog_re_on_circle(double s, double phi, double tol) {
  if (!(s > 1.0 && s < 2.0))
    throw parameter_error("polylog route requires s in (1, 2)");
  if (!(phi > 0.0 && phi < 2.0 * kPi))
    throw parameter_error("polylog route requires phi in (0, 2 pi)");
  const std::complex<double> z = std::polar(1.0, phi);
  const double gap = std::abs(1.0 - z);
  // Partial sum to M, then an iterated summation-by-parts tail: each pass
  // multiplies the remainder by ~ s / (M gap). Choose M so four passes push
  // the truncation below tol.
  std::size_t M = 1000;
  auto tail_bound = [&](std::size_t m) {
    const double q = s / (static_cast<double>(m) * gap);
    return 2.0 / gap * std::pow(static_cast<double>(m), -s) * q * q * q * q;
  };
  while (tail_bound(M) > tol && M < (1u << 26)) M *= 2;

  double re = 0.0, im = 0.0;
  double cs = std::cos(phi), sn = std::sin(phi);
  double cr = 1.0, ci = 0.0;  // e^{i phi n} accumulated by rotation
  for (std::size_t n = 1; n <= M; ++n) {
    const double nr = cr * cs - ci * sn;
    ci = cr * sn + ci * cs;
    cr = nr;
    const double a = std::pow(static_cast<double>(n), -s);
    re += cr * a;
    im += ci * a;
  }
  (void)im;

  // Four summation-by-parts passes on the tail sum_{n > M} z^n a_n with
  // a_n = n^{-s} and forward differences of increasing order.
  const std::size_t m0 = M + 1;
  auto a0 = [&](std::size_t n) { return std::pow(static_cast<double>(n), -s); };
  std::complex<double> tail(0.0, 0.0);
  {
    auto d1 = [&](std::size_t n) { return a0(n + 1) - a0(n); };
    auto d2 = [&](std::size_t n) { return d1(n + 1) - d1(n); };
    auto d3 = [&](std::size_t n) { return d2(n + 1) - d2(n); };
    const std::complex<double> zm = std::polar(1.0, phi * static_cast<double>(m0));
    const std::complex<double> one(1.0, 0.0);
    std::complex<double> t3(0.0, 0.0);  // truncated beyond fourth pass
    std::complex<double> t2 = (zm * d3(m0) + z * t3) / (one - z);
    std::complex<double> t1 = (zm * d2(m0) + z * t2) / (one - z);
    std::complex<double> t0 = (zm * d1(m0) + z * t1) / (one - z);
    tail = (zm * a0(m0) + z * t0) / (one - z);
  }
  return re + tail.real();
}

double c_alpha_r(double alpha, double r, double tol) {
  if (!(alpha > 1.0 && alpha < 2.0)) {
    if (alpha == 2.0)
      throw parameter_error(
          "c_alpha_r diverges at alpha = 2 (zeta(1) pole; diffusive branch is "
          "logarithmic)");
    throw parameter_error("c_alpha_r requires alpha in (1, 2)");
  }
  if (!(r > 0.0 && r <= 0.5))
    throw parameter_error("c_alpha_r requires r in (0, 1/2]");
  const double s = 2.0 / alpha;
  const double bracket = riemann_zeta(s) - polylog_re_on_circle(s, 2.0 * kPi * r, tol);
  return 4.0 * r / (std::pow(2.0 * kPi * r, s) * std::sin(kPi / alpha)) * bracket;
}

double c_alpha_r_limit0(double alpha) {
  if (!(alpha > 1.0 && alpha < 2.0))
    throw parameter_error("c_alpha_r_limit0 requires alpha in (1, 2)");
  return 4.0 / (kPi * alpha) * std::tgamma(-2.0 / alpha);
}

double g0_superdiffusive(double ell0) {
  return std::pow(ell0, 2.0 / 3.0) / std::pow(2.0, 5.0 / 3.0);
}

double g0_diffusive(double ell0, double theta) {
  const double ac = abs_cos_half(theta);
  if (ac == 0.0) throw parameter_error("diffusive g0 undefined at theta = pi");
  return ell0 / (2.0 * std::sqrt(ac));
}

double second_cumulant(double J, double gamma, double L, double r, double alpha) {
  if (alpha == 2.0)
    throw parameter_error(
        "diffusive second cumulant is logarithmic, outside this formula");
  if (alpha != 1.5)
    throw parameter_error("g0 is known only on the superdiffusive branch alpha = 3/2");
  const double ell0 = mean_free_path(J, gamma, kPi);
  return g0_superdiffusive(ell0) * std::pow(r * L, 2.0 / alpha - 1.0) *
         c_alpha_r(alpha, r);
}

double entropy_prediction(double J, double gamma, double L, double r, double alpha) {
  return kPi * kPi / 3.0 * second_cumulant(J, gamma, L, r, alpha);
}

namespace {
constexpr double kMidCoeff = 0.36370787865724047;  // 2^{-2/3} 3^{-1/2}

double branch_linear(double delta, double qell) {
  return qell / std::sqrt(2.0 * std::abs(delta));
}
double branch_super(double qell) {
  return kMidCoeff * std::pow(qell, 2.0 / 3.0);
}
}  // namespace

double Cq_piecewise(double J, double gamma, double theta, double q) {
  if (q < 0.0) throw parameter_error("Cq requires q >= 0");
  const double ell0 = mean_free_path(J, gamma, theta);
  const double qell = q * ell0;
  const double delta = theta - kPi;
  if (qell >= 1.0) return kMidCoeff;
  if (delta == 0.0 || qell >= std::pow(std::abs(delta), 1.5))
    return branch_super(qell);
  return branch_linear(delta, qell);
}

double Cq_smooth(double J, double gamma, double theta, double q) {
  if (q < 0.0) throw parameter_error("Cq requires q >= 0");
  const double ell0 = mean_free_path(J, gamma, theta);
  const double qell = q * ell0;
  if (qell == 0.0) return 0.0;
  const double delta = theta - kPi;
  // p-norm soft minimum of the active branches
  const double p = 8.0;
  double acc = std::pow(branch_super(qell), -p) + std::pow(kMidCoeff, -p);
  if (delta != 0.0) acc += std::pow(branch_linear(delta, qell), -p);
  return std::pow(acc, -1.0 / p);
}

CouplingResult coupling_and_loc_length(double J, double gamma, double theta) {
  const double delta = theta - kPi;
  const double ell0 = mean_free_path(J, gamma, theta);
  if (delta == 0.0) return {kInf, kInf, kInf};
  const double ad = std::abs(delta);
  const double g = ell0 / std::sqrt(2.0 * ad);
  const double ell_star = ell0 * std::pow(ad, -1.5);
  return {g, ell_star, ell_star * std::exp(4.0 * kPi * g)};
}

}  // namespace mff::theory
