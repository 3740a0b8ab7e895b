#pragma once

#include <complex>

namespace mff::theory {

// Measurement-induced quasiparticle decay rate
//   gamma_k = gamma (1 + sin(theta/2) cos k) >= 0.
double gamma_k(double gamma, double theta, double k);

// Spatial diffusion coefficient
//   D = (4 J^2/gamma) / (1 + |cos(theta/2)|) + (gamma/4)(1 - |cos(theta/2)|).
// Throws parameter_error at gamma = 0 (divergent ballistic limit).
double diffusion_coefficient(double J, double gamma, double theta);

// Mean free path ell_0 = sqrt(D / gamma).
double mean_free_path(double J, double gamma, double theta);

// Diffuson kernel B(omega) = [(gamma - i omega)^2 - gamma^2 sin^2(theta/2)]^{-1/2},
// principal branch. Returns an infinity marker at (theta = pi, omega = 0).
// Only |B| and Re B are validated; the phase convention for omega < 0 is not.
std::complex<double> diffuson_kernel(double gamma, double theta, double omega);

// Wiener-Hopf constant c_0 = 1 / sin(pi/alpha), alpha in (1, 2]. Diverges
// (infinity marker) as alpha -> 1+.
double wiener_hopf_c0(double alpha);

// Validation-only route for c_0: nested quadrature of
//   c_0 = (1/pi) sin(pi alpha/2) int_0^inf dx x^{alpha-2} g(x),
//   ln g(x) = -(1/pi) int_0^inf dy ln(1 + x^alpha y^alpha) / (1 + y^2).
// Accurate to ~1e-5 at alpha = 3/2.
double wiener_hopf_c0_quadrature(double alpha);

// Riemann zeta for s > 1 via Euler-Maclaurin (used by the polylog route).
double riemann_zeta(double s);

// Re Li_s(e^{i phi}) for s in (1, 2), phi in (0, 2 pi): direct series with an
// iterated summation-by-parts tail below `tol`.
double polylog_re_on_circle(double s, double phi, double tol = 1e-8);

// Dimensionless finite-size function of the second cumulant,
//   c_alpha(r) = [4 r / ((2 pi r)^{2/alpha} sin(pi/alpha))]
//                 * [zeta(2/alpha) - Re Li_{2/alpha}(e^{2 i pi r})],
// alpha in (1, 2), r in (0, 1/2]. Throws at alpha = 2 (diffusive branch is
// logarithmic, outside this formula).
double c_alpha_r(double alpha, double r, double tol = 1e-8);

// r -> 0 limit: (4 / (pi alpha)) Gamma(-2/alpha).
double c_alpha_r_limit0(double alpha);

// Coupling prefactors entering C_A^(2) ~ g0 ell^{2/alpha - 1} c_alpha(r).
double g0_superdiffusive(double ell0);               // ell0^{2/3} / 2^{5/3}
double g0_diffusive(double ell0, double theta);      // ell0 / (2 sqrt|cos(theta/2)|)

// Predicted second charge cumulant for a subsystem of size ell = r L.
// Supported on the superdiffusive branch alpha = 3/2 (theta = pi implied).
double second_cumulant(double J, double gamma, double L, double r, double alpha);

// Entropy prediction S = (pi^2/3) C^(2).
double entropy_prediction(double J, double gamma, double L, double r, double alpha);

// Piecewise structure factor near criticality (delta = theta - pi):
//   (2|delta|)^{-1/2} |q ell0|              for q ell0 << |delta|^{3/2}
//   2^{-2/3} 3^{-1/2} |q ell0|^{2/3}        for |delta|^{3/2} << q ell0 << 1
//   2^{-2/3} 3^{-1/2}                        for q ell0 >~ 1  (continuity)
double Cq_piecewise(double J, double gamma, double theta, double q);

// Smooth-min envelope of the same branches (plot overlays).
double Cq_smooth(double J, double gamma, double theta, double q);

struct CouplingResult {
  double g;         // effective coupling (ell0/sqrt(2)) |delta|^{-1/2}
  double ell_star;  // diffusion onset scale ell0 |delta|^{-3/2}
  double ell_loc;   // ell_star exp(4 pi g), unit prefactor convention;
                    // order-of-magnitude estimate only
};

// Infinity markers in every field at delta = 0.
CouplingResult coupling_and_loc_length(double J, double gamma, double theta);

}  // namespace mff::theory
