#pragma once

#include <Eigen/Dense>

#include "mff/state.hpp"

namespace mff {

// Unitary hopping propagator exp(i dt H) for the periodic chain
// H_ij = J (delta_{i,j+1} + delta_{i,j-1}), diagonal in momentum space with
// dispersion eps(k_n) = 2 J cos(k_n), k_n = 2 pi n / L. Applied per column as
// forward FFT over the site index, phase multiply, inverse FFT.
//
// Immutable after construction; apply() is safe to call concurrently from
// several trajectory workers.
class Propagator {
 public:
  Propagator(int L, double J, double dt);
  ~Propagator();

  Propagator(const Propagator&) = delete;
  Propagator& operator=(const Propagator&) = delete;

  // Each column of U transformed by exp(i dt H); orthonormality is preserved,
  // no renormalization needed afterwards.
  void apply(GaussianState& state) const;

  // Dense L x L unitary built through the same FFT path (fallback for
  // non-circulant experiments and for oracle cross-checks).
  Eigen::MatrixXcd dense_unitary() const;

  int L() const { return L_; }
  double J() const { return J_; }
  double dt() const { return dt_; }

  // exp(i dt eps(k_n)) with the 1/L inverse-transform normalization folded in.
  const Eigen::VectorXcd& phases() const { return phases_; }

 private:
  struct Plans;  // lazily built fftw plans per batch width; opaque to keep
                 // fftw3.h out of the public headers
  int L_;
  double J_, dt_;
  Eigen::VectorXcd phases_;
  Plans* plans_;
};

}  // namespace mff
