#include "mff/propagator.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>

#include "mff/errors.hpp"

namespace mff {

namespace {
// The FFTW planner is not thread safe; executing a plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

// Plans are keyed on the batch width N (site index strided by N in the
// row-major mode matrix) and built lazily on first use.
struct Propagator::Plans {
  std::mutex mutex;
  struct Entry {
    int n = -1;
    fftw_plan fwd = nullptr, bwd = nullptr;
  };
  std::vector<Entry> entries;

  ~Plans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    for (auto& e : entries) {
      if (e.fwd) fftw_destroy_plan(e.fwd);
      if (e.bwd) fftw_destroy_plan(e.bwd);
    }
  }

  Entry get(int L, int N) {
    std::lock_guard<std::mutex> lock(mutex);
    for (const auto& e : entries)
      if (e.n == N) return e;
    std::lock_guard<std::mutex> plock(planner_mutex());
    std::vector<std::complex<double>> scratch(static_cast<size_t>(L) * N);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    const int n[1] = {L};
    Entry e;
    e.n = N;
    e.fwd = fftw_plan_many_dft(1, n, N, buf, nullptr, N, 1, buf, nullptr, N, 1,
                               FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    e.bwd = fftw_plan_many_dft(1, n, N, buf, nullptr, N, 1, buf, nullptr, N, 1,
                               FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    entries.push_back(e);
    return e;
  }
};

Propagator::Propagator(int L, double J, double dt)
    : L_(L), J_(J), dt_(dt), plans_(new Plans) {
  if (L < 2) throw parameter_error("Propagator requires L >= 2");
  phases_.resize(L);
  for (int n = 0; n < L; ++n) {
    const double eps = 2.0 * J * std::cos(2.0 * M_PI * n / L);
    phases_(n) = std::polar(1.0 / L, dt * eps);
  }
}

Propagator::~Propagator() { delete plans_; }

void Propagator::apply(GaussianState& state) const {
  if (state.L() != L_)
    throw parameter_error("propagator/state dimension mismatch");
  if (J_ == 0.0 || dt_ == 0.0) return;
  const int N = state.N();
  const auto plans = plans_->get(L_, N);
  auto* data = reinterpret_cast<fftw_complex*>(state.U.data());
  fftw_execute_dft(plans.fwd, data, data);
  state.U.array().colwise() *= phases_.array();
  fftw_execute_dft(plans.bwd, data, data);
}

Eigen::MatrixXcd Propagator::dense_unitary() const {
  GaussianState id;
  id.U = ModeMatrix::Identity(L_, L_);
  if (J_ != 0.0 && dt_ != 0.0) apply(id);
  return id.U;
}

}  // namespace mff
