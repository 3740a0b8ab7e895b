#pragma once

#include <cmath>

namespace mff {

// Physical and numerical parameters of one monitored chain.
//
// Bonds are indexed 0..L-1; bond b couples sites b and (b+1) mod L.
// The even measurement layer acts on even b, the odd layer on odd b.
struct ModelParams {
  int L = 0;                     // site count, even
  int N = 0;                     // particle count; 0 selects half filling L/2
  double J = 1.0;                // hopping amplitude
  double gamma = 1.0;            // measurement strength
  double theta = 0.0;            // measurement misalignment, radians in [0, pi]
  double dt = 0.0;               // time step; 0 selects default_dt()
  bool measurement_only = false; // skip the hopping factor (implies J = 0)

  // dt = 0.05 below gamma = 1; 0.02 at gamma >= 1 and for measurement-only runs.
  static double default_dt(double gamma, bool measurement_only) {
    return (gamma >= 1.0 || measurement_only) ? 0.02 : 0.05;
  }

  // Fill defaulted fields; measurement_only forces J = 0.
  void finalize() {
    if (N == 0) N = L / 2;
    if (dt == 0.0) dt = default_dt(gamma, measurement_only);
    if (measurement_only) J = 0.0;
  }

  void validate() const;  // throws parameter_error
};

}  // namespace mff
