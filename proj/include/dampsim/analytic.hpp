#pragma once

// Closed-form moment evolution under two independent zero-temperature
// amplitude damping channels (interaction picture, no free rotation).

#include "dampsim/model.hpp"

namespace dampsim {

// Per-mode amplitude decay factors exp(-kappa_i t).
struct DampingMap {
  double e1 = 1.0;
  double e2 = 1.0;
  double t = 0.0;

  // diag(e1, e1, e2, e2)
  Mat4 matrix() const;
};

DampingMap damping_map(const TwoModeSystem& system, double t);

// mean(t) = E mean(0),  cov(t) = E cov(0) E + (I - E^2) cov_vac.
// Throws NegativeTimeError for t < 0. kappa = 0 leaves that mode frozen.
MomentState evolve_state(const MomentState& initial, const TwoModeSystem& system, double t);

// Vacuum of both modes. Throws UndampedModeError unless both kappas are > 0.
MomentState asymptotic_state(const TwoModeSystem& system);

// Delta x Delta p of one mode's diagonal block.
double uncertainty_product(const MomentState& state, Mode mode);

// Covariance between a mode-1 and a mode-2 quadrature.
double cross_covariance(const MomentState& state, Quadrature mode1_obs, Quadrature mode2_obs);

}  // namespace dampsim
