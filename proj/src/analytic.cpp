#include "dampsim/analytic.hpp"

#include <cmath>
#include <sstream>

#include "dampsim/errors.hpp"

namespace dampsim {

Mat4 DampingMap::matrix() const { return Vec4(e1, e1, e2, e2).asDiagonal(); }

DampingMap damping_map(const TwoModeSystem& system, double t) {
  if (!(t >= 0.0)) {
    std::ostringstream os;
    os << "time must be >= 0 (got " << t << ")";
    throw NegativeTimeError(os.str());
  }
  return {std::exp(-system.mode1.kappa * t), std::exp(-system.mode2.kappa * t), t};
}

// The Heisenberg solutions give x(t) = e x, p(t) = e p and, for the second
// moments, x^2(t) = e^2 x^2 + (1 - e^2) hbar/2m omega (likewise p^2). The
// symmetrized xp moment is a combination of a^2 and a^dag^2, both of which
// decay as e^2 with a vanishing vacuum value. Cross-mode products factorize
// over the two local channels and pick up e1 e2. Written as a congruence this
// is cov(t) = E cov E + (I - E^2) cov_vac; cov_vac is diagonal so the
// inhomogeneous part only touches the variances.
MomentState evolve_state(const MomentState& initial, const TwoModeSystem& system, double t) {
  const DampingMap damping = damping_map(system, t);
  const Mat4 e = damping.matrix();
  const Mat4 vac = vacuum_state(system).cov;

  MomentState out;
  out.mean = e * initial.mean;
  out.cov = e * initial.cov * e + (Mat4::Identity() - e * e) * vac;
  return out;
}

MomentState asymptotic_state(const TwoModeSystem& system) {
  if (!(system.mode1.kappa > 0.0) || !(system.mode2.kappa > 0.0))
    throw UndampedModeError("asymptotic state needs kappa > 0 for both modes");
  return vacuum_state(system);
}

double uncertainty_product(const MomentState& state, Mode mode) {
  const int x = mode == Mode::first ? 0 : 2;
  return std::sqrt(state.cov(x, x) * state.cov(x + 1, x + 1));
}

double cross_covariance(const MomentState& state, Quadrature mode1_obs, Quadrature mode2_obs) {
  const int a = index_of(mode1_obs);
  const int b = index_of(mode2_obs);
  if (a > 1 || b < 2)
    throw ValidationError("cross_covariance expects a mode-1 and a mode-2 quadrature");
  return state.cov(a, b);
}

}  // namespace dampsim
