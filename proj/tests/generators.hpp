#pragma once

// Seeded generators for property-style tests.

#include <cmath>
#include <random>

#include "dampsim/fock.hpp"
#include "dampsim/model.hpp"

namespace dampsim::testing {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline TwoModeSystem random_system(std::mt19937_64& rng, double kappa_lo = 0.1,
                                   double kappa_hi = 2.0, double lo = 0.5, double hi = 3.0) {
  TwoModeSystem s;
  s.mode1 = {uniform(rng, lo, hi), uniform(rng, lo, hi), uniform(rng, kappa_lo, kappa_hi)};
  s.mode2 = {uniform(rng, lo, hi), uniform(rng, lo, hi), uniform(rng, kappa_lo, kappa_hi)};
  return s;
}

// Position block with singular values kept away from zero.
inline Mat2 random_position_block(std::mt19937_64& rng) {
  for (;;) {
    Mat2 m;
    m << uniform(rng, -2, 2), uniform(rng, -2, 2), uniform(rng, -2, 2), uniform(rng, -2, 2);
    Eigen::JacobiSVD<Mat2> svd(m);
    const auto sv = svd.singularValues();
    if (sv[1] > 0.1 && sv[0] / sv[1] < 20.0) return m;
  }
}

// Symplectic 4x4 built from local rotations, local squeezers and a beam
// splitter that mixes x1 with x2 and p1 with p2 by the same rotation.
inline Mat4 random_symplectic(std::mt19937_64& rng) {
  auto local = [&](double theta, double r) {
    Mat2 rot;
    rot << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
    Mat2 sq = Eigen::Vector2d(std::exp(r), std::exp(-r)).asDiagonal();
    return Mat2(rot * sq);
  };
  Mat4 s = Mat4::Zero();
  s.block<2, 2>(0, 0) = local(uniform(rng, 0, 6.3), uniform(rng, -0.8, 0.8));
  s.block<2, 2>(2, 2) = local(uniform(rng, 0, 6.3), uniform(rng, -0.8, 0.8));
  const double phi = uniform(rng, 0, 6.3);
  Mat4 bs = Mat4::Zero();
  const double c = std::cos(phi), sn = std::sin(phi);
  bs(0, 0) = c, bs(0, 2) = sn, bs(2, 0) = -sn, bs(2, 2) = c;
  bs(1, 1) = c, bs(1, 3) = sn, bs(3, 1) = -sn, bs(3, 3) = c;
  Mat4 s2 = Mat4::Zero();
  s2.block<2, 2>(0, 0) = local(uniform(rng, 0, 6.3), uniform(rng, -0.5, 0.5));
  s2.block<2, 2>(2, 2) = local(uniform(rng, 0, 6.3), uniform(rng, -0.5, 0.5));
  return s2 * bs * s;
}

// Valid Gaussian moments: scaled vacuum pushed through a random symplectic
// map, plus classical noise and a random mean.
inline MomentState random_moment_state(std::mt19937_64& rng, const TwoModeSystem& system) {
  const double hbar = system.hbar();
  Mat4 scale = Mat4::Zero();
  const auto& m1 = system.mode1;
  const auto& m2 = system.mode2;
  scale.diagonal() << 1.0 / std::sqrt(m1.mass * m1.omega), std::sqrt(m1.mass * m1.omega),
      1.0 / std::sqrt(m2.mass * m2.omega), std::sqrt(m2.mass * m2.omega);
  const Mat4 s = scale * random_symplectic(rng);
  Mat4 g;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) g(r, c) = uniform(rng, -0.3, 0.3);
  MomentState state;
  state.cov = 0.5 * hbar * s * s.transpose() + g * g.transpose();
  state.cov = 0.5 * (state.cov + state.cov.transpose());
  for (int k = 0; k < 4; ++k) state.mean[k] = uniform(rng, -2, 2);
  return state;
}

// Random mixed two-mode density of cutoff dim.
inline OperatorMatrix random_density(std::mt19937_64& rng, int dim, int modes = 2) {
  const Eigen::Index n = modes == 1 ? dim : dim * dim;
  MatrixXc g(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) g(r, c) = Complex(uniform(rng, -1, 1), uniform(rng, -1, 1));
  MatrixXc rho = g * g.adjoint();
  rho /= rho.trace();
  rho = 0.5 * (rho + rho.adjoint());
  return {dim, modes, rho};
}

}  // namespace dampsim::testing
