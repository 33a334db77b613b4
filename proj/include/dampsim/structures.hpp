#pragma once

// Alternate A+B decompositions of the two-mode system obtained by linear
// canonical transformations, their asymptotic uncertainty products and
// cross-covariances, and a numerical search for classical-like structures.

#include <cstdint>
#include <vector>

#include "dampsim/model.hpp"

namespace dampsim {

struct UncertaintyProducts {
  double a = 0.0;  // Delta X_A Delta P_A
  double b = 0.0;  // Delta xi_B Delta pi_B
};

struct CrossCovariances {
  double xx = 0.0;  // cov(X_A, xi_B)
  double pp = 0.0;  // cov(P_A, pi_B)
};

struct StructureReport {
  Lct lct;
  double product_a = 0.0;
  double product_b = 0.0;
  double cov_xx = 0.0;
  double cov_pp = 0.0;
  double residual = 0.0;
};

// 4x4 map taking (x1, p1, x2, p2) to (X_A, P_A, xi_B, pi_B).
Mat4 structure_matrix(const Lct& lct);

// mean' = S mean, cov' = S cov S^T in (X_A, P_A, xi_B, pi_B) ordering.
// Throws InvalidLctError when the canonicity constraints fail.
MomentState transform_state(const MomentState& state, const Lct& lct, const Tolerances& tol = {});

// Closed forms at the vacuum asymptote. Throw UndampedModeError unless both
// modes are damped.
UncertaintyProducts asymptotic_products(const Lct& lct, const TwoModeSystem& system);
CrossCovariances asymptotic_cross_covariances(const Lct& lct, const TwoModeSystem& system);

// [(P_A - hbar/2)^2 + (P_B - hbar/2)^2 + C_xx^2 + C_pp^2] / (hbar/2)^2
double classicality_residual(const Lct& lct, const TwoModeSystem& system);

StructureReport evaluate_structure(const Lct& lct, const TwoModeSystem& system);

// X_A = (x1 + x2)/2, xi_B = x1 - x2, P_A = p1 + p2, pi_B = (p1 - p2)/2.
Lct center_of_mass_lct();

// Distance of M from the scaled permutation matrices: rows normalised to unit
// length, then Frobenius distance to the nearest scaled permutation. Lies in
// [0, 1]; 0 exactly for the native 1+2 structure and its relabelings.
double trivial_distance(const Mat2& position);

struct SearchConfig {
  int restarts = 32;
  int max_iterations = 2000;
  double tolerance = 1e-12;
  double exclusion_margin = 1e-3;
  std::uint64_t seed = 0;
};

struct RestartTrace {
  int restart = 0;
  int iterations = 0;
  bool converged = false;
  double residual = 0.0;
  double trivial_distance = 0.0;
  bool excluded = false;
  Mat2 position = Mat2::Identity();
};

struct SearchResult {
  StructureReport best;
  int best_restart = -1;
  std::vector<RestartTrace> trace;
};

// Minimises classicality_residual over nontrivial position blocks with seeded
// random restarts. Throws NoCandidateError if every restart lands within the
// exclusion margin of the trivial family.
SearchResult search_classical_structure(const TwoModeSystem& system, const SearchConfig& config = {});

}  // namespace dampsim
