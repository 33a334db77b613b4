#pragma once

// Physical parameters, Gaussian moment states and linear canonical
// transformations shared by the analytic engine, the Fock oracle and the
// structure analyzer.
//
// Phase-space ordering everywhere is (x1, p1, x2, p2).

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dampsim {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;
using Mat2 = Eigen::Matrix2d;

struct Tolerances {
  double structural = 1e-10;  // LCT constraints, trace, positivity floor
  double symmetry = 1e-12;    // |cov - cov^T|
};

struct PhysicalConstants {
  double hbar = 1.0;
};

struct ModeParams {
  double mass = 1.0;
  double omega = 1.0;
  double kappa = 0.0;
};

enum class Mode { first = 1, second = 2 };

struct TwoModeSystem {
  ModeParams mode1;
  ModeParams mode2;
  PhysicalConstants constants;

  const ModeParams& mode(Mode m) const { return m == Mode::first ? mode1 : mode2; }
  double hbar() const { return constants.hbar; }
};

// Index of a quadrature in the (x1, p1, x2, p2) ordering.
enum class Quadrature : int { x1 = 0, p1 = 1, x2 = 2, p2 = 3 };

constexpr int index_of(Quadrature q) { return static_cast<int>(q); }

// Mean vector and symmetrized covariance <{A,B}>/2 - <A><B>.
struct MomentState {
  Vec4 mean = Vec4::Zero();
  Mat4 cov = Mat4::Identity();
};

// X_A = M.row(0) . x,  xi_B = M.row(1) . x,
// P_A = N.row(0) . p,  pi_B = N.row(1) . p.
// Canonicity requires M N^T = I.
struct Lct {
  Mat2 position = Mat2::Identity();  // rows (alpha1, alpha2), (beta1, beta2)
  Mat2 momentum = Mat2::Identity();  // rows (gamma1, gamma2), (delta1, delta2)
};

struct Violation {
  std::string what;
  double residual = 0.0;
};

// Empty when every checked invariant holds.
using ValidationReport = std::vector<Violation>;

// Throws ValidationError naming the first violated invariant.
void require_valid(const ModeParams& mode, const std::string& label = "mode");
void require_valid(const TwoModeSystem& system);
void require_valid(const PhysicalConstants& constants);

// Block-diagonal form with [x_i, p_i] = i hbar Omega_{x_i p_i}.
Mat4 symplectic_form();

// Smallest eigenvalue of cov + (i hbar / 2) Omega.
double positivity_floor(const Mat4& cov, double hbar);

// Symplectic eigenvalues of cov, ascending.
Eigen::Vector2d symplectic_eigenvalues(const Mat4& cov);

ValidationReport check_moment_state(const MomentState& state, double hbar,
                                    const Tolerances& tol = {});
void require_valid(const MomentState& state, double hbar, const Tolerances& tol = {});

// Vacuum (ground) state of both modes; also the damped fixed point.
MomentState vacuum_state(const TwoModeSystem& system);

// Reports each of the four canonicity sums that misses its target.
ValidationReport validate_lct(const Lct& lct, const Tolerances& tol = {});

// N = (M^T)^{-1}; throws SingularMatrixError for |det M| <= 1e-12.
Lct lct_from_position_block(const Mat2& position);

}  // namespace dampsim
