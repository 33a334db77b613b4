#include "dampsim/model.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

#include "dampsim/errors.hpp"

namespace dampsim {

namespace {

std::string describe(const std::string& field, const char* rule, double value) {
  std::ostringstream os;
  os.precision(17);
  os << field << " must be " << rule << " (got " << value << ")";
  return os.str();
}

}  // namespace

void require_valid(const ModeParams& mode, const std::string& label) {
  if (!(mode.mass > 0.0) || !std::isfinite(mode.mass))
    throw ValidationError(describe(label + ".mass", "> 0", mode.mass));
  if (!(mode.omega > 0.0) || !std::isfinite(mode.omega))
    throw ValidationError(describe(label + ".omega", "> 0", mode.omega));
  if (!(mode.kappa >= 0.0) || !std::isfinite(mode.kappa))
    throw ValidationError(describe(label + ".kappa", ">= 0", mode.kappa));
}

void require_valid(const PhysicalConstants& constants) {
  if (!(constants.hbar > 0.0) || !std::isfinite(constants.hbar))
    throw ValidationError(describe("hbar", "> 0", constants.hbar));
}

void require_valid(const TwoModeSystem& system) {
  require_valid(system.constants);
  require_valid(system.mode1, "mode1");
  require_valid(system.mode2, "mode2");
}

Mat4 symplectic_form() {
  Mat4 omega = Mat4::Zero();
  omega(0, 1) = 1.0;
  omega(1, 0) = -1.0;
  omega(2, 3) = 1.0;
  omega(3, 2) = -1.0;
  return omega;
}

double positivity_floor(const Mat4& cov, double hbar) {
  using Mat4c = Eigen::Matrix4cd;
  const std::complex<double> i_half_hbar{0.0, 0.5 * hbar};
  Mat4c h = cov.cast<std::complex<double>>() + i_half_hbar * symplectic_form().cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Mat4c> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

Eigen::Vector2d symplectic_eigenvalues(const Mat4& cov) {
  // i Omega cov has spectrum {+nu_k, -nu_k}.
  Eigen::EigenSolver<Mat4> solver(symplectic_form() * cov, false);
  Eigen::Vector4d mags = solver.eigenvalues().cwiseAbs();
  std::sort(mags.data(), mags.data() + 4);
  return {0.5 * (mags[0] + mags[1]), 0.5 * (mags[2] + mags[3])};
}

ValidationReport check_moment_state(const MomentState& state, double hbar, const Tolerances& tol) {
  ValidationReport report;
  if (!state.mean.allFinite() || !state.cov.allFinite()) {
    report.push_back({"moments must be finite", std::numeric_limits<double>::infinity()});
    return report;
  }
  const double asym = (state.cov - state.cov.transpose()).cwiseAbs().maxCoeff();
  if (asym > tol.symmetry) report.push_back({"cov must be symmetric", asym});
  for (int k = 0; k < 4; ++k) {
    if (!(state.cov(k, k) > 0.0))
      report.push_back({"cov diagonal entry " + std::to_string(k) + " must be > 0", state.cov(k, k)});
  }
  const Mat4 sym = 0.5 * (state.cov + state.cov.transpose());
  const double floor = positivity_floor(sym, hbar);
  if (floor < -tol.structural)
    report.push_back({"cov + (i hbar/2) Omega must be positive semidefinite", floor});
  return report;
}

void require_valid(const MomentState& state, double hbar, const Tolerances& tol) {
  const auto report = check_moment_state(state, hbar, tol);
  if (!report.empty()) {
    std::ostringstream os;
    os.precision(17);
    os << "invalid moment state: " << report.front().what << " (residual " << report.front().residual << ")";
    throw ValidationError(os.str());
  }
}

MomentState vacuum_state(const TwoModeSystem& system) {
  const double hbar = system.hbar();
  const auto& m1 = system.mode1;
  const auto& m2 = system.mode2;
  MomentState state;
  state.mean.setZero();
  state.cov = Vec4(hbar / (2.0 * m1.mass * m1.omega), m1.mass * hbar * m1.omega / 2.0,
                   hbar / (2.0 * m2.mass * m2.omega), m2.mass * hbar * m2.omega / 2.0)
                  .asDiagonal();
  return state;
}

ValidationReport validate_lct(const Lct& lct, const Tolerances& tol) {
  static constexpr const char* kNames[2][2] = {
      {"sum alpha_i gamma_i = 1", "sum alpha_i delta_i = 0"},
      {"sum beta_i gamma_i = 0", "sum beta_i delta_i = 1"},
  };
  ValidationReport report;
  const Mat2 gram = lct.position * lct.momentum.transpose();
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      const double target = r == c ? 1.0 : 0.0;
      const double residual = std::abs(gram(r, c) - target);
      if (!(residual <= tol.structural)) report.push_back({kNames[r][c], residual});
    }
  }
  return report;
}

Lct lct_from_position_block(const Mat2& position) {
  const double det = position.determinant();
  if (!(std::abs(det) > 1e-12)) {
    std::ostringstream os;
    os << "position block is singular (det = " << det << ")";
    throw SingularMatrixError(os.str());
  }
  return {position, position.transpose().inverse()};
}

}  // namespace dampsim
