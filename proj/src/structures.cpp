#include "dampsim/structures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "dampsim/errors.hpp"
#include "dampsim/optimize.hpp"

namespace dampsim {

namespace {

struct VacuumVariances {
  double x1, p1, x2, p2;
};

VacuumVariances asymptotic_variances(const TwoModeSystem& system) {
  if (!(system.mode1.kappa > 0.0) || !(system.mode2.kappa > 0.0))
    throw UndampedModeError("asymptotic structure quantities need kappa > 0 for both modes");
  const double hbar = system.hbar();
  const auto& m1 = system.mode1;
  const auto& m2 = system.mode2;
  return {hbar / (2.0 * m1.mass * m1.omega), m1.mass * hbar * m1.omega / 2.0,
          hbar / (2.0 * m2.mass * m2.omega), m2.mass * hbar * m2.omega / 2.0};
}

// Uniform double in [-1, 1) from the top 53 bits; independent of the
// standard library's distribution implementations.
double symmetric_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0;
}

Mat2 normalise_rows(const Mat2& m) {
  Mat2 out = m;
  for (int r = 0; r < 2; ++r) {
    const double norm = out.row(r).norm();
    if (norm > 0.0) out.row(r) /= norm;
    // fix the sign gauge: largest-magnitude entry positive
    const int lead = std::abs(out(r, 0)) >= std::abs(out(r, 1)) ? 0 : 1;
    if (out(r, lead) < 0.0) out.row(r) *= -1.0;
  }
  return out;
}

Mat2 to_matrix(const Eigen::VectorXd& v) {
  Mat2 m;
  m << v[0], v[1], v[2], v[3];
  return m;
}

constexpr double kPenalty = 1e6;
constexpr double kMinDeterminant = 1e-8;

}  // namespace

Mat4 structure_matrix(const Lct& lct) {
  const Mat2& m = lct.position;
  const Mat2& n = lct.momentum;
  Mat4 s = Mat4::Zero();
  s(0, 0) = m(0, 0);
  s(0, 2) = m(0, 1);
  s(1, 1) = n(0, 0);
  s(1, 3) = n(0, 1);
  s(2, 0) = m(1, 0);
  s(2, 2) = m(1, 1);
  s(3, 1) = n(1, 0);
  s(3, 3) = n(1, 1);
  return s;
}

MomentState transform_state(const MomentState& state, const Lct& lct, const Tolerances& tol) {
  const auto report = validate_lct(lct, tol);
  if (!report.empty()) {
    std::ostringstream os;
    os << "LCT violates " << report.front().what << " (residual " << report.front().residual << ")";
    throw InvalidLctError(os.str());
  }
  const Mat4 s = structure_matrix(lct);
  return {s * state.mean, s * state.cov * s.transpose()};
}

UncertaintyProducts asymptotic_products(const Lct& lct, const TwoModeSystem& system) {
  const auto v = asymptotic_variances(system);
  const Mat2& m = lct.position;
  const Mat2& n = lct.momentum;
  auto product = [&](int row) {
    const double dx2 = m(row, 0) * m(row, 0) * v.x1 + m(row, 1) * m(row, 1) * v.x2;
    const double dp2 = n(row, 0) * n(row, 0) * v.p1 + n(row, 1) * n(row, 1) * v.p2;
    return std::sqrt(dx2 * dp2);
  };
  return {product(0), product(1)};
}

CrossCovariances asymptotic_cross_covariances(const Lct& lct, const TwoModeSystem& system) {
  const auto v = asymptotic_variances(system);
  const Mat2& m = lct.position;
  const Mat2& n = lct.momentum;
  return {m(0, 0) * m(1, 0) * v.x1 + m(0, 1) * m(1, 1) * v.x2,
          n(0, 0) * n(1, 0) * v.p1 + n(0, 1) * n(1, 1) * v.p2};
}

StructureReport evaluate_structure(const Lct& lct, const TwoModeSystem& system) {
  const auto products = asymptotic_products(lct, system);
  const auto covs = asymptotic_cross_covariances(lct, system);
  const double half = 0.5 * system.hbar();
  const double da = products.a - half;
  const double db = products.b - half;
  const double residual =
      (da * da + db * db + covs.xx * covs.xx + covs.pp * covs.pp) / (half * half);
  return {lct, products.a, products.b, covs.xx, covs.pp, residual};
}

double classicality_residual(const Lct& lct, const TwoModeSystem& system) {
  return evaluate_structure(lct, system).residual;
}

Lct center_of_mass_lct() {
  Lct lct;
  lct.position << 0.5, 0.5, 1.0, -1.0;
  lct.momentum << 1.0, 1.0, 0.5, -0.5;
  return lct;
}

double trivial_distance(const Mat2& position) {
  Mat2 m = position;
  for (int r = 0; r < 2; ++r) {
    const double norm = m.row(r).norm();
    if (norm == 0.0) return 1.0;
    m.row(r) /= norm;
  }
  const double keep_diagonal = m(0, 1) * m(0, 1) + m(1, 0) * m(1, 0);
  const double keep_anti = m(0, 0) * m(0, 0) + m(1, 1) * m(1, 1);
  return std::sqrt(std::min(keep_diagonal, keep_anti));
}

SearchResult search_classical_structure(const TwoModeSystem& system, const SearchConfig& config) {
  require_valid(system);
  asymptotic_variances(system);  // rejects undamped modes up front
  if (config.restarts < 1) throw ValidationError("search needs at least one restart");

  auto objective = [&system](const Eigen::VectorXd& v) {
    const Mat2 m = normalise_rows(to_matrix(v));
    if (!m.allFinite() || std::abs(m.determinant()) < kMinDeterminant) return kPenalty;
    return classicality_residual(lct_from_position_block(m), system);
  };

  SimplexOptions options;
  options.max_iterations = config.max_iterations;
  options.f_tolerance = config.tolerance;
  options.x_tolerance = std::sqrt(config.tolerance) * 1e-2;

  std::mt19937_64 rng(config.seed);
  SearchResult result;
  result.trace.reserve(config.restarts);
  const Mat2 identity = Mat2::Identity();
  double best_norm = std::numeric_limits<double>::infinity();

  for (int restart = 0; restart < config.restarts; ++restart) {
    Eigen::VectorXd start(4);
    // Draw well-conditioned starts away from the trivial family.
    do {
      for (int k = 0; k < 4; ++k) start[k] = symmetric_unit(rng);
    } while (std::abs(normalise_rows(to_matrix(start)).determinant()) < 0.1 ||
             trivial_distance(to_matrix(start)) < 0.05);

    const SimplexResult found = nelder_mead(objective, start, options);
    RestartTrace entry;
    entry.restart = restart;
    entry.iterations = found.iterations;
    entry.converged = found.converged;
    entry.position = normalise_rows(to_matrix(found.x));
    entry.residual = found.value;
    entry.trivial_distance = trivial_distance(entry.position);
    entry.excluded = entry.trivial_distance < config.exclusion_margin;
    result.trace.push_back(entry);
    if (entry.excluded || entry.residual >= kPenalty) continue;

    const double norm = (entry.position - identity).norm();
    bool better = false;
    if (result.best_restart < 0) {
      better = true;
    } else {
      const double incumbent = result.best.residual;
      const bool tied = std::abs(entry.residual - incumbent) <= config.tolerance;
      better = tied ? norm < best_norm : entry.residual < incumbent;
    }
    if (better) {
      result.best = evaluate_structure(lct_from_position_block(entry.position), system);
      result.best_restart = restart;
      best_norm = norm;
    }
  }

  if (result.best_restart < 0)
    throw NoCandidateError("every restart converged to the excluded trivial structure family");
  return result;
}

}  // namespace dampsim
