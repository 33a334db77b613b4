#include "dampsim/fock.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "dampsim/errors.hpp"

namespace dampsim {

namespace {

Eigen::Index full_size(int dim, int mode_count) {
  return mode_count == 1 ? dim : static_cast<Eigen::Index>(dim) * dim;
}

void require_same_shape(const OperatorMatrix& a, const OperatorMatrix& b, const char* what) {
  if (a.dim() != b.dim() || a.mode_count() != b.mode_count()) {
    std::ostringstream os;
    os << what << ": operands have shapes (dim " << a.dim() << ", modes " << a.mode_count()
       << ") and (dim " << b.dim() << ", modes " << b.mode_count() << ")";
    throw DimensionMismatchError(os.str());
  }
}

void require_single_mode(const OperatorMatrix& a, int dim, const char* what) {
  if (a.mode_count() != 1 || a.dim() != dim) {
    std::ostringstream os;
    os << what << ": expected a single-mode operator of dim " << dim << ", got dim " << a.dim()
       << " with " << a.mode_count() << " modes";
    throw DimensionMismatchError(os.str());
  }
}

void require_two_mode(const OperatorMatrix& a, int dim, const char* what) {
  if (a.mode_count() != 2 || a.dim() != dim) {
    std::ostringstream os;
    os << what << ": expected a two-mode operator of dim " << dim << ", got dim " << a.dim()
       << " with " << a.mode_count() << " modes";
    throw DimensionMismatchError(os.str());
  }
}

struct Entry {
  Eigen::Index row;
  Eigen::Index col;
  Complex value;
};

std::vector<Entry> nonzeros(const MatrixXc& m) {
  std::vector<Entry> out;
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      if (m(r, c) != Complex{0.0, 0.0}) out.push_back({r, c, m(r, c)});
  return out;
}

// sum_n (K_n (x) I) rho (K_n (x) I)^dag, block-wise over the nonzeros of each
// K_n. Amplitude-damping Kraus operators are single bands, so this is cheap.
MatrixXc apply_channel_on_mode1(const MatrixXc& rho, const KrausSet& ks) {
  const Eigen::Index d = ks.dim;
  MatrixXc out = MatrixXc::Zero(rho.rows(), rho.cols());
  for (const auto& k : ks.ops) {
    const auto nz = nonzeros(k.entries());
    for (const auto& left : nz) {
      for (const auto& right : nz) {
        out.block(left.row * d, right.row * d, d, d) +=
            (left.value * std::conj(right.value)) * rho.block(left.col * d, right.col * d, d, d);
      }
    }
  }
  return out;
}

// |n1 n2> -> |n2 n1>
MatrixXc swap_modes(const MatrixXc& rho, Eigen::Index d) {
  MatrixXc out(rho.rows(), rho.cols());
  for (Eigen::Index j1 = 0; j1 < d; ++j1)
    for (Eigen::Index j2 = 0; j2 < d; ++j2)
      for (Eigen::Index i1 = 0; i1 < d; ++i1)
        for (Eigen::Index i2 = 0; i2 < d; ++i2)
          out(i2 * d + i1, j2 * d + j1) = rho(i1 * d + i2, j1 * d + j2);
  return out;
}

MatrixXc diagonal_exponential(int dim, double rate) {
  Eigen::VectorXcd diag(dim);
  for (int n = 0; n < dim; ++n) diag[n] = std::exp(-rate * n);
  return diag.asDiagonal();
}

}  // namespace

OperatorMatrix::OperatorMatrix(int dim, int mode_count, MatrixXc entries)
    : dim_(dim), mode_count_(mode_count), entries_(std::move(entries)) {
  if (dim < 2) throw ValidationError("Fock cutoff must be >= 2 (got " + std::to_string(dim) + ")");
  if (mode_count != 1 && mode_count != 2)
    throw ValidationError("mode_count must be 1 or 2 (got " + std::to_string(mode_count) + ")");
  const Eigen::Index n = full_size(dim, mode_count);
  if (entries_.rows() != n || entries_.cols() != n) {
    std::ostringstream os;
    os << "operator shape " << entries_.rows() << "x" << entries_.cols() << " does not match dim "
       << dim << "^" << mode_count;
    throw DimensionMismatchError(os.str());
  }
}

OperatorMatrix OperatorMatrix::zero(int dim, int mode_count) {
  const Eigen::Index n = full_size(dim, mode_count);
  return {dim, mode_count, MatrixXc::Zero(n, n)};
}

OperatorMatrix OperatorMatrix::identity(int dim, int mode_count) {
  const Eigen::Index n = full_size(dim, mode_count);
  return {dim, mode_count, MatrixXc::Identity(n, n)};
}

OperatorMatrix OperatorMatrix::adjoint() const { return {dim_, mode_count_, entries_.adjoint()}; }

OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_shape(a, b, "operator product");
  return {a.dim_, a.mode_count_, a.entries_ * b.entries_};
}

OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_shape(a, b, "operator sum");
  return {a.dim_, a.mode_count_, a.entries_ + b.entries_};
}

OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_shape(a, b, "operator difference");
  return {a.dim_, a.mode_count_, a.entries_ - b.entries_};
}

OperatorMatrix operator*(Complex s, const OperatorMatrix& a) {
  return {a.dim_, a.mode_count_, s * a.entries_};
}

OperatorMatrix kron(const OperatorMatrix& a, const OperatorMatrix& b) {
  if (a.mode_count() != 1 || b.mode_count() != 1 || a.dim() != b.dim())
    throw DimensionMismatchError("kron expects two single-mode operators of equal cutoff");
  const Eigen::Index d = a.dim();
  MatrixXc out(d * d, d * d);
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < d; ++c) out.block(r * d, c * d, d, d) = a(r, c) * b.entries();
  return {a.dim(), 2, std::move(out)};
}

double max_abs(const OperatorMatrix& a) { return a.entries().cwiseAbs().maxCoeff(); }

ModeOperators build_mode_operators(int dim, const ModeParams& params,
                                   const PhysicalConstants& constants) {
  if (dim < 2) throw ValidationError("Fock cutoff must be >= 2 (got " + std::to_string(dim) + ")");
  require_valid(params);
  require_valid(constants);

  MatrixXc a = MatrixXc::Zero(dim, dim);
  MatrixXc number = MatrixXc::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  for (int n = 0; n < dim; ++n) number(n, n) = static_cast<double>(n);
  const MatrixXc a_dag = a.adjoint();

  const double hbar = constants.hbar;
  const double x_scale = std::sqrt(hbar / (2.0 * params.mass * params.omega));
  const double p_scale = std::sqrt(params.mass * hbar * params.omega / 2.0);
  const Complex i{0.0, 1.0};

  return {
      {dim, 1, a},
      {dim, 1, a_dag},
      {dim, 1, number},
      {dim, 1, x_scale * (a + a_dag)},
      {dim, 1, (i * p_scale) * (a_dag - a)},
  };
}

KrausSet kraus_operators(double kappa, double t, int dim) {
  if (!(t >= 0.0)) throw NegativeTimeError("time must be >= 0");
  if (!(kappa >= 0.0)) throw ValidationError("kappa must be >= 0");
  if (dim < 2) throw ValidationError("Fock cutoff must be >= 2 (got " + std::to_string(dim) + ")");

  const double s = kappa * t;
  const double gamma = -std::expm1(-2.0 * s);  // 1 - e^{-2 kappa t}
  const MatrixXc decay = diagonal_exponential(dim, s);

  MatrixXc lower = MatrixXc::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) lower(n - 1, n) = std::sqrt(static_cast<double>(n));

  KrausSet ks{kappa, t, dim, {}};
  ks.ops.reserve(dim);
  MatrixXc a_pow = MatrixXc::Identity(dim, dim);
  double coeff = 1.0;  // sqrt(gamma^n / n!)
  for (int n = 0; n < dim; ++n) {
    if (n > 0) {
      a_pow = a_pow * lower;
      coeff *= std::sqrt(gamma / n);
    }
    ks.ops.emplace_back(dim, 1, coeff * (decay * a_pow));
  }
  return ks;
}

double completeness_defect(const KrausSet& ks) {
  MatrixXc sum = MatrixXc::Zero(ks.dim, ks.dim);
  for (const auto& k : ks.ops) sum.noalias() += k.entries().adjoint() * k.entries();
  return (MatrixXc::Identity(ks.dim, ks.dim) - sum).cwiseAbs().maxCoeff();
}

double min_eigenvalue(const OperatorMatrix& rho) {
  const MatrixXc h = 0.5 * (rho.entries() + rho.entries().adjoint());
  Eigen::SelfAdjointEigenSolver<MatrixXc> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

void require_density(const OperatorMatrix& rho, const Tolerances& tol) {
  const double herm = (rho.entries() - rho.entries().adjoint()).cwiseAbs().maxCoeff();
  if (herm > tol.structural) {
    std::ostringstream os;
    os << "density matrix is not Hermitian (max |rho - rho^dag| = " << herm << ")";
    throw InvalidDensityError(os.str());
  }
  const Complex tr = rho.trace();
  if (std::abs(tr - Complex{1.0, 0.0}) > tol.structural) {
    std::ostringstream os;
    os.precision(17);
    os << "density matrix trace must be 1 (got " << tr.real() << ")";
    throw InvalidDensityError(os.str());
  }
  // Cholesky of rho + tol I succeeds iff the spectrum sits above -tol.
  const Eigen::Index n = rho.size();
  const MatrixXc shifted = 0.5 * (rho.entries() + rho.entries().adjoint()) +
                           tol.structural * MatrixXc::Identity(n, n);
  Eigen::LLT<MatrixXc> llt(shifted);
  if (llt.info() != Eigen::Success) {
    std::ostringstream os;
    os << "density matrix is not positive semidefinite (min eigenvalue " << min_eigenvalue(rho)
       << ")";
    throw InvalidDensityError(os.str());
  }
}

OperatorMatrix evolve_density(const OperatorMatrix& rho0, const KrausSet& ks) {
  require_single_mode(rho0, ks.dim, "evolve_density");
  require_density(rho0);
  MatrixXc out = MatrixXc::Zero(ks.dim, ks.dim);
  for (const auto& k : ks.ops) out.noalias() += k.entries() * rho0.entries() * k.entries().adjoint();
  return {ks.dim, 1, std::move(out)};
}

// The two local channels commute, so the double Kraus sum equals applying the
// mode-1 channel and then the mode-2 channel.
OperatorMatrix evolve_density(const OperatorMatrix& rho0, const KrausSet& ks1,
                              const KrausSet& ks2) {
  if (ks1.dim != ks2.dim) throw DimensionMismatchError("Kraus sets have different cutoffs");
  require_two_mode(rho0, ks1.dim, "evolve_density");
  require_density(rho0);
  const Eigen::Index d = ks1.dim;
  MatrixXc rho = apply_channel_on_mode1(rho0.entries(), ks1);
  rho = swap_modes(apply_channel_on_mode1(swap_modes(rho, d), ks2), d);
  return {ks1.dim, 2, std::move(rho)};
}

OperatorMatrix heisenberg_evolve(const OperatorMatrix& observable, const KrausSet& ks) {
  require_single_mode(observable, ks.dim, "heisenberg_evolve");
  MatrixXc out = MatrixXc::Zero(ks.dim, ks.dim);
  for (const auto& k : ks.ops)
    out.noalias() += k.entries().adjoint() * observable.entries() * k.entries();
  return {ks.dim, 1, std::move(out)};
}

Complex product_expectation(const OperatorMatrix& a1, const OperatorMatrix& a2,
                            const OperatorMatrix& rho) {
  require_single_mode(a1, rho.dim(), "product_expectation");
  require_single_mode(a2, rho.dim(), "product_expectation");
  require_two_mode(rho, rho.dim(), "product_expectation");
  const Eigen::Index d = rho.dim();
  // sum_{i1 j1} A1[i1, j1] tr(A2 rho_{(j1, .), (i1, .)})
  Complex total{0.0, 0.0};
  for (Eigen::Index i1 = 0; i1 < d; ++i1) {
    for (Eigen::Index j1 = 0; j1 < d; ++j1) {
      const Complex w = a1(i1, j1);
      if (w == Complex{0.0, 0.0}) continue;
      const auto block = rho.entries().block(j1 * d, i1 * d, d, d);
      total += w * a2.entries().cwiseProduct(block.transpose()).sum();
    }
  }
  return total;
}

OperatorMatrix reduce_to_mode1(const OperatorMatrix& rho) {
  require_two_mode(rho, rho.dim(), "reduce_to_mode1");
  const Eigen::Index d = rho.dim();
  MatrixXc out(d, d);
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < d; ++c) out(r, c) = rho.entries().block(r * d, c * d, d, d).trace();
  return {rho.dim(), 1, std::move(out)};
}

OperatorMatrix reduce_to_mode2(const OperatorMatrix& rho) {
  require_two_mode(rho, rho.dim(), "reduce_to_mode2");
  const Eigen::Index d = rho.dim();
  MatrixXc out = MatrixXc::Zero(d, d);
  for (Eigen::Index k = 0; k < d; ++k) out += rho.entries().block(k * d, k * d, d, d);
  return {rho.dim(), 1, std::move(out)};
}

Complex heisenberg_moment(const OperatorMatrix& a1, const std::optional<OperatorMatrix>& a2,
                          const KrausSet& ks1, const KrausSet& ks2, const OperatorMatrix& rho0) {
  if (ks1.dim != ks2.dim) throw DimensionMismatchError("Kraus sets have different cutoffs");
  require_two_mode(rho0, ks1.dim, "heisenberg_moment");
  const OperatorMatrix a1_t = heisenberg_evolve(a1, ks1);
  if (!a2) return (a1_t.entries() * reduce_to_mode1(rho0).entries()).trace();
  const OperatorMatrix a2_t = heisenberg_evolve(*a2, ks2);
  return product_expectation(a1_t, a2_t, rho0);
}

double bh_identity_residual(double kappa, double t, int dim) {
  if (dim < 2) throw ValidationError("Fock cutoff must be >= 2 (got " + std::to_string(dim) + ")");
  const double s = kappa * t;
  const MatrixXc e1 = diagonal_exponential(dim, s);
  const MatrixXc e2 = diagonal_exponential(dim, 2.0 * s);
  MatrixXc a = MatrixXc::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  const MatrixXc a_dag = a.adjoint();
  const double factor = std::exp(-s);

  // Both sides carry e^{-s(2n-1)} sqrt(n) on the lowering band.
  const double lowering = (e1 * a * e1 - factor * (e2 * a)).cwiseAbs().maxCoeff();
  const double raising = (e1 * a_dag * e1 - factor * (a_dag * e2)).cwiseAbs().maxCoeff();
  return std::max(lowering, raising);
}

OperatorMatrix coherent_density(Complex alpha, int dim) {
  if (dim < 2) throw ValidationError("Fock cutoff must be >= 2 (got " + std::to_string(dim) + ")");
  if (std::norm(alpha) > dim / 4.0) {
    std::ostringstream os;
    os << "|alpha|^2 = " << std::norm(alpha) << " exceeds dim/4 = " << dim / 4.0
       << "; raise the Fock cutoff";
    throw TailMassError(os.str());
  }
  Eigen::VectorXcd amp(dim);
  amp[0] = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < dim; ++n) amp[n] = amp[n - 1] * alpha / std::sqrt(static_cast<double>(n));
  amp /= amp.norm();
  return {dim, 1, amp * amp.adjoint()};
}

OperatorMatrix fock_density(int level, int dim) {
  if (level < 0 || level >= dim)
    throw ValidationError("Fock level " + std::to_string(level) + " outside cutoff " +
                          std::to_string(dim));
  OperatorMatrix rho = OperatorMatrix::zero(dim);
  MatrixXc m = rho.entries();
  m(level, level) = 1.0;
  return {dim, 1, std::move(m)};
}

double top_level_mass(const OperatorMatrix& rho, int levels) {
  const int d = rho.dim();
  const int first = std::max(0, d - levels);
  double mass = 0.0;
  if (rho.mode_count() == 1) {
    for (int n = first; n < d; ++n) mass += rho(n, n).real();
    return mass;
  }
  for (int n1 = 0; n1 < d; ++n1)
    for (int n2 = 0; n2 < d; ++n2)
      if (n1 >= first || n2 >= first) mass += rho(n1 * d + n2, n1 * d + n2).real();
  return mass;
}

FockOracle::FockOracle(const TwoModeSystem& system, int dim)
    : system_(system),
      dim_(dim),
      ops1_(build_mode_operators(dim, system.mode1, system.constants)),
      ops2_(build_mode_operators(dim, system.mode2, system.constants)) {}

MomentState FockOracle::moments(const OperatorMatrix& rho0, double t) const {
  require_two_mode(rho0, dim_, "FockOracle::moments");
  const KrausSet ks1 = kraus_operators(system_.mode1.kappa, t, dim_);
  const KrausSet ks2 = kraus_operators(system_.mode2.kappa, t, dim_);

  struct Evolved {
    OperatorMatrix x, p, xx, pp, xp;
  };
  auto evolve_mode = [](const ModeOperators& ops, const KrausSet& ks) {
    const OperatorMatrix sym = Complex{0.5, 0.0} * (ops.x * ops.p + ops.p * ops.x);
    return Evolved{heisenberg_evolve(ops.x, ks), heisenberg_evolve(ops.p, ks),
                   heisenberg_evolve(ops.x * ops.x, ks), heisenberg_evolve(ops.p * ops.p, ks),
                   heisenberg_evolve(sym, ks)};
  };
  const Evolved m1 = evolve_mode(ops1_, ks1);
  const Evolved m2 = evolve_mode(ops2_, ks2);
  const MatrixXc rho1 = reduce_to_mode1(rho0).entries();
  const MatrixXc rho2 = reduce_to_mode2(rho0).entries();
  auto local = [](const OperatorMatrix& op, const MatrixXc& rho) {
    return (op.entries() * rho).trace().real();
  };

  MomentState s;
  s.mean << local(m1.x, rho1), local(m1.p, rho1), local(m2.x, rho2), local(m2.p, rho2);
  const Vec4& mu = s.mean;

  s.cov(0, 0) = local(m1.xx, rho1) - mu[0] * mu[0];
  s.cov(1, 1) = local(m1.pp, rho1) - mu[1] * mu[1];
  s.cov(0, 1) = local(m1.xp, rho1) - mu[0] * mu[1];
  s.cov(2, 2) = local(m2.xx, rho2) - mu[2] * mu[2];
  s.cov(3, 3) = local(m2.pp, rho2) - mu[3] * mu[3];
  s.cov(2, 3) = local(m2.xp, rho2) - mu[2] * mu[3];

  const OperatorMatrix* first[2] = {&m1.x, &m1.p};
  const OperatorMatrix* second[2] = {&m2.x, &m2.p};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      s.cov(i, 2 + j) = product_expectation(*first[i], *second[j], rho0).real() - mu[i] * mu[2 + j];

  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < r; ++c) s.cov(r, c) = s.cov(c, r);
  return s;
}

}  // namespace dampsim
