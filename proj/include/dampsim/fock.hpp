#pragma once

// Truncated Fock-space oracle: ladder operators, the amplitude-damping Kraus
// family, and explicit Kraus sums in both pictures.
//
// Basis |0>..|D-1> per mode. Two-mode operators use mode-1-major indexing:
// row/column n1 * D + n2 for |n1, n2>, i.e. kron(A1, A2) acts as A1 (x) A2.

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "dampsim/model.hpp"

namespace dampsim {

using Complex = std::complex<double>;
using MatrixXc = Eigen::MatrixXcd;

class OperatorMatrix {
 public:
  // Throws ValidationError when dim < 2, mode_count not in {1, 2}, or the
  // entries are not dim^mode_count square.
  OperatorMatrix(int dim, int mode_count, MatrixXc entries);

  static OperatorMatrix zero(int dim, int mode_count = 1);
  static OperatorMatrix identity(int dim, int mode_count = 1);

  int dim() const { return dim_; }
  int mode_count() const { return mode_count_; }
  Eigen::Index size() const { return entries_.rows(); }
  const MatrixXc& entries() const { return entries_; }
  Complex operator()(Eigen::Index r, Eigen::Index c) const { return entries_(r, c); }

  OperatorMatrix adjoint() const;
  Complex trace() const { return entries_.trace(); }

  friend OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b);
  friend OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b);
  friend OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b);
  friend OperatorMatrix operator*(Complex s, const OperatorMatrix& a);

 private:
  int dim_;
  int mode_count_;
  MatrixXc entries_;
};

// a (x) b for two single-mode operators of the same cutoff.
OperatorMatrix kron(const OperatorMatrix& a, const OperatorMatrix& b);

double max_abs(const OperatorMatrix& a);

struct ModeOperators {
  OperatorMatrix a;
  OperatorMatrix a_dagger;
  OperatorMatrix number;
  OperatorMatrix x;
  OperatorMatrix p;
};

ModeOperators build_mode_operators(int dim, const ModeParams& params,
                                   const PhysicalConstants& constants);

struct KrausSet {
  double kappa = 0.0;
  double t = 0.0;
  int dim = 0;
  std::vector<OperatorMatrix> ops;  // K_0 .. K_{D-1}
};

// K_n = sqrt((1 - e^{-2 kappa t})^n / n!) e^{-kappa t N} a^n, n = 0..D-1.
// a^n vanishes on the truncated space for n >= D, so the set is complete.
KrausSet kraus_operators(double kappa, double t, int dim);

// max |I - sum K^dag K|
double completeness_defect(const KrausSet& ks);

// Throws InvalidDensityError unless rho is Hermitian, unit trace and PSD
// within tol.structural.
void require_density(const OperatorMatrix& rho, const Tolerances& tol = {});

// Smallest eigenvalue of the Hermitian part.
double min_eigenvalue(const OperatorMatrix& rho);

// rho -> sum_n K_n rho K_n^dag on one mode.
OperatorMatrix evolve_density(const OperatorMatrix& rho0, const KrausSet& ks);

// rho -> sum_{m,n} (K1_m (x) K2_n) rho (K1_m (x) K2_n)^dag.
OperatorMatrix evolve_density(const OperatorMatrix& rho0, const KrausSet& ks1, const KrausSet& ks2);

// A -> sum_n K_n^dag A K_n on one mode.
OperatorMatrix heisenberg_evolve(const OperatorMatrix& observable, const KrausSet& ks);

// tr[(A1(t) (x) A2(t)) rho0] with A_i(t) evolved by the local Kraus sums.
// An empty A2 means the identity on mode 2.
Complex heisenberg_moment(const OperatorMatrix& a1, const std::optional<OperatorMatrix>& a2,
                          const KrausSet& ks1, const KrausSet& ks2, const OperatorMatrix& rho0);

// tr[(A1 (x) A2) rho] for a two-mode rho, without forming the Kronecker product.
Complex product_expectation(const OperatorMatrix& a1, const OperatorMatrix& a2,
                            const OperatorMatrix& rho);

// Partial traces of a two-mode operator.
OperatorMatrix reduce_to_mode1(const OperatorMatrix& rho);
OperatorMatrix reduce_to_mode2(const OperatorMatrix& rho);

// max of |e^{-st N} a e^{-st N} - e^{-st} a e^{-2st N}| and the a^dag analogue.
double bh_identity_residual(double kappa, double t, int dim);

// |alpha><alpha| truncated to dim levels and renormalized.
// Throws TailMassError unless |alpha|^2 <= dim / 4.
OperatorMatrix coherent_density(Complex alpha, int dim);

// |n><n|
OperatorMatrix fock_density(int level, int dim);

// Total population on the top `levels` Fock levels of either mode.
double top_level_mass(const OperatorMatrix& rho, int levels);

// Evaluates the 4 means and 10 covariance entries of a two-mode density at
// time t through Heisenberg-evolved single-mode observables.
class FockOracle {
 public:
  FockOracle(const TwoModeSystem& system, int dim);

  int dim() const { return dim_; }
  const ModeOperators& mode1() const { return ops1_; }
  const ModeOperators& mode2() const { return ops2_; }

  MomentState moments(const OperatorMatrix& rho0, double t) const;

 private:
  TwoModeSystem system_;
  int dim_;
  ModeOperators ops1_;
  ModeOperators ops2_;
};

}  // namespace dampsim
