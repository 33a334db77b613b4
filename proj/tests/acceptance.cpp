// Acceptance suite. Usage: acceptance [criterion...]; with no arguments every
// criterion runs. Prints one PASS/FAIL line per criterion and exits non-zero
// if any selected criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "dampsim/analytic.hpp"
#include "dampsim/fock.hpp"
#include "dampsim/structures.hpp"
#include "generators.hpp"

using namespace dampsim;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

double max_entry_diff(const MomentState& a, const MomentState& b) {
  return std::max((a.mean - b.mean).cwiseAbs().maxCoeff(), (a.cov - b.cov).cwiseAbs().maxCoeff());
}

// Slope of the least-squares line through (x, y).
double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < x.size(); ++k) mx += x[k] / n, my += y[k] / n;
  double sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  return sxy / sxx;
}

// 1. Fixed point and asymptote.
Verdict fixed_point_and_asymptote() {
  Stopwatch clock;
  std::mt19937_64 rng(101);
  double worst_entry = 0.0, worst_product = 0.0;
  for (int k = 0; k < 5; ++k) {
    const TwoModeSystem sys = testing::random_system(rng, 0.1, 2.0, 0.5, 3.0);
    const MomentState s0 = testing::random_moment_state(rng, sys);
    const double t = 20.0 / std::min(sys.mode1.kappa, sys.mode2.kappa);
    const MomentState late = evolve_state(s0, sys, t);
    worst_entry = std::max(worst_entry, max_entry_diff(late, vacuum_state(sys)));
    const double half = sys.hbar() / 2;
    worst_product = std::max({worst_product, std::abs(uncertainty_product(late, Mode::first) - half),
                              std::abs(uncertainty_product(late, Mode::second) - half)});
  }
  const double elapsed = clock.seconds();
  return {worst_entry <= 1e-8 && worst_product <= 1e-8 && elapsed < 1.0,
          "max entry dev " + sci(worst_entry) + " (tol 1e-8), max |dxdp - hbar/2| " + sci(worst_product) +
              " (tol 1e-8), " + sci(elapsed) + " s (< 1 s)"};
}

// 2. Covariance decay rate from both engines.
Verdict covariance_decay_rate() {
  Stopwatch clock;
  const double k1 = 0.1, k2 = 0.3;
  const TwoModeSystem sys{{1.0, 1.0, k1}, {1.0, 1.0, k2}, {1.0}};

  // 1/2 (|a,a><a,a| + |-a,-a><-a,-a|) with a^2 = 0.4: cov(x1, x2) = 2 a^2 = 0.8.
  const int dim = 32;
  const Complex a(std::sqrt(0.4), 0.0);
  const OperatorMatrix plus = kron(coherent_density(a, dim), coherent_density(a, dim));
  const OperatorMatrix minus = kron(coherent_density(-a, dim), coherent_density(-a, dim));
  const OperatorMatrix rho0 = Complex(0.5, 0.0) * (plus + minus);

  MomentState s0 = vacuum_state(sys);
  s0.cov(0, 0) = s0.cov(2, 2) = 1.3;
  s0.cov(0, 2) = s0.cov(2, 0) = 0.8;

  const FockOracle oracle(sys, dim);
  std::vector<double> ts, analytic_log, fock_log;
  double initial_fock_c = 0.0;
  for (int k = 0; k < 50; ++k) {
    const double t = 10.0 * k / 49.0;
    ts.push_back(t);
    analytic_log.push_back(std::log(std::abs(cross_covariance(evolve_state(s0, sys, t), Quadrature::x1, Quadrature::x2))));
    const MomentState m = oracle.moments(rho0, t);
    if (k == 0) initial_fock_c = m.cov(0, 2);
    fock_log.push_back(std::log(std::abs(m.cov(0, 2))));
  }
  const double expected = -(k1 + k2);
  const double analytic_err = std::abs(ls_slope(ts, analytic_log) - expected);
  const double fock_err = std::abs(ls_slope(ts, fock_log) - expected);
  const double elapsed = clock.seconds();
  return {analytic_err <= 1e-9 && fock_err <= 1e-4 && std::abs(initial_fock_c - 0.8) < 1e-9 && elapsed < 30.0,
          "analytic slope err " + sci(analytic_err) + " (tol 1e-9), fock slope err " + sci(fock_err) +
              " (tol 1e-4), fock C(0) = " + sci(initial_fock_c) + ", " + sci(elapsed) + " s (< 30 s)"};
}

// 3. Analytic engine vs Fock oracle on product coherent inputs.
Verdict oracle_equivalence() {
  struct Case {
    TwoModeSystem system;
    Complex alpha1, alpha2;
  };
  const std::vector<Case> cases = {
      {{{1.0, 1.0, 0.5}, {1.0, 1.0, 0.5}, {1.0}}, {1.0, 0.0}, {1.0, 0.0}},
      {{{1.0, 1.0, 1.0}, {1.0, 1.0, 0.3}, {1.0}}, {2.0, 0.0}, {0.0, -2.0}},
      {{{1.7, 0.6, 0.8}, {0.6, 2.2, 0.45}, {0.8}}, {1.2, 1.2}, {-1.5, 0.9}},
      {{{2.5, 1.3, 0.2}, {0.9, 0.7, 1.0}, {1.3}}, {-0.4, 1.8}, {0.6, -0.6}},
  };
  const int dim = 32;
  double worst = 0.0;
  for (const auto& c : cases) {
    const FockOracle oracle(c.system, dim);
    const OperatorMatrix rho0 = kron(coherent_density(c.alpha1, dim), coherent_density(c.alpha2, dim));
    const double hbar = c.system.hbar();
    MomentState s0 = vacuum_state(c.system);
    const auto& m1 = c.system.mode1;
    const auto& m2 = c.system.mode2;
    s0.mean << std::sqrt(2 * hbar / (m1.mass * m1.omega)) * c.alpha1.real(),
        std::sqrt(2 * m1.mass * hbar * m1.omega) * c.alpha1.imag(),
        std::sqrt(2 * hbar / (m2.mass * m2.omega)) * c.alpha2.real(),
        std::sqrt(2 * m2.mass * hbar * m2.omega) * c.alpha2.imag();
    const double kmax = std::max(m1.kappa, m2.kappa);
    for (int k = 0; k < 10; ++k) {
      const double t = (3.0 / kmax) * k / 9.0;
      const MomentState fock = oracle.moments(rho0, t);
      const MomentState exact = evolve_state(s0, c.system, t);
      for (int r = 0; r < 4; ++r) {
        worst = std::max(worst, std::abs(fock.mean[r] - exact.mean[r]));
        for (int col = r; col < 4; ++col) worst = std::max(worst, std::abs(fock.cov(r, col) - exact.cov(r, col)));
      }
    }
  }
  return {worst <= 1e-8, "max |fock - analytic| over 14 moments, 4 inputs x 10 times: " + sci(worst) + " (tol 1e-8)"};
}

// 4. Completeness and the Baker-Hausdorff consequence.
Verdict structural_identities() {
  double completeness = 0.0, bh = 0.0;
  for (int dim : {8, 16, 32}) {
    for (double kt : {0.0, 0.5, 2.0, 10.0}) {
      completeness = std::max(completeness, completeness_defect(kraus_operators(1.0, kt, dim)));
      bh = std::max(bh, bh_identity_residual(1.0, kt, dim));
    }
  }
  return {completeness <= 1e-13 && bh <= 1e-13,
          "max completeness defect " + sci(completeness) + ", max BH residual " + sci(bh) + " (tol 1e-13)"};
}

// 5. Uncertainty-product inequality and its equality case.
Verdict inequality_suite() {
  std::mt19937_64 rng(555);
  std::vector<Lct> lcts;
  for (int k = 0; k < 1000; ++k) lcts.push_back(lct_from_position_block(testing::random_position_block(rng)));
  double lowest = std::numeric_limits<double>::infinity();
  for (int s = 0; s < 20; ++s) {
    TwoModeSystem sys = testing::random_system(rng);
    sys.constants.hbar = testing::uniform(rng, 0.5, 2.0);
    for (const auto& lct : lcts) {
      const auto p = asymptotic_products(lct, sys);
      lowest = std::min({lowest, p.a - sys.hbar() / 2, p.b - sys.hbar() / 2});
    }
  }
  double equality = 0.0, covariance = 0.0;
  for (int s = 0; s < 20; ++s) {
    const double m = testing::uniform(rng, 0.5, 3.0), w = testing::uniform(rng, 0.5, 3.0);
    const TwoModeSystem sys{{m, w, testing::uniform(rng, 0.1, 2.0)}, {m, w, testing::uniform(rng, 0.1, 2.0)},
                            {testing::uniform(rng, 0.5, 2.0)}};
    const auto p = asymptotic_products(center_of_mass_lct(), sys);
    const auto c = asymptotic_cross_covariances(center_of_mass_lct(), sys);
    equality = std::max({equality, std::abs(p.a - sys.hbar() / 2), std::abs(p.b - sys.hbar() / 2)});
    covariance = std::max({covariance, std::abs(c.xx), std::abs(c.pp)});
  }
  return {lowest >= -1e-10 && equality <= 1e-12 && covariance <= 1e-12,
          "min(product - hbar/2) over 20000 pairs " + sci(lowest) + " (>= -1e-10); centre-of-mass |product - hbar/2| " +
              sci(equality) + ", |cov| " + sci(covariance) + " (tol 1e-12)"};
}

// 6. Classical-like alternates exist only in the resonant equal-mass case.
Verdict non_classicality() {
  Stopwatch clock;
  SearchConfig config;  // 32 restarts, 2000 iterations, tol 1e-12, margin 1e-3
  config.seed = 2024;
  const TwoModeSystem equal{{1.0, 1.0, 0.5}, {1.0, 1.0, 0.5}, {1.0}};
  const TwoModeSystem unequal_mass{{1.0, 1.0, 0.5}, {2.0, 1.0, 0.5}, {1.0}};
  const TwoModeSystem detuned{{1.0, 1.0, 0.5}, {1.0, 2.0, 0.5}, {1.0}};
  const double r_equal = search_classical_structure(equal, config).best.residual;
  const double r_mass = search_classical_structure(unequal_mass, config).best.residual;
  const double r_detuned = search_classical_structure(detuned, config).best.residual;
  const double elapsed = clock.seconds();
  const bool a = r_equal <= 1e-10, b = r_mass > 1e-4, c = r_detuned > 1e-4;
  return {a && b && c && elapsed < 60.0,
          std::string("equal masses best ") + sci(r_equal) + (a ? " ok" : " FAIL") + " (<= 1e-10); m=(1,2) best " +
              sci(r_mass) + (b ? " ok" : " FAIL") + " (> 1e-4); omega=(1,2) best " + sci(r_detuned) +
              (c ? " ok" : " FAIL") + " (> 1e-4); " + sci(elapsed) + " s (< 60 s)"};
}

// 7. Positivity preservation in both engines.
Verdict positivity_preservation() {
  std::mt19937_64 rng(777);
  double floor = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 200; ++k) {
    const TwoModeSystem sys = testing::random_system(rng);
    const MomentState s0 = testing::random_moment_state(rng, sys);
    for (int j = 0; j < 20; ++j) {
      const double t = 0.25 * j;
      floor = std::min(floor, positivity_floor(evolve_state(s0, sys, t).cov, sys.hbar()));
    }
  }
  double min_eig = std::numeric_limits<double>::infinity(), trace_err = 0.0;
  auto check = [&](const OperatorMatrix& rho0, double k1, double k2) {
    for (int j = 0; j < 20; ++j) {
      const double t = 0.25 * j;
      const OperatorMatrix rho =
          evolve_density(rho0, kraus_operators(k1, t, rho0.dim()), kraus_operators(k2, t, rho0.dim()));
      min_eig = std::min(min_eig, min_eigenvalue(rho));
      trace_err = std::max(trace_err, std::abs(rho.trace() - Complex(1.0, 0.0)));
    }
  };
  for (int k = 0; k < 200; ++k)
    check(testing::random_density(rng, 4), testing::uniform(rng, 0.1, 2.0), testing::uniform(rng, 0.1, 2.0));
  for (int k = 0; k < 5; ++k)
    check(testing::random_density(rng, 6), testing::uniform(rng, 0.1, 2.0), testing::uniform(rng, 0.1, 2.0));
  check(kron(coherent_density({1.0, 0.5}, 12), coherent_density({-0.8, 0.2}, 12)), 0.4, 1.1);
  return {floor >= -1e-10 && min_eig >= -1e-10 && trace_err <= 1e-10,
          "moment positivity floor " + sci(floor) + " (>= -1e-10); density min eigenvalue " + sci(min_eig) +
              " (>= -1e-10); max |trace - 1| " + sci(trace_err) + " (<= 1e-10)"};
}

int run(const std::string& command) {
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// 8. CLI golden file and exit codes.
Verdict cli_contract() {
  namespace fs = std::filesystem;
  const fs::path work = DAMPSIM_WORK_DIR;
  const fs::path data = DAMPSIM_TEST_DATA;
  fs::remove_all(work);
  fs::create_directories(work);
  const std::string cli = DAMPSIM_CLI;
  const std::string quiet = " > /dev/null 2>&1";

  const int golden_code = run(cli + " evolve --config " + (data / "golden_scenario.json").string() + " --output " +
                              (work / "golden.csv").string() + quiet);
  const bool identical = golden_code == 0 && slurp(work / "golden.csv") == slurp(data / "golden_evolve.csv");
  const int repeat_code = run(cli + " evolve --config " + (data / "golden_scenario.json").string() + " --output " +
                              (work / "repeat.csv").string() + quiet);
  const bool repeatable = repeat_code == 0 && slurp(work / "golden.csv") == slurp(work / "repeat.csv");
  const int malformed = run(cli + " evolve --config " + (data / "malformed_scenario.json").string() + " --output " +
                            (work / "malformed.csv").string() + quiet);
  const bool no_partial = !fs::exists(work / "malformed.csv");
  return {identical && repeatable && malformed == 2 && no_partial,
          std::string("golden CSV ") + (identical ? "byte-identical" : "DIFFERS") + ", rerun " +
              (repeatable ? "identical" : "DIFFERS") + ", malformed config exit " + std::to_string(malformed) +
              " (expect 2)" + (no_partial ? "" : ", partial file left")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"fixed point & asymptote", fixed_point_and_asymptote},
      {"covariance decay rate", covariance_decay_rate},
      {"oracle equivalence", oracle_equivalence},
      {"exact structural identities", structural_identities},
      {"uncertainty inequality suite", inequality_suite},
      {"non-classicality of alternates", non_classicality},
      {"positivity preservation", positivity_preservation},
      {"CLI contract", cli_contract},
  };
  std::vector<int> selected;
  for (int k = 1; k < argc; ++k) selected.push_back(std::atoi(argv[k]));
  if (selected.empty())
    for (int k = 1; k <= static_cast<int>(criteria.size()); ++k) selected.push_back(k);

  int failures = 0;
  for (int id : selected) {
    if (id < 1 || id > static_cast<int>(criteria.size())) {
      std::cerr << "unknown criterion " << id << '\n';
      return 2;
    }
    const auto& [name, check] = criteria[id - 1];
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    std::cout << (v.pass ? "[PASS] " : "[FAIL] ") << id << ". " << name << ": " << v.detail << std::endl;
    failures += v.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
