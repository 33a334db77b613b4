#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dampsim/analytic.hpp"
#include "dampsim/errors.hpp"
#include "dampsim/fock.hpp"
#include "dampsim/scenario.hpp"
#include "dampsim/structures.hpp"

namespace py = pybind11;
using namespace dampsim;

namespace {

OperatorMatrix two_mode(const MatrixXc& rho, int dim) { return OperatorMatrix(dim, 2, rho); }

int cutoff_of(const MatrixXc& rho) {
  const auto d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(rho.rows()))));
  if (d * d != rho.rows()) throw DimensionMismatchError("density size must be a perfect square");
  return d;
}

}  // namespace

PYBIND11_MODULE(_dampsim, m) {
  m.doc() = "Two-mode amplitude damping: analytic moments, Fock oracle, canonical structures.";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  auto validation = py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", error.ptr());
  py::register_exception<IoError>(m, "IoError", error.ptr());
  py::register_exception<NoCandidateError>(m, "NoCandidateError", error.ptr());
  py::register_exception<SingularMatrixError>(m, "SingularMatrixError", validation.ptr());
  py::register_exception<NegativeTimeError>(m, "NegativeTimeError", validation.ptr());
  py::register_exception<UndampedModeError>(m, "UndampedModeError", validation.ptr());
  py::register_exception<DimensionMismatchError>(m, "DimensionMismatchError", validation.ptr());
  py::register_exception<InvalidDensityError>(m, "InvalidDensityError", validation.ptr());
  py::register_exception<TailMassError>(m, "TailMassError", validation.ptr());
  py::register_exception<InvalidLctError>(m, "InvalidLctError", validation.ptr());

  py::enum_<Mode>(m, "Mode").value("first", Mode::first).value("second", Mode::second);

  py::class_<ModeParams>(m, "ModeParams")
      .def(py::init([](double mass, double omega, double kappa) { return ModeParams{mass, omega, kappa}; }),
           py::arg("mass") = 1.0, py::arg("omega") = 1.0, py::arg("kappa") = 0.0)
      .def_readwrite("mass", &ModeParams::mass)
      .def_readwrite("omega", &ModeParams::omega)
      .def_readwrite("kappa", &ModeParams::kappa)
      .def("__repr__", [](const ModeParams& p) {
        return "ModeParams(mass=" + std::to_string(p.mass) + ", omega=" + std::to_string(p.omega) +
               ", kappa=" + std::to_string(p.kappa) + ")";
      });

  py::class_<TwoModeSystem>(m, "TwoModeSystem")
      .def(py::init([](const ModeParams& a, const ModeParams& b, double hbar) {
             TwoModeSystem s{a, b, {hbar}};
             require_valid(s);
             return s;
           }),
           py::arg("mode1"), py::arg("mode2"), py::arg("hbar") = 1.0)
      .def_readonly("mode1", &TwoModeSystem::mode1)
      .def_readonly("mode2", &TwoModeSystem::mode2)
      .def_property_readonly("hbar", &TwoModeSystem::hbar);

  py::class_<MomentState>(m, "MomentState")
      .def(py::init([](const Vec4& mean, const Mat4& cov) { return MomentState{mean, cov}; }), py::arg("mean"),
           py::arg("cov"))
      .def_readwrite("mean", &MomentState::mean)
      .def_readwrite("cov", &MomentState::cov);

  py::class_<Lct>(m, "Lct")
      .def(py::init([](const Mat2& position, const Mat2& momentum) { return Lct{position, momentum}; }),
           py::arg("position"), py::arg("momentum"))
      .def_static("from_position", &lct_from_position_block, py::arg("position"))
      .def_static("center_of_mass", &center_of_mass_lct)
      .def_readwrite("position", &Lct::position)
      .def_readwrite("momentum", &Lct::momentum)
      .def("violations", [](const Lct& l) {
        std::vector<std::pair<std::string, double>> out;
        for (const auto& v : validate_lct(l)) out.emplace_back(v.what, v.residual);
        return out;
      });

  m.def("check_moment_state", [](const MomentState& s, double hbar) {
    std::vector<std::pair<std::string, double>> out;
    for (const auto& v : check_moment_state(s, hbar)) out.emplace_back(v.what, v.residual);
    return out;
  }, py::arg("state"), py::arg("hbar") = 1.0);
  m.def("positivity_floor", &positivity_floor, py::arg("cov"), py::arg("hbar") = 1.0);
  m.def("vacuum_state", &vacuum_state, py::arg("system"));
  m.def("damping_matrix", [](const TwoModeSystem& s, double t) { return damping_map(s, t).matrix(); },
        py::arg("system"), py::arg("t"));
  m.def("evolve_state", &evolve_state, py::arg("initial"), py::arg("system"), py::arg("t"));
  m.def("asymptotic_state", &asymptotic_state, py::arg("system"));
  m.def("uncertainty_product", &uncertainty_product, py::arg("state"), py::arg("mode"));

  py::class_<StructureReport>(m, "StructureReport")
      .def_readonly("lct", &StructureReport::lct)
      .def_readonly("product_a", &StructureReport::product_a)
      .def_readonly("product_b", &StructureReport::product_b)
      .def_readonly("cov_xx", &StructureReport::cov_xx)
      .def_readonly("cov_pp", &StructureReport::cov_pp)
      .def_readonly("residual", &StructureReport::residual);

  m.def("transform_state", [](const MomentState& s, const Lct& l) { return transform_state(s, l); },
        py::arg("state"), py::arg("lct"));
  m.def("evaluate_structure", &evaluate_structure, py::arg("lct"), py::arg("system"));
  m.def("classicality_residual", &classicality_residual, py::arg("lct"), py::arg("system"));
  m.def("trivial_distance", &trivial_distance, py::arg("position"));

  py::class_<SearchResult>(m, "SearchResult")
      .def_readonly("best", &SearchResult::best)
      .def_readonly("best_restart", &SearchResult::best_restart)
      .def_property_readonly("residuals", [](const SearchResult& r) {
        std::vector<double> out;
        for (const auto& t : r.trace) out.push_back(t.residual);
        return out;
      });
  m.def(
      "search_classical_structure",
      [](const TwoModeSystem& s, int restarts, int max_iterations, double tolerance, double margin,
         std::uint64_t seed) {
        return search_classical_structure(s, SearchConfig{restarts, max_iterations, tolerance, margin, seed});
      },
      py::arg("system"), py::arg("restarts") = 32, py::arg("max_iterations") = 2000, py::arg("tolerance") = 1e-12,
      py::arg("exclusion_margin") = 1e-3, py::arg("seed") = 0);

  // Fock oracle: densities travel as dense complex (D^2 x D^2) arrays.
  m.def("kraus_operators", [](double kappa, double t, int dim) {
    std::vector<MatrixXc> out;
    for (const auto& k : kraus_operators(kappa, t, dim).ops) out.push_back(k.entries());
    return out;
  }, py::arg("kappa"), py::arg("t"), py::arg("dim"));
  m.def("completeness_defect", [](double kappa, double t, int dim) {
    return completeness_defect(kraus_operators(kappa, t, dim));
  }, py::arg("kappa"), py::arg("t"), py::arg("dim"));
  m.def("coherent_product_density", [](Complex a1, Complex a2, int dim) {
    return kron(coherent_density(a1, dim), coherent_density(a2, dim)).entries();
  }, py::arg("alpha1"), py::arg("alpha2"), py::arg("dim"));
  m.def("evolve_density", [](const MatrixXc& rho, const TwoModeSystem& s, double t) {
    const int d = cutoff_of(rho);
    const OperatorMatrix r = two_mode(rho, d);
    require_density(r);
    return evolve_density(r, kraus_operators(s.mode1.kappa, t, d), kraus_operators(s.mode2.kappa, t, d)).entries();
  }, py::arg("rho"), py::arg("system"), py::arg("t"));
  m.def("fock_moments", [](const MatrixXc& rho, const TwoModeSystem& s, double t) {
    const int d = cutoff_of(rho);
    const OperatorMatrix r = two_mode(rho, d);
    require_density(r);
    return FockOracle(s, d).moments(r, t);
  }, py::arg("rho"), py::arg("system"), py::arg("t"));

  // Scenario runner: returns (csv, report) text exactly as the CLI writes it.
  py::class_<Scenario>(m, "Scenario")
      .def_static("parse", &parse_scenario, py::arg("text"))
      .def_static("load", &load_scenario, py::arg("path"))
      .def_readonly("system", &Scenario::system)
      .def_readonly("seed", &Scenario::seed)
      .def_readonly("fock_dim", &Scenario::fock_dim);
  auto as_tuple = [](RunOutput (*fn)(const Scenario&)) {
    return [fn](const Scenario& s) {
      RunOutput o = fn(s);
      return std::make_pair(o.csv, o.report);
    };
  };
  m.def("run_evolve", as_tuple(&run_evolve), py::arg("scenario"));
  m.def("run_oracle", as_tuple(&run_oracle), py::arg("scenario"));
  m.def("run_structure", as_tuple(&run_structure), py::arg("scenario"));
  m.def("run_classicality", as_tuple(&run_classicality), py::arg("scenario"));
}
