#include "dampsim/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dampsim/analytic.hpp"
#include "dampsim/errors.hpp"

namespace dampsim {

using json = nlohmann::json;

namespace {

// ---- schema helpers -------------------------------------------------------

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw ValidationError("scenario field '" + path + "': " + what);
}

void reject_unknown_keys(const json& obj, const std::string& path,
                         std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) known = known || item.key() == key;
    if (!known) schema_error(path.empty() ? item.key() : path + "." + item.key(), "unknown key");
  }
}

const json& require_object(const json& parent, const char* key, const std::string& path) {
  if (!parent.contains(key)) schema_error(path, "missing");
  const json& v = parent.at(key);
  if (!v.is_object()) schema_error(path, "expected an object");
  return v;
}

double get_number(const json& obj, const char* key, const std::string& path,
                  std::optional<double> fallback = std::nullopt) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    schema_error(path, "missing");
  }
  const json& v = obj.at(key);
  if (!v.is_number()) schema_error(path, "expected a number");
  return v.get<double>();
}

std::int64_t get_integer(const json& obj, const char* key, const std::string& path,
                         std::int64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) schema_error(path, "expected an integer");
  return v.get<std::int64_t>();
}

std::complex<double> get_complex(const json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) schema_error(path, "missing");
  const json& v = obj.at(key);
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  schema_error(path, "expected a number or [re, im]");
}

Eigen::MatrixXd get_matrix(const json& v, const std::string& path, Eigen::Index rows,
                           Eigen::Index cols) {
  if (!v.is_array() || (rows >= 0 && static_cast<Eigen::Index>(v.size()) != rows))
    schema_error(path, rows >= 0 ? "expected " + std::to_string(rows) + " rows" : "expected rows");
  const Eigen::Index n_rows = static_cast<Eigen::Index>(v.size());
  const Eigen::Index n_cols = cols >= 0 ? cols : (n_rows > 0 && v[0].is_array() ? v[0].size() : 0);
  Eigen::MatrixXd m(n_rows, n_cols);
  for (Eigen::Index r = 0; r < n_rows; ++r) {
    const json& row = v[r];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n_cols)
      schema_error(path, "row " + std::to_string(r) + " must have " + std::to_string(n_cols) + " numbers");
    for (Eigen::Index c = 0; c < n_cols; ++c) {
      if (!row[c].is_number()) schema_error(path, "entries must be numbers");
      m(r, c) = row[c].get<double>();
    }
  }
  return m;
}

ModeParams parse_mode(const json& obj, const std::string& path) {
  reject_unknown_keys(obj, path, {"mass", "omega", "kappa"});
  ModeParams mode;
  mode.mass = get_number(obj, "mass", path + ".mass");
  mode.omega = get_number(obj, "omega", path + ".omega");
  mode.kappa = get_number(obj, "kappa", path + ".kappa");
  require_valid(mode, path);
  return mode;
}

InitialSpec parse_initial(const json& obj) {
  if (!obj.contains("type") || !obj.at("type").is_string())
    schema_error("initial.type", "expected one of vacuum, coherent, moments, density");
  const std::string type = obj.at("type").get<std::string>();
  if (type == "vacuum") {
    reject_unknown_keys(obj, "initial", {"type"});
    return VacuumInit{};
  }
  if (type == "coherent") {
    reject_unknown_keys(obj, "initial", {"type", "alpha1", "alpha2"});
    return CoherentInit{get_complex(obj, "alpha1", "initial.alpha1"),
                        get_complex(obj, "alpha2", "initial.alpha2")};
  }
  if (type == "moments") {
    reject_unknown_keys(obj, "initial", {"type", "mean", "cov"});
    if (!obj.contains("mean")) schema_error("initial.mean", "missing");
    if (!obj.contains("cov")) schema_error("initial.cov", "missing");
    const json& mean = obj.at("mean");
    if (!mean.is_array() || mean.size() != 4) schema_error("initial.mean", "expected 4 numbers");
    MomentsInit init;
    for (int k = 0; k < 4; ++k) {
      if (!mean[k].is_number()) schema_error("initial.mean", "expected 4 numbers");
      init.state.mean[k] = mean[k].get<double>();
    }
    init.state.cov = get_matrix(obj.at("cov"), "initial.cov", 4, 4);
    return init;
  }
  if (type == "density") {
    reject_unknown_keys(obj, "initial", {"type", "real", "imag"});
    if (!obj.contains("real")) schema_error("initial.real", "missing");
    const Eigen::MatrixXd re = get_matrix(obj.at("real"), "initial.real", -1, -1);
    Eigen::MatrixXd im = Eigen::MatrixXd::Zero(re.rows(), re.cols());
    if (obj.contains("imag")) im = get_matrix(obj.at("imag"), "initial.imag", re.rows(), re.cols());
    if (re.rows() != re.cols()) schema_error("initial.real", "density matrix must be square");
    const auto d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(re.rows()))));
    if (static_cast<Eigen::Index>(d) * d != re.rows() || d < 2)
      schema_error("initial.real", "two-mode density must be D^2 x D^2 with D >= 2");
    DensityInit init;
    init.dim = d;
    init.entries = re.cast<Complex>() + Complex{0.0, 1.0} * im.cast<Complex>();
    return init;
  }
  schema_error("initial.type", "unknown type '" + type + "'");
}

Engine parse_engine(const json& root) {
  if (!root.contains("engine")) return Engine::analytic;
  const json& v = root.at("engine");
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "analytic") return Engine::analytic;
    if (s == "fock") return Engine::fock;
    if (s == "both") return Engine::both;
  }
  schema_error("engine", "expected one of analytic, fock, both");
}

std::optional<Lct> parse_lct(const json& root) {
  if (!root.contains("lct")) return std::nullopt;
  const json& obj = root.at("lct");
  if (!obj.is_object()) schema_error("lct", "expected an object");
  reject_unknown_keys(obj, "lct", {"position", "momentum"});
  if (!obj.contains("position")) schema_error("lct.position", "missing");
  const Mat2 position = get_matrix(obj.at("position"), "lct.position", 2, 2);
  if (!obj.contains("momentum")) return lct_from_position_block(position);
  Lct lct{position, get_matrix(obj.at("momentum"), "lct.momentum", 2, 2)};
  const auto report = validate_lct(lct);
  if (!report.empty())
    schema_error("lct", "violates " + report.front().what + " (residual " +
                            format_number(report.front().residual) + ")");
  return lct;
}

SearchConfig parse_search(const json& root, std::uint64_t seed) {
  SearchConfig config;
  config.seed = seed;
  if (!root.contains("search")) return config;
  const json& obj = root.at("search");
  if (!obj.is_object()) schema_error("search", "expected an object");
  reject_unknown_keys(obj, "search", {"restarts", "max_iterations", "tolerance", "exclusion_margin"});
  config.restarts = static_cast<int>(get_integer(obj, "restarts", "search.restarts", config.restarts));
  config.max_iterations =
      static_cast<int>(get_integer(obj, "max_iterations", "search.max_iterations", config.max_iterations));
  config.tolerance = get_number(obj, "tolerance", "search.tolerance", config.tolerance);
  config.exclusion_margin =
      get_number(obj, "exclusion_margin", "search.exclusion_margin", config.exclusion_margin);
  if (config.restarts < 1) schema_error("search.restarts", "must be >= 1");
  if (config.max_iterations < 1) schema_error("search.max_iterations", "must be >= 1");
  if (!(config.tolerance > 0.0)) schema_error("search.tolerance", "must be > 0");
  if (!(config.exclusion_margin >= 0.0)) schema_error("search.exclusion_margin", "must be >= 0");
  return config;
}

bool uses_fock(Engine e) { return e != Engine::analytic; }

// ---- output helpers -------------------------------------------------------

class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header) {
    for (std::size_t k = 0; k < header.size(); ++k) out_ << (k ? "," : "") << header[k];
    out_ << '\n';
  }
  void row(const std::vector<double>& values) {
    for (std::size_t k = 0; k < values.size(); ++k) out_ << (k ? "," : "") << format_number(values[k]);
    out_ << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

class Report {
 public:
  explicit Report(const std::string& title) { out_ << "# " << title << '\n'; }
  void line(const std::string& key, const std::string& value) { out_ << key << ": " << value << '\n'; }
  void line(const std::string& key, double value) { line(key, format_number(value)); }
  void line(const std::string& key, long long value) { line(key, std::to_string(value)); }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

const char* engine_name(Engine e) {
  switch (e) {
    case Engine::analytic: return "analytic";
    case Engine::fock: return "fock";
    case Engine::both: return "both";
  }
  return "?";
}

std::vector<std::string> moment_columns() {
  return {"mean_x1",  "mean_p1",  "mean_x2",  "mean_p2",  "cov_x1x1", "cov_x1p1", "cov_x1x2",
          "cov_x1p2", "cov_p1p1", "cov_p1x2", "cov_p1p2", "cov_x2x2", "cov_x2p2", "cov_p2p2",
          "dxdp_1",   "dxdp_2"};
}

std::vector<std::string> structure_columns() {
  return {"mean_XA", "mean_PA", "mean_xiB", "mean_piB",  "var_XA",    "var_PA",
          "var_xiB", "var_piB", "product_A", "product_B", "cov_XA_xiB", "cov_PA_piB"};
}

// The 4 means followed by the 10 upper-triangle covariance entries.
std::vector<double> tracked_moments(const MomentState& s) {
  std::vector<double> v(s.mean.data(), s.mean.data() + 4);
  for (int r = 0; r < 4; ++r)
    for (int c = r; c < 4; ++c) v.push_back(s.cov(r, c));
  return v;
}

std::vector<double> moment_values(const MomentState& s) {
  auto v = tracked_moments(s);
  v.push_back(uncertainty_product(s, Mode::first));
  v.push_back(uncertainty_product(s, Mode::second));
  return v;
}

std::vector<double> structure_values(const MomentState& s, const Lct& lct) {
  const MomentState t = transform_state(s, lct);
  return {t.mean[0],
          t.mean[1],
          t.mean[2],
          t.mean[3],
          t.cov(0, 0),
          t.cov(1, 1),
          t.cov(2, 2),
          t.cov(3, 3),
          std::sqrt(t.cov(0, 0) * t.cov(1, 1)),
          std::sqrt(t.cov(2, 2) * t.cov(3, 3)),
          t.cov(0, 2),
          t.cov(1, 3)};
}

double max_deviation(const MomentState& a, const MomentState& b) {
  const auto va = tracked_moments(a);
  const auto vb = tracked_moments(b);
  double worst = 0.0;
  for (std::size_t k = 0; k < va.size(); ++k) worst = std::max(worst, std::abs(va[k] - vb[k]));
  return worst;
}

// Least-squares slope of log|c| against t over samples with c != 0.
std::optional<double> log_slope(const std::vector<double>& ts, const std::vector<double>& cs) {
  std::vector<double> x, y;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    if (cs[k] != 0.0 && std::isfinite(cs[k])) {
      x.push_back(ts[k]);
      y.push_back(std::log(std::abs(cs[k])));
    }
  }
  if (x.size() < 2) return std::nullopt;
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

std::string matrix_text(const Mat2& m) {
  return "[[" + format_number(m(0, 0)) + ", " + format_number(m(0, 1)) + "], [" +
         format_number(m(1, 0)) + ", " + format_number(m(1, 1)) + "]]";
}

bool damped(const TwoModeSystem& s) { return s.mode1.kappa > 0.0 && s.mode2.kappa > 0.0; }

void add_structure_lines(Report& report, const Lct& lct, const TwoModeSystem& system) {
  report.line("lct_position", matrix_text(lct.position));
  report.line("lct_momentum", matrix_text(lct.momentum));
  if (!damped(system)) {
    report.line("structure_asymptote", "none (undamped mode)");
    return;
  }
  const StructureReport s = evaluate_structure(lct, system);
  report.line("asymptotic_product_A", s.product_a);
  report.line("asymptotic_product_B", s.product_b);
  report.line("asymptotic_cov_XA_xiB", s.cov_xx);
  report.line("asymptotic_cov_PA_piB", s.cov_pp);
  report.line("classicality_residual", s.residual);
}

}  // namespace

std::vector<double> TimeGrid::samples() const {
  std::vector<double> ts;
  ts.reserve(static_cast<std::size_t>(n_steps) + 1);
  for (int k = 0; k <= n_steps; ++k)
    ts.push_back(k == n_steps ? t_end : t_start + (t_end - t_start) * k / n_steps);
  return ts;
}

std::string format_number(double value) {
  if (value == 0.0) value = 0.0;  // drop the sign of negative zero
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", value);
  return buf;
}

Scenario parse_scenario(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("scenario is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) schema_error("<root>", "expected an object");
  reject_unknown_keys(root, "",
                      {"system", "initial", "time_grid", "engine", "fock_dim", "lct", "seed", "search"});

  Scenario sc;
  const json& system = require_object(root, "system", "system");
  reject_unknown_keys(system, "system", {"hbar", "mode1", "mode2"});
  sc.system.constants.hbar = get_number(system, "hbar", "system.hbar", 1.0);
  require_valid(sc.system.constants);
  sc.system.mode1 = parse_mode(require_object(system, "mode1", "system.mode1"), "system.mode1");
  sc.system.mode2 = parse_mode(require_object(system, "mode2", "system.mode2"), "system.mode2");

  sc.initial = root.contains("initial") ? parse_initial(require_object(root, "initial", "initial"))
                                        : InitialSpec{VacuumInit{}};

  const json& grid = require_object(root, "time_grid", "time_grid");
  reject_unknown_keys(grid, "time_grid", {"t_start", "t_end", "n_steps"});
  sc.time_grid.t_start = get_number(grid, "t_start", "time_grid.t_start", 0.0);
  sc.time_grid.t_end = get_number(grid, "t_end", "time_grid.t_end");
  if (!grid.contains("n_steps")) schema_error("time_grid.n_steps", "missing");
  sc.time_grid.n_steps = static_cast<int>(get_integer(grid, "n_steps", "time_grid.n_steps", 0));
  if (!(sc.time_grid.t_start >= 0.0)) schema_error("time_grid.t_start", "must be >= 0");
  if (!(sc.time_grid.t_end > sc.time_grid.t_start))
    schema_error("time_grid.t_end", "must be > t_start");
  if (sc.time_grid.n_steps < 1) schema_error("time_grid.n_steps", "must be >= 1");

  sc.engine = parse_engine(root);

  const auto* density = std::get_if<DensityInit>(&sc.initial);
  const std::int64_t default_dim = density ? density->dim : 32;
  sc.fock_dim = static_cast<int>(get_integer(root, "fock_dim", "fock_dim", default_dim));
  if (sc.fock_dim < 2) schema_error("fock_dim", "must be >= 2");
  if (density && density->dim != sc.fock_dim)
    schema_error("fock_dim", "does not match the cutoff of the supplied density matrix");

  sc.lct = parse_lct(root);
  const std::int64_t seed = get_integer(root, "seed", "seed", 0);
  if (seed < 0) schema_error("seed", "must be >= 0");
  sc.seed = static_cast<std::uint64_t>(seed);
  sc.search = parse_search(root, sc.seed);

  // Invariants of the initial condition.
  if (const auto* m = std::get_if<MomentsInit>(&sc.initial)) {
    require_valid(m->state, sc.system.hbar());
    if (uses_fock(sc.engine))
      throw ValidationError("engine '" + std::string(engine_name(sc.engine)) +
                            "' needs an initial state expressible as a density matrix "
                            "(vacuum, coherent or density)");
  }
  if (density) require_density({density->dim, 2, density->entries});
  if (const auto* c = std::get_if<CoherentInit>(&sc.initial); c && uses_fock(sc.engine)) {
    coherent_density(c->alpha1, sc.fock_dim);
    coherent_density(c->alpha2, sc.fock_dim);
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read scenario file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  if (in.bad()) throw IoError("error while reading '" + path + "'");
  return parse_scenario(text.str());
}

MomentState initial_moments(const Scenario& sc) {
  const TwoModeSystem& sys = sc.system;
  if (std::holds_alternative<VacuumInit>(sc.initial)) return vacuum_state(sys);
  if (const auto* m = std::get_if<MomentsInit>(&sc.initial)) return m->state;
  if (const auto* c = std::get_if<CoherentInit>(&sc.initial)) {
    // <x> = sqrt(2 hbar / m omega) Re alpha, <p> = sqrt(2 m hbar omega) Im alpha
    const double hbar = sys.hbar();
    auto mean_of = [hbar](const ModeParams& mp, std::complex<double> alpha) {
      return std::pair{std::sqrt(2.0 * hbar / (mp.mass * mp.omega)) * alpha.real(),
                       std::sqrt(2.0 * mp.mass * hbar * mp.omega) * alpha.imag()};
    };
    MomentState s = vacuum_state(sys);
    const auto [x1, p1] = mean_of(sys.mode1, c->alpha1);
    const auto [x2, p2] = mean_of(sys.mode2, c->alpha2);
    s.mean << x1, p1, x2, p2;
    return s;
  }
  const auto& d = std::get<DensityInit>(sc.initial);
  return FockOracle(sys, d.dim).moments({d.dim, 2, d.entries}, 0.0);
}

OperatorMatrix initial_density(const Scenario& sc) {
  const int dim = sc.fock_dim;
  if (std::holds_alternative<VacuumInit>(sc.initial))
    return kron(fock_density(0, dim), fock_density(0, dim));
  if (const auto* c = std::get_if<CoherentInit>(&sc.initial))
    return kron(coherent_density(c->alpha1, dim), coherent_density(c->alpha2, dim));
  if (const auto* d = std::get_if<DensityInit>(&sc.initial)) return {d->dim, 2, d->entries};
  throw ValidationError("a moments-only initial state has no density-matrix form");
}

RunOutput run_evolve(const Scenario& sc) {
  const TwoModeSystem& sys = sc.system;
  const auto ts = sc.time_grid.samples();

  std::vector<std::string> header{"t"};
  for (auto& c : moment_columns()) header.push_back(c);
  if (sc.lct)
    for (auto& c : structure_columns()) header.push_back(c);
  if (sc.engine == Engine::both) header.push_back("fock_max_abs_deviation");
  CsvWriter csv(header);

  std::optional<FockOracle> oracle;
  std::optional<OperatorMatrix> rho0;
  if (uses_fock(sc.engine)) {
    oracle.emplace(sys, sc.fock_dim);
    rho0.emplace(initial_density(sc));
  }
  const MomentState m0 = sc.engine == Engine::fock ? oracle->moments(*rho0, 0.0) : initial_moments(sc);

  std::vector<double> cross;
  double worst = 0.0;
  for (double t : ts) {
    MomentState s = sc.engine == Engine::fock ? oracle->moments(*rho0, t) : evolve_state(m0, sys, t);
    std::vector<double> row{t};
    for (double v : moment_values(s)) row.push_back(v);
    if (sc.lct)
      for (double v : structure_values(s, *sc.lct)) row.push_back(v);
    if (sc.engine == Engine::both) {
      const double dev = max_deviation(s, oracle->moments(*rho0, t));
      worst = std::max(worst, dev);
      row.push_back(dev);
    }
    cross.push_back(s.cov(0, 2));
    csv.row(row);
  }

  Report report("dampsim evolve");
  report.line("engine", engine_name(sc.engine));
  report.line("samples", static_cast<long long>(ts.size()));
  report.line("t_start", sc.time_grid.t_start);
  report.line("t_end", sc.time_grid.t_end);
  if (uses_fock(sc.engine)) report.line("fock_dim", static_cast<long long>(sc.fock_dim));
  if (damped(sys)) {
    const MomentState inf = asymptotic_state(sys);
    report.line("asymptotic_var_x1", inf.cov(0, 0));
    report.line("asymptotic_var_p1", inf.cov(1, 1));
    report.line("asymptotic_var_x2", inf.cov(2, 2));
    report.line("asymptotic_var_p2", inf.cov(3, 3));
    report.line("asymptotic_dxdp_1", uncertainty_product(inf, Mode::first));
    report.line("asymptotic_dxdp_2", uncertainty_product(inf, Mode::second));
  } else {
    report.line("asymptote", "none (undamped mode)");
  }
  const auto slope = log_slope(ts, cross);
  report.line("cov_x1x2_decay_slope", slope ? format_number(*slope) : std::string("n/a (zero covariance)"));
  report.line("expected_decay_slope", -(sys.mode1.kappa + sys.mode2.kappa));
  if (sc.engine == Engine::both) report.line("oracle_max_abs_deviation", worst);
  if (sc.lct) add_structure_lines(report, *sc.lct, sys);
  return {csv.str(), report.str()};
}

RunOutput run_oracle(const Scenario& sc) {
  const TwoModeSystem& sys = sc.system;
  const auto ts = sc.time_grid.samples();
  const FockOracle oracle(sys, sc.fock_dim);
  const OperatorMatrix rho0 = initial_density(sc);
  const MomentState m0 = initial_moments(sc);

  CsvWriter csv({"t", "max_abs_deviation", "completeness_defect_1", "completeness_defect_2",
                 "bh_residual_1", "bh_residual_2"});
  double worst_dev = 0.0, worst_complete = 0.0, worst_bh = 0.0;
  for (double t : ts) {
    const double dev = max_deviation(evolve_state(m0, sys, t), oracle.moments(rho0, t));
    const double c1 = completeness_defect(kraus_operators(sys.mode1.kappa, t, sc.fock_dim));
    const double c2 = completeness_defect(kraus_operators(sys.mode2.kappa, t, sc.fock_dim));
    const double b1 = bh_identity_residual(sys.mode1.kappa, t, sc.fock_dim);
    const double b2 = bh_identity_residual(sys.mode2.kappa, t, sc.fock_dim);
    worst_dev = std::max(worst_dev, dev);
    worst_complete = std::max({worst_complete, c1, c2});
    worst_bh = std::max({worst_bh, b1, b2});
    csv.row({t, dev, c1, c2, b1, b2});
  }

  const double t_end = sc.time_grid.t_end;
  const OperatorMatrix rho_end = evolve_density(rho0, kraus_operators(sys.mode1.kappa, t_end, sc.fock_dim),
                                                kraus_operators(sys.mode2.kappa, t_end, sc.fock_dim));
  const double tail = top_level_mass(rho0, 5);

  Report report("dampsim oracle");
  report.line("fock_dim", static_cast<long long>(sc.fock_dim));
  report.line("samples", static_cast<long long>(ts.size()));
  report.line("initial_top5_level_mass", tail);
  report.line("top_edge_policy", tail < 1e-12 ? "ok" : "violated (moment identities not guaranteed)");
  report.line("max_abs_moment_deviation", worst_dev);
  report.line("max_completeness_defect", worst_complete);
  report.line("max_bh_identity_residual", worst_bh);
  report.line("final_trace_defect", std::abs(rho_end.trace() - Complex{1.0, 0.0}));
  report.line("final_hermiticity_defect", max_abs(rho_end - rho_end.adjoint()));
  report.line("final_min_eigenvalue", min_eigenvalue(rho_end));
  return {csv.str(), report.str()};
}

RunOutput run_structure(const Scenario& sc) {
  if (!sc.lct) throw ValidationError("scenario field 'lct': required by the structure command");
  const TwoModeSystem& sys = sc.system;
  const auto ts = sc.time_grid.samples();
  const MomentState m0 = initial_moments(sc);

  std::vector<std::string> header{"t"};
  for (auto& c : structure_columns()) header.push_back(c);
  CsvWriter csv(header);
  for (double t : ts) {
    std::vector<double> row{t};
    for (double v : structure_values(evolve_state(m0, sys, t), *sc.lct)) row.push_back(v);
    csv.row(row);
  }

  Report report("dampsim structure");
  const auto violations = validate_lct(*sc.lct);
  report.line("lct_valid", violations.empty() ? "yes" : "no");
  add_structure_lines(report, *sc.lct, sys);
  const MomentState end = transform_state(evolve_state(m0, sys, sc.time_grid.t_end), *sc.lct);
  report.line("final_product_A", std::sqrt(end.cov(0, 0) * end.cov(1, 1)));
  report.line("final_product_B", std::sqrt(end.cov(2, 2) * end.cov(3, 3)));
  report.line("final_cov_XA_xiB", end.cov(0, 2));
  report.line("final_cov_PA_piB", end.cov(1, 3));
  return {csv.str(), report.str()};
}

RunOutput run_classicality(const Scenario& sc) {
  const SearchResult result = search_classical_structure(sc.system, sc.search);

  CsvWriter csv({"restart", "iterations", "converged", "residual", "trivial_distance", "excluded",
                 "m11", "m12", "m21", "m22"});
  int excluded = 0;
  for (const auto& r : result.trace) {
    excluded += r.excluded ? 1 : 0;
    csv.row({static_cast<double>(r.restart), static_cast<double>(r.iterations),
             r.converged ? 1.0 : 0.0, r.residual, r.trivial_distance, r.excluded ? 1.0 : 0.0,
             r.position(0, 0), r.position(0, 1), r.position(1, 0), r.position(1, 1)});
  }

  const StructureReport& best = result.best;
  Report report("dampsim classicality");
  report.line("seed", std::to_string(sc.search.seed));
  report.line("restarts", static_cast<long long>(sc.search.restarts));
  report.line("excluded_restarts", static_cast<long long>(excluded));
  report.line("best_restart", static_cast<long long>(result.best_restart));
  report.line("best_position", matrix_text(best.lct.position));
  report.line("best_momentum", matrix_text(best.lct.momentum));
  report.line("best_product_A", best.product_a);
  report.line("best_product_B", best.product_b);
  report.line("best_cov_XA_xiB", best.cov_xx);
  report.line("best_cov_PA_piB", best.cov_pp);
  report.line("best_residual", best.residual);
  report.line("best_trivial_distance", trivial_distance(best.lct.position));
  report.line("center_of_mass_residual", classicality_residual(center_of_mass_lct(), sc.system));
  report.line("classical_alternate_found", best.residual <= 1e-10 ? "yes" : "no");
  return {csv.str(), report.str()};
}

void write_files_atomically(const std::vector<std::pair<std::string, std::string>>& files) {
  namespace fs = std::filesystem;
  std::vector<fs::path> temps;
  auto cleanup = [&temps] {
    std::error_code ec;
    for (const auto& p : temps) fs::remove(p, ec);
  };
  for (const auto& [path, content] : files) {
    fs::path tmp = fs::path(path);
    tmp += ".tmp";
    temps.push_back(tmp);
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << content;
    out.close();
    if (!out) {
      cleanup();
      throw IoError("cannot write '" + path + "'");
    }
  }
  for (std::size_t k = 0; k < files.size(); ++k) {
    std::error_code ec;
    fs::rename(temps[k], files[k].first, ec);
    if (ec) {
      cleanup();
      throw IoError("cannot move output into place at '" + files[k].first + "': " + ec.message());
    }
  }
}

}  // namespace dampsim
