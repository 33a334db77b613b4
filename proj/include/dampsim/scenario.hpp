#pragma once

// Scenario files and the batch runs behind the dampsim command-line tool.
// The JSON schema and CSV column layouts are documented in README.md.

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dampsim/fock.hpp"
#include "dampsim/model.hpp"
#include "dampsim/structures.hpp"

namespace dampsim {

struct VacuumInit {};

struct CoherentInit {
  std::complex<double> alpha1;
  std::complex<double> alpha2;
};

struct MomentsInit {
  MomentState state;
};

// Two-mode density matrix, mode-1-major, dim^2 x dim^2.
struct DensityInit {
  int dim = 0;
  MatrixXc entries;
};

using InitialSpec = std::variant<VacuumInit, CoherentInit, MomentsInit, DensityInit>;

enum class Engine { analytic, fock, both };

struct TimeGrid {
  double t_start = 0.0;
  double t_end = 1.0;
  int n_steps = 10;

  // n_steps + 1 evenly spaced samples, both ends included.
  std::vector<double> samples() const;
};

struct Scenario {
  TwoModeSystem system;
  InitialSpec initial = VacuumInit{};
  TimeGrid time_grid;
  Engine engine = Engine::analytic;
  int fock_dim = 32;
  std::optional<Lct> lct;
  std::uint64_t seed = 0;
  SearchConfig search;
};

// Throws ParseError for text that is not JSON and ValidationError for JSON
// that does not describe a valid scenario.
Scenario parse_scenario(const std::string& text);

// Throws IoError when the file cannot be read.
Scenario load_scenario(const std::string& path);

// Moment-state view of the initial condition.
MomentState initial_moments(const Scenario& scenario);

// Density-matrix view; throws ValidationError for moment-only inputs.
OperatorMatrix initial_density(const Scenario& scenario);

struct RunOutput {
  std::string csv;
  std::string report;
};

RunOutput run_evolve(const Scenario& scenario);
RunOutput run_oracle(const Scenario& scenario);
RunOutput run_structure(const Scenario& scenario);
RunOutput run_classicality(const Scenario& scenario);

// 17 significant digits, scientific notation.
std::string format_number(double value);

// Writes every file to a sibling temporary and renames only after all writes
// succeeded. Throws IoError.
void write_files_atomically(const std::vector<std::pair<std::string, std::string>>& files);

}  // namespace dampsim
