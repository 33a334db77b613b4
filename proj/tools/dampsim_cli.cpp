// dampsim: batch front end for the amplitude-damping simulator.
//
//   dampsim evolve       --config scenario.json --output traj.csv
//   dampsim oracle       --config scenario.json --output oracle.csv
//   dampsim structure    --config scenario.json --output structure.csv
//   dampsim classicality --config scenario.json --output search.csv --seed 7
//
// Each command writes the CSV to --output and a plain-text summary to
// --report (default: <output>.report.txt).
//
// Exit codes: 0 ok, 1 parse error, 2 validation error, 3 I/O error.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dampsim/errors.hpp"
#include "dampsim/scenario.hpp"

namespace {

enum ExitCode { kOk = 0, kParse = 1, kValidation = 2, kIo = 3 };

struct Options {
  std::string config;
  std::string output;
  std::string report;
  std::int64_t seed = -1;
};

void add_common(CLI::App* cmd, Options& opts) {
  cmd->add_option("--config", opts.config, "Scenario JSON file")->required();
  cmd->add_option("--output", opts.output, "CSV output path")->required();
  cmd->add_option("--report", opts.report, "Summary report path (default <output>.report.txt)");
  cmd->add_option("--seed", opts.seed, "Override the scenario seed")->check(CLI::NonNegativeNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-mode amplitude-damping simulator"};
  app.require_subcommand(1);
  Options opts;
  auto* evolve = app.add_subcommand("evolve", "Sample moment trajectories");
  auto* oracle = app.add_subcommand("oracle", "Cross-check engines and Kraus identities");
  auto* structure = app.add_subcommand("structure", "Evaluate the scenario's LCT structure");
  auto* classicality = app.add_subcommand("classicality", "Search for classical-like structures");
  for (auto* cmd : {evolve, oracle, structure, classicality}) add_common(cmd, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kParse;
  }

  try {
    dampsim::Scenario scenario = dampsim::load_scenario(opts.config);
    if (opts.seed >= 0) {
      scenario.seed = static_cast<std::uint64_t>(opts.seed);
      scenario.search.seed = scenario.seed;
    }

    dampsim::RunOutput out;
    if (evolve->parsed()) out = dampsim::run_evolve(scenario);
    else if (oracle->parsed()) out = dampsim::run_oracle(scenario);
    else if (structure->parsed()) out = dampsim::run_structure(scenario);
    else out = dampsim::run_classicality(scenario);

    const std::string report_path = opts.report.empty() ? opts.output + ".report.txt" : opts.report;
    dampsim::write_files_atomically({{opts.output, out.csv}, {report_path, out.report}});
  } catch (const dampsim::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kParse;
  } catch (const dampsim::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kIo;
  } catch (const dampsim::Error& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kValidation;
  }
  return kOk;
}
