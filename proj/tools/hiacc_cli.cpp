// Command-line front end: run / validate / list-potentials / list-noise.
// Exit codes: 0 all checks pass, 2 a statistical check failed, 1 error.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "hiacc/errors.hpp"
#include "hiacc/experiment.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw hiacc::Error("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"High-accuracy sampling with stochastic oracles: experiment harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed_override;
  std::optional<std::uint64_t> chains;
  std::optional<std::string> out_dir;

  auto* run = app.add_subcommand("run", "Run an experiment and write report.json and results.csv");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--seed-override", seed_override, "Run a single seed instead of the config's");
  run->add_option("--chains", chains, "Override the number of chains");
  run->add_option("--out", out_dir, "Output directory (default: $HIACC_OUT_DIR, then the config)");

  auto* validate = app.add_subcommand("validate", "Check a config and print the resolved form");
  validate->add_option("--config", config_path, "Experiment config (JSON)")->required();

  auto* list_pot = app.add_subcommand("list-potentials", "List potential catalog keys");
  auto* list_noise = app.add_subcommand("list-noise", "List noise catalog keys");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*list_pot) {
      for (const auto& k : hiacc::potential_catalog()) std::cout << k << '\n';
      return 0;
    }
    if (*list_noise) {
      for (const auto& k : hiacc::noise_catalog()) std::cout << k << '\n';
      return 0;
    }
    hiacc::ExperimentConfig cfg = hiacc::validate_config(read_file(config_path));
    if (*validate) {
      std::cout << cfg.echo << '\n';
      return 0;
    }
    hiacc::apply_overrides(cfg, seed_override, chains);
    const hiacc::ExperimentReport report = hiacc::run_experiment(cfg);
    const std::string dir = hiacc::resolve_output_dir(out_dir, cfg);
    hiacc::write_report(report, dir);
    for (const auto& v : report.verdicts) {
      std::cout << (v.pass ? "PASS " : "FAIL ") << v.name << "  " << v.detail << '\n';
    }
    std::cout << "report: " << dir << "/report.json\n";
    return report.all_pass() ? 0 : 2;
  } catch (const hiacc::ValidationError& e) {
    std::cerr << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
