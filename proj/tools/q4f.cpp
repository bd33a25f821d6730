// q4f: run funding-mechanism experiments from a JSON config.
//
//   q4f <experiment> --config <path> [--seed N] [--out <path>] [--workers N] [--check]
//   q4f validate --config <path>
//
// Exit codes: 0 success, 2 configuration error, 3 failed checks (with --check).

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "q4f/errors.hpp"
#include "q4f/harness/experiments.hpp"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitCheckFailed = 3;

unsigned default_workers() {
  if (const char* env = std::getenv("Q4F_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    std::cerr << "ignoring invalid Q4F_WORKERS='" << env << "'\n";
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

}  // namespace

int main(int argc, char** argv) {
  using namespace q4f::harness;

  CLI::App app{"Quadratic and quartic funding experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  std::optional<unsigned> workers;
  bool check = false;

  for (const char* name : {"equivalence", "exponent_grid", "d_convergence", "mc_validation", "equilibrium"}) {
    auto* sub = app.add_subcommand(name, std::string("Run the ") + name + " experiment");
    sub->add_option("--config", config_path, "JSON experiment config")->required();
    sub->add_option("--seed", seed, "Override the config seed");
    sub->add_option("--out", out_path, "CSV output path (default: config output_path, else stdout)");
    sub->add_option("--workers", workers, "Worker threads (default: Q4F_WORKERS or hardware threads)")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--check", check, "Exit with code 3 if any acceptance check fails");
  }
  auto* validate = app.add_subcommand("validate", "Check a config against the schema");
  validate->add_option("--config", config_path, "JSON experiment config")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  ExperimentConfig config;
  try {
    config = load_config(config_path);
    if (command != "validate" && parse_experiment_kind(command) != config.experiment) {
      throw q4f::Error(q4f::ErrorCode::ConfigError,
                       "config describes '" + std::string(to_string(config.experiment)) + "', not '" + command + "'");
    }
  } catch (const q4f::Error& e) {
    std::cerr << e.what() << '\n';
    return kExitConfigError;
  }

  if (command == "validate") {
    std::cout << "ok: " << to_string(config.experiment) << '\n';
    return 0;
  }

  if (seed) config.seed = *seed;
  if (!out_path.empty()) config.output_path = out_path;

  ExperimentReport report;
  try {
    report = run_experiment(config, workers.value_or(default_workers()));
  } catch (const q4f::Error& e) {
    std::cerr << e.what() << '\n';
    return e.code() == q4f::ErrorCode::ConfigError ? kExitConfigError : 1;
  }

  if (config.output_path.empty() || config.output_path == "-") {
    std::cout << to_csv(report);
  } else {
    try {
      write_report(report, config.output_path);
    } catch (const std::exception& e) {
      std::cerr << e.what() << '\n';
      return 1;
    }
  }

  for (const auto& c : report.checks) {
    std::cerr << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (!c.detail.empty()) std::cerr << " (" << c.detail << ")";
    std::cerr << '\n';
  }
  if (check && !report.all_passed()) return kExitCheckFailed;
  return 0;
}
