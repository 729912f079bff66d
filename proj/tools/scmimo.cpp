// Command-line front end: parameter sweeps, oracle suites and version.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>
#include <iostream>
#include <optional>

#include "scmimo/config.hpp"
#include "scmimo/errors.hpp"
#include "scmimo/sweep.hpp"
#include "scmimo/validation.hpp"

namespace {

enum ExitCode { kOk = 0, kValidationFailed = 1, kConfigError = 2, kRuntimeError = 3 };

int run_sweep_command(const std::string& config_path, std::optional<std::uint64_t> seed,
                      std::optional<std::size_t> trials, std::optional<std::string> out_dir) {
  scmimo::SweepSpec spec;
  try {
    spec = scmimo::parse_config_file(config_path);
    if (seed) spec.base.seed = *seed;
    if (trials) spec.trials = *trials;
    if (out_dir) spec.output = *out_dir;
    scmimo::validate_spec(spec);
  } catch (const scmimo::ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kConfigError;
  }
  try {
    scmimo::prepare_output_dir(spec.output);
  } catch (const scmimo::IoError& e) {
    fmt::print(stderr, "output error: {}\n", e.what());
    return kConfigError;
  }

  std::vector<scmimo::SweepRow> rows;
  try {
    rows = scmimo::run_sweep(spec);
  } catch (const std::exception& e) {
    fmt::print(stderr, "sweep failed: {}\n", e.what());
    return kRuntimeError;
  }
  try {
    const auto files = scmimo::emit_outputs(rows, spec);
    fmt::print("wrote {}\nwrote {}\nwrote {}\n", files.csv, files.svg, files.manifest);
  } catch (const std::exception& e) {
    // Keep the computed table.
    fmt::print(stderr, "could not write outputs ({}); table follows on stdout\n", e.what());
    std::cout << scmimo::format_csv(rows);
    return kRuntimeError;
  }
  int failed = 0;
  for (const auto& r : rows) failed += r.se_mc ? 0 : 1;
  if (failed > 0) {
    fmt::print(stderr, "{} row(s) failed; see the flags column\n", failed);
    return kRuntimeError;
  }
  return kOk;
}

int run_validate_command(const std::string& suite, std::uint64_t seed) {
  std::vector<scmimo::CriterionResult> results;
  try {
    results = scmimo::run_suite(suite, scmimo::ValidationOptions{seed, 0});
  } catch (const scmimo::InvalidArgument& e) {
    fmt::print(stderr, "{}\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    fmt::print(stderr, "validation aborted: {}\n", e.what());
    return kRuntimeError;
  }
  bool ok = true;
  for (const auto& r : results) {
    fmt::print("[{}] {:>2} {}: {}\n", r.passed ? "PASS" : "FAIL", r.id, r.name, r.detail);
    ok = ok && r.passed;
  }
  return ok ? kOk : kValidationFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uplink spectral efficiency of space-constrained massive MIMO"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> sweep_seed;
  std::optional<std::size_t> sweep_trials;
  std::optional<std::string> sweep_out;
  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep from a configuration file");
  sweep->add_option("--config", config_path, "YAML sweep configuration")->required();
  sweep->add_option("--seed", sweep_seed, "Override the master seed");
  sweep->add_option("--trials", sweep_trials, "Override the Monte-Carlo trial count");
  sweep->add_option("--out", sweep_out, "Override the output directory");

  std::string suite;
  std::uint64_t validate_seed = 1;
  auto* validate = app.add_subcommand("validate", "Run an oracle suite and report pass/fail");
  validate->add_option("--suite", suite, "Suite to run")
      ->required()
      ->check(CLI::IsMember(scmimo::suite_names()));
  validate->add_option("--seed", validate_seed, "Master seed");

  auto* version = app.add_subcommand("version", "Print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  if (*sweep) return run_sweep_command(config_path, sweep_seed, sweep_trials, sweep_out);
  if (*validate) return run_validate_command(suite, validate_seed);
  if (*version) {
    fmt::print("scmimo {}\n", scmimo::version_string());
    return kOk;
  }
  return kConfigError;
}
