// ddm: command-line front end for driven Dicke model sweeps.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "ddm/errors.hpp"
#include "ddm/sweep.hpp"

namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kSolverFailure = 2, kIoError = 3 };

struct Overrides {
  std::string config;
  std::string out;
  std::optional<int> threads;
  std::optional<double> tol;
  std::optional<double> gamma_mhz;
};

int run_mode(ddm::SweepMode mode, const Overrides& o) {
  ddm::SweepSpec spec;
  try {
    spec = o.config.empty() ? ddm::default_spec(mode) : ddm::load_spec(o.config);
    if (spec.mode != mode) {
      throw ddm::ConfigError("config mode '" + ddm::to_string(spec.mode) +
                             "' does not match subcommand mode '" +
                             ddm::to_string(mode) + "'");
    }
    if (!o.out.empty()) spec.output_path = o.out;
    if (o.threads) spec.threads = *o.threads;
    if (o.tol) spec.tol = *o.tol;
    if (o.gamma_mhz) spec.gamma_mhz = *o.gamma_mhz;
    spec.validate();
  } catch (const ddm::ConfigError& e) {
    std::cerr << "ddm: config error: " << e.what() << '\n';
    return kConfigError;
  }

  const ddm::SweepResult result = ddm::run(spec);

  if (spec.output_path.empty() || spec.output_path == "-") {
    ddm::write_csv(result, std::cout);
    std::cout.flush();
    if (!std::cout) {
      std::cerr << "ddm: failed writing to stdout\n";
      return kIoError;
    }
  } else {
    std::ofstream out(spec.output_path, std::ios::binary);
    if (!out) {
      std::cerr << "ddm: cannot open '" << spec.output_path << "' for writing\n";
      return kIoError;
    }
    ddm::write_csv(result, out);
    out.close();
    if (!out) {
      std::cerr << "ddm: failed writing '" << spec.output_path << "'\n";
      return kIoError;
    }
  }

  const std::size_t failed = result.failed_rows();
  if (failed > 0) {
    std::cerr << "ddm: " << failed << " of " << result.rows.size()
              << " points failed\n";
  }
  if (!result.rows.empty() && failed == result.rows.size()) return kSolverFailure;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Driven Dicke model simulations and parameter sweeps"};
  app.require_subcommand(1);
  app.set_version_flag("--version", DDM_VERSION);

  Overrides o;
  const struct {
    const char* name;
    ddm::SweepMode mode;
    const char* help;
  } commands[] = {
      {"dynamics", ddm::SweepMode::dynamics, "Time traces from the ground state"},
      {"steady", ddm::SweepMode::steady_state, "Steady states on an (n_eff, rabi) grid"},
      {"phase-diagram", ddm::SweepMode::phase_diagram, "Steady states on an (n_eff, beta) grid"},
      {"screening", ddm::SweepMode::screening_curve, "Mean-field screening curve x(beta)"},
      {"mu", ddm::SweepMode::cooperativity, "Cooperativity of a Gaussian cloud"},
      {"fit-omega-eff", ddm::SweepMode::omega_eff_fit, "Fit Omega_eff to n_e(t) traces"},
      {"fit-alpha", ddm::SweepMode::power_law_fit, "Power-law exponent of gamma_SR in n_eff"},
  };

  std::optional<ddm::SweepMode> chosen;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", o.config, "JSON sweep spec (schema/sweep_spec.md)");
    sub->add_option("--out", o.out, "Output CSV path, '-' for stdout");
    sub->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--tol", o.tol, "Solver tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--gamma-mhz", o.gamma_mhz,
                    "Linewidth as an angular rate in MHz, for ns conversion")
        ->check(CLI::PositiveNumber);
    const ddm::SweepMode mode = c.mode;
    sub->callback([&chosen, mode] { chosen = mode; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    return run_mode(*chosen, o);
  } catch (const ddm::ConfigError& e) {
    std::cerr << "ddm: config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "ddm: " << e.what() << '\n';
    return kSolverFailure;
  }
}
