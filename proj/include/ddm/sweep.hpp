#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ddm/analysis.hpp"

namespace ddm {

enum class SweepMode {
  dynamics,
  steady_state,
  phase_diagram,
  screening_curve,
  cooperativity,
  omega_eff_fit,
  power_law_fit,
};

std::string to_string(SweepMode mode);
SweepMode sweep_mode_from_string(const std::string& name);

inline constexpr int kSpecSchemaVersion = 1;
// 2*pi*6 MHz, the Rb-87 D2 linewidth, as an angular rate in 1/us.
inline constexpr double kDefaultGammaMHz = 37.69911184307752;

/// ns -> 1/Gamma for a linewidth given as an angular rate in MHz.
double ns_to_gamma_units(double ns, double gamma_mhz);

/// A declarative sweep, read from JSON (see schema/sweep_spec.md).
struct SweepSpec {
  SweepMode mode = SweepMode::steady_state;
  std::map<std::string, std::vector<double>> grids;
  std::vector<std::string> outputs;  // empty: every observable of the mode
  std::string output_path;           // empty or "-": stdout
  double tol = 1e-8;
  double gamma_mhz = kDefaultGammaMHz;
  int threads = 1;

  // Time axis for dynamics and Omega_eff fits; *_ns fields take precedence
  // and are converted with gamma_mhz.
  std::optional<double> t_final;
  std::optional<double> t_final_ns;
  int samples = 151;
  std::optional<double> window;
  std::optional<double> window_ns;

  PowerLawMethod alpha_method = PowerLawMethod::least_squares;

  double effective_t_final() const;
  double effective_window() const;

  /// Throws ConfigError describing the first problem found.
  void validate() const;
};

/// Parses and validates. Throws ConfigError.
SweepSpec parse_spec(const nlohmann::json& doc);
SweepSpec load_spec(const std::string& path);
/// Built-in spec used when a subcommand runs without --config.
SweepSpec default_spec(SweepMode mode);
nlohmann::json to_json(const SweepSpec& spec);

struct SweepRow {
  std::vector<double> params;
  std::vector<double> values;       // observables then numeric diagnostics
  std::string status = "ok";
};

struct SweepResult {
  nlohmann::json metadata;
  std::vector<std::string> param_columns;
  std::vector<std::string> value_columns;
  std::vector<SweepRow> rows;

  std::size_t failed_rows() const;
};

/// Columns the mode can emit, diagnostics excluded.
std::vector<std::string> observable_names(SweepMode mode);

/// Runs every grid point on `spec.threads` workers. Per-point solver errors
/// land in the row status; rows come out in grid order regardless of
/// completion order.
SweepResult run(const SweepSpec& spec);

/// CSV with a '#'-prefixed JSON metadata line. Doubles are printed with 17
/// significant digits so identical runs are byte-identical.
void write_csv(const SweepResult& result, std::ostream& out);

/// Mean of the samples whose time lies in the last `window` of the trace.
double steady_window_average(const TimeTrace& trace, double window);

}  // namespace ddm
