#include "ddm/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <set>
#include <thread>

#include "ddm/errors.hpp"
#include "ddm/geometry.hpp"
#include "ddm/ladder.hpp"
#include "ddm/meanfield.hpp"

#ifndef DDM_VERSION
#define DDM_VERSION "unknown"
#endif

namespace ddm {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ModeInfo {
  SweepMode mode;
  const char* name;
  std::vector<std::string> required_grids;
  std::vector<std::string> param_columns;
  std::vector<std::string> observables;
  std::vector<std::string> diagnostics;
};

const std::vector<ModeInfo>& mode_table() {
  static const std::vector<ModeInfo> table = {
      {SweepMode::dynamics, "dynamics", {"n_eff", "rabi"},
       {"n_eff", "rabi", "beta", "t"},
       {"s_z", "n_e", "dipole_re", "dipole_im", "gamma_sr", "g2", "omega_eff"},
       {"trace_error"}},
      {SweepMode::steady_state, "steady_state", {"n_eff", "rabi"},
       {"n_eff", "rabi", "beta"},
       {"s_z", "n_e", "dipole_re", "dipole_im", "gamma_sr", "g2", "omega_eff"},
       {"residual"}},
      {SweepMode::phase_diagram, "phase_diagram", {"n_eff", "beta"},
       {"n_eff", "rabi", "beta"},
       {"s_z", "n_e", "dipole_re", "dipole_im", "gamma_sr", "g2", "omega_eff"},
       {"residual"}},
      {SweepMode::screening_curve, "screening_curve", {"n_atoms", "beta"},
       {"n_atoms", "beta"},
       {"x", "x_asymptote", "omega_eff", "above_threshold"},
       {"residual"}},
      {SweepMode::cooperativity, "cooperativity", {"ell_ax", "ell_rad"},
       {"ell_ax", "ell_rad"},
       {"mu", "small_angle_mu"},
       {"quad_rel_error"}},
      {SweepMode::omega_eff_fit, "omega_eff_fit", {"n_eff", "rabi"},
       {"n_eff", "rabi", "beta"},
       {"omega_eff_fit", "decay_fit", "omega_eff_steady", "s_z_window",
        "gamma_sr_window"},
       {"fit_rms", "omega_eff_stderr"}},
      {SweepMode::power_law_fit, "power_law_fit", {"n_eff", "rabi"},
       {"rabi"},
       {"alpha", "prefactor", "alpha_stderr"},
       {"n_points"}},
  };
  return table;
}

const ModeInfo& info_of(SweepMode mode) {
  for (const auto& m : mode_table()) {
    if (m.mode == mode) return m;
  }
  throw ConfigError("unknown mode");
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::vector<double> parse_grid(const std::string& name, const json& g) {
  std::vector<double> values;
  if (g.is_number()) {
    values.push_back(g.get<double>());
  } else if (g.is_array()) {
    for (const auto& v : g) {
      if (!v.is_number()) throw ConfigError("grid '" + name + "' has a non-numeric entry");
      values.push_back(v.get<double>());
    }
  } else if (g.is_object()) {
    if (!g.contains("start") || !g.contains("stop") || !g.contains("num")) {
      throw ConfigError("grid '" + name + "' needs start, stop and num");
    }
    const double a = g.at("start").get<double>();
    const double b = g.at("stop").get<double>();
    const int num = g.at("num").get<int>();
    const bool log = g.value("log", false);
    if (num < 1) throw ConfigError("grid '" + name + "' needs num >= 1");
    if (log && (a <= 0.0 || b <= 0.0)) {
      throw ConfigError("log grid '" + name + "' needs positive bounds");
    }
    for (int k = 0; k < num; ++k) {
      const double f = num == 1 ? 0.0 : static_cast<double>(k) / (num - 1);
      values.push_back(log ? a * std::pow(b / a, f) : a + (b - a) * f);
    }
  } else {
    throw ConfigError("grid '" + name + "' must be a number, array or {start, stop, num}");
  }
  if (values.empty()) throw ConfigError("grid '" + name + "' is empty");
  return values;
}

void require_positive_integers(const SweepSpec& spec, const std::string& name) {
  for (double v : spec.grids.at(name)) {
    if (!(v >= 1.0) || v != std::floor(v) || v > 100000.0) {
      throw ConfigError("grid '" + name + "' must hold integers >= 1");
    }
  }
}

void require_positive(const SweepSpec& spec, const std::string& name,
                      bool allow_zero = false) {
  for (double v : spec.grids.at(name)) {
    if (allow_zero ? !(v >= 0.0) : !(v > 0.0)) {
      throw ConfigError("grid '" + name + "' must hold " +
                        (allow_zero ? "non-negative" : "positive") + " values");
    }
  }
}

std::vector<double> time_axis(const SweepSpec& spec) {
  if (auto it = spec.grids.find("t"); it != spec.grids.end()) return it->second;
  const double tf = spec.effective_t_final();
  std::vector<double> t(spec.samples);
  for (int k = 0; k < spec.samples; ++k) {
    t[k] = tf * static_cast<double>(k) / (spec.samples - 1);
  }
  t.back() = tf;
  return t;
}

// Observable block shared by the quantum modes.
std::vector<double> ladder_values(const DickeLadderState& s, double rabi) {
  const ObservableSet o = observables(s);
  double g2 = kNaN;
  try {
    g2 = g2_zero(s);
  } catch (const UndefinedCorrelation&) {
  }
  return {o.s_z,      o.n_e, o.dipole.real(), o.dipole.imag(),
          o.gamma_sr, g2,    std::abs(omega_eff(rabi, o.dipole))};
}

// One unit of parallel work; produces one or more rows.
using Task = std::function<std::vector<SweepRow>()>;

SweepRow failed_row(std::vector<double> params, std::size_t n_values,
                    const std::string& what) {
  SweepRow row;
  row.params = std::move(params);
  row.values.assign(n_values, kNaN);
  row.status = "error: " + what;
  return row;
}

std::vector<Task> make_tasks(const SweepSpec& spec, std::size_t n_values) {
  std::vector<Task> tasks;
  const auto& g = spec.grids;
  const double tol = spec.tol;

  switch (spec.mode) {
    case SweepMode::dynamics: {
      const auto times = time_axis(spec);
      for (double n : g.at("n_eff")) {
        for (double rabi : g.at("rabi")) {
          tasks.push_back([=] {
            const ModelParams p{static_cast<int>(n), rabi, 0.0};
            std::vector<SweepRow> rows;
            try {
              const auto series = evolve(DickeLadderState::ground(p.n_atoms), p,
                                         times, tol);
              for (const auto& ts : series) {
                SweepRow row;
                row.params = {n, rabi, p.beta(), ts.t};
                row.values = ladder_values(ts.state, rabi);
                row.values.push_back(std::abs(ts.state.trace() - 1.0));
                rows.push_back(std::move(row));
              }
            } catch (const std::exception& e) {
              rows.clear();
              for (double t : times) {
                rows.push_back(failed_row({n, rabi, p.beta(), t}, n_values, e.what()));
              }
            }
            return rows;
          });
        }
      }
      break;
    }
    case SweepMode::steady_state:
    case SweepMode::phase_diagram: {
      const bool by_beta = spec.mode == SweepMode::phase_diagram;
      for (double n : g.at("n_eff")) {
        for (double second : g.at(by_beta ? "beta" : "rabi")) {
          tasks.push_back([=] {
            const int ni = static_cast<int>(n);
            const ModelParams p = by_beta ? ModelParams::from_beta(ni, second)
                                          : ModelParams{ni, second, 0.0};
            const std::vector<double> params{n, p.rabi, p.beta()};
            try {
              const auto s = steady_state(p);
              SweepRow row;
              row.params = params;
              row.values = ladder_values(s, p.rabi);
              row.values.push_back(max_abs(liouvillian_rhs(s, p)));
              return std::vector<SweepRow>{row};
            } catch (const std::exception& e) {
              return std::vector<SweepRow>{failed_row(params, n_values, e.what())};
            }
          });
        }
      }
      break;
    }
    case SweepMode::screening_curve: {
      for (double n : g.at("n_atoms")) {
        for (double beta : g.at("beta")) {
          tasks.push_back([=] {
            try {
              const auto sol = solve_x(beta, n);
              const double asym = beta >= 1.0
                                      ? std::sqrt(beta * beta - 1.0)
                                      : std::sqrt(2.0) / n * beta / std::sqrt(1.0 - beta * beta);
              SweepRow row;
              row.params = {n, beta};
              row.values = {sol.x, asym, 0.5 * sol.x * n * kGamma,
                            sol.branch == ScreeningBranch::above_threshold ? 1.0 : 0.0,
                            std::abs(screening_residual(sol.x, beta, n))};
              return std::vector<SweepRow>{row};
            } catch (const std::exception& e) {
              return std::vector<SweepRow>{failed_row({n, beta}, n_values, e.what())};
            }
          });
        }
      }
      break;
    }
    case SweepMode::cooperativity: {
      for (double ax : g.at("ell_ax")) {
        for (double rad : g.at("ell_rad")) {
          tasks.push_back([=] {
            try {
              const CloudGeometry geom{ax, rad, {1.0, 0.0, 0.0}};
              const auto p = coherent_power(geom, std::min(tol, 1e-8));
              const double mu = p.value / kDipolePower;
              SweepRow row;
              row.params = {ax, rad};
              row.values = {mu, small_angle_mu(ax), p.error / p.value};
              return std::vector<SweepRow>{row};
            } catch (const std::exception& e) {
              return std::vector<SweepRow>{failed_row({ax, rad}, n_values, e.what())};
            }
          });
        }
      }
      break;
    }
    case SweepMode::omega_eff_fit: {
      const auto times = time_axis(spec);
      const double window = spec.effective_window();
      for (double n : g.at("n_eff")) {
        for (double rabi : g.at("rabi")) {
          tasks.push_back([=] {
            const ModelParams p{static_cast<int>(n), rabi, 0.0};
            const std::vector<double> params{n, rabi, p.beta()};
            try {
              const auto series = evolve(DickeLadderState::ground(p.n_atoms), p,
                                         times, tol);
              TimeTrace ne{{}, {}, TraceKind::population};
              TimeTrace sz{{}, {}, TraceKind::population};
              TimeTrace gsr{{}, {}, TraceKind::emission_rate};
              for (const auto& ts : series) {
                const auto o = observables(ts.state);
                ne.times.push_back(ts.t);
                ne.values.push_back(o.n_e);
                sz.times.push_back(ts.t);
                sz.values.push_back(o.s_z);
                gsr.times.push_back(ts.t);
                gsr.values.push_back(o.gamma_sr);
              }
              const FitResult fit = fit_omega_eff(ne);
              const auto st = steady_state(p);
              SweepRow row;
              row.params = params;
              row.values = {fit.omega_eff,
                            fit.decay,
                            std::abs(omega_eff(rabi, observables(st).dipole)),
                            steady_window_average(sz, window),
                            steady_window_average(gsr, window),
                            fit.residual_rms,
                            std::sqrt(fit.covariance(0, 0))};
              return std::vector<SweepRow>{row};
            } catch (const std::exception& e) {
              return std::vector<SweepRow>{failed_row(params, n_values, e.what())};
            }
          });
        }
      }
      break;
    }
    case SweepMode::power_law_fit: {
      const auto ns = g.at("n_eff");
      const auto method = spec.alpha_method;
      for (double rabi : g.at("rabi")) {
        tasks.push_back([=] {
          try {
            std::vector<double> y;
            for (double n : ns) {
              y.push_back(observables(steady_state({static_cast<int>(n), rabi, 0.0})).gamma_sr);
            }
            const auto fit = fit_power_law(ns, y, method);
            SweepRow row;
            row.params = {rabi};
            row.values = {fit.alpha, fit.prefactor, fit.alpha_stderr,
                          static_cast<double>(ns.size())};
            return std::vector<SweepRow>{row};
          } catch (const std::exception& e) {
            return std::vector<SweepRow>{failed_row({rabi}, n_values, e.what())};
          }
        });
      }
      break;
    }
  }
  return tasks;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string sanitize(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ';';
  }
  return s;
}

}  // namespace

std::string to_string(SweepMode mode) { return info_of(mode).name; }

SweepMode sweep_mode_from_string(const std::string& name) {
  for (const auto& m : mode_table()) {
    if (name == m.name) return m.mode;
  }
  throw ConfigError("unknown mode '" + name + "'");
}

double ns_to_gamma_units(double ns, double gamma_mhz) {
  if (!(gamma_mhz > 0.0)) throw ConfigError("gamma_mhz must be > 0");
  return ns * 1e-3 * gamma_mhz;
}

double SweepSpec::effective_t_final() const {
  if (t_final_ns) return ns_to_gamma_units(*t_final_ns, gamma_mhz);
  if (t_final) return *t_final;
  return ns_to_gamma_units(150.0, gamma_mhz);
}

double SweepSpec::effective_window() const {
  if (window_ns) return ns_to_gamma_units(*window_ns, gamma_mhz);
  if (window) return *window;
  return ns_to_gamma_units(50.0, gamma_mhz);
}

std::vector<std::string> observable_names(SweepMode mode) {
  return info_of(mode).observables;
}

void SweepSpec::validate() const {
  const ModeInfo& info = info_of(mode);
  std::set<std::string> allowed(info.required_grids.begin(), info.required_grids.end());
  if (mode == SweepMode::dynamics) allowed.insert("t");
  for (const auto& name : info.required_grids) {
    auto it = grids.find(name);
    if (it == grids.end() || it->second.empty()) {
      throw ConfigError("mode " + std::string(info.name) + " needs a non-empty grid '" + name + "'");
    }
  }
  for (const auto& [name, values] : grids) {
    if (!allowed.count(name)) {
      throw ConfigError("grid '" + name + "' is not used by mode " + info.name);
    }
    for (double v : values) {
      if (!std::isfinite(v)) throw ConfigError("grid '" + name + "' has a non-finite value");
    }
  }
  for (const auto& o : outputs) {
    if (std::find(info.observables.begin(), info.observables.end(), o) == info.observables.end()) {
      throw ConfigError("unknown output '" + o + "' for mode " + info.name);
    }
  }
  if (!(tol > 0.0) || tol > 1e-2) throw ConfigError("tol must be in (0, 1e-2]");
  if (!(gamma_mhz > 0.0)) throw ConfigError("gamma_mhz must be > 0");
  if (threads < 1) throw ConfigError("threads must be >= 1");

  switch (mode) {
    case SweepMode::dynamics:
    case SweepMode::steady_state:
    case SweepMode::omega_eff_fit:
    case SweepMode::power_law_fit:
      require_positive_integers(*this, "n_eff");
      require_positive(*this, "rabi", true);
      break;
    case SweepMode::phase_diagram:
      require_positive_integers(*this, "n_eff");
      require_positive(*this, "beta", true);
      break;
    case SweepMode::screening_curve:
      for (double v : grids.at("n_atoms")) {
        if (!(v >= 1.0)) throw ConfigError("grid 'n_atoms' must hold values >= 1");
      }
      require_positive(*this, "beta");
      break;
    case SweepMode::cooperativity:
      require_positive(*this, "ell_ax");
      require_positive(*this, "ell_rad");
      break;
  }
  if (mode == SweepMode::dynamics || mode == SweepMode::omega_eff_fit) {
    if (samples < 2) throw ConfigError("samples must be >= 2");
    if (!(effective_t_final() > 0.0)) throw ConfigError("t_final must be > 0");
    if (auto it = grids.find("t"); it != grids.end()) {
      const auto& t = it->second;
      for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] < 0.0 || (k > 0 && !(t[k] > t[k - 1]))) {
          throw ConfigError("grid 't' must be non-negative and strictly increasing");
        }
      }
    }
  }
  if (mode == SweepMode::omega_eff_fit) {
    const double w = effective_window();
    if (!(w > 0.0) || w > effective_t_final()) {
      throw ConfigError("window must lie in (0, t_final]");
    }
  }
  if (mode == SweepMode::power_law_fit && grids.at("n_eff").size() < 3) {
    throw ConfigError("power_law_fit needs at least 3 n_eff values");
  }
}

SweepSpec parse_spec(const json& doc) {
  if (!doc.is_object()) throw ConfigError("spec must be a JSON object");
  static const std::set<std::string> known = {
      "schema_version", "mode", "grids", "outputs", "output_path", "tol",
      "gamma_mhz", "threads", "time", "window", "window_ns", "alpha_method"};
  for (const auto& [key, _] : doc.items()) {
    if (!known.count(key)) throw ConfigError("unknown spec field '" + key + "'");
  }
  try {
    const int version = doc.value("schema_version", kSpecSchemaVersion);
    if (version != kSpecSchemaVersion) {
      throw ConfigError("unsupported schema_version " + std::to_string(version));
    }
    SweepSpec spec;
    if (!doc.contains("mode") || !doc.at("mode").is_string()) {
      throw ConfigError("spec needs exactly one string 'mode'");
    }
    spec.mode = sweep_mode_from_string(doc.at("mode").get<std::string>());
    if (doc.contains("grids")) {
      if (!doc.at("grids").is_object()) throw ConfigError("'grids' must be an object");
      for (const auto& [name, g] : doc.at("grids").items()) {
        spec.grids[name] = parse_grid(name, g);
      }
    }
    if (doc.contains("outputs")) spec.outputs = doc.at("outputs").get<std::vector<std::string>>();
    spec.output_path = doc.value("output_path", std::string{});
    spec.tol = doc.value("tol", spec.tol);
    spec.gamma_mhz = doc.value("gamma_mhz", spec.gamma_mhz);
    spec.threads = doc.value("threads", spec.threads);
    if (doc.contains("time")) {
      const auto& t = doc.at("time");
      if (!t.is_object()) throw ConfigError("'time' must be an object");
      if (t.contains("t_final")) spec.t_final = t.at("t_final").get<double>();
      if (t.contains("t_final_ns")) spec.t_final_ns = t.at("t_final_ns").get<double>();
      spec.samples = t.value("samples", spec.samples);
    }
    if (doc.contains("window")) spec.window = doc.at("window").get<double>();
    if (doc.contains("window_ns")) spec.window_ns = doc.at("window_ns").get<double>();
    if (doc.contains("alpha_method")) {
      const auto m = doc.at("alpha_method").get<std::string>();
      if (m == "least_squares") {
        spec.alpha_method = PowerLawMethod::least_squares;
      } else if (m == "log_linear") {
        spec.alpha_method = PowerLawMethod::log_linear;
      } else {
        throw ConfigError("alpha_method must be least_squares or log_linear");
      }
    }
    spec.validate();
    return spec;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed spec: ") + e.what());
  }
}

SweepSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_spec(doc);
}

SweepSpec default_spec(SweepMode mode) {
  json doc = {{"schema_version", kSpecSchemaVersion}, {"mode", to_string(mode)}};
  switch (mode) {
    case SweepMode::dynamics:
      doc["grids"] = {{"n_eff", {1, 3, 6, 9}}, {"rabi", {4.5}}};
      doc["time"] = {{"t_final_ns", 150.0}, {"samples", 151}};
      break;
    case SweepMode::steady_state:
      doc["grids"] = {{"n_eff", {2, 5, 10, 15}}, {"rabi", {{"start", 0.5}, {"stop", 15.0}, {"num", 30}}}};
      break;
    case SweepMode::phase_diagram:
      doc["grids"] = {{"n_eff", {3, 7, 10}}, {"beta", {{"start", 0.1}, {"stop", 3.0}, {"num", 30}}}};
      break;
    case SweepMode::screening_curve:
      doc["grids"] = {{"n_atoms", {20}}, {"beta", {{"start", 0.05}, {"stop", 3.0}, {"num", 60}}}};
      break;
    case SweepMode::cooperativity:
      doc["grids"] = {{"ell_ax", {22.5}}, {"ell_rad", {0.5}}};
      break;
    case SweepMode::omega_eff_fit:
      doc["grids"] = {{"n_eff", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}}, {"rabi", {4.5}}};
      doc["time"] = {{"t_final_ns", 150.0}, {"samples", 151}};
      doc["window_ns"] = 50.0;
      break;
    case SweepMode::power_law_fit:
      doc["grids"] = {{"n_eff", {2, 3, 4, 5, 6, 7, 8, 9, 10}}, {"rabi", {2.5, 10.0}}};
      break;
  }
  return parse_spec(doc);
}

json to_json(const SweepSpec& spec) {
  json doc;
  doc["schema_version"] = kSpecSchemaVersion;
  doc["mode"] = to_string(spec.mode);
  doc["grids"] = json::object();
  for (const auto& [name, values] : spec.grids) doc["grids"][name] = values;
  doc["outputs"] = spec.outputs;
  doc["tol"] = spec.tol;
  doc["gamma_mhz"] = spec.gamma_mhz;
  json time = {{"samples", spec.samples}};
  if (spec.t_final) time["t_final"] = *spec.t_final;
  if (spec.t_final_ns) time["t_final_ns"] = *spec.t_final_ns;
  doc["time"] = time;
  if (spec.window) doc["window"] = *spec.window;
  if (spec.window_ns) doc["window_ns"] = *spec.window_ns;
  doc["alpha_method"] = spec.alpha_method == PowerLawMethod::least_squares
                            ? "least_squares"
                            : "log_linear";
  return doc;
}

std::size_t SweepResult::failed_rows() const {
  return static_cast<std::size_t>(std::count_if(
      rows.begin(), rows.end(), [](const SweepRow& r) { return r.status != "ok"; }));
}

SweepResult run(const SweepSpec& spec) {
  spec.validate();
  const ModeInfo& info = info_of(spec.mode);
  const std::size_t n_values = info.observables.size() + info.diagnostics.size();
  auto tasks = make_tasks(spec, n_values);

  std::vector<std::vector<SweepRow>> results(tasks.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t k = next++; k < tasks.size(); k = next++) {
      results[k] = tasks[k]();
    }
  };
  const int n_threads = std::max(1, std::min<int>(spec.threads, static_cast<int>(tasks.size())));
  {
    std::vector<std::jthread> pool;
    for (int k = 1; k < n_threads; ++k) pool.emplace_back(worker);
    worker();
  }

  // Select the requested observables; diagnostics are always kept.
  std::vector<std::string> wanted = spec.outputs.empty() ? info.observables : spec.outputs;
  std::vector<std::size_t> keep;
  for (const auto& name : wanted) {
    keep.push_back(static_cast<std::size_t>(
        std::find(info.observables.begin(), info.observables.end(), name) -
        info.observables.begin()));
  }
  for (std::size_t k = 0; k < info.diagnostics.size(); ++k) {
    keep.push_back(info.observables.size() + k);
  }

  SweepResult out;
  out.param_columns = info.param_columns;
  out.value_columns = wanted;
  out.value_columns.insert(out.value_columns.end(), info.diagnostics.begin(),
                           info.diagnostics.end());
  for (auto& chunk : results) {
    for (auto& row : chunk) {
      SweepRow r;
      r.params = std::move(row.params);
      for (std::size_t idx : keep) r.values.push_back(row.values.at(idx));
      r.status = std::move(row.status);
      out.rows.push_back(std::move(r));
    }
  }

  const json spec_doc = to_json(spec);
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016" PRIx64, fnv1a(spec_doc.dump()));
  out.metadata = {{"spec_hash", hash},
                  {"code_version", DDM_VERSION},
                  {"timestamp", nullptr},
                  {"mode", info.name},
                  {"spec", spec_doc},
                  {"rows", out.rows.size()}};
  return out;
}

void write_csv(const SweepResult& result, std::ostream& out) {
  out << "# " << result.metadata.dump() << '\n';
  bool first = true;
  const auto sep = [&] {
    if (!first) out << ',';
    first = false;
  };
  for (const auto& c : result.param_columns) { sep(); out << c; }
  for (const auto& c : result.value_columns) { sep(); out << c; }
  sep();
  out << "status\n";
  for (const auto& row : result.rows) {
    first = true;
    for (double v : row.params) { sep(); out << format_double(v); }
    for (double v : row.values) { sep(); out << format_double(v); }
    sep();
    out << sanitize(row.status) << '\n';
  }
}

double steady_window_average(const TimeTrace& trace, double window) {
  trace.validate();
  if (trace.times.empty()) throw DomainError("trace is empty");
  const double span = trace.times.back() - trace.times.front();
  if (!(window > 0.0) || window > span + 1e-12 * std::max(1.0, span)) {
    throw DomainError("window must lie in (0, trace span]");
  }
  const double start = trace.times.back() - window;
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < trace.times.size(); ++k) {
    if (trace.times[k] >= start - 1e-12 * std::max(1.0, std::abs(start))) {
      sum += trace.values[k];
      ++count;
    }
  }
  if (count == 0) throw DomainError("no samples inside the averaging window");
  return sum / static_cast<double>(count);
}

}  // namespace ddm
