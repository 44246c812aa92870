#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "ddm/errors.hpp"

namespace ddm {

enum class TraceKind { population, emission_rate };

struct TimeTrace {
  std::vector<double> times;   // strictly increasing, units of 1/Gamma
  std::vector<double> values;
  TraceKind kind = TraceKind::population;

  /// Throws DomainError on length mismatch or non-increasing times.
  void validate() const;
};

struct FitResult {
  double omega_eff = 0.0;
  double decay = 0.0;
  double residual_rms = 0.0;
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();
};

// Thrown when the least-squares iteration hits its evaluation budget.
class FitNonConvergence : public FitError {
 public:
  FitNonConvergence(const std::string& what, FitResult best)
      : FitError(what), best_(best) {}
  const FitResult& best_iterate() const noexcept { return best_; }

 private:
  FitResult best_;
};

/// Excited-state population of a resonantly driven two-level atom starting
/// in |g>:
///   n_inf * [1 - exp(-3 gamma t/4) (cos W t + 3 gamma/(4 W) sin W t)],
///   W = sqrt(omega^2 - gamma^2/16), n_inf = omega^2/(gamma^2 + 2 omega^2).
/// Below omega = gamma/4 the trig functions continue to hyperbolic ones.
double obe_excited_population(double omega, double gamma, double t);

/// Least-squares fit of obe_excited_population to an n_e(t) trace with the
/// Rabi frequency and decay rate free. The start value for omega is pi over
/// the first peak time and gamma starts at Gamma; a few larger gamma starts
/// are also tried and the lowest residual wins.
FitResult fit_omega_eff(const TimeTrace& trace);

enum class PowerLawMethod {
  least_squares,  // minimize sum (y - c n^alpha)^2 directly
  log_linear,     // ordinary regression of log y on log n
};

struct PowerLawFit {
  double alpha = 0.0;
  double prefactor = 0.0;
  double alpha_stderr = 0.0;
};

/// y ~ prefactor * n^alpha. Needs >= 3 positive points.
PowerLawFit fit_power_law(std::span<const double> n_values,
                          std::span<const double> y_values,
                          PowerLawMethod method = PowerLawMethod::least_squares);

}  // namespace ddm
