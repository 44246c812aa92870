#include "ddm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <unsupported/Eigen/LevenbergMarquardt>
#include <unsupported/Eigen/NumericalDiff>

namespace ddm {

void TimeTrace::validate() const {
  if (times.size() != values.size()) {
    throw DomainError("trace times and values differ in length");
  }
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) {
      throw DomainError("trace times must be strictly increasing");
    }
  }
}

double obe_excited_population(double omega, double gamma, double t) {
  if (!(gamma > 0.0)) throw DomainError("gamma must be > 0");
  if (t <= 0.0 || omega == 0.0) return 0.0;
  const double w2 = omega * omega;
  const double n_inf = w2 / (gamma * gamma + 2.0 * w2);
  const double s = w2 - gamma * gamma / 16.0;  // squared oscillation frequency
  const double damp = 0.75 * gamma;

  double transient;
  if (std::abs(s) * t * t < 1e-8) {
    // Critically damped neighbourhood: expand in s.
    const double c = 1.0 - 0.5 * s * t * t;
    const double sinc = t * (1.0 - s * t * t / 6.0);
    transient = std::exp(-damp * t) * (c + damp * sinc);
  } else if (s > 0.0) {
    const double w = std::sqrt(s);
    transient = std::exp(-damp * t) *
                (std::cos(w * t) + damp / w * std::sin(w * t));
  } else {
    // w < damp always, so both exponents stay negative.
    const double w = std::sqrt(-s);
    const double ep = std::exp((w - damp) * t);
    const double em = std::exp((-w - damp) * t);
    transient = 0.5 * (ep + em) + 0.5 * damp / w * (ep - em);
  }
  return n_inf * (1.0 - transient);
}

namespace {

struct ResidualFunctor {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)> residuals;
  int n_inputs = 2;
  int n_values = 0;

  int inputs() const { return n_inputs; }
  int values() const { return n_values; }
  int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& r) const {
    residuals(p, r);
    return 0;
  }
};

struct LmOutcome {
  Eigen::VectorXd params;
  double ssr = std::numeric_limits<double>::infinity();
  bool converged = false;
};

struct CentralDiffFunctor : Eigen::NumericalDiff<ResidualFunctor, Eigen::Central> {
  using QRSolver = Eigen::ColPivHouseholderQR<Eigen::MatrixXd>;
  using Eigen::NumericalDiff<ResidualFunctor, Eigen::Central>::NumericalDiff;
};

LmOutcome run_lm(const ResidualFunctor& f, Eigen::VectorXd start) {
  CentralDiffFunctor nd(f);
  Eigen::LevenbergMarquardt<CentralDiffFunctor> lm(nd);
  lm.setMaxfev(4000);
  lm.setXtol(1e-15);
  lm.setFtol(1e-15);
  lm.setGtol(0.0);
  const auto status = lm.minimize(start);

  LmOutcome out;
  out.params = start;
  Eigen::VectorXd r(f.values());
  f(start, r);
  out.ssr = r.squaredNorm();
  out.converged = std::isfinite(out.ssr) &&
                  status != Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation &&
                  status != Eigen::LevenbergMarquardtSpace::ImproperInputParameters;
  return out;
}

// Central-difference Jacobian of the residuals at p.
Eigen::MatrixXd jacobian(const ResidualFunctor& f, const Eigen::VectorXd& p) {
  Eigen::MatrixXd J(f.values(), p.size());
  Eigen::VectorXd rp(f.values()), rm(f.values());
  for (int k = 0; k < p.size(); ++k) {
    const double h = 1e-6 * std::max(1.0, std::abs(p(k)));
    Eigen::VectorXd pp = p, pm = p;
    pp(k) += h;
    pm(k) -= h;
    f(pp, rp);
    f(pm, rm);
    J.col(k) = (rp - rm) / (2.0 * h);
  }
  return J;
}

Eigen::Matrix2d covariance_of(const ResidualFunctor& f, const Eigen::VectorXd& p,
                              double ssr) {
  const int dof = f.values() - 2;
  if (dof <= 0 || ssr == 0.0) return Eigen::Matrix2d::Zero();
  const Eigen::MatrixXd J = jacobian(f, p);
  const Eigen::Matrix2d jtj = (J.transpose() * J);
  Eigen::Matrix2d cov = (ssr / dof) * jtj.completeOrthogonalDecomposition().pseudoInverse();
  return 0.5 * (cov + cov.transpose());
}

double first_peak_time(const TimeTrace& tr) {
  const auto& v = tr.values;
  for (std::size_t k = 1; k + 1 < v.size(); ++k) {
    if (v[k] > v[k - 1] && v[k] >= v[k + 1]) return tr.times[k];
  }
  return 0.0;
}

}  // namespace

FitResult fit_omega_eff(const TimeTrace& trace) {
  trace.validate();
  if (trace.kind != TraceKind::population) {
    throw DomainError("fit_omega_eff needs a population trace");
  }
  if (trace.times.size() < 10) throw DomainError("need at least 10 samples");
  if (trace.times.back() - trace.times.front() < 1.0) {
    throw DomainError("trace must span at least one decay time 1/Gamma");
  }
  const auto [lo, hi] = std::minmax_element(trace.values.begin(), trace.values.end());
  if (*hi - *lo < 1e-6) {
    throw UnderdeterminedFit("trace is flat; omega and decay are not identifiable");
  }

  ResidualFunctor f;
  f.n_values = static_cast<int>(trace.times.size());
  f.residuals = [&trace](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
    const double omega = std::abs(p(0));
    const double gamma = std::max(std::abs(p(1)), 1e-12);
    for (std::size_t k = 0; k < trace.times.size(); ++k) {
      r(static_cast<Eigen::Index>(k)) =
          obe_excited_population(omega, gamma, trace.times[k]) - trace.values[k];
    }
  };

  double omega0;
  if (const double tp = first_peak_time(trace); tp > 0.0) {
    omega0 = std::numbers::pi / tp;
  } else {
    const double plateau = std::clamp(trace.values.back(), 1e-6, 0.49);
    omega0 = std::sqrt(plateau / (1.0 - 2.0 * plateau));
  }

  LmOutcome best;
  for (double gamma0 : {1.0, 2.0, 4.0, 8.0}) {
    Eigen::VectorXd start(2);
    start << omega0 * gamma0, gamma0;
    LmOutcome o = run_lm(f, start);
    const bool better = o.converged != best.converged ? o.converged
                                                      : o.ssr < best.ssr;
    if (better) best = std::move(o);
  }

  FitResult res;
  res.omega_eff = std::abs(best.params(0));
  res.decay = std::abs(best.params(1));
  res.residual_rms = std::sqrt(best.ssr / f.n_values);
  Eigen::VectorXd p(2);
  p << res.omega_eff, res.decay;
  res.covariance = covariance_of(f, p, best.ssr);
  if (!best.converged) {
    throw FitNonConvergence("OBE fit did not converge", res);
  }
  return res;
}

PowerLawFit fit_power_law(std::span<const double> n_values,
                          std::span<const double> y_values,
                          PowerLawMethod method) {
  if (n_values.size() != y_values.size()) {
    throw DomainError("n and y differ in length");
  }
  const std::size_t m = n_values.size();
  if (m < 3) throw DomainError("power-law fit needs at least 3 points");
  for (std::size_t k = 0; k < m; ++k) {
    if (!(n_values[k] > 0.0) || !(y_values[k] > 0.0)) {
      throw DomainError("power-law fit needs positive data");
    }
  }

  // Ordinary least squares on the logs.
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    mx += std::log(n_values[k]);
    my += std::log(y_values[k]);
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double dx = std::log(n_values[k]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y_values[k]) - my);
  }
  if (sxx == 0.0) throw UnderdeterminedFit("all n values coincide");
  PowerLawFit log_fit;
  log_fit.alpha = sxy / sxx;
  log_fit.prefactor = std::exp(my - log_fit.alpha * mx);
  double ssr_log = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double e = std::log(y_values[k]) - (my + log_fit.alpha * (std::log(n_values[k]) - mx));
    ssr_log += e * e;
  }
  log_fit.alpha_stderr = std::sqrt(ssr_log / (m - 2) / sxx);
  if (method == PowerLawMethod::log_linear) return log_fit;

  ResidualFunctor f;
  f.n_values = static_cast<int>(m);
  f.residuals = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
    for (std::size_t k = 0; k < m; ++k) {
      r(static_cast<Eigen::Index>(k)) =
          p(0) * std::pow(n_values[k], p(1)) - y_values[k];
    }
  };
  Eigen::VectorXd start(2);
  start << log_fit.prefactor, log_fit.alpha;
  const LmOutcome o = run_lm(f, start);
  if (!o.converged) {
    throw FitError("power-law least squares did not converge");
  }
  PowerLawFit out;
  out.prefactor = o.params(0);
  out.alpha = o.params(1);
  out.alpha_stderr = std::sqrt(std::max(0.0, covariance_of(f, o.params, o.ssr)(1, 1)));
  return out;
}

}  // namespace ddm
