#include "ddm/meanfield.hpp"

#include <cmath>
#include <span>

#include "ddm/detail/integrate.hpp"
#include "ddm/errors.hpp"

namespace ddm {

double MeanFieldState::spin_length_excess() const {
  const double r = 0.5 * n_atoms;
  return std::norm(dipole) + sz * sz - r * r;
}

MeanFieldDerivative mf_rhs(const MeanFieldState& s, double rabi) {
  const cplx i_omega{0.0, rabi};
  const double quarter_n2 = 0.25 * s.n_atoms * s.n_atoms;
  MeanFieldDerivative d;
  d.d_dipole = (i_omega + kGamma * s.dipole) * s.sz;
  d.d_sz = (i_omega * s.dipole).real() - kGamma * (quarter_n2 - s.sz * s.sz);
  return d;
}

MeanFieldState mf_steady(double beta, double n_atoms) {
  if (!(beta > 0.0)) throw DomainError("beta must be > 0");
  if (!(n_atoms > 0.0)) throw DomainError("n_atoms must be > 0");
  const double half_n = 0.5 * n_atoms;
  MeanFieldState s;
  s.n_atoms = n_atoms;
  if (beta < 1.0) {
    s.dipole = cplx{0.0, -beta * half_n};
    s.sz = -half_n * std::sqrt(1.0 - beta * beta);
  } else {
    s.dipole = cplx{0.0, -half_n / beta};
    s.sz = 0.0;
  }
  return s;
}

cplx omega_eff(double omega, cplx dipole) {
  return omega - cplx{0.0, kGamma} * dipole;
}

double critical_drive(double n_eff) {
  if (!(n_eff > 0.0)) throw DomainError("n_eff must be > 0");
  return 0.5 * n_eff * kGamma;
}

double screening_residual(double x, double beta, double n_atoms) {
  const double a = 0.5 * n_atoms * n_atoms * x * x;
  return x * x + a / (1.0 + a) - beta * beta;
}

ScreeningSolution solve_x(double beta, double n_atoms) {
  if (!(beta > 0.0)) throw DomainError("beta must be > 0");
  if (!(n_atoms >= 1.0)) throw DomainError("n_atoms must be >= 1");

  // f(0) = -beta^2 < 0, f(beta) > 0, and f is strictly increasing on x >= 0.
  const auto f = [&](double x) { return screening_residual(x, beta, n_atoms); };
  const auto df = [&](double x) {
    const double a = 0.5 * n_atoms * n_atoms * x * x;
    return 2.0 * x + n_atoms * n_atoms * x / ((1.0 + a) * (1.0 + a));
  };

  double lo = 0.0;
  double hi = beta;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 8; ++it) {
    const double slope = df(x);
    if (!(slope > 0.0)) break;
    const double next = x - f(x) / slope;
    if (!(next >= 0.0 && next <= beta)) break;
    if (std::abs(f(next)) > std::abs(f(x))) break;
    x = next;
  }

  ScreeningSolution sol;
  sol.beta = beta;
  sol.x = x;
  sol.branch = beta < 1.0 ? ScreeningBranch::below_threshold
                          : ScreeningBranch::above_threshold;
  return sol;
}

std::vector<TimedMeanField> mf_evolve(const MeanFieldState& state0,
                                      double rabi, double t_final, double tol,
                                      std::size_t n_samples) {
  if (!(t_final > 0.0)) throw DomainError("t_final must be > 0");
  if (!(tol > 0.0)) throw DomainError("tol must be > 0");
  if (n_samples < 2) throw DomainError("need at least two samples");
  if (!(rabi >= 0.0)) throw DomainError("rabi must be >= 0");

  const double n = state0.n_atoms;
  auto system = [rabi, n](const detail::RealState& x, detail::RealState& dxdt,
                          double) {
    const MeanFieldState s{cplx{x(0), x(1)}, x(2), n};
    const MeanFieldDerivative d = mf_rhs(s, rabi);
    dxdt.resize(3);
    dxdt << d.d_dipole.real(), d.d_dipole.imag(), d.d_sz;
  };

  std::vector<double> times(n_samples);
  for (std::size_t k = 0; k < n_samples; ++k) {
    times[k] = t_final * static_cast<double>(k) / (n_samples - 1);
  }
  times.back() = t_final;

  detail::RealState x(3);
  x << state0.dipole.real(), state0.dipole.imag(), state0.sz;
  std::vector<TimedMeanField> out;
  out.reserve(n_samples);
  detail::integrate_to_samples(
      system, x, std::span<const double>(times), tol,
      [&](double t, const detail::RealState& xs) {
        out.push_back({t, MeanFieldState{cplx{xs(0), xs(1)}, xs(2), n}});
      });
  return out;
}

}  // namespace ddm
