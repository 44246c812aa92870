#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <boost/numeric/odeint/external/eigen/eigen.hpp>
#include <cmath>
#include <span>
#include <string>

#include "ddm/errors.hpp"

namespace ddm::detail {

namespace odeint = boost::numeric::odeint;

using RealState = Eigen::VectorXd;

// Advances `x` from t = 0 through every entry of `times` with a controlled
// Dormand-Prince 5(4) stepper (absolute and relative tolerance `tol`),
// calling on_sample(t, x) as each sample time is reached. Steps are clipped
// so the integrator lands exactly on the sample times.
template <class System, class OnSample>
void integrate_to_samples(System&& system, RealState& x,
                          std::span<const double> times, double tol,
                          OnSample&& on_sample) {
  using Stepper = odeint::runge_kutta_dopri5<RealState, double, RealState,
                                             double,
                                             odeint::vector_space_algebra>;
  auto stepper = odeint::make_controlled(tol, tol, Stepper());

  constexpr long kMaxSteps = 50'000'000;
  double t = 0.0;
  double dt = 1e-3;
  long steps = 0;
  for (double target : times) {
    if (!(target >= t)) {
      throw DomainError("sample times must be non-negative and increasing");
    }
    while (target - t > 1e-13 * std::max(1.0, target)) {
      const double remaining = target - t;
      const bool clipped = dt >= remaining;
      double h = clipped ? remaining : dt;
      double t_try = t;
      if (stepper.try_step(system, x, t_try, h) == odeint::success) {
        if (!x.allFinite()) {
          throw NonConvergence("state became non-finite", t);
        }
        t = t_try;
        if (!clipped) dt = h;
        if (++steps > kMaxSteps) {
          throw NonConvergence("step budget exhausted", t);
        }
      } else {
        dt = h;
        if (dt < 1e-14 * std::max(1.0, t)) {
          throw NonConvergence(
              "step size underflow at t = " + std::to_string(t), t);
        }
      }
    }
    t = target;
    on_sample(target, x);
  }
}

}  // namespace ddm::detail
