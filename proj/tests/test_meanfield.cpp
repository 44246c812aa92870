#include <doctest.h>

#include <cmath>
#include <vector>

#include "ddm/errors.hpp"
#include "ddm/ladder.hpp"
#include "ddm/meanfield.hpp"
#include "oracles.hpp"

using namespace ddm;

TEST_CASE("mf_rhs fixed points") {
  const cplx i{0.0, 1.0};
  for (double omega : {0.5, 3.0}) {
    for (double sz : {-4.0, -1.0, 0.0, 2.0}) {
      const auto d = mf_rhs({-i * omega, sz, 10.0}, omega);
      CHECK(std::abs(d.d_dipole) < 1e-15);
    }
  }
  for (double beta : {1.5, 2.0, 7.0}) {
    const double n = 10.0;
    const double omega = 0.5 * beta * n;
    const auto d = mf_rhs({-i * n / (2.0 * beta), 0.0, n}, omega);
    CHECK(std::abs(d.d_dipole) < 1e-14);
    CHECK(std::abs(d.d_sz) < 1e-14);
  }
  const auto d = mf_rhs(MeanFieldState::ground(10.0), 0.0);
  CHECK(d.d_dipole == cplx{});
  CHECK(d.d_sz == 0.0);
}

TEST_CASE("mf_steady branches") {
  const auto at1 = mf_steady(1.0, 12.0);
  CHECK(std::abs(at1.dipole) == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(at1.sz == 0.0);

  const auto m = mf_steady(0.6, 10.0);
  CHECK(m.sz == doctest::Approx(-4.0).epsilon(1e-14));
  CHECK(std::abs(m.dipole) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(m.dipole.real() == 0.0);

  const auto s = mf_steady(2.0, 10.0);
  CHECK(std::abs(s.dipole - cplx{0.0, -2.5}) < 1e-15);
  CHECK(s.sz == 0.0);

  CHECK_THROWS_AS(mf_steady(0.0, 10.0), DomainError);
}

TEST_CASE("mf_steady zeroes mf_rhs on both branches") {
  for (double n : {3.0, 10.0, 250.5}) {
    for (double beta : {0.05, 0.3, 0.9, 0.999, 1.0, 1.2, 4.0}) {
      const auto s = mf_steady(beta, n);
      const auto d = mf_rhs(s, 0.5 * beta * n);
      const double scale = n * n;
      CHECK(std::abs(d.d_dipole) < 1e-14 * scale);
      CHECK(std::abs(d.d_sz) < 1e-14 * scale);
      // On the Bloch sphere below threshold, strictly inside above it.
      if (beta <= 1.0) {
        CHECK(std::abs(s.spin_length_excess()) < 1e-12 * scale);
      } else {
        CHECK(s.spin_length_excess() < 0.0);
      }
    }
  }
}

TEST_CASE("Bloch angle on the magnetized branch") {
  for (double beta : {0.1, 0.5, 0.8, 0.95}) {
    const auto s = mf_steady(beta, 20.0);
    CHECK(std::abs(s.dipole) / std::abs(s.sz) ==
          doctest::Approx(beta / std::sqrt(1.0 - beta * beta)).epsilon(1e-13));
  }
}

TEST_CASE("omega_eff and critical_drive") {
  const cplx i{0.0, 1.0};
  CHECK(std::abs(omega_eff(3.0, -i * 3.0)) < 1e-15);
  CHECK(omega_eff(3.0, 0.0) == cplx{3.0, 0.0});
  CHECK(critical_drive(10.0) == 5.0);
  CHECK(critical_drive(7.0) == 3.5);
  const double n = 13.0;
  CHECK(ModelParams::from_beta(13, 1.0).rabi == critical_drive(n));
  CHECK_THROWS_AS(critical_drive(0.0), DomainError);

  // Above threshold the mean-field screened drive is (N/2)(beta - 1/beta)
  // while the screening equation gives (N/2)sqrt(beta^2 - 1) at large N.
  // The two approximations meet at beta = 1 and as beta grows.
  const double big = 1e6;
  double last_gap = 1.0;
  for (double beta : {1.0, 1.5, 3.0, 20.0}) {
    const cplx w = omega_eff(0.5 * beta * big, mf_steady(beta, big).dipole);
    const double from_x = 0.5 * solve_x(beta, big).x * big;
    CHECK(w.imag() == 0.0);
    CHECK(w.real() == doctest::Approx(0.5 * big * (beta - 1.0 / beta)).epsilon(1e-12));
    if (beta == 1.0) {
      CHECK(std::abs(w) < 1e-9 * big);
      CHECK(from_x < 1e-3 * big);
      continue;
    }
    const double gap = std::abs(w.real() / from_x - 1.0);
    CHECK(gap < last_gap);
    last_gap = gap;
  }
  CHECK(last_gap < 2e-3);
  const cplx w10 = omega_eff(10.0, mf_steady(2.0, 10.0).dipole);
  CHECK(w10.real() == doctest::Approx(10.0 - 2.5).epsilon(1e-15));
}

TEST_CASE("solve_x against an independent bisection") {
  const double ref = oracles::bisect(
      [](double x) {
        const double y = 200.0 * x * x;  // N^2 x^2 / 2 at N = 20
        return x * x + y / (1.0 + y) - 4.0;
      },
      0.0, 2.0, 1e-13);
  const auto s = solve_x(2.0, 20.0);
  CHECK(std::abs(s.x - ref) < 1e-12);
  CHECK(s.x == doctest::Approx(1.7326).epsilon(1e-4));
  CHECK(s.branch == ScreeningBranch::above_threshold);
  CHECK(solve_x(1.0, 20.0).branch == ScreeningBranch::above_threshold);
  CHECK(solve_x(0.99, 20.0).branch == ScreeningBranch::below_threshold);
}

TEST_CASE("solve_x limits") {
  const auto small = solve_x(0.5, 1000.0);
  CHECK(std::abs(screening_residual(small.x, 0.5, 1000.0)) < 1e-10);
  CHECK(small.x == doctest::Approx(std::sqrt(2.0) * 0.5 / (1000.0 * std::sqrt(0.75))).epsilon(1e-5));
  CHECK(std::abs(solve_x(1.5, 1e6).x - std::sqrt(1.25)) < 1e-5);
  const double ratio = solve_x(0.5, 1e3).x / solve_x(0.5, 1e4).x;
  CHECK(std::abs(ratio - 10.0) < 0.1);
  CHECK_THROWS_AS(solve_x(0.0, 10.0), DomainError);
  CHECK_THROWS_AS(solve_x(1.0, 0.5), DomainError);
}

TEST_CASE("solve_x residual and monotonicity over a grid") {
  for (double n : {5.0, 20.0, 100.0, 1e6}) {
    double last = -1.0;
    for (int k = 0; k < 50; ++k) {
      const double beta = 0.05 + (5.0 - 0.05) * k / 49.0;
      const auto s = solve_x(beta, n);
      CHECK(std::abs(screening_residual(s.x, beta, n)) < 1e-12);
      CHECK(s.x >= 0.0);
      CHECK(s.x <= beta);
      CHECK(s.x > last);
      last = s.x;
    }
    // The residual is increasing in x, which makes the root unique.
    double prev = screening_residual(0.0, 1.0, n);
    for (int k = 1; k <= 200; ++k) {
      const double r = screening_residual(k / 100.0, 1.0, n);
      CHECK(r > prev);
      prev = r;
    }
  }
}

TEST_CASE("mf_evolve relaxes to the magnetized branch") {
  const double n = 50.0, beta = 0.5;
  const double t_final = 20.0 / (n * beta) + 10.0;
  const auto series = mf_evolve(MeanFieldState::ground(n), 0.5 * beta * n, t_final, 1e-12);
  const auto target = mf_steady(beta, n);
  CHECK(std::abs(series.back().state.dipole - target.dipole) < 1e-6);
  CHECK(std::abs(series.back().state.sz - target.sz) < 1e-6);
  for (const auto& ts : series) {
    CHECK(std::abs(ts.state.spin_length_excess()) < 1e-7);
  }
}

TEST_CASE("mf_evolve with no drive stays put") {
  const auto series = mf_evolve(MeanFieldState::ground(8.0), 0.0, 4.0);
  for (const auto& ts : series) {
    CHECK(ts.state.dipole == cplx{});
    CHECK(ts.state.sz == -4.0);
  }
  CHECK_THROWS_AS(mf_evolve(MeanFieldState::ground(8.0), 1.0, 0.0), DomainError);
}

TEST_CASE("mean-field and quantum n_e share their extremum structure") {
  // Structural comparison: count extrema whose prominence exceeds 0.01.
  const int n = 10;
  const double omega = 0.5 * 0.9 * n;
  const double t_final = 15.0;
  const auto mf = mf_evolve(MeanFieldState::ground(n), omega, t_final, 1e-10, 601);
  const auto q = evolve(DickeLadderState::ground(n), {n, omega, 0.0}, t_final, 1e-10, 601);
  std::vector<double> ne_mf, ne_q;
  for (const auto& ts : mf) ne_mf.push_back(0.5 * (ts.state.sz / (0.5 * n) + 1.0));
  for (const auto& ts : q) ne_q.push_back(observables(ts.state).n_e);
  CHECK(oracles::count_extrema(ne_mf, 1e-2) == oracles::count_extrema(ne_q, 1e-2));
}
