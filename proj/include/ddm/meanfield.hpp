#pragma once

#include <cstddef>
#include <vector>

#include "ddm/model.hpp"

namespace ddm {

/// Semi-classical collective spin: <S-> and <S_z> for N (possibly
/// non-integer) atoms, with <S_x>(0) = 0 so the dipole stays imaginary.
struct MeanFieldState {
  cplx dipole{};
  double sz = 0.0;
  double n_atoms = 1.0;

  static MeanFieldState ground(double n_atoms) {
    return {cplx{}, -0.5 * n_atoms, n_atoms};
  }
  /// |dipole|^2 + sz^2 - (N/2)^2; zero on the Bloch sphere.
  double spin_length_excess() const;
};

struct MeanFieldDerivative {
  cplx d_dipole{};
  double d_sz = 0.0;
};

enum class ScreeningBranch { below_threshold, above_threshold };

struct ScreeningSolution {
  double beta = 0.0;
  double x = 0.0;  // 2*Omega_eff/(N*Gamma)
  ScreeningBranch branch = ScreeningBranch::below_threshold;
};

/// Spin-conserving mean-field equations (resonant drive):
///   d<S->/dt  = (i*Omega + Gamma*<S->) <S_z>
///   d<S_z>/dt = i*Omega*<S-> - Gamma*(N^2/4 - <S_z>^2)
/// The S_z equation keeps only the real part of i*Omega*<S->, which is the
/// exact Hamiltonian contribution -Omega*Im<S->.
MeanFieldDerivative mf_rhs(const MeanFieldState& state, double rabi);

/// Analytic steady state. Below threshold (beta < 1) the dipole locks to
/// -i*Omega/Gamma and S_z sits on the lower hemisphere,
/// -(N/2)*sqrt(1 - beta^2), continuing the ground state. From beta = 1 up,
/// S_z = 0 and the dipole is -i*N/(2*beta).
MeanFieldState mf_steady(double beta, double n_atoms);

/// Omega - i*Gamma*dipole.
cplx omega_eff(double omega, cplx dipole);

/// Drive at which beta = 1, in units of Gamma.
double critical_drive(double n_eff);

/// x^2 + (N^2 x^2/2)/(1 + N^2 x^2/2) - beta^2.
double screening_residual(double x, double beta, double n_atoms);

/// Unique non-negative root of screening_residual, by bisection on [0, beta]
/// polished with Newton steps.
ScreeningSolution solve_x(double beta, double n_atoms);

struct TimedMeanField {
  double t = 0.0;
  MeanFieldState state;
};

std::vector<TimedMeanField> mf_evolve(const MeanFieldState& state0,
                                      double rabi, double t_final,
                                      double tol = 1e-10,
                                      std::size_t n_samples = 201);

}  // namespace ddm
