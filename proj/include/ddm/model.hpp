#pragma once

#include <complex>

namespace ddm {

using cplx = std::complex<double>;

// Rates are in units of the single-atom linewidth Gamma and times in 1/Gamma.
inline constexpr double kGamma = 1.0;

/// Parameters of the driven Dicke model.
///
/// `n_atoms` is the number of collectively coupled emitters; for an extended
/// cloud pass the effective number N*mu. `detuning` is an extension to the
/// resonant model and enters as the rotating-frame term -detuning*S_z.
struct ModelParams {
  int n_atoms = 1;
  double rabi = 0.0;
  double detuning = 0.0;

  /// Drive over collective dissipation, 2*Omega/(N*Gamma).
  double beta() const { return 2.0 * rabi / (n_atoms * kGamma); }

  /// Throws DomainError unless n_atoms >= 1 and rabi >= 0.
  void validate() const;

  static ModelParams from_beta(int n_atoms, double beta) {
    return ModelParams{n_atoms, 0.5 * beta * n_atoms * kGamma, 0.0};
  }
};

}  // namespace ddm
