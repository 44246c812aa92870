#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <cstddef>
#include <span>
#include <vector>

#include "ddm/model.hpp"

namespace ddm {

/// Density matrix on the permutation-symmetric ladder |S = N/2, m>.
///
/// Storage index i = m + S, so i = 0 is the ground state |S, -S> and
/// i = N the fully inverted state.
class DickeLadderState {
 public:
  DickeLadderState() = default;
  /// Throws DimensionMismatch unless rho is (N+1)x(N+1).
  DickeLadderState(int n_atoms, Eigen::MatrixXcd rho);

  /// |S,-S><S,-S|, all atoms in |g>.
  static DickeLadderState ground(int n_atoms);
  /// Projector on the symmetric state with `excitations` excited atoms.
  static DickeLadderState dicke(int n_atoms, int excitations);
  /// rho = 1/(N+1) on the diagonal, zero coherences.
  static DickeLadderState maximally_mixed(int n_atoms);

  int n_atoms() const { return n_atoms_; }
  int dim() const { return n_atoms_ + 1; }
  double spin() const { return 0.5 * n_atoms_; }
  double m_of(int index) const { return index - spin(); }

  const Eigen::MatrixXcd& rho() const { return rho_; }
  Eigen::MatrixXcd& rho() { return rho_; }

  cplx trace() const { return rho_.trace(); }

 private:
  int n_atoms_ = 0;
  Eigen::MatrixXcd rho_;
};

struct StateDiagnostics {
  double hermiticity_error = 0.0;  // max |rho - rho^dagger|
  double trace_error = 0.0;        // |Tr rho - 1|
  double min_eigenvalue = 0.0;

  bool ok(double herm_tol = 1e-12, double trace_tol = 1e-10,
          double psd_tol = 1e-8) const {
    return hermiticity_error < herm_tol && trace_error < trace_tol &&
           min_eigenvalue > -psd_tol;
  }
};

StateDiagnostics diagnose(const DickeLadderState& state);

struct ObservableSet {
  double s_z = 0.0;        // <S_z>/S, ground state -> -1
  double n_e = 0.0;        // (s_z + 1)/2
  cplx dipole{};           // <S->
  double gamma_sr = 0.0;   // Gamma <S+S->
  double g2_numerator = 0.0;  // <S+S+S-S->
};

/// A_m = sqrt(S(S+1) - m(m+1)). S and m must be half-integers with S - m
/// integral and -S <= m <= S; otherwise DomainError.
double coupling_coeff(double spin, double m);

/// Lindblad right-hand side d(rho)/dt in the ladder basis.
Eigen::MatrixXcd liouvillian_rhs(const DickeLadderState& state,
                                 const ModelParams& params);

/// The Liouvillian as a sparse (N+1)^2 x (N+1)^2 matrix acting on the
/// row-major vectorization vec(rho)[i*(N+1) + j] = rho(i, j). Built column
/// by column from the action on the basis matrices |i><j|.
Eigen::SparseMatrix<cplx> liouvillian_superoperator(const ModelParams& params);

struct TimedState {
  double t = 0.0;
  DickeLadderState state;
};

/// Integrates the master equation with an adaptive Dormand-Prince 5(4)
/// stepper, emitting the state at each requested time. `times` must be
/// strictly increasing and non-negative. state0 must be Hermitian
/// (DomainError otherwise); the integration keeps Hermiticity exact, while
/// trace drift is left visible as a diagnostic. Throws NonConvergence if the
/// step size underflows.
std::vector<TimedState> evolve(const DickeLadderState& state0,
                               const ModelParams& params,
                               std::span<const double> times,
                               double tol = 1e-8);

/// Convenience overload: `n_samples` uniformly spaced points on
/// [0, t_final], both ends included.
std::vector<TimedState> evolve(const DickeLadderState& state0,
                               const ModelParams& params, double t_final,
                               double tol = 1e-8, std::size_t n_samples = 201);

struct SteadyStateOptions {
  double residual_tol = 1e-10;
  double integration_tol = 1e-10;
};

/// Exact steady state: kernel of the Liouvillian with one redundant row
/// replaced by the trace condition. Falls back to long-time integration
/// when the direct solution misses `residual_tol`.
/// Throws DegenerateSteadyState when the constrained system is singular.
/// Tested up to N = 200.
DickeLadderState steady_state(const ModelParams& params,
                              const SteadyStateOptions& opts = {});

ObservableSet observables(const DickeLadderState& state);

/// <S+S+S-S-> / <S+S->^2. Throws UndefinedCorrelation when <S+S-> < 1e-14.
double g2_zero(const DickeLadderState& state);

double max_abs(const Eigen::MatrixXcd& m);

namespace detail {

/// Solves L x = 0 subject to sum_i x[i*(dim+1)] = 1 by replacing row 0.
/// Throws DegenerateSteadyState if the constrained matrix is singular.
Eigen::VectorXcd solve_trace_constrained(const Eigen::SparseMatrix<cplx>& L,
                                         int dim);

}  // namespace detail

}  // namespace ddm
