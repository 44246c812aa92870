#include "ddm/ladder.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <string>

#include "ddm/detail/integrate.hpp"
#include "ddm/errors.hpp"

namespace ddm {

void ModelParams::validate() const {
  if (n_atoms < 1) throw DomainError("n_atoms must be >= 1");
  if (!(rabi >= 0.0) || !std::isfinite(rabi)) {
    throw DomainError("rabi must be finite and >= 0");
  }
  if (!std::isfinite(detuning)) throw DomainError("detuning must be finite");
}

namespace {

// Ladder couplings indexed by storage index: a[k + 1] = A_m with k = m + S,
// for k = -1..N. A_{-S-1} and A_S are both zero.
std::vector<double> ladder_couplings(int n) {
  std::vector<double> a(n + 2, 0.0);
  for (int k = 0; k < n; ++k) {
    a[k + 1] = std::sqrt(static_cast<double>(n - k) * (k + 1));
  }
  return a;
}

// One element of d(rho)/dt. `rho(i, j)` must return 0 outside [0, N]^2.
template <class Access>
cplx rhs_entry(const Access& rho, const std::vector<double>& a,
               const ModelParams& p, int i, int j) {
  const auto A = [&a](int k) { return a[k + 1]; };
  const cplx minus_i_half_omega{0.0, -0.5 * p.rabi};
  cplx drive = A(i - 1) * rho(i - 1, j) + A(i) * rho(i + 1, j) -
               A(j - 1) * rho(i, j - 1) - A(j) * rho(i, j + 1);
  cplx decay = 2.0 * A(i) * A(j) * rho(i + 1, j + 1) -
               (A(i - 1) * A(i - 1) + A(j - 1) * A(j - 1)) * rho(i, j);
  cplx out = minus_i_half_omega * drive + 0.5 * kGamma * decay;
  if (p.detuning != 0.0) {
    out += cplx{0.0, p.detuning * (i - j)} * rho(i, j);
  }
  return out;
}

template <class In, class Out>
void rhs_into(const In& rho, Out& out, int n, const std::vector<double>& a,
              const ModelParams& p) {
  const int d = n + 1;
  const auto at = [&rho, d](int i, int j) -> cplx {
    if (i < 0 || j < 0 || i >= d || j >= d) return cplx{};
    return rho(i, j);
  };
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) out(i, j) = rhs_entry(at, a, p, i, j);
  }
}

// Same, for Hermitian rho: evaluates the upper triangle and mirrors it, so
// the integrated state stays Hermitian to the last bit.
template <class In, class Out>
void hermitian_rhs_into(const In& rho, Out& out, int n,
                        const std::vector<double>& a, const ModelParams& p) {
  const int d = n + 1;
  const auto at = [&rho, d](int i, int j) -> cplx {
    if (i < 0 || j < 0 || i >= d || j >= d) return cplx{};
    return rho(i, j);
  };
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < j; ++i) {
      out(i, j) = rhs_entry(at, a, p, i, j);
      out(j, i) = std::conj(out(i, j));
    }
    out(j, j) = rhs_entry(at, a, p, j, j).real();
  }
}

void check_shape(const DickeLadderState& s, const ModelParams& p) {
  if (s.n_atoms() != p.n_atoms) {
    throw DimensionMismatch("state has N = " + std::to_string(s.n_atoms()) +
                            " but params have N = " +
                            std::to_string(p.n_atoms));
  }
}

}  // namespace

DickeLadderState::DickeLadderState(int n_atoms, Eigen::MatrixXcd rho)
    : n_atoms_(n_atoms), rho_(std::move(rho)) {
  if (n_atoms < 1) throw DomainError("n_atoms must be >= 1");
  if (rho_.rows() != n_atoms + 1 || rho_.cols() != n_atoms + 1) {
    throw DimensionMismatch("ladder density matrix must be (N+1)x(N+1)");
  }
}

DickeLadderState DickeLadderState::ground(int n_atoms) {
  return dicke(n_atoms, 0);
}

DickeLadderState DickeLadderState::dicke(int n_atoms, int excitations) {
  if (excitations < 0 || excitations > n_atoms) {
    throw DomainError("excitation number outside [0, N]");
  }
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n_atoms + 1, n_atoms + 1);
  rho(excitations, excitations) = 1.0;
  return {n_atoms, std::move(rho)};
}

DickeLadderState DickeLadderState::maximally_mixed(int n_atoms) {
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Identity(n_atoms + 1, n_atoms + 1);
  rho /= static_cast<double>(n_atoms + 1);
  return {n_atoms, std::move(rho)};
}

double max_abs(const Eigen::MatrixXcd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

StateDiagnostics diagnose(const DickeLadderState& state) {
  const auto& rho = state.rho();
  StateDiagnostics d;
  d.hermiticity_error = max_abs(rho - rho.adjoint());
  d.trace_error = std::abs(rho.trace() - 1.0);
  Eigen::MatrixXcd herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm,
                                                     Eigen::EigenvaluesOnly);
  d.min_eigenvalue = es.eigenvalues().minCoeff();
  return d;
}

double coupling_coeff(double spin, double m) {
  const double two_s = 2.0 * spin;
  if (!(two_s >= 1.0) || std::abs(two_s - std::round(two_s)) > 1e-9) {
    throw DomainError("spin must be N/2 for an integer N >= 1");
  }
  const double k = spin - m;  // S - m must be a non-negative integer <= 2S
  if (std::abs(k - std::round(k)) > 1e-9 || m < -spin - 1e-9 ||
      m > spin + 1e-9) {
    throw DomainError("m must lie on the ladder -S, -S+1, ..., S");
  }
  const double value = (spin - m) * (spin + m + 1.0);
  return value <= 0.0 ? 0.0 : std::sqrt(value);
}

Eigen::MatrixXcd liouvillian_rhs(const DickeLadderState& state,
                                 const ModelParams& params) {
  check_shape(state, params);
  const int n = state.n_atoms();
  const auto a = ladder_couplings(n);
  Eigen::MatrixXcd out(n + 1, n + 1);
  rhs_into(state.rho(), out, n, a, params);
  return out;
}

Eigen::SparseMatrix<cplx> liouvillian_superoperator(const ModelParams& params) {
  params.validate();
  const int n = params.n_atoms;
  const int d = n + 1;
  const auto a = ladder_couplings(n);
  const auto vec = [d](int i, int j) { return i * d + j; };

  std::vector<Eigen::Triplet<cplx>> triplets;
  triplets.reserve(static_cast<std::size_t>(d) * d * 6);
  // Column (r, c) is rhs(|r><c|). The stencil only reaches rows at most one
  // step away from (r, c) in each index, so only those entries are evaluated.
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      const auto basis = [r, c](int i, int j) {
        return (i == r && j == c) ? cplx{1.0, 0.0} : cplx{};
      };
      for (int di = -1; di <= 1; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          const int i = r + di;
          const int j = c + dj;
          if (i < 0 || j < 0 || i >= d || j >= d) continue;
          const cplx v = rhs_entry(basis, a, params, i, j);
          if (v != cplx{}) triplets.emplace_back(vec(i, j), vec(r, c), v);
        }
      }
    }
  }
  Eigen::SparseMatrix<cplx> L(d * d, d * d);
  L.setFromTriplets(triplets.begin(), triplets.end());
  return L;
}

std::vector<TimedState> evolve(const DickeLadderState& state0,
                               const ModelParams& params,
                               std::span<const double> times, double tol) {
  check_shape(state0, params);
  params.validate();
  if (!(tol > 0.0)) throw DomainError("tol must be > 0");
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) {
      throw DomainError("sample times must be strictly increasing");
    }
  }

  const int n = params.n_atoms;
  const int d = n + 1;
  const auto a = ladder_couplings(n);
  using CMap = Eigen::Map<Eigen::MatrixXcd>;
  using ConstCMap = Eigen::Map<const Eigen::MatrixXcd>;

  auto system = [&](const detail::RealState& x, detail::RealState& dxdt,
                    double) {
    dxdt.resize(x.size());
    ConstCMap rho(reinterpret_cast<const cplx*>(x.data()), d, d);
    CMap out(reinterpret_cast<cplx*>(dxdt.data()), d, d);
    hermitian_rhs_into(rho, out, n, a, params);
  };

  const Eigen::MatrixXcd& rho0 = state0.rho();
  if (max_abs(rho0 - rho0.adjoint()) > 1e-10) {
    throw DomainError("initial state is not Hermitian");
  }
  detail::RealState x(2 * d * d);
  CMap x0(reinterpret_cast<cplx*>(x.data()), d, d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < j; ++i) {
      x0(i, j) = rho0(i, j);
      x0(j, i) = std::conj(rho0(i, j));
    }
    x0(j, j) = rho0(j, j).real();
  }

  std::vector<TimedState> out;
  out.reserve(times.size());
  detail::integrate_to_samples(
      system, x, times, tol, [&](double t, const detail::RealState& xs) {
        Eigen::MatrixXcd rho =
            ConstCMap(reinterpret_cast<const cplx*>(xs.data()), d, d);
        out.push_back({t, DickeLadderState(n, std::move(rho))});
      });
  return out;
}

std::vector<TimedState> evolve(const DickeLadderState& state0,
                               const ModelParams& params, double t_final,
                               double tol, std::size_t n_samples) {
  if (!(t_final > 0.0)) throw DomainError("t_final must be > 0");
  if (n_samples < 2) throw DomainError("need at least two samples");
  std::vector<double> times(n_samples);
  for (std::size_t k = 0; k < n_samples; ++k) {
    times[k] = t_final * static_cast<double>(k) / (n_samples - 1);
  }
  times.back() = t_final;
  return evolve(state0, params, times, tol);
}

namespace detail {

Eigen::VectorXcd solve_trace_constrained(const Eigen::SparseMatrix<cplx>& L,
                                         int dim) {
  const Eigen::Index size = static_cast<Eigen::Index>(dim) * dim;
  if (L.rows() != size || L.cols() != size) {
    throw DimensionMismatch("superoperator size does not match dim^2");
  }
  std::vector<Eigen::Triplet<cplx>> triplets;
  triplets.reserve(L.nonZeros() + dim);
  for (int col = 0; col < L.outerSize(); ++col) {
    for (Eigen::SparseMatrix<cplx>::InnerIterator it(L, col); it; ++it) {
      if (it.row() != 0) triplets.emplace_back(it.row(), it.col(), it.value());
    }
  }
  for (int k = 0; k < dim; ++k) {
    triplets.emplace_back(0, k * (dim + 1), cplx{1.0, 0.0});
  }
  Eigen::SparseMatrix<cplx> M(size, size);
  M.setFromTriplets(triplets.begin(), triplets.end());
  M.makeCompressed();

  Eigen::SparseLU<Eigen::SparseMatrix<cplx>, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(M);
  lu.factorize(M);
  if (lu.info() != Eigen::Success) {
    throw DegenerateSteadyState(
        "trace-constrained Liouvillian is singular: steady state is not "
        "unique (" + lu.lastErrorMessage() + ")");
  }
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(size);
  rhs(0) = 1.0;
  Eigen::VectorXcd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite()) {
    throw DegenerateSteadyState("steady-state solve produced no solution");
  }
  return x;
}

}  // namespace detail

DickeLadderState steady_state(const ModelParams& params,
                              const SteadyStateOptions& opts) {
  params.validate();
  const int n = params.n_atoms;
  const int d = n + 1;

  const auto acceptable = [&](const DickeLadderState& s) {
    return s.rho().allFinite() &&
           max_abs(liouvillian_rhs(s, params)) < opts.residual_tol &&
           std::abs(s.trace() - 1.0) < 1e-10;
  };

  const Eigen::VectorXcd x =
      detail::solve_trace_constrained(liouvillian_superoperator(params), d);
  Eigen::MatrixXcd rho(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) rho(i, j) = x(i * d + j);
  }
  DickeLadderState direct(n, std::move(rho));
  if (acceptable(direct)) return direct;

  // Ill-conditioned direct solve: relax from the ground state instead.
  const double beta = params.beta();
  const double t_relax = (beta > 0.0 ? 50.0 / (beta * kGamma * n) : 0.0) +
                         20.0 / kGamma;
  const double times[] = {t_relax};
  auto relaxed = evolve(DickeLadderState::ground(n), params, times,
                        opts.integration_tol);
  DickeLadderState candidate = std::move(relaxed.back().state);
  if (!acceptable(candidate)) {
    throw NonConvergence("steady state residual above tolerance after "
                         "long-time integration",
                         t_relax);
  }
  return candidate;
}

ObservableSet observables(const DickeLadderState& state) {
  const int n = state.n_atoms();
  const auto a = ladder_couplings(n);
  const auto A = [&a](int k) { return a[k + 1]; };
  const auto& rho = state.rho();

  ObservableSet o;
  double sz = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double pop = rho(i, i).real();
    const double a1 = A(i - 1) * A(i - 1);
    const double a2 = i >= 1 ? A(i - 2) * A(i - 2) : 0.0;
    sz += state.m_of(i) * pop;
    o.gamma_sr += kGamma * a1 * pop;
    o.g2_numerator += a1 * a2 * pop;
    if (i >= 1) o.dipole += A(i - 1) * rho(i, i - 1);
  }
  o.s_z = sz / state.spin();
  o.n_e = 0.5 * (o.s_z + 1.0);
  return o;
}

double g2_zero(const DickeLadderState& state) {
  const ObservableSet o = observables(state);
  const double pm = o.gamma_sr / kGamma;
  if (pm < 1e-14) {
    throw UndefinedCorrelation("<S+S-> vanishes; g2(0) is undefined");
  }
  return o.g2_numerator / (pm * pm);
}

}  // namespace ddm
