#include "ddm/oracle.hpp"

#include <bit>
#include <cmath>
#include <string>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "ddm/errors.hpp"

namespace ddm::oracle {

namespace {

void check_capacity(int n) {
  if (n < 1 || n > kMaxAtoms) {
    throw CapacityError("oracle supports 1 <= N <= " + std::to_string(kMaxAtoms) +
                        ", got N = " + std::to_string(n));
  }
}

int full_dim(int n) { return 1 << n; }

// Single-atom operator on atom `atom`, identity elsewhere. Atom 0 is the
// last Kronecker factor, i.e. the least significant bit.
Eigen::MatrixXcd embed_single(const Eigen::Matrix2cd& op, int atom, int n) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
  for (int a = n - 1; a >= 0; --a) {
    const Eigen::MatrixXcd factor =
        a == atom ? Eigen::MatrixXcd(op) : Eigen::MatrixXcd::Identity(2, 2);
    out = Eigen::kroneckerProduct(out, factor).eval();
  }
  return out;
}

// Columns are the symmetric Dicke vectors with k = 0..N excitations.
Eigen::MatrixXcd dicke_basis(int n) {
  const int dim = full_dim(n);
  Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(dim, n + 1);
  for (int b = 0; b < dim; ++b) v(b, std::popcount(static_cast<unsigned>(b))) = 1.0;
  for (int k = 0; k <= n; ++k) v.col(k).normalize();
  return v;
}

}  // namespace

FullState FullState::product_ground(int n_atoms) {
  check_capacity(n_atoms);
  const int dim = full_dim(n_atoms);
  FullState s{n_atoms, Eigen::MatrixXcd::Zero(dim, dim)};
  s.rho_full(0, 0) = 1.0;
  return s;
}

FullState FullState::pure(int n_atoms, const Eigen::VectorXcd& psi) {
  check_capacity(n_atoms);
  if (psi.size() != full_dim(n_atoms)) {
    throw DimensionMismatch("state vector must have 2^N entries");
  }
  return {n_atoms, psi * psi.adjoint()};
}

CollectiveOperators collective_operators(int n) {
  check_capacity(n);
  Eigen::Matrix2cd sigma_minus = Eigen::Matrix2cd::Zero();
  sigma_minus(0, 1) = 1.0;  // |g><e|
  Eigen::Matrix2cd sigma_z = Eigen::Matrix2cd::Zero();
  sigma_z(0, 0) = -1.0;
  sigma_z(1, 1) = 1.0;

  const int dim = full_dim(n);
  CollectiveOperators ops{Eigen::MatrixXcd::Zero(dim, dim),
                          Eigen::MatrixXcd::Zero(dim, dim),
                          Eigen::MatrixXcd::Zero(dim, dim)};
  for (int a = 0; a < n; ++a) {
    ops.s_minus += embed_single(sigma_minus, a, n);
    ops.s_z += 0.5 * embed_single(sigma_z, a, n);
  }
  ops.s_plus = ops.s_minus.adjoint();
  return ops;
}

Eigen::MatrixXcd full_lindblad_rhs(const FullState& state,
                                   const ModelParams& params) {
  check_capacity(state.n_atoms);
  if (state.n_atoms != params.n_atoms) {
    throw DimensionMismatch("oracle state and params disagree on N");
  }
  const auto ops = collective_operators(state.n_atoms);
  const Eigen::MatrixXcd H = 0.5 * params.rabi * (ops.s_plus + ops.s_minus) -
                             params.detuning * ops.s_z;
  const Eigen::MatrixXcd pm = ops.s_plus * ops.s_minus;
  const auto& rho = state.rho_full;
  const cplx minus_i{0.0, -1.0};
  return minus_i * (H * rho - rho * H) +
         0.5 * kGamma *
             (2.0 * ops.s_minus * rho * ops.s_plus - pm * rho - rho * pm);
}

std::vector<FullState> full_evolve(const FullState& state0,
                                   const ModelParams& params,
                                   std::span<const double> times) {
  check_capacity(state0.n_atoms);
  const int dim = full_dim(state0.n_atoms);
  const int size = dim * dim;

  Eigen::MatrixXcd L(size, size);
  FullState basis{state0.n_atoms, Eigen::MatrixXcd::Zero(dim, dim)};
  for (int c = 0; c < size; ++c) {
    basis.rho_full.setZero();
    basis.rho_full(c % dim, c / dim) = 1.0;  // column-major vectorization
    const Eigen::MatrixXcd col = full_lindblad_rhs(basis, params);
    L.col(c) = Eigen::Map<const Eigen::VectorXcd>(col.data(), size);
  }

  // Step from sample to sample; equal spacings share one propagator.
  Eigen::VectorXcd x = Eigen::Map<const Eigen::VectorXcd>(state0.rho_full.data(), size);
  Eigen::MatrixXcd propagator;
  double cached_dt = -1.0;
  double t_prev = 0.0;
  std::vector<FullState> out;
  out.reserve(times.size());
  for (double t : times) {
    if (t < t_prev) throw DomainError("oracle times must be non-decreasing from 0");
    const double dt = t - t_prev;
    if (dt > 0.0) {
      if (std::abs(dt - cached_dt) > 1e-14 * dt) {
        propagator = (L * dt).exp();
        cached_dt = dt;
      }
      x = propagator * x;
    }
    t_prev = t;
    out.push_back({state0.n_atoms, Eigen::Map<const Eigen::MatrixXcd>(x.data(), dim, dim)});
  }
  return out;
}

Projection project_to_ladder(const FullState& state) {
  check_capacity(state.n_atoms);
  const Eigen::MatrixXcd v = dicke_basis(state.n_atoms);
  Eigen::MatrixXcd ladder = v.adjoint() * state.rho_full * v;
  const double leakage = 1.0 - ladder.trace().real();
  return {DickeLadderState(state.n_atoms, std::move(ladder)), leakage};
}

FullState embed_ladder(const DickeLadderState& ladder) {
  check_capacity(ladder.n_atoms());
  const Eigen::MatrixXcd v = dicke_basis(ladder.n_atoms());
  return {ladder.n_atoms(), v * ladder.rho() * v.adjoint()};
}

ObservableSet full_observables(const FullState& state) {
  const auto ops = collective_operators(state.n_atoms);
  const auto& rho = state.rho_full;
  ObservableSet o;
  o.s_z = (ops.s_z * rho).trace().real() / (0.5 * state.n_atoms);
  o.n_e = 0.5 * (o.s_z + 1.0);
  o.dipole = (ops.s_minus * rho).trace();
  o.gamma_sr = kGamma * (ops.s_plus * ops.s_minus * rho).trace().real();
  o.g2_numerator =
      (ops.s_plus * ops.s_plus * ops.s_minus * ops.s_minus * rho).trace().real();
  return o;
}

}  // namespace ddm::oracle
