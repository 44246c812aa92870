#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "ddm/ladder.hpp"
#include "ddm/model.hpp"

namespace ddm::oracle {

// Brute-force reference in the full 2^N tensor-product space. Atom a is bit
// a of the basis index; a set bit means the atom is excited. No symmetry is
// used anywhere in this namespace.

inline constexpr int kMaxAtoms = 4;

struct FullState {
  int n_atoms = 1;
  Eigen::MatrixXcd rho_full;

  static FullState product_ground(int n_atoms);
  /// |psi><psi| for a normalized pure state in the tensor basis.
  static FullState pure(int n_atoms, const Eigen::VectorXcd& psi);
};

/// Collective operators built as explicit Kronecker sums of single-atom
/// operators.
struct CollectiveOperators {
  Eigen::MatrixXcd s_minus;
  Eigen::MatrixXcd s_plus;
  Eigen::MatrixXcd s_z;
};

CollectiveOperators collective_operators(int n_atoms);

/// -i[H, rho] + Gamma/2 (2 S- rho S+ - S+S- rho - rho S+S-),
/// H = Omega/2 (S+ + S-) - Delta S_z. Throws CapacityError for N > 4.
Eigen::MatrixXcd full_lindblad_rhs(const FullState& state,
                                   const ModelParams& params);

/// Exact propagation: exp(L dt) between consecutive sample times, with L
/// assembled column by column from full_lindblad_rhs.
std::vector<FullState> full_evolve(const FullState& state0,
                                   const ModelParams& params,
                                   std::span<const double> times);

struct Projection {
  DickeLadderState ladder;
  double leakage = 0.0;  // 1 - trace of the projected block
};

/// Restriction to the symmetric subspace spanned by the normalized uniform
/// superpositions of basis states with k excitations.
Projection project_to_ladder(const FullState& state);

/// The ladder state embedded back into the tensor space.
FullState embed_ladder(const DickeLadderState& ladder);

ObservableSet full_observables(const FullState& state);

}  // namespace ddm::oracle
