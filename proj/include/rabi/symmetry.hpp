#pragma once

// Constants of motion, invariant-subspace enumeration, block extraction.
// project_hamiltonian is the oracle every effective builder is tested against.

#include "rabi/hilbert.hpp"
#include "rabi/models.hpp"

#include <string>
#include <variant>
#include <vector>

namespace rabi::symmetry {

inline constexpr double kSymmetryTol = 1e-12;
inline constexpr double kLeakageTol = 1e-10;

/// One dynamically invariant subspace. `levels[k]` lists the composite
/// indices of fictitious-spin level k, one per Fock occupation 0..n_max.
/// The ordered basis is level-major, matching (fictitious spin) x (Fock).
struct SubspaceBasis {
  std::string label;
  std::vector<std::size_t> spin_states; // spin-factor basis index of each level
  std::vector<std::vector<std::size_t>> levels;

  std::size_t size() const;
  std::vector<std::size_t> flat() const;
};

struct TwoQubitModel {
  models::TwoQubitParams params;
};
struct TwoQutritModel {
  models::TwoQutritParams params;
};
struct ChainModel {
  models::ChainParams params;
};
using ModelSpec = std::variant<TwoQubitModel, TwoQutritModel, ChainModel>;

/// ||HC - CH||_max. Sparse C (or H) is multiplied without forming dense products.
double commutator_norm(const Operator &H, const Operator &C);

/// two-qubit: sectors "a" {|uu>,|dd>} and "b" {|ud>,|du>};
/// two-qutrit: "Sz_tot=+2" ... "Sz_tot=-2", levels ordered by descending Sigma_1^z;
/// chain: 2^(N-1) pattern pairs labelled by the lexicographically smaller
/// pattern ('u' < 'd'), levels (representative, flipped).
std::vector<SubspaceBasis> enumerate_subspaces(const ModelSpec &model, const CompositeSpace &space);

/// Chain sectors whose representative has exactly m down spins.
std::size_t count_chain_sectors(const std::vector<SubspaceBasis> &sectors, int m);

/// Restriction of H to the span of `basis`, as an operator on
/// (fictitious spin of dimension levels.size()) x Fock.
Operator project_hamiltonian(const Operator &H, const SubspaceBasis &basis);

struct BlockReport {
  double off_block_max = 0.0;
  bool pass = false;
};

/// Throws InvalidArgument if the sectors do not partition the space.
BlockReport verify_block_structure(const Operator &H, const std::vector<SubspaceBasis> &sectors);

/// Constants of motion quoted for each model, with display names.
struct NamedOperator {
  std::string name;
  Operator op;
};
std::vector<NamedOperator> constants_of_motion(const ModelSpec &model, const CompositeSpace &space);

/// (-1)^(Sigma1z + Sigma2z). The XX qutrit coupling changes Sigma_z_tot by
/// 0 or +-2, so this parity is conserved while Sigma_z_tot itself is not.
Operator qutrit_parity(const CompositeSpace &space);
/// "even" (Sz_tot in {+2, 0, -2}) and "odd" parity sectors of the two-qutrit model.
std::vector<SubspaceBasis> qutrit_parity_subspaces(const CompositeSpace &space);

/// Population of `psi` outside the given composite indices.
double leakage(const StateVector &psi, const std::vector<std::size_t> &allowed);

/// Chain sector representative as a string over {u,d}.
std::string pattern_label(const std::vector<int> &pattern);

} // namespace rabi::symmetry
