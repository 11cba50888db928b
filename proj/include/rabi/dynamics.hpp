#pragma once

// Spectral propagation exp(-iHt) = V exp(-iEt) V^dagger and observables.

#include "rabi/hilbert.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rabi::dynamics {

struct Propagator {
  Eigen::VectorXd eigenvalues; // ascending
  Matrix eigenvectors;         // columns
  CompositeSpace space;
};

/// Full Hermitian eigendecomposition. Throws InvalidArgument for non-hermitian input.
Propagator diagonalize(const Operator &H);

StateVector evolve(const Propagator &prop, const StateVector &psi0, double t);

/// Real expectation of a hermitian operator; the imaginary residue is checked
/// (<= 1e-10 relative) and dropped.
double expectation(const Operator &op, const StateVector &psi);

/// <psi_t| e^{iGt} op e^{-iGt} |psi_t>
double rotating_frame_expectation(const Operator &op, const StateVector &psi_t, const Operator &generator,
                                  double t);

/// Diagonalized frame generator, reused across a time grid.
class Frame {
public:
  explicit Frame(const Operator &generator);
  /// e^{-iGt} psi, so that <psi|e^{iGt} O e^{-iGt}|psi> = <phi|O|phi>.
  Vector to_frame(const Vector &psi, double t) const;
  const CompositeSpace &space() const { return prop_.space; }

private:
  Propagator prop_;
};

/// Reduced density matrix over the kept factor slots (ascending slot order).
Matrix partial_trace(const StateVector &psi, std::span<const std::size_t> keep);

/// Wootters concurrence of a 4x4 two-qubit density matrix.
double concurrence(const Matrix &rho);

/// Isometry from a simulated (sector) spin space into the full model's spin
/// space: |full> = (W x 1_Fock) |sim>.
struct SpinEmbedding {
  Matrix isometry; // full_spin_dim x sim_spin_dim
  CompositeSpace target;

  StateVector embed(const StateVector &psi) const;
  /// W^dagger s for a full-space spin vector; throws if s is not in range(W).
  Vector pull_back_spin(const Vector &full_spin) const;
  /// (W x 1)^dagger O (W x 1)
  Operator pull_back(const Operator &full_op) const;
};

struct Series {
  std::string name;
  std::vector<double> values;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Series> series;

  const std::vector<double> &at(const std::string &name) const;
  bool has(const std::string &name) const;
};

struct ObservableSpec {
  std::string name;
  Operator op;
  bool rotating = false;
};

struct SamplingOptions {
  const Operator *hamiltonian = nullptr;           // energy series; spectral sum when absent
  std::optional<Frame> frame;                       // required by rotating observables
  std::optional<std::vector<std::size_t>> sector;   // leakage series (indices in the simulated space)
  std::optional<SpinEmbedding> embedding;           // concurrence evaluated on the embedded state
};

/// Evaluates every observable on the grid plus norm, energy, leakage and,
/// when the (embedded) spin factors are two qubits, concurrence.
Trajectory sample_trajectory(const Propagator &prop, const StateVector &psi0, std::span<const double> grid,
                             const std::vector<ObservableSpec> &observables, const SamplingOptions &options);

} // namespace rabi::dynamics
