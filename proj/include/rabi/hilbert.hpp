#pragma once

// Truncated Fock spaces, spin operator sets and composite tensor spaces.
//
// Composite basis ordering: spin factors first (in order), the Fock factor
// last, row-major with the last factor running fastest. This matches
// kron(spin_1, ..., spin_k, fock).

#include "rabi/error.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace rabi {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kCoherentTailTol = 1e-10;

struct TruncatedFockSpace {
  int n_max = 1;
  double omega = 1.0;

  int dim() const { return n_max + 1; }
  bool operator==(const TruncatedFockSpace &o) const { return n_max == o.n_max; }
};

enum class SpinKind { qubit, qutrit };

struct SpinSpec {
  SpinKind kind = SpinKind::qubit;
  double splitting = 0.0;

  int dim() const { return kind == SpinKind::qubit ? 2 : 3; }
  bool operator==(const SpinSpec &o) const { return kind == o.kind; }
};

/// Ordered spin factors plus (usually) one truncated bosonic mode.
/// Equality compares structure only (kinds and truncation), not the
/// physical splittings attached to the factors.
class CompositeSpace {
public:
  CompositeSpace() = default;
  CompositeSpace(std::vector<SpinSpec> spins, std::optional<TruncatedFockSpace> mode);

  const std::vector<SpinSpec> &spins() const { return spins_; }
  const std::optional<TruncatedFockSpace> &mode() const { return mode_; }

  std::size_t factor_count() const { return dims_.size(); }
  std::size_t factor_dim(std::size_t slot) const;
  /// Slot index of the Fock factor. Throws if the space has no mode.
  std::size_t mode_slot() const;
  std::size_t spin_dim() const;
  std::size_t fock_dim() const { return mode_ ? static_cast<std::size_t>(mode_->dim()) : 1; }
  std::size_t dim() const { return dim_; }

  std::vector<std::size_t> multi_index(std::size_t index) const;
  std::size_t index(std::span<const std::size_t> multi) const;

  bool operator==(const CompositeSpace &o) const {
    return spins_ == o.spins_ && mode_ == o.mode_;
  }

private:
  std::vector<SpinSpec> spins_;
  std::optional<TruncatedFockSpace> mode_;
  std::vector<std::size_t> dims_;
  std::size_t dim_ = 1;
};

CompositeSpace mode_only_space(const TruncatedFockSpace &mode);
CompositeSpace spin_only_space(const SpinSpec &spin);

class Operator {
public:
  Operator(Matrix matrix, CompositeSpace space, bool hermitian);

  const Matrix &matrix() const { return matrix_; }
  const CompositeSpace &space() const { return space_; }
  bool hermitian() const { return hermitian_; }
  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }

  /// max_ij |M - M^dagger|
  double hermiticity_defect() const;

  Operator operator+(const Operator &o) const;
  Operator operator-(const Operator &o) const;
  Operator operator*(const Operator &o) const;
  Operator scaled(Complex s) const;
  Operator adjoint() const;

  static Operator identity(const CompositeSpace &space);
  static Operator zero(const CompositeSpace &space);

private:
  Matrix matrix_;
  CompositeSpace space_;
  bool hermitian_;
};

Operator operator*(double s, const Operator &op);

class StateVector {
public:
  /// Throws InvalidArgument unless | ||amplitudes|| - 1 | <= 1e-12.
  StateVector(Vector amplitudes, CompositeSpace space);
  static StateVector normalized(Vector amplitudes, CompositeSpace space);

  const Vector &amplitudes() const { return amplitudes_; }
  const CompositeSpace &space() const { return space_; }
  double norm() const { return amplitudes_.norm(); }

private:
  Vector amplitudes_;
  CompositeSpace space_;
};

double max_abs(const Matrix &m);
Matrix kron(const Matrix &a, const Matrix &b);

// --- bosonic mode ---------------------------------------------------------

Operator annihilation_op(const TruncatedFockSpace &mode);
Operator creation_op(const TruncatedFockSpace &mode);
Operator number_op(const TruncatedFockSpace &mode);

// --- spins ----------------------------------------------------------------

struct SpinOperators {
  Operator x, y, z, plus, minus;
};

/// Qubit: Pauli matrices, sigma_pm = (sigma_x +- i sigma_y)/2.
/// Qutrit: spin-1 angular momentum, z = diag(1,0,-1), plus/minus = x +- i y.
/// Basis index 0 is the highest z eigenvalue.
SpinOperators spin_ops(const SpinSpec &spec);

/// Basis index of the z eigenvalue `m` (+1/-1 for qubits, +1/0/-1 for qutrits).
std::size_t spin_level_index(SpinKind kind, int m);
int spin_level_value(SpinKind kind, std::size_t index);

// --- tensor embedding -----------------------------------------------------

/// Place a single-factor operator at `slot`, identity elsewhere.
Operator tensor_embed(const Operator &op, std::size_t slot, const CompositeSpace &space);

/// Product of single-factor operators on distinct slots, built as one
/// Kronecker product (no dense multiplication).
Operator tensor_product(std::span<const std::pair<std::size_t, const Operator *>> factors,
                        const CompositeSpace &space);

// --- coherent states ------------------------------------------------------

/// Sum_{n > n_max} e^{-mean} mean^n / n!, summed directly in log space.
double poisson_tail(double mean, int n_max);

/// Smallest n_max with poisson_tail(|alpha|^2, n_max) <= tol.
int required_n_max(Complex alpha, double tol = kCoherentTailTol);

/// c_n = e^{-|alpha|^2/2} alpha^n / sqrt(n!) for n = 0..n_max, evaluated via
/// lgamma and renormalized. Throws TruncationError when the tail exceeds
/// kCoherentTailTol.
Vector coherent_amplitudes(Complex alpha, int n_max);

StateVector coherent_state(Complex alpha, const TruncatedFockSpace &mode);

/// spin_amplitudes (length = space.spin_dim()) tensor coherent(alpha).
StateVector product_state(const Vector &spin_amplitudes, Complex alpha, const CompositeSpace &space);

} // namespace rabi
