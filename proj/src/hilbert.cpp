#include "rabi/hilbert.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace rabi {

CompositeSpace::CompositeSpace(std::vector<SpinSpec> spins, std::optional<TruncatedFockSpace> mode)
    : spins_(std::move(spins)), mode_(mode) {
  if (mode_ && mode_->n_max < 1)
    throw InvalidArgument("truncated Fock space needs n_max >= 1");
  for (const auto &s : spins_)
    dims_.push_back(static_cast<std::size_t>(s.dim()));
  if (mode_)
    dims_.push_back(static_cast<std::size_t>(mode_->dim()));
  dim_ = std::accumulate(dims_.begin(), dims_.end(), std::size_t{1}, std::multiplies<>());
}

std::size_t CompositeSpace::factor_dim(std::size_t slot) const {
  if (slot >= dims_.size())
    throw DimensionError("factor slot out of range");
  return dims_[slot];
}

std::size_t CompositeSpace::mode_slot() const {
  if (!mode_)
    throw DimensionError("space has no bosonic mode");
  return spins_.size();
}

std::size_t CompositeSpace::spin_dim() const {
  std::size_t d = 1;
  for (const auto &s : spins_)
    d *= static_cast<std::size_t>(s.dim());
  return d;
}

std::vector<std::size_t> CompositeSpace::multi_index(std::size_t index) const {
  if (index >= dim_)
    throw DimensionError("composite index out of range");
  std::vector<std::size_t> out(dims_.size());
  for (std::size_t k = dims_.size(); k-- > 0;) {
    out[k] = index % dims_[k];
    index /= dims_[k];
  }
  return out;
}

std::size_t CompositeSpace::index(std::span<const std::size_t> multi) const {
  if (multi.size() != dims_.size())
    throw DimensionError("multi-index has wrong length");
  std::size_t idx = 0;
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    if (multi[k] >= dims_[k])
      throw DimensionError("multi-index component out of range");
    idx = idx * dims_[k] + multi[k];
  }
  return idx;
}

CompositeSpace mode_only_space(const TruncatedFockSpace &mode) { return CompositeSpace({}, mode); }
CompositeSpace spin_only_space(const SpinSpec &spin) { return CompositeSpace({spin}, std::nullopt); }

double max_abs(const Matrix &m) {
  if (m.size() == 0)
    return 0.0;
  return m.cwiseAbs().maxCoeff();
}

Matrix kron(const Matrix &a, const Matrix &b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// --- Operator -------------------------------------------------------------

Operator::Operator(Matrix matrix, CompositeSpace space, bool hermitian)
    : matrix_(std::move(matrix)), space_(std::move(space)), hermitian_(hermitian) {
  if (matrix_.rows() != matrix_.cols() || static_cast<std::size_t>(matrix_.rows()) != space_.dim())
    throw DimensionError("operator matrix does not match its space dimension");
  if (hermitian_ && hermiticity_defect() > kHermitianTol)
    throw InvalidArgument("operator flagged hermitian but M != M^dagger");
}

double Operator::hermiticity_defect() const { return max_abs(matrix_ - matrix_.adjoint()); }

static void require_same_space(const Operator &a, const Operator &b) {
  if (!(a.space() == b.space()))
    throw DimensionError("operators live on different spaces");
}

Operator Operator::operator+(const Operator &o) const {
  require_same_space(*this, o);
  return Operator(matrix_ + o.matrix_, space_, hermitian_ && o.hermitian_);
}

Operator Operator::operator-(const Operator &o) const {
  require_same_space(*this, o);
  return Operator(matrix_ - o.matrix_, space_, hermitian_ && o.hermitian_);
}

Operator Operator::operator*(const Operator &o) const {
  require_same_space(*this, o);
  Matrix m = matrix_ * o.matrix_;
  // a product of hermitian operators is hermitian only if they commute
  bool herm = hermitian_ && o.hermitian_ && max_abs(m - m.adjoint()) <= kHermitianTol;
  return Operator(std::move(m), space_, herm);
}

Operator Operator::scaled(Complex s) const {
  return Operator(s * matrix_, space_, hermitian_ && s.imag() == 0.0);
}

Operator Operator::adjoint() const { return Operator(matrix_.adjoint(), space_, hermitian_); }

Operator Operator::identity(const CompositeSpace &space) {
  auto d = static_cast<Eigen::Index>(space.dim());
  return Operator(Matrix::Identity(d, d), space, true);
}

Operator Operator::zero(const CompositeSpace &space) {
  auto d = static_cast<Eigen::Index>(space.dim());
  return Operator(Matrix::Zero(d, d), space, true);
}

Operator operator*(double s, const Operator &op) { return op.scaled(s); }

// --- StateVector ----------------------------------------------------------

StateVector::StateVector(Vector amplitudes, CompositeSpace space)
    : amplitudes_(std::move(amplitudes)), space_(std::move(space)) {
  if (static_cast<std::size_t>(amplitudes_.size()) != space_.dim())
    throw DimensionError("state length does not match its space dimension");
  if (std::abs(amplitudes_.norm() - 1.0) > 1e-12)
    throw InvalidArgument("state vector is not normalized");
}

StateVector StateVector::normalized(Vector amplitudes, CompositeSpace space) {
  double n = amplitudes.norm();
  if (!(n > 0.0) || !std::isfinite(n))
    throw InvalidArgument("cannot normalize a zero or non-finite vector");
  amplitudes /= n;
  return StateVector(std::move(amplitudes), std::move(space));
}

// --- bosonic mode ---------------------------------------------------------

Operator annihilation_op(const TruncatedFockSpace &mode) {
  if (mode.n_max < 1)
    throw InvalidArgument("annihilation_op needs n_max >= 1");
  const int d = mode.dim();
  Matrix a = Matrix::Zero(d, d);
  for (int n = 1; n < d; ++n)
    a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return Operator(std::move(a), mode_only_space(mode), false);
}

Operator creation_op(const TruncatedFockSpace &mode) { return annihilation_op(mode).adjoint(); }

Operator number_op(const TruncatedFockSpace &mode) {
  const int d = mode.dim();
  Matrix n = Matrix::Zero(d, d);
  for (int k = 0; k < d; ++k)
    n(k, k) = static_cast<double>(k);
  return Operator(std::move(n), mode_only_space(mode), true);
}

// --- spins ----------------------------------------------------------------

SpinOperators spin_ops(const SpinSpec &spec) {
  const Complex I(0.0, 1.0);
  const auto space = spin_only_space(spec);
  if (spec.kind == SpinKind::qubit) {
    Matrix x(2, 2), y(2, 2), z(2, 2);
    x << 0, 1, 1, 0;
    y << 0, -I, I, 0;
    z << 1, 0, 0, -1;
    Matrix plus = 0.5 * (x + I * y);
    Matrix minus = 0.5 * (x - I * y);
    return {Operator(x, space, true), Operator(y, space, true), Operator(z, space, true),
            Operator(plus, space, false), Operator(minus, space, false)};
  }
  const double r = 1.0 / std::sqrt(2.0);
  Matrix x(3, 3), y(3, 3), z(3, 3);
  x << 0, r, 0, r, 0, r, 0, r, 0;
  y << 0, -I * r, 0, I * r, 0, -I * r, 0, I * r, 0;
  z << 1, 0, 0, 0, 0, 0, 0, 0, -1;
  Matrix plus = x + I * y;
  Matrix minus = x - I * y;
  return {Operator(x, space, true), Operator(y, space, true), Operator(z, space, true),
          Operator(plus, space, false), Operator(minus, space, false)};
}

std::size_t spin_level_index(SpinKind kind, int m) {
  if (kind == SpinKind::qubit) {
    if (m == 1)
      return 0;
    if (m == -1)
      return 1;
  } else if (m >= -1 && m <= 1) {
    return static_cast<std::size_t>(1 - m);
  }
  throw InvalidArgument("spin level " + std::to_string(m) + " not valid for this spin kind");
}

int spin_level_value(SpinKind kind, std::size_t index) {
  if (kind == SpinKind::qubit && index < 2)
    return index == 0 ? 1 : -1;
  if (kind == SpinKind::qutrit && index < 3)
    return 1 - static_cast<int>(index);
  throw InvalidArgument("spin basis index out of range");
}

// --- tensor embedding -----------------------------------------------------

Operator tensor_product(std::span<const std::pair<std::size_t, const Operator *>> factors,
                        const CompositeSpace &space) {
  std::vector<const Operator *> at(space.factor_count(), nullptr);
  bool hermitian = true;
  for (const auto &[slot, op] : factors) {
    if (slot >= space.factor_count())
      throw DimensionError("embedding slot out of range");
    if (at[slot])
      throw DimensionError("two operators embedded on the same slot");
    if (op->dim() != space.factor_dim(slot))
      throw DimensionError("operator dimension does not match factor at slot " +
                           std::to_string(slot));
    at[slot] = op;
    hermitian = hermitian && op->hermitian();
  }
  Matrix m = Matrix::Identity(1, 1);
  for (std::size_t k = 0; k < at.size(); ++k) {
    auto d = static_cast<Eigen::Index>(space.factor_dim(k));
    m = at[k] ? kron(m, at[k]->matrix()) : kron(m, Matrix::Identity(d, d));
  }
  return Operator(std::move(m), space, hermitian);
}

Operator tensor_embed(const Operator &op, std::size_t slot, const CompositeSpace &space) {
  const std::pair<std::size_t, const Operator *> f{slot, &op};
  return tensor_product(std::span(&f, 1), space);
}

// --- coherent states ------------------------------------------------------

static double log_poisson(double mean, int n) {
  if (mean == 0.0)
    return n == 0 ? 0.0 : -INFINITY;
  return -mean + n * std::log(mean) - std::lgamma(n + 1.0);
}

double poisson_tail(double mean, int n_max) {
  if (mean == 0.0)
    return 0.0;
  double tail = 0.0;
  // terms decrease monotonically once n exceeds the mean
  for (int n = n_max + 1;; ++n) {
    double term = std::exp(log_poisson(mean, n));
    tail += term;
    if (n > mean && term < 1e-30 * std::max(tail, 1e-300))
      break;
    if (n > mean && term == 0.0)
      break;
  }
  return tail;
}

int required_n_max(Complex alpha, double tol) {
  const double mean = std::norm(alpha);
  int n = 1;
  while (poisson_tail(mean, n) > tol)
    ++n;
  return n;
}

Vector coherent_amplitudes(Complex alpha, int n_max) {
  if (n_max < 1)
    throw InvalidArgument("coherent state needs n_max >= 1");
  const double mean = std::norm(alpha);
  const double tail = poisson_tail(mean, n_max);
  if (tail > kCoherentTailTol) {
    const int need = required_n_max(alpha);
    std::ostringstream os;
    os << "coherent state |alpha|=" << std::abs(alpha) << " truncated at n_max=" << n_max
       << " leaves Poisson tail " << tail << " > " << kCoherentTailTol << "; need n_max >= " << need;
    throw TruncationError(os.str(), need);
  }
  Vector c(n_max + 1);
  const double r = std::abs(alpha);
  const double phase = std::arg(alpha);
  for (int n = 0; n <= n_max; ++n) {
    if (r == 0.0) {
      c(n) = n == 0 ? 1.0 : 0.0;
      continue;
    }
    double logmag = 0.5 * log_poisson(mean, n);
    c(n) = std::polar(std::exp(logmag), n * phase);
  }
  c /= c.norm();
  return c;
}

StateVector coherent_state(Complex alpha, const TruncatedFockSpace &mode) {
  return StateVector(coherent_amplitudes(alpha, mode.n_max), mode_only_space(mode));
}

StateVector product_state(const Vector &spin_amplitudes, Complex alpha, const CompositeSpace &space) {
  if (static_cast<std::size_t>(spin_amplitudes.size()) != space.spin_dim())
    throw DimensionError("spin amplitude list does not match the spin dimension");
  if (!space.mode())
    throw DimensionError("product_state needs a space with a bosonic mode");
  Vector field = coherent_amplitudes(alpha, space.mode()->n_max);
  Vector spin = spin_amplitudes;
  double n = spin.norm();
  if (!(n > 0.0))
    throw InvalidArgument("spin amplitudes are all zero");
  spin /= n;
  Vector full(static_cast<Eigen::Index>(space.dim()));
  const auto fd = field.size();
  for (Eigen::Index s = 0; s < spin.size(); ++s)
    full.segment(s * fd, fd) = spin(s) * field;
  return StateVector::normalized(std::move(full), space);
}

} // namespace rabi
