#include "rabi/models.hpp"

#include <cmath>
#include <string>

namespace rabi::models {

namespace {

void require(bool ok, const std::string &msg) {
  if (!ok)
    throw InvalidArgument(msg);
}

void require_space(const CompositeSpace &space, std::size_t n_spins, SpinKind kind, const char *what) {
  bool ok = space.mode().has_value() && space.spins().size() == n_spins;
  if (ok)
    for (const auto &s : space.spins())
      ok = ok && s.kind == kind;
  if (!ok)
    throw DimensionError(std::string("space shape mismatch for ") + what);
}

struct ModeOps {
  Operator number;
  Operator quadrature; // a + a^dag
  Operator a;
  Operator adag;
};

ModeOps mode_ops(const CompositeSpace &space) {
  const auto &mode = *space.mode();
  const auto slot = space.mode_slot();
  Operator a = annihilation_op(mode);
  Operator adag = creation_op(mode);
  Operator x(a.matrix() + adag.matrix(), a.space(), true);
  return {tensor_embed(number_op(mode), slot, space), tensor_embed(x, slot, space),
          tensor_embed(a, slot, space), tensor_embed(adag, slot, space)};
}

/// spin operator at spin slot times the mode quadrature, as one Kronecker product
Operator coupled(const Operator &spin_op, std::size_t slot, const CompositeSpace &space) {
  const auto &mode = *space.mode();
  Operator a = annihilation_op(mode);
  Operator x(a.matrix() + a.matrix().adjoint(), a.space(), true);
  const std::pair<std::size_t, const Operator *> f[] = {{slot, &spin_op}, {space.mode_slot(), &x}};
  return tensor_product(f, space);
}

// every term is built exactly hermitian, so the sum is checked, not symmetrized
Operator hermitian_sum(Matrix m, const CompositeSpace &space) {
  return Operator(std::move(m), space, true);
}

} // namespace

TwoQubitEffectiveParams effective_params(const TwoQubitParams &p) {
  return {p.eps1 + p.eps2, p.eps1 - p.eps2, p.lam1 + p.lam2, p.lam1 - p.lam2, p.gamma - p.omega};
}

ChainSectorParams chain_sector_params(const ChainParams &p, const std::vector<int> &pattern) {
  validate(p);
  require(pattern.size() == static_cast<std::size_t>(p.N), "chain pattern length must equal N");
  int m = 0;
  double delta_eff = 0.0;
  for (std::size_t k = 0; k < pattern.size(); ++k) {
    require(pattern[k] == 1 || pattern[k] == -1, "chain pattern entries must be +1 or -1");
    if (pattern[k] == -1)
      ++m;
    delta_eff += p.deltas[k] * pattern[k];
  }
  return {m, p.Omega * (p.N - 2 * m), delta_eff};
}

void validate(const TwoQubitParams &p) {
  require(p.omega > 0.0, "omega must be positive");
  for (double v : {p.eps1, p.eps2, p.gamma, p.lam1, p.lam2})
    require(std::isfinite(v), "two-qubit parameters must be finite");
}

void validate(const TwoQutritParams &p) {
  require(p.omega > 0.0, "omega must be positive");
  for (double v : {p.Omega, p.gamma_x, p.lam1, p.lam2})
    require(std::isfinite(v), "two-qutrit parameters must be finite");
}

void validate(const ChainParams &p) {
  require(p.N >= 2 && p.N % 2 == 0, "chain length N must be even and >= 2");
  require(p.N <= kMaxChainLength, "chain length N exceeds " + std::to_string(kMaxChainLength));
  require(p.deltas.size() == static_cast<std::size_t>(p.N), "chain needs exactly N couplings");
  require(p.omega > 0.0, "omega must be positive");
}

CompositeSpace two_qubit_space(int n_max, double omega) {
  return CompositeSpace({{SpinKind::qubit}, {SpinKind::qubit}}, TruncatedFockSpace{n_max, omega});
}

CompositeSpace two_qutrit_space(int n_max, double omega) {
  return CompositeSpace({{SpinKind::qutrit}, {SpinKind::qutrit}}, TruncatedFockSpace{n_max, omega});
}

CompositeSpace chain_space(int N, int n_max, double omega) {
  require(N >= 1 && N <= kMaxChainLength, "chain length out of range");
  return CompositeSpace(std::vector<SpinSpec>(static_cast<std::size_t>(N), SpinSpec{SpinKind::qubit}),
                        TruncatedFockSpace{n_max, omega});
}

CompositeSpace fictitious_space(SpinKind kind, int n_max, double omega) {
  return CompositeSpace({{kind}}, TruncatedFockSpace{n_max, omega});
}

// --- two qubits -----------------------------------------------------------

Operator build_two_qubit_full(const TwoQubitParams &p, const CompositeSpace &space) {
  validate(p);
  require_space(space, 2, SpinKind::qubit, "two-qubit model");
  const auto s = spin_ops({SpinKind::qubit});
  const auto mode = mode_ops(space);
  const std::pair<std::size_t, const Operator *> xx[] = {{0, &s.x}, {1, &s.x}};

  Matrix h = p.omega * mode.number.matrix();
  h += p.eps1 * tensor_embed(s.z, 0, space).matrix();
  h += p.eps2 * tensor_embed(s.z, 1, space).matrix();
  h += p.gamma * tensor_product(xx, space).matrix();
  h += p.lam1 * coupled(s.z, 0, space).matrix();
  h += p.lam2 * coupled(s.z, 1, space).matrix();
  return hermitian_sum(std::move(h), space);
}

Operator build_two_qubit_effective(const TwoQubitParams &p, Sector sector, const CompositeSpace &space) {
  validate(p);
  require_space(space, 1, SpinKind::qubit, "two-qubit effective model");
  const auto e = effective_params(p);
  const double eps = sector == Sector::a ? e.eps_plus : e.eps_minus;
  const double lam = sector == Sector::a ? e.lam_plus : e.lam_minus;
  const auto s = spin_ops({SpinKind::qubit});
  const auto mode = mode_ops(space);

  Matrix h = p.omega * mode.number.matrix();
  h += eps * tensor_embed(s.z, 0, space).matrix();
  h += p.gamma * tensor_embed(s.x, 0, space).matrix();
  h += lam * coupled(s.z, 0, space).matrix();
  return hermitian_sum(std::move(h), space);
}

Operator build_two_qubit_jc(const TwoQubitParams &p, const CompositeSpace &space) {
  validate(p);
  require_space(space, 1, SpinKind::qubit, "two-qubit JC model");
  const auto e = effective_params(p);
  const auto s = spin_ops({SpinKind::qubit});
  const auto mode = mode_ops(space);
  const auto sp = tensor_embed(s.plus, 0, space);
  const auto sm = tensor_embed(s.minus, 0, space);

  Matrix h = -e.Delta * tensor_embed(s.z, 0, space).matrix();
  h += e.lam_minus * (mode.a.matrix() * sp.matrix() + mode.adag.matrix() * sm.matrix());
  return hermitian_sum(std::move(h), space);
}

// --- two qutrits ----------------------------------------------------------

Operator build_two_qutrit_full(const TwoQutritParams &p, const CompositeSpace &space) {
  validate(p);
  require_space(space, 2, SpinKind::qutrit, "two-qutrit model");
  const auto s = spin_ops({SpinKind::qutrit});
  const auto mode = mode_ops(space);
  const std::pair<std::size_t, const Operator *> xx[] = {{0, &s.x}, {1, &s.x}};

  Matrix h = p.Omega * (tensor_embed(s.z, 0, space).matrix() + tensor_embed(s.z, 1, space).matrix());
  h += p.gamma_x * tensor_product(xx, space).matrix();
  h += p.omega * mode.number.matrix();
  h += p.lam1 * coupled(s.z, 0, space).matrix();
  h += p.lam2 * coupled(s.z, 1, space).matrix();
  return hermitian_sum(std::move(h), space);
}

QutritConvention qutrit_convention() { return {1.0 / std::sqrt(2.0), 1.0}; }

Operator build_qutrit_effective(const TwoQutritParams &p, const CompositeSpace &space) {
  validate(p);
  require_space(space, 1, SpinKind::qutrit, "qutrit effective model");
  const auto conv = qutrit_convention();
  const auto s = spin_ops({SpinKind::qutrit});
  const auto mode = mode_ops(space);

  Matrix h = conv.transverse_factor * p.gamma_x * tensor_embed(s.x, 0, space).matrix();
  h += p.omega * mode.number.matrix();
  h += conv.coupling_factor * (p.lam1 - p.lam2) * coupled(s.z, 0, space).matrix();
  return hermitian_sum(std::move(h), space);
}

Operator build_qutrit_jc(const TwoQutritParams &p, const CompositeSpace &space) {
  validate(p);
  require_space(space, 1, SpinKind::qutrit, "qutrit JC model");
  const auto conv = qutrit_convention();
  const auto s = spin_ops({SpinKind::qutrit});
  const auto mode = mode_ops(space);
  const auto sp = tensor_embed(s.plus, 0, space);
  const auto sm = tensor_embed(s.minus, 0, space);
  const double g = conv.transverse_factor * p.gamma_x;
  const double k = 0.5 * conv.coupling_factor * (p.lam1 - p.lam2);

  Matrix h = g * tensor_embed(s.z, 0, space).matrix();
  h += p.omega * mode.number.matrix();
  h -= k * (mode.adag.matrix() * sm.matrix() + mode.a.matrix() * sp.matrix());
  return hermitian_sum(std::move(h), space);
}

// --- chain ----------------------------------------------------------------

Operator build_chain_full(const ChainParams &p, const CompositeSpace &space) {
  validate(p);
  require_space(space, static_cast<std::size_t>(p.N), SpinKind::qubit, "chain model");
  const auto s = spin_ops({SpinKind::qubit});
  const auto mode = mode_ops(space);

  std::vector<std::pair<std::size_t, const Operator *>> all_x;
  for (int k = 0; k < p.N; ++k)
    all_x.emplace_back(static_cast<std::size_t>(k), &s.x);

  Matrix h = p.omega * mode.number.matrix();
  h += p.gamma * tensor_product(all_x, space).matrix();
  for (int k = 0; k < p.N; ++k) {
    const auto slot = static_cast<std::size_t>(k);
    h += p.Omega * tensor_embed(s.z, slot, space).matrix();
    h += p.deltas[slot] * coupled(s.z, slot, space).matrix();
  }
  return hermitian_sum(std::move(h), space);
}

Operator build_chain_effective(const ChainParams &p, const std::vector<int> &pattern,
                               const CompositeSpace &space) {
  require_space(space, 1, SpinKind::qubit, "chain effective model");
  const auto sector = chain_sector_params(p, pattern);
  const auto s = spin_ops({SpinKind::qubit});
  const auto mode = mode_ops(space);

  Matrix h = sector.Omega_m * tensor_embed(s.z, 0, space).matrix();
  h += p.gamma * tensor_embed(s.x, 0, space).matrix();
  h += p.omega * mode.number.matrix();
  h += sector.delta_eff * coupled(s.z, 0, space).matrix();
  return hermitian_sum(std::move(h), space);
}

Matrix jc_rotation(SpinKind kind) {
  // R = exp(+i (pi/2) S_y) with S_y = sigma_y/2 for qubits, spin-1 S_y for qutrits
  const auto s = spin_ops({kind});
  const Matrix gen = kind == SpinKind::qubit ? Matrix(0.5 * s.y.matrix()) : s.y.matrix();
  Eigen::SelfAdjointEigenSolver<Matrix> es(gen);
  const Complex I(0.0, 1.0);
  Vector phases = (I * (M_PI / 2.0) * es.eigenvalues().cast<Complex>()).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

} // namespace rabi::models
