#include "rabi/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace rabi::dynamics {

namespace {

const Complex kI(0.0, 1.0);

Vector propagate(const Propagator &prop, const Vector &coeffs, double t) {
  Vector phased = coeffs;
  for (Eigen::Index k = 0; k < phased.size(); ++k)
    phased(k) *= std::exp(-kI * (prop.eigenvalues(k) * t));
  return prop.eigenvectors * phased;
}

double real_expectation(const Matrix &op, const Vector &psi) {
  Complex v = psi.dot(op * psi); // conjugates the first argument
  if (std::abs(v.imag()) > 1e-10 * std::max(1.0, std::abs(v.real())))
    throw InvalidArgument("expectation value has a non-negligible imaginary part");
  return v.real();
}

bool two_qubit_spins(const CompositeSpace &space) {
  return space.spins().size() == 2 && space.spins()[0].kind == SpinKind::qubit &&
         space.spins()[1].kind == SpinKind::qubit;
}

} // namespace

Propagator diagonalize(const Operator &H) {
  if (H.hermiticity_defect() > kHermitianTol)
    throw InvalidArgument("diagonalize: operator is not hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(H.matrix());
  if (es.info() != Eigen::Success)
    throw Error("diagonalize: eigensolver did not converge");
  return {es.eigenvalues(), es.eigenvectors(), H.space()};
}

StateVector evolve(const Propagator &prop, const StateVector &psi0, double t) {
  if (!(psi0.space() == prop.space))
    throw DimensionError("evolve: state and propagator live on different spaces");
  if (t == 0.0)
    return psi0;
  Vector coeffs = prop.eigenvectors.adjoint() * psi0.amplitudes();
  return StateVector::normalized(propagate(prop, coeffs, t), prop.space);
}

double expectation(const Operator &op, const StateVector &psi) {
  if (!(op.space() == psi.space()))
    throw DimensionError("expectation: operator and state live on different spaces");
  if (!op.hermitian())
    throw InvalidArgument("expectation: operator is not hermitian");
  return real_expectation(op.matrix(), psi.amplitudes());
}

Frame::Frame(const Operator &generator) : prop_(diagonalize(generator)) {}

Vector Frame::to_frame(const Vector &psi, double t) const {
  Vector coeffs = prop_.eigenvectors.adjoint() * psi;
  return propagate(prop_, coeffs, t);
}

double rotating_frame_expectation(const Operator &op, const StateVector &psi_t, const Operator &generator,
                                  double t) {
  if (!(op.space() == psi_t.space()) || !(generator.space() == psi_t.space()))
    throw DimensionError("rotating_frame_expectation: space mismatch");
  if (!op.hermitian())
    throw InvalidArgument("rotating_frame_expectation: operator is not hermitian");
  Frame frame(generator);
  return real_expectation(op.matrix(), frame.to_frame(psi_t.amplitudes(), t));
}

Matrix partial_trace(const StateVector &psi, std::span<const std::size_t> keep) {
  const auto &space = psi.space();
  std::vector<char> kept(space.factor_count(), 0);
  for (auto s : keep) {
    if (s >= space.factor_count() || kept[s])
      throw InvalidArgument("partial_trace: invalid subset of factors");
    kept[s] = 1;
  }
  std::size_t dk = 1, dt = 1;
  for (std::size_t s = 0; s < space.factor_count(); ++s)
    (kept[s] ? dk : dt) *= space.factor_dim(s);

  Matrix amp = Matrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dt));
  for (std::size_t i = 0; i < space.dim(); ++i) {
    auto mi = space.multi_index(i);
    std::size_t ik = 0, it = 0;
    for (std::size_t s = 0; s < mi.size(); ++s) {
      if (kept[s])
        ik = ik * space.factor_dim(s) + mi[s];
      else
        it = it * space.factor_dim(s) + mi[s];
    }
    amp(static_cast<Eigen::Index>(ik), static_cast<Eigen::Index>(it)) = psi.amplitudes()(static_cast<Eigen::Index>(i));
  }
  return amp * amp.adjoint();
}

double concurrence(const Matrix &rho) {
  if (rho.rows() != 4 || rho.cols() != 4)
    throw InvalidArgument("concurrence needs a 4x4 density matrix");
  if (max_abs(rho - rho.adjoint()) > 1e-10)
    throw InvalidArgument("concurrence: density matrix is not hermitian");
  if (std::abs(rho.trace() - Complex(1.0)) > 1e-10)
    throw InvalidArgument("concurrence: density matrix does not have unit trace");
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw InvalidArgument("concurrence: density matrix is not positive semidefinite");

  Matrix yy = Matrix::Zero(4, 4);
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;
  const Matrix tilde = yy * rho.conjugate() * yy;
  Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Matrix sqrt_rho = es.eigenvectors() * root.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
  // eigenvalues of sqrt(rho) tilde sqrt(rho) equal those of rho tilde
  const Matrix r = sqrt_rho * tilde * sqrt_rho;
  Eigen::SelfAdjointEigenSolver<Matrix> er(0.5 * (r + r.adjoint()), Eigen::EigenvaluesOnly);
  Eigen::VectorXd mu = er.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  std::sort(mu.data(), mu.data() + mu.size(), std::greater<>());
  return std::clamp(mu(0) - mu(1) - mu(2) - mu(3), 0.0, 1.0);
}

StateVector SpinEmbedding::embed(const StateVector &psi) const {
  const auto fd = static_cast<Eigen::Index>(psi.space().fock_dim());
  if (psi.space().spin_dim() != static_cast<std::size_t>(isometry.cols()) || target.fock_dim() != psi.space().fock_dim())
    throw DimensionError("embedding does not match the simulated space");
  // amplitudes are spin-major: reshape to (spin x fock), apply W on the spin index
  Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> sim(
      psi.amplitudes().data(), isometry.cols(), fd);
  Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> full = isometry * sim;
  Vector out = Eigen::Map<Vector>(full.data(), full.size());
  return StateVector::normalized(std::move(out), target);
}

Vector SpinEmbedding::pull_back_spin(const Vector &full_spin) const {
  Vector sim = isometry.adjoint() * full_spin;
  if ((isometry * sim - full_spin).norm() > 1e-12 * std::max(1.0, full_spin.norm()))
    throw InvalidArgument("initial spin state lies outside the simulated sector");
  return sim;
}

Operator SpinEmbedding::pull_back(const Operator &full_op) const {
  if (!(full_op.space() == target))
    throw DimensionError("pull_back: operator is not on the embedding target space");
  const auto fd = static_cast<Eigen::Index>(target.fock_dim());
  const Matrix w = kron(isometry, Matrix::Identity(fd, fd));
  Matrix m = w.adjoint() * full_op.matrix() * w;
  CompositeSpace sim_space = [&] {
    std::vector<SpinSpec> spins;
    if (isometry.cols() == 2)
      spins.push_back({SpinKind::qubit});
    else if (isometry.cols() == 3)
      spins.push_back({SpinKind::qutrit});
    else if (isometry.cols() != 1)
      throw UnsupportedError("embedding of more than three levels");
    return CompositeSpace(spins, target.mode());
  }();
  if (full_op.hermitian())
    m = 0.5 * (m + m.adjoint()).eval();
  return Operator(std::move(m), std::move(sim_space), full_op.hermitian());
}

const std::vector<double> &Trajectory::at(const std::string &name) const {
  for (const auto &s : series)
    if (s.name == name)
      return s.values;
  throw InvalidArgument("trajectory has no series named '" + name + "'");
}

bool Trajectory::has(const std::string &name) const {
  return std::any_of(series.begin(), series.end(), [&](const Series &s) { return s.name == name; });
}

Trajectory sample_trajectory(const Propagator &prop, const StateVector &psi0, std::span<const double> grid,
                             const std::vector<ObservableSpec> &observables, const SamplingOptions &options) {
  if (!(psi0.space() == prop.space))
    throw DimensionError("sample_trajectory: state and propagator live on different spaces");
  for (std::size_t k = 1; k < grid.size(); ++k)
    if (!(grid[k] > grid[k - 1]))
      throw InvalidArgument("sample_trajectory: time grid must be strictly increasing");
  for (const auto &o : observables) {
    if (!(o.op.space() == prop.space))
      throw DimensionError("observable '" + o.name + "' lives on a different space");
    if (!o.op.hermitian())
      throw InvalidArgument("observable '" + o.name + "' is not hermitian");
    if (o.rotating && !options.frame)
      throw InvalidArgument("observable '" + o.name + "' needs a rotating frame generator");
  }
  if (options.hamiltonian && !(options.hamiltonian->space() == prop.space))
    throw DimensionError("sample_trajectory: hamiltonian lives on a different space");

  const CompositeSpace &spin_space = options.embedding ? options.embedding->target : prop.space;
  const bool with_concurrence = two_qubit_spins(spin_space);

  Trajectory tr;
  tr.times.assign(grid.begin(), grid.end());
  const std::size_t n = grid.size();
  for (const auto &o : observables)
    tr.series.push_back({o.name, std::vector<double>(n)});
  const std::size_t base = tr.series.size();
  tr.series.push_back({"norm", std::vector<double>(n)});
  tr.series.push_back({"energy", std::vector<double>(n)});
  tr.series.push_back({"leakage", std::vector<double>(n)});
  if (with_concurrence)
    tr.series.push_back({"concurrence", std::vector<double>(n)});

  const Vector coeffs = prop.eigenvectors.adjoint() * psi0.amplitudes();
  const Eigen::VectorXd weights = coeffs.cwiseAbs2();
  const std::array<std::size_t, 2> qubits{0, 1};
  std::vector<std::size_t> outside;
  if (options.sector) {
    std::vector<char> inside(prop.space.dim(), 0);
    for (auto i : *options.sector) {
      if (i >= inside.size())
        throw DimensionError("sector index out of range");
      inside[i] = 1;
    }
    for (std::size_t i = 0; i < inside.size(); ++i)
      if (!inside[i])
        outside.push_back(i);
  }

  for (std::size_t k = 0; k < n; ++k) {
    const double t = grid[k];
    Vector psi = propagate(prop, coeffs, t);
    Vector framed;
    if (options.frame)
      framed = options.frame->to_frame(psi, t);
    for (std::size_t j = 0; j < observables.size(); ++j)
      tr.series[j].values[k] = real_expectation(observables[j].op.matrix(), observables[j].rotating ? framed : psi);

    tr.series[base].values[k] = psi.norm();
    tr.series[base + 1].values[k] = options.hamiltonian ? real_expectation(options.hamiltonian->matrix(), psi)
                                                        : weights.dot(prop.eigenvalues);
    double leak = 0.0;
    for (auto i : outside)
      leak += std::norm(psi(static_cast<Eigen::Index>(i)));
    tr.series[base + 2].values[k] = leak;
    if (with_concurrence) {
      StateVector state = StateVector::normalized(psi, prop.space);
      if (options.embedding)
        state = options.embedding->embed(state);
      tr.series[base + 3].values[k] = concurrence(partial_trace(state, qubits));
    }
  }
  return tr;
}

} // namespace rabi::dynamics
