#include "rabi/symmetry.hpp"

#include <Eigen/SparseCore>

#include <algorithm>
#include <map>

namespace rabi::symmetry {

namespace {

using Sparse = Eigen::SparseMatrix<Complex>;

Sparse sparse_view(const Matrix &m) { return m.sparseView(Complex(0.0), 0.0); }

double density(const Matrix &m) {
  if (m.size() == 0)
    return 0.0;
  return static_cast<double>((m.array() != Complex(0.0)).count()) / static_cast<double>(m.size());
}

/// Indices of spin state `spin_index` for every Fock occupation.
std::vector<std::size_t> fock_column(const CompositeSpace &space, std::size_t spin_index) {
  const std::size_t fd = space.fock_dim();
  std::vector<std::size_t> out(fd);
  for (std::size_t n = 0; n < fd; ++n)
    out[n] = spin_index * fd + n;
  return out;
}

/// Spin-factor index of a spin-value pattern (+1/-1 qubits, +1/0/-1 qutrits).
std::size_t spin_index_of(const CompositeSpace &space, const std::vector<int> &values) {
  std::size_t idx = 0;
  for (std::size_t k = 0; k < values.size(); ++k)
    idx = idx * static_cast<std::size_t>(space.spins()[k].dim()) +
          spin_level_index(space.spins()[k].kind, values[k]);
  return idx;
}

SubspaceBasis make_sector(const CompositeSpace &space, std::string label,
                          const std::vector<std::vector<int>> &levels) {
  SubspaceBasis b;
  b.label = std::move(label);
  for (const auto &v : levels) {
    auto idx = spin_index_of(space, v);
    b.spin_states.push_back(idx);
    b.levels.push_back(fock_column(space, idx));
  }
  return b;
}

void require_shape(const CompositeSpace &space, std::size_t n, SpinKind kind) {
  bool ok = space.mode().has_value() && space.spins().size() == n;
  for (const auto &s : space.spins())
    ok = ok && s.kind == kind;
  if (!ok)
    throw DimensionError("space does not match the model");
}

} // namespace

std::size_t SubspaceBasis::size() const {
  std::size_t n = 0;
  for (const auto &l : levels)
    n += l.size();
  return n;
}

std::vector<std::size_t> SubspaceBasis::flat() const {
  std::vector<std::size_t> out;
  out.reserve(size());
  for (const auto &l : levels)
    out.insert(out.end(), l.begin(), l.end());
  return out;
}

double commutator_norm(const Operator &H, const Operator &C) {
  if (!(H.space() == C.space()))
    throw DimensionError("commutator of operators on different spaces");
  const Matrix &h = H.matrix();
  const Matrix &c = C.matrix();
  if (density(c) < 0.1) {
    Sparse cs = sparse_view(c);
    Matrix hc = h * cs;
    Matrix ch = cs * h;
    return max_abs(hc - ch);
  }
  if (density(h) < 0.1) {
    Sparse hs = sparse_view(h);
    Matrix hc = hs * c;
    Matrix ch = c * hs;
    return max_abs(hc - ch);
  }
  return max_abs(h * c - c * h);
}

std::string pattern_label(const std::vector<int> &pattern) {
  std::string s;
  for (int v : pattern)
    s += v == 1 ? 'u' : 'd';
  return s;
}

std::vector<SubspaceBasis> enumerate_subspaces(const ModelSpec &model, const CompositeSpace &space) {
  std::vector<SubspaceBasis> out;
  if (std::holds_alternative<TwoQubitModel>(model)) {
    require_shape(space, 2, SpinKind::qubit);
    out.push_back(make_sector(space, "a", {{1, 1}, {-1, -1}}));
    out.push_back(make_sector(space, "b", {{1, -1}, {-1, 1}}));
  } else if (std::holds_alternative<TwoQutritModel>(model)) {
    require_shape(space, 2, SpinKind::qutrit);
    for (int total = 2; total >= -2; --total) {
      std::vector<std::vector<int>> levels;
      for (int s1 = 1; s1 >= -1; --s1) {
        int s2 = total - s1;
        if (s2 >= -1 && s2 <= 1)
          levels.push_back({s1, s2});
      }
      std::string label = "Sz_tot=" + std::string(total > 0 ? "+" : "") + std::to_string(total);
      out.push_back(make_sector(space, label, levels));
    }
  } else {
    const auto &p = std::get<ChainModel>(model).params;
    models::validate(p);
    require_shape(space, static_cast<std::size_t>(p.N), SpinKind::qubit);
    const std::size_t n_patterns = std::size_t{1} << p.N;
    // bit k (from the left) set = spin k down; representatives have spin 1 up,
    // which is the lexicographically smaller member of each flip pair
    for (std::size_t bits = 0; bits < n_patterns / 2; ++bits) {
      std::vector<int> rep(static_cast<std::size_t>(p.N)), flipped(rep.size());
      for (int k = 0; k < p.N; ++k) {
        bool down = (bits >> (p.N - 1 - k)) & 1U;
        rep[static_cast<std::size_t>(k)] = down ? -1 : 1;
        flipped[static_cast<std::size_t>(k)] = -rep[static_cast<std::size_t>(k)];
      }
      out.push_back(make_sector(space, pattern_label(rep), {rep, flipped}));
    }
  }
  return out;
}

std::size_t count_chain_sectors(const std::vector<SubspaceBasis> &sectors, int m) {
  return static_cast<std::size_t>(std::count_if(sectors.begin(), sectors.end(), [m](const SubspaceBasis &b) {
    return std::count(b.label.begin(), b.label.end(), 'd') == m;
  }));
}

Operator project_hamiltonian(const Operator &H, const SubspaceBasis &basis) {
  const auto &space = H.space();
  if (!space.mode())
    throw DimensionError("projection needs a space with a bosonic mode");
  const auto idx = basis.flat();
  for (auto i : idx)
    if (i >= space.dim())
      throw DimensionError("subspace index out of range");
  for (const auto &l : basis.levels)
    if (l.size() != space.fock_dim())
      throw DimensionError("each subspace level must span the full Fock ladder");

  std::vector<SpinSpec> spins;
  switch (basis.levels.size()) {
  case 1:
    break;
  case 2:
    spins.push_back({SpinKind::qubit});
    break;
  case 3:
    spins.push_back({SpinKind::qutrit});
    break;
  default:
    throw UnsupportedError("projection onto more than three spin levels");
  }
  CompositeSpace target(spins, space.mode());
  const auto d = static_cast<Eigen::Index>(idx.size());
  Matrix m(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      m(i, j) = H.matrix()(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(i)]),
                           static_cast<Eigen::Index>(idx[static_cast<std::size_t>(j)]));
  return Operator(std::move(m), std::move(target), H.hermitian());
}

BlockReport verify_block_structure(const Operator &H, const std::vector<SubspaceBasis> &sectors) {
  const std::size_t d = H.dim();
  std::vector<int> owner(d, -1);
  for (std::size_t s = 0; s < sectors.size(); ++s)
    for (auto i : sectors[s].flat()) {
      if (i >= d)
        throw InvalidArgument("sector index out of range");
      if (owner[i] != -1)
        throw InvalidArgument("sectors overlap; they do not partition the space");
      owner[i] = static_cast<int>(s);
    }
  if (std::find(owner.begin(), owner.end(), -1) != owner.end())
    throw InvalidArgument("sectors do not cover the space; they do not partition it");

  BlockReport r;
  const Matrix &h = H.matrix();
  for (Eigen::Index j = 0; j < h.cols(); ++j)
    for (Eigen::Index i = 0; i < h.rows(); ++i)
      if (owner[static_cast<std::size_t>(i)] != owner[static_cast<std::size_t>(j)])
        r.off_block_max = std::max(r.off_block_max, std::abs(h(i, j)));
  r.pass = r.off_block_max <= kSymmetryTol;
  return r;
}

std::vector<NamedOperator> constants_of_motion(const ModelSpec &model, const CompositeSpace &space) {
  std::vector<NamedOperator> out;
  if (std::holds_alternative<TwoQubitModel>(model)) {
    require_shape(space, 2, SpinKind::qubit);
    const auto s = spin_ops({SpinKind::qubit});
    const std::pair<std::size_t, const Operator *> zz[] = {{0, &s.z}, {1, &s.z}};
    out.push_back({"sigma1z*sigma2z", tensor_product(zz, space)});
  } else if (std::holds_alternative<TwoQutritModel>(model)) {
    require_shape(space, 2, SpinKind::qutrit);
    const auto s = spin_ops({SpinKind::qutrit});
    out.push_back({"Sigma1z+Sigma2z", tensor_embed(s.z, 0, space) + tensor_embed(s.z, 1, space)});
  } else {
    const auto &p = std::get<ChainModel>(model).params;
    require_shape(space, static_cast<std::size_t>(p.N), SpinKind::qubit);
    const auto s = spin_ops({SpinKind::qubit});
    for (int i = 0; i < p.N; ++i)
      for (int j = i + 1; j < p.N; ++j) {
        const std::pair<std::size_t, const Operator *> zz[] = {{static_cast<std::size_t>(i), &s.z},
                                                                {static_cast<std::size_t>(j), &s.z}};
        out.push_back({"sigma" + std::to_string(i + 1) + "z*sigma" + std::to_string(j + 1) + "z",
                       tensor_product(zz, space)});
      }
  }
  return out;
}

Operator qutrit_parity(const CompositeSpace &space) {
  require_shape(space, 2, SpinKind::qutrit);
  Vector d(static_cast<Eigen::Index>(space.dim()));
  for (std::size_t i = 0; i < space.dim(); ++i) {
    const auto mi = space.multi_index(i);
    const int total = spin_level_value(SpinKind::qutrit, mi[0]) + spin_level_value(SpinKind::qutrit, mi[1]);
    d(static_cast<Eigen::Index>(i)) = total % 2 == 0 ? 1.0 : -1.0;
  }
  return Operator(d.asDiagonal().toDenseMatrix(), space, true);
}

std::vector<SubspaceBasis> qutrit_parity_subspaces(const CompositeSpace &space) {
  require_shape(space, 2, SpinKind::qutrit);
  std::vector<std::vector<int>> even, odd;
  for (int s1 = 1; s1 >= -1; --s1)
    for (int s2 = 1; s2 >= -1; --s2)
      ((s1 + s2) % 2 == 0 ? even : odd).push_back({s1, s2});
  return {make_sector(space, "even", even), make_sector(space, "odd", odd)};
}

double leakage(const StateVector &psi, const std::vector<std::size_t> &allowed) {
  std::vector<char> inside(psi.space().dim(), 0);
  for (auto i : allowed) {
    if (i >= inside.size())
      throw DimensionError("allowed index out of range");
    inside[i] = 1;
  }
  double outside = 0.0;
  for (std::size_t i = 0; i < inside.size(); ++i)
    if (!inside[i])
      outside += std::norm(psi.amplitudes()(static_cast<Eigen::Index>(i)));
  return outside;
}

} // namespace rabi::symmetry
