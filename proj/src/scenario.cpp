#include "rabi/scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace rabi::scenario {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string &msg) { throw ConfigError(msg); }

void allow_keys(const json &j, const std::string &where, std::initializer_list<const char *> keys) {
  if (!j.is_object())
    fail(where + ": expected an object");
  std::set<std::string> ok(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key()))
      fail(where + ": unknown key '" + it.key() + "'");
}

const json &need(const json &j, const std::string &where, const char *key) {
  auto it = j.find(key);
  if (it == j.end())
    fail(where + ": missing key '" + key + "'");
  return *it;
}

double num(const json &j, const std::string &where, const char *key) {
  const json &v = need(j, where, key);
  if (!v.is_number())
    fail(where + "." + key + ": expected a number");
  return v.get<double>();
}

double num_or(const json &j, const std::string &where, const char *key, double fallback) {
  return j.contains(key) ? num(j, where, key) : fallback;
}

int integer(const json &j, const std::string &where, const char *key) {
  const json &v = need(j, where, key);
  if (!v.is_number_integer())
    fail(where + "." + key + ": expected an integer");
  return v.get<int>();
}

std::string text(const json &j, const std::string &where, const char *key) {
  const json &v = need(j, where, key);
  if (!v.is_string())
    fail(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

std::vector<int> int_list(const json &v, const std::string &where) {
  if (!v.is_array())
    fail(where + ": expected an array of integers");
  std::vector<int> out;
  for (const auto &e : v) {
    if (!e.is_number_integer())
      fail(where + ": expected an array of integers");
    out.push_back(e.get<int>());
  }
  return out;
}

template <class E> E parse_enum(const std::string &s, const std::string &where,
                                std::initializer_list<std::pair<const char *, E>> table) {
  for (const auto &[name, v] : table)
    if (s == name)
      return v;
  std::string opts;
  for (const auto &[name, v] : table)
    opts += std::string(opts.empty() ? "" : ", ") + name;
  fail(where + ": '" + s + "' is not one of " + opts);
}

Params parse_params(ModelKind model, const json &j) {
  const std::string w = "params";
  switch (model) {
  case ModelKind::two_qubit:
    allow_keys(j, w, {"omega", "eps1", "eps2", "gamma", "lam1", "lam2"});
    return models::TwoQubitParams{num(j, w, "omega"), num(j, w, "eps1"), num(j, w, "eps2"),
                                  num(j, w, "gamma"), num(j, w, "lam1"), num(j, w, "lam2")};
  case ModelKind::two_qutrit:
    allow_keys(j, w, {"omega", "Omega", "gamma_x", "lam1", "lam2"});
    return models::TwoQutritParams{num(j, w, "omega"), num(j, w, "Omega"), num(j, w, "gamma_x"),
                                   num(j, w, "lam1"), num(j, w, "lam2")};
  case ModelKind::chain: {
    allow_keys(j, w, {"N", "Omega", "gamma", "omega", "deltas"});
    models::ChainParams p;
    p.N = integer(j, w, "N");
    p.Omega = num(j, w, "Omega");
    p.gamma = num(j, w, "gamma");
    p.omega = num(j, w, "omega");
    const json &d = need(j, w, "deltas");
    if (!d.is_array())
      fail("params.deltas: expected an array of numbers");
    for (const auto &e : d) {
      if (!e.is_number())
        fail("params.deltas: expected an array of numbers");
      p.deltas.push_back(e.get<double>());
    }
    return p;
  }
  }
  fail("unknown model");
}

json params_json(const Params &params) {
  return std::visit(
      [](const auto &p) -> json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, models::TwoQubitParams>)
          return {{"omega", p.omega}, {"eps1", p.eps1}, {"eps2", p.eps2},
                  {"gamma", p.gamma}, {"lam1", p.lam1}, {"lam2", p.lam2}};
        else if constexpr (std::is_same_v<T, models::TwoQutritParams>)
          return {{"omega", p.omega}, {"Omega", p.Omega}, {"gamma_x", p.gamma_x},
                  {"lam1", p.lam1}, {"lam2", p.lam2}};
        else
          return {{"N", p.N}, {"Omega", p.Omega}, {"gamma", p.gamma}, {"omega", p.omega}, {"deltas", p.deltas}};
      },
      params);
}

void parse_alpha(const json &j, InitialState &s) {
  const json &a = need(j, "initial_state", "alpha");
  if (a.is_number()) {
    s.alpha_re = a.get<double>();
  } else if (a.is_array() && a.size() == 2 && a[0].is_number() && a[1].is_number()) {
    s.alpha_re = a[0].get<double>();
    s.alpha_im = a[1].get<double>();
  } else {
    fail("initial_state.alpha: expected a number or [re, im]");
  }
}

InitialState parse_initial(const json &j) {
  const std::string w = "initial_state";
  InitialState s;
  const std::string kind = text(j, w, "kind");
  if (kind == "pattern") {
    allow_keys(j, w, {"kind", "pattern", "alpha"});
    s.pattern = int_list(need(j, w, "pattern"), w + ".pattern");
  } else if (kind == "amplitudes") {
    allow_keys(j, w, {"kind", "terms", "alpha"});
    const json &terms = need(j, w, "terms");
    if (!terms.is_array() || terms.empty())
      fail(w + ".terms: expected a non-empty array");
    for (const auto &t : terms) {
      allow_keys(t, w + ".terms[]", {"pattern", "re", "im"});
      s.terms.push_back({int_list(need(t, w + ".terms[]", "pattern"), w + ".terms[].pattern"),
                         num(t, w + ".terms[]", "re"), num_or(t, w + ".terms[]", "im", 0.0)});
    }
  } else {
    fail(w + ".kind: expected 'pattern' or 'amplitudes'");
  }
  parse_alpha(j, s);
  return s;
}

ClosedForm parse_closed_form(const std::string &s, const std::string &where) {
  return parse_enum<ClosedForm>(s, where,
                                {{"sigma_z", ClosedForm::sigma_z}, {"xx", ClosedForm::xx}, {"concurrence", ClosedForm::concurrence}});
}

std::string default_column(const ObservableRequest &o) { return o.rotating ? o.name + "_rot" : o.name; }

Matrix kron_all(const std::vector<Matrix> &factors) {
  Matrix out = Matrix::Identity(1, 1);
  for (const auto &f : factors)
    out = kron(out, f);
  return out;
}

/// Spin-only operator: `op` on spin slot `slot`, identity elsewhere.
Matrix spin_single(const std::vector<SpinSpec> &spins, std::size_t slot, const Matrix &op) {
  std::vector<Matrix> f;
  for (std::size_t k = 0; k < spins.size(); ++k)
    f.push_back(k == slot ? op : Matrix(Matrix::Identity(spins[k].dim(), spins[k].dim())));
  return kron_all(f);
}

/// Spin-spin coupling C of each model: sigma1x sigma2x, Sigma1x Sigma2x or the N-fold sigma_x product.
Matrix spin_coupling(const std::vector<SpinSpec> &spins) {
  std::vector<Matrix> f;
  for (const auto &s : spins)
    f.push_back(spin_ops(s).x.matrix());
  return kron_all(f);
}

struct SpinObservable {
  std::string name;
  Matrix spin; // on the full spin space; empty for the photon number
};

std::vector<SpinObservable> spin_observables(ModelKind model, const std::vector<SpinSpec> &spins) {
  std::vector<SpinObservable> out;
  std::vector<Matrix> x, z;
  for (const auto &s : spins) {
    const auto o = spin_ops(s);
    x.push_back(o.x.matrix());
    z.push_back(o.z.matrix());
  }
  switch (model) {
  case ModelKind::two_qubit:
    out.push_back({"sigma1z", spin_single(spins, 0, z[0])});
    out.push_back({"sigma2z", spin_single(spins, 1, z[1])});
    out.push_back({"sigma1x", spin_single(spins, 0, x[0])});
    out.push_back({"sigma2x", spin_single(spins, 1, x[1])});
    out.push_back({"sxx", kron(x[0], x[1])});
    out.push_back({"szz", kron(z[0], z[1])});
    break;
  case ModelKind::two_qutrit:
    out.push_back({"Sigma1z", spin_single(spins, 0, z[0])});
    out.push_back({"Sigma2z", spin_single(spins, 1, z[1])});
    out.push_back({"SxSx", kron(x[0], x[1])});
    out.push_back({"Sz_tot", spin_single(spins, 0, z[0]) + spin_single(spins, 1, z[1])});
    break;
  case ModelKind::chain:
    for (std::size_t k = 0; k < spins.size(); ++k)
      out.push_back({"sigma" + std::to_string(k + 1) + "z", spin_single(spins, k, z[k])});
    out.push_back({"xall", spin_coupling(spins)});
    break;
  }
  out.push_back({"n", Matrix()});
  return out;
}

std::vector<SpinSpec> full_spins(const ScenarioConfig &cfg) {
  switch (cfg.model) {
  case ModelKind::two_qubit:
    return {{SpinKind::qubit}, {SpinKind::qubit}};
  case ModelKind::two_qutrit:
    return {{SpinKind::qutrit}, {SpinKind::qutrit}};
  case ModelKind::chain:
    return std::vector<SpinSpec>(std::get<models::ChainParams>(cfg.params).N, SpinSpec{SpinKind::qubit});
  }
  fail("unknown model");
}

double model_omega(const Params &p) {
  return std::visit([](const auto &q) { return q.omega; }, p);
}

/// Spin-factor amplitudes of the initial state on the full spin space.
Vector initial_spin_vector(const ScenarioConfig &cfg) {
  const auto spins = full_spins(cfg);
  const SpinKind kind = spins.front().kind;
  auto index_of = [&](const std::vector<int> &pattern, const std::string &where) {
    if (pattern.size() != spins.size())
      fail(where + ": pattern length " + std::to_string(pattern.size()) + " does not match " +
           std::to_string(spins.size()) + " spins");
    std::size_t idx = 0;
    for (int v : pattern) {
      const bool ok = kind == SpinKind::qubit ? (v == 1 || v == -1) : (v >= -1 && v <= 1);
      if (!ok)
        fail(where + ": invalid spin value " + std::to_string(v));
      idx = idx * static_cast<std::size_t>(spins.front().dim()) + spin_level_index(kind, v);
    }
    return idx;
  };
  std::size_t dim = 1;
  for (const auto &s : spins)
    dim *= static_cast<std::size_t>(s.dim());
  Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
  if (cfg.initial.terms.empty()) {
    v(static_cast<Eigen::Index>(index_of(cfg.initial.pattern, "initial_state.pattern"))) = 1.0;
  } else {
    for (const auto &t : cfg.initial.terms)
      v(static_cast<Eigen::Index>(index_of(t.pattern, "initial_state.terms[].pattern"))) += Complex(t.re, t.im);
  }
  if (v.norm() == 0.0)
    fail("initial_state: spin amplitudes vanish");
  return v / v.norm();
}

/// Index of the enumerated sector holding the whole spin vector, if any.
std::optional<std::size_t> sector_of(const Vector &spin, const std::vector<symmetry::SubspaceBasis> &sectors) {
  for (std::size_t s = 0; s < sectors.size(); ++s) {
    double inside = 0.0;
    for (auto k : sectors[s].spin_states)
      inside += std::norm(spin(static_cast<Eigen::Index>(k)));
    if (std::abs(1.0 - inside) <= 1e-14)
      return s;
  }
  return std::nullopt;
}

Matrix selector(std::size_t full_dim, const std::vector<std::size_t> &states) {
  Matrix p = Matrix::Zero(static_cast<Eigen::Index>(full_dim), static_cast<Eigen::Index>(states.size()));
  for (std::size_t k = 0; k < states.size(); ++k)
    p(static_cast<Eigen::Index>(states[k]), static_cast<Eigen::Index>(k)) = 1.0;
  return p;
}

std::vector<int> pattern_of(std::size_t index, std::size_t n) {
  std::vector<int> pattern(n);
  for (std::size_t k = 0; k < n; ++k)
    pattern[n - 1 - k] = spin_level_value(SpinKind::qubit, (index >> k) & 1u);
  return pattern;
}

} // namespace

std::string to_string(ModelKind k) {
  switch (k) {
  case ModelKind::two_qubit: return "two_qubit";
  case ModelKind::two_qutrit: return "two_qutrit";
  case ModelKind::chain: return "chain";
  }
  return "?";
}

std::string to_string(HamiltonianKind k) {
  switch (k) {
  case HamiltonianKind::full: return "full";
  case HamiltonianKind::effective: return "effective";
  case HamiltonianKind::jc: return "jc";
  }
  return "?";
}

std::string to_string(TimeAxis a) {
  switch (a) {
  case TimeAxis::t: return "t";
  case TimeAxis::tau_minus: return "tau_minus";
  case TimeAxis::tau_plus: return "tau_plus";
  case TimeAxis::tau_eff: return "tau_eff";
  }
  return "?";
}

std::string to_string(ClosedForm f) {
  switch (f) {
  case ClosedForm::sigma_z: return "sigma_z";
  case ClosedForm::xx: return "xx";
  case ClosedForm::concurrence: return "concurrence";
  }
  return "?";
}

ScenarioConfig from_json_text(const std::string &body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error &e) {
    fail(std::string("config is not valid JSON: ") + e.what());
  }
  allow_keys(j, "config",
             {"name", "model", "hamiltonian", "params", "n_max", "initial_state", "grid", "observables",
              "rotating_frame", "perturbation", "compare"});
  ScenarioConfig c;
  c.name = text(j, "config", "name");
  c.model = parse_enum<ModelKind>(text(j, "config", "model"), "model",
                                  {{"two_qubit", ModelKind::two_qubit},
                                   {"two_qutrit", ModelKind::two_qutrit},
                                   {"chain", ModelKind::chain}});
  c.hamiltonian = j.contains("hamiltonian")
                      ? parse_enum<HamiltonianKind>(text(j, "config", "hamiltonian"), "hamiltonian",
                                                    {{"full", HamiltonianKind::full},
                                                     {"effective", HamiltonianKind::effective},
                                                     {"jc", HamiltonianKind::jc}})
                      : HamiltonianKind::full;
  c.params = parse_params(c.model, need(j, "config", "params"));
  c.n_max = integer(j, "config", "n_max");
  c.initial = parse_initial(need(j, "config", "initial_state"));

  const json &g = need(j, "config", "grid");
  allow_keys(g, "grid", {"axis", "max", "points"});
  c.grid.axis = parse_enum<TimeAxis>(text(g, "grid", "axis"), "grid.axis",
                                     {{"t", TimeAxis::t},
                                      {"tau_minus", TimeAxis::tau_minus},
                                      {"tau_plus", TimeAxis::tau_plus},
                                      {"tau_eff", TimeAxis::tau_eff}});
  c.grid.max = num(g, "grid", "max");
  c.grid.points = integer(g, "grid", "points");

  const json &obs = need(j, "config", "observables");
  if (!obs.is_array())
    fail("observables: expected an array");
  for (const auto &o : obs) {
    ObservableRequest r;
    if (o.is_string()) {
      r.name = o.get<std::string>();
    } else {
      allow_keys(o, "observables[]", {"name", "frame", "column"});
      r.name = text(o, "observables[]", "name");
      if (o.contains("frame"))
        r.rotating = parse_enum<bool>(text(o, "observables[]", "frame"), "observables[].frame",
                                      {{"lab", false}, {"rotating", true}});
      if (o.contains("column"))
        r.column = text(o, "observables[]", "column");
    }
    if (r.column.empty())
      r.column = default_column(r);
    c.observables.push_back(r);
  }

  if (j.contains("rotating_frame")) {
    const json &f = j["rotating_frame"];
    allow_keys(f, "rotating_frame", {"mode", "spin"});
    c.frame.mode = num_or(f, "rotating_frame", "mode", 1.0);
    c.frame.spin = num_or(f, "rotating_frame", "spin", 1.0);
  }
  if (j.contains("perturbation")) {
    const json &p = j["perturbation"];
    allow_keys(p, "perturbation", {"sigma1x"});
    c.perturbation.sigma1x = num_or(p, "perturbation", "sigma1x", 0.0);
  }
  if (j.contains("compare")) {
    const json &cmp = j["compare"];
    allow_keys(cmp, "compare", {"pairs"});
    const json &pairs = need(cmp, "compare", "pairs");
    if (!pairs.is_array())
      fail("compare.pairs: expected an array");
    for (const auto &p : pairs) {
      allow_keys(p, "compare.pairs[]", {"series", "closed_form", "tolerance", "window"});
      ComparePair cp;
      cp.series = text(p, "compare.pairs[]", "series");
      cp.closed_form = parse_closed_form(text(p, "compare.pairs[]", "closed_form"), "compare.pairs[].closed_form");
      cp.tolerance = num(p, "compare.pairs[]", "tolerance");
      if (p.contains("window")) {
        const json &w = p["window"];
        if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number())
          fail("compare.pairs[].window: expected [lo, hi]");
        cp.window = std::make_pair(w[0].get<double>(), w[1].get<double>());
      }
      c.compare.push_back(cp);
    }
  }
  validate(c);
  return c;
}

ScenarioConfig load_file(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    fail("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

ScenarioConfig load_preset(const std::string &name) {
  for (const auto &[n, body] : preset_sources())
    if (n == name)
      return from_json_text(body);
  std::string known;
  for (const auto &n : preset_names())
    known += (known.empty() ? "" : ", ") + n;
  fail("unknown preset '" + name + "' (known: " + known + ")");
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto &[n, body] : preset_sources())
    out.push_back(n);
  return out;
}

std::string to_json_text(const ScenarioConfig &c) {
  json j;
  j["name"] = c.name;
  j["model"] = to_string(c.model);
  j["hamiltonian"] = to_string(c.hamiltonian);
  j["params"] = params_json(c.params);
  j["n_max"] = c.n_max;
  json init;
  if (c.initial.terms.empty()) {
    init["kind"] = "pattern";
    init["pattern"] = c.initial.pattern;
  } else {
    init["kind"] = "amplitudes";
    init["terms"] = json::array();
    for (const auto &t : c.initial.terms)
      init["terms"].push_back({{"pattern", t.pattern}, {"re", t.re}, {"im", t.im}});
  }
  if (c.initial.alpha_im == 0.0)
    init["alpha"] = c.initial.alpha_re;
  else
    init["alpha"] = {c.initial.alpha_re, c.initial.alpha_im};
  j["initial_state"] = init;
  j["grid"] = {{"axis", to_string(c.grid.axis)}, {"max", c.grid.max}, {"points", c.grid.points}};
  j["observables"] = json::array();
  for (const auto &o : c.observables)
    j["observables"].push_back({{"name", o.name}, {"frame", o.rotating ? "rotating" : "lab"}, {"column", o.column}});
  j["rotating_frame"] = {{"mode", c.frame.mode}, {"spin", c.frame.spin}};
  j["perturbation"] = {{"sigma1x", c.perturbation.sigma1x}};
  if (!c.compare.empty()) {
    json pairs = json::array();
    for (const auto &p : c.compare) {
      json e = {{"series", p.series}, {"closed_form", to_string(p.closed_form)}, {"tolerance", p.tolerance}};
      if (p.window)
        e["window"] = {p.window->first, p.window->second};
      pairs.push_back(e);
    }
    j["compare"] = {{"pairs", pairs}};
  }
  return j.dump(2);
}

std::vector<std::string> observable_names(const ScenarioConfig &cfg) {
  std::vector<std::string> out;
  for (const auto &o : spin_observables(cfg.model, full_spins(cfg)))
    out.push_back(o.name);
  return out;
}

void validate(const ScenarioConfig &c) {
  if (c.name.empty() || c.name.find_first_of("/\\") != std::string::npos)
    fail("name: must be non-empty and contain no path separators");
  const bool params_match = (c.model == ModelKind::two_qubit && std::holds_alternative<models::TwoQubitParams>(c.params)) ||
                            (c.model == ModelKind::two_qutrit && std::holds_alternative<models::TwoQutritParams>(c.params)) ||
                            (c.model == ModelKind::chain && std::holds_alternative<models::ChainParams>(c.params));
  if (!params_match)
    fail("params do not match the model kind");
  try {
    std::visit([](const auto &p) { models::validate(p); }, c.params);
  } catch (const Error &e) {
    fail(std::string("params: ") + e.what());
  }
  if (c.model == ModelKind::chain && c.hamiltonian == HamiltonianKind::jc)
    fail("hamiltonian: the chain model has no JC form here; use full or effective");
  if (c.n_max < 1)
    fail("n_max: must be >= 1");
  const Complex alpha(c.initial.alpha_re, c.initial.alpha_im);
  if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag()))
    fail("initial_state.alpha: must be finite");
  const int need_n = required_n_max(alpha, kCoherentTailTol);
  if (need_n > c.n_max)
    fail("n_max=" + std::to_string(c.n_max) + " fails the coherent-state tail gate for |alpha|=" +
         std::to_string(std::abs(alpha)) + "; need n_max >= " + std::to_string(need_n));
  initial_spin_vector(c); // pattern checks
  if (c.grid.points < 2)
    fail("grid.points: must be >= 2");
  if (!(c.grid.max > 0.0) || !std::isfinite(c.grid.max))
    fail("grid.max: must be positive");
  if (c.grid.axis == TimeAxis::tau_plus && c.model != ModelKind::two_qubit)
    fail("grid.axis: tau_plus is defined for the two-qubit model only");
  if (c.grid.axis == TimeAxis::tau_minus && c.model == ModelKind::chain)
    fail("grid.axis: tau_minus is not defined for the chain model");
  if (c.grid.axis == TimeAxis::tau_eff && c.model != ModelKind::chain)
    fail("grid.axis: tau_eff is defined for the chain model only");
  const auto known = observable_names(c);
  std::set<std::string> columns;
  for (const auto &o : c.observables) {
    if (std::find(known.begin(), known.end(), o.name) == known.end()) {
      std::string list;
      for (const auto &k : known)
        list += (list.empty() ? "" : ", ") + k;
      fail("observables: '" + o.name + "' is not defined for " + to_string(c.model) + " (known: " + list + ")");
    }
    if (o.rotating && c.hamiltonian == HamiltonianKind::jc)
      fail("observables: JC runs are already in the interaction frame; rotating observables are not allowed");
    if (!columns.insert(o.column).second)
      fail("observables: duplicate column '" + o.column + "'");
  }
  for (const char *reserved : {"t", "tau_minus", "tau_plus", "tau_eff", "omega_t", "norm", "energy", "leakage", "concurrence"})
    if (columns.count(reserved))
      fail(std::string("observables: column name '") + reserved + "' is reserved");
  if (c.perturbation.sigma1x != 0.0 && c.hamiltonian != HamiltonianKind::full)
    fail("perturbation: only full Hamiltonians can be perturbed");
  if (!std::isfinite(c.frame.mode) || !std::isfinite(c.frame.spin) || !std::isfinite(c.perturbation.sigma1x))
    fail("rotating_frame/perturbation: values must be finite");
  for (const auto &p : c.compare) {
    if (!(p.tolerance > 0.0))
      fail("compare.pairs[].tolerance: must be positive");
    if (p.window && !(p.window->second > p.window->first))
      fail("compare.pairs[].window: need lo < hi");
  }
}

CompositeSpace full_space(const ScenarioConfig &cfg) {
  const double omega = model_omega(cfg.params);
  switch (cfg.model) {
  case ModelKind::two_qubit:
    return models::two_qubit_space(cfg.n_max, omega);
  case ModelKind::two_qutrit:
    return models::two_qutrit_space(cfg.n_max, omega);
  case ModelKind::chain:
    return models::chain_space(std::get<models::ChainParams>(cfg.params).N, cfg.n_max, omega);
  }
  fail("unknown model");
}

Operator full_hamiltonian(const ScenarioConfig &cfg, const CompositeSpace &space) {
  Operator H = std::visit(
      [&](const auto &p) -> Operator {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, models::TwoQubitParams>)
          return models::build_two_qubit_full(p, space);
        else if constexpr (std::is_same_v<T, models::TwoQutritParams>)
          return models::build_two_qutrit_full(p, space);
        else
          return models::build_chain_full(p, space);
      },
      cfg.params);
  if (cfg.perturbation.sigma1x != 0.0)
    H = H + cfg.perturbation.sigma1x * tensor_embed(spin_ops(space.spins().front()).x, 0, space);
  return H;
}

symmetry::ModelSpec model_spec(const ScenarioConfig &cfg) {
  return std::visit(
      [](const auto &p) -> symmetry::ModelSpec {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, models::TwoQubitParams>)
          return symmetry::TwoQubitModel{p};
        else if constexpr (std::is_same_v<T, models::TwoQutritParams>)
          return symmetry::TwoQutritModel{p};
        else
          return symmetry::ChainModel{p};
      },
      cfg.params);
}

PreparedRun prepare(const ScenarioConfig &cfg) {
  validate(cfg);
  const CompositeSpace full = full_space(cfg);
  const auto spins = full.spins();
  const double omega = model_omega(cfg.params);
  const Vector spin0 = initial_spin_vector(cfg);
  const Complex alpha(cfg.initial.alpha_re, cfg.initial.alpha_im);
  const auto sectors = symmetry::enumerate_subspaces(model_spec(cfg), full);
  const auto home = sector_of(spin0, sectors);

  std::optional<Operator> H;
  std::optional<dynamics::SpinEmbedding> embedding;
  CompositeSpace space = full;
  std::string label = home ? sectors[*home].label : std::string();

  if (cfg.hamiltonian == HamiltonianKind::full) {
    H = full_hamiltonian(cfg, full);
  } else {
    if (!home)
      fail("initial_state: an " + to_string(cfg.hamiltonian) +
           " run needs the initial spin state inside one invariant sector");
    const auto &sec = sectors[*home];
    Matrix W = selector(full.spin_dim(), sec.spin_states);
    const SpinKind kind = cfg.model == ModelKind::two_qutrit ? SpinKind::qutrit : SpinKind::qubit;
    space = models::fictitious_space(kind, cfg.n_max, omega);
    if (cfg.model == ModelKind::two_qubit) {
      const auto &p = std::get<models::TwoQubitParams>(cfg.params);
      if (cfg.hamiltonian == HamiltonianKind::effective) {
        H = models::build_two_qubit_effective(p, sec.label == "a" ? models::Sector::a : models::Sector::b, space);
      } else {
        if (sec.label != "b")
          fail("hamiltonian: the JC form describes sector b ({|ud>, |du>}) only");
        H = models::build_two_qubit_jc(p, space);
        W = W * models::jc_rotation(kind).adjoint();
      }
    } else if (cfg.model == ModelKind::two_qutrit) {
      if (sec.label != "Sz_tot=0")
        fail("hamiltonian: the effective qutrit model describes the Sz_tot=0 sector only");
      const auto &p = std::get<models::TwoQutritParams>(cfg.params);
      if (cfg.hamiltonian == HamiltonianKind::effective) {
        H = models::build_qutrit_effective(p, space);
      } else {
        H = models::build_qutrit_jc(p, space);
        W = W * models::jc_rotation(kind).adjoint();
      }
    } else {
      const auto &p = std::get<models::ChainParams>(cfg.params);
      H = models::build_chain_effective(p, pattern_of(sec.spin_states.front(), spins.size()), space);
    }
    embedding = dynamics::SpinEmbedding{W, full};
  }

  // initial state on the simulated space
  const Vector sim_spin = embedding ? embedding->pull_back_spin(spin0) : spin0;
  StateVector psi0 = product_state(sim_spin, alpha, space);

  // observables: spin part pulled back through the embedding, tensored with the mode
  const auto fd = static_cast<Eigen::Index>(space.fock_dim());
  const Eigen::Index sd = static_cast<Eigen::Index>(space.spin_dim());
  const Matrix n_mode = number_op(*space.mode()).matrix();
  auto on_space = [&](const Matrix &full_spin_op) {
    Matrix s = embedding ? Matrix(embedding->isometry.adjoint() * full_spin_op * embedding->isometry) : full_spin_op;
    s = 0.5 * (s + s.adjoint()).eval();
    return Operator(kron(s, Matrix::Identity(fd, fd)), space, true);
  };
  const auto defs = spin_observables(cfg.model, spins);
  std::vector<dynamics::ObservableSpec> observables;
  bool any_rotating = false;
  for (const auto &req : cfg.observables) {
    const auto it = std::find_if(defs.begin(), defs.end(), [&](const auto &d) { return d.name == req.name; });
    Operator op = it->spin.size() == 0 ? Operator(kron(Matrix::Identity(sd, sd), n_mode), space, true)
                                       : on_space(it->spin);
    observables.push_back({req.column, std::move(op), req.rotating});
    any_rotating = any_rotating || req.rotating;
  }

  std::optional<Operator> generator;
  if (any_rotating) {
    Operator G = on_space(spin_coupling(spins)).scaled(cfg.frame.spin * omega);
    G = G + Operator(kron(Matrix::Identity(sd, sd), n_mode), space, true).scaled(cfg.frame.mode * omega);
    generator = std::move(G);
  }

  // sector indices on the simulated space
  std::vector<std::size_t> sector_idx;
  if (embedding) {
    sector_idx.resize(space.dim());
    for (std::size_t i = 0; i < space.dim(); ++i)
      sector_idx[i] = i;
  } else if (home) {
    sector_idx = sectors[*home].flat();
  }

  // time axis
  double scale = 1.0;
  std::vector<std::pair<std::string, double>> columns;
  auto lam = [&](int sign) {
    return std::visit(
        [&](const auto &p) -> double {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, models::ChainParams>)
            return 0.0;
          else
            return p.lam1 + sign * p.lam2;
        },
        cfg.params);
  };
  switch (cfg.grid.axis) {
  case TimeAxis::t:
    break;
  case TimeAxis::tau_minus:
    scale = std::abs(lam(-1));
    break;
  case TimeAxis::tau_plus:
    scale = std::abs(lam(+1));
    break;
  case TimeAxis::tau_eff: {
    if (!home)
      fail("grid.axis: tau_eff needs the initial state inside one chain sector");
    const auto &p = std::get<models::ChainParams>(cfg.params);
    scale = std::abs(models::chain_sector_params(p, pattern_of(sectors[*home].spin_states.front(), spins.size())).delta_eff);
    break;
  }
  }
  if (!(scale > 0.0))
    fail("grid.axis: " + to_string(cfg.grid.axis) + " has a vanishing coupling; use axis 't'");
  if (cfg.grid.axis != TimeAxis::t)
    columns.emplace_back(to_string(cfg.grid.axis), scale);
  if (cfg.model == ModelKind::two_qutrit)
    columns.emplace_back("omega_t", omega);

  std::vector<double> times(static_cast<std::size_t>(cfg.grid.points));
  const double t_max = cfg.grid.max / scale;
  for (int i = 0; i < cfg.grid.points; ++i)
    times[static_cast<std::size_t>(i)] = t_max * i / (cfg.grid.points - 1);

  return PreparedRun{space,       std::move(*H), std::move(psi0), std::move(observables), std::move(generator),
                     std::move(sector_idx), label, std::move(embedding), std::move(times), std::move(columns)};
}

dynamics::Trajectory run(const PreparedRun &r) {
  const auto prop = dynamics::diagonalize(r.hamiltonian);
  dynamics::SamplingOptions opt;
  opt.hamiltonian = &r.hamiltonian;
  if (r.generator)
    opt.frame.emplace(*r.generator);
  if (!r.sector.empty())
    opt.sector = r.sector;
  opt.embedding = r.embedding;
  return dynamics::sample_trajectory(prop, r.psi0, r.times, r.observables, opt);
}

} // namespace rabi::scenario
