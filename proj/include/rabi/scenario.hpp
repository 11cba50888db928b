#pragma once

// Scenario configuration (JSON), presets, and translation of a scenario into
// a concrete run: simulated space, Hamiltonian, initial state, observables.

#include "rabi/dynamics.hpp"
#include "rabi/models.hpp"
#include "rabi/symmetry.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace rabi::scenario {

enum class ModelKind { two_qubit, two_qutrit, chain };
enum class HamiltonianKind { full, effective, jc };
/// Grid axis: plain time, lam_minus t, lam_plus t, or delta_eff t (chain).
enum class TimeAxis { t, tau_minus, tau_plus, tau_eff };

using Params = std::variant<models::TwoQubitParams, models::TwoQutritParams, models::ChainParams>;

struct AmplitudeTerm {
  std::vector<int> pattern;
  double re = 0.0, im = 0.0;
  bool operator==(const AmplitudeTerm &) const = default;
};

/// Spin part either a single basis pattern (+1/-1 for qubits, +1/0/-1 for
/// qutrits) or an explicit superposition, times a coherent state.
struct InitialState {
  std::vector<int> pattern;          // used when terms is empty
  std::vector<AmplitudeTerm> terms;
  double alpha_re = 0.0, alpha_im = 0.0;
  bool operator==(const InitialState &) const = default;
};

struct Grid {
  TimeAxis axis = TimeAxis::t;
  double max = 1.0;
  int points = 2;
  bool operator==(const Grid &) const = default;
};

struct ObservableRequest {
  std::string name;
  bool rotating = false;
  std::string column; // defaults to name, or name + "_rot"
  bool operator==(const ObservableRequest &) const = default;
};

/// G = omega (mode a^dag a + spin C), C the spin-spin coupling operator.
struct RotatingFrame {
  double mode = 1.0;
  double spin = 1.0;
  bool operator==(const RotatingFrame &) const = default;
};

/// Symmetry-breaking term added to full Hamiltonians (test fixtures).
struct Perturbation {
  double sigma1x = 0.0;
  bool operator==(const Perturbation &) const = default;
};

enum class ClosedForm { sigma_z, xx, concurrence };

struct ComparePair {
  std::string series;
  ClosedForm closed_form = ClosedForm::xx;
  double tolerance = 0.0;
  std::optional<std::pair<double, double>> window; // tau_minus range
  bool operator==(const ComparePair &) const = default;
};

struct ScenarioConfig {
  std::string name;
  ModelKind model = ModelKind::two_qubit;
  HamiltonianKind hamiltonian = HamiltonianKind::full;
  Params params;
  int n_max = 1;
  InitialState initial;
  Grid grid;
  std::vector<ObservableRequest> observables;
  RotatingFrame frame;
  Perturbation perturbation;
  std::vector<ComparePair> compare; // empty: defaults chosen by compare
  bool operator==(const ScenarioConfig &) const = default;
};

/// Parse and validate. Throws ConfigError with a readable message.
ScenarioConfig from_json_text(const std::string &text);
ScenarioConfig load_file(const std::filesystem::path &path);
ScenarioConfig load_preset(const std::string &name);
std::vector<std::string> preset_names();
/// Table generated at configure time: (name, json text).
const std::vector<std::pair<std::string, std::string>> &preset_sources();

std::string to_json_text(const ScenarioConfig &cfg);
void validate(const ScenarioConfig &cfg);

std::string to_string(ModelKind k);
std::string to_string(HamiltonianKind k);
std::string to_string(TimeAxis a);
std::string to_string(ClosedForm f);

/// Observable names understood for a model.
std::vector<std::string> observable_names(const ScenarioConfig &cfg);

/// Full-model space for the config's model and n_max.
CompositeSpace full_space(const ScenarioConfig &cfg);
/// Full Hamiltonian including any perturbation.
Operator full_hamiltonian(const ScenarioConfig &cfg, const CompositeSpace &space);
symmetry::ModelSpec model_spec(const ScenarioConfig &cfg);

/// A scenario resolved into something the propagator can run. For effective
/// and JC runs the simulated space is (fictitious spin) x Fock and
/// `embedding` maps it back into the full spin space.
struct PreparedRun {
  CompositeSpace space;
  Operator hamiltonian;
  StateVector psi0;
  std::vector<dynamics::ObservableSpec> observables;
  std::optional<Operator> generator;
  std::vector<std::size_t> sector; // simulated-space indices of the initial sector
  std::string sector_label;        // empty when the initial state spans sectors
  std::optional<dynamics::SpinEmbedding> embedding;
  std::vector<double> times;
  /// Extra time columns written next to t: (name, factor), column = factor * t.
  std::vector<std::pair<std::string, double>> time_columns;
};

PreparedRun prepare(const ScenarioConfig &cfg);
dynamics::Trajectory run(const PreparedRun &prepared);

} // namespace rabi::scenario
