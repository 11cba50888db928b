#pragma once

// Full and effective Hamiltonians for the two-qubit, two-qutrit and N-qubit
// chain Rabi models. Frequencies are in units of a reference frequency, hbar = 1.

#include "rabi/hilbert.hpp"

#include <vector>

namespace rabi::models {

struct TwoQubitParams {
  double omega = 1.0;
  double eps1 = 0.0, eps2 = 0.0;
  double gamma = 0.0;
  double lam1 = 0.0, lam2 = 0.0;
  bool operator==(const TwoQubitParams &) const = default;
};

struct TwoQutritParams {
  double omega = 1.0;
  double Omega = 0.0;
  double gamma_x = 0.0;
  double lam1 = 0.0, lam2 = 0.0;
  bool operator==(const TwoQutritParams &) const = default;
};

struct ChainParams {
  int N = 2;
  double Omega = 0.0;
  double gamma = 0.0;
  double omega = 1.0;
  std::vector<double> deltas;
  bool operator==(const ChainParams &) const = default;
};

inline constexpr int kMaxChainLength = 8;

/// Sum/difference parameters of the two-qubit sectors and the detuning
/// gamma - omega of the JC reduction.
struct TwoQubitEffectiveParams {
  double eps_plus, eps_minus, lam_plus, lam_minus, Delta;
};
TwoQubitEffectiveParams effective_params(const TwoQubitParams &p);

/// Splitting and mode coupling of the chain sector containing `pattern`.
/// Omega_m = Omega (N - 2m), delta_eff = sum_k delta_k s_k.
struct ChainSectorParams {
  int m;
  double Omega_m;
  double delta_eff;
};
ChainSectorParams chain_sector_params(const ChainParams &p, const std::vector<int> &pattern);

enum class Sector { a, b };

void validate(const TwoQubitParams &p);
void validate(const TwoQutritParams &p);
void validate(const ChainParams &p);

CompositeSpace two_qubit_space(int n_max, double omega = 1.0);
CompositeSpace two_qutrit_space(int n_max, double omega = 1.0);
CompositeSpace chain_space(int N, int n_max, double omega = 1.0);
/// One fictitious spin (qubit or qutrit) tensor the mode.
CompositeSpace fictitious_space(SpinKind kind, int n_max, double omega = 1.0);

Operator build_two_qubit_full(const TwoQubitParams &p, const CompositeSpace &space);
Operator build_two_qubit_effective(const TwoQubitParams &p, Sector sector, const CompositeSpace &space);
/// -Delta sigma_z + lam_minus (a sigma_+ + a^dag sigma_-).
Operator build_two_qubit_jc(const TwoQubitParams &p, const CompositeSpace &space);

Operator build_two_qutrit_full(const TwoQutritParams &p, const CompositeSpace &space);

/// Restriction of the two-qutrit model to the Sigma_z_tot = 0 sector with
/// basis (|1,-1>, |0,0>, |-1,1>) identified with the spin-1 levels (+1, 0, -1).
/// Under the spin-1 convention the projection gives
///   (gamma_x/sqrt2) Sigma_x + omega a^dag a + lam_minus (a + a^dag) Sigma_z,
/// i.e. transverse factor 1/sqrt2 and coupling factor 1.
struct QutritConvention {
  double transverse_factor;
  double coupling_factor;
};
QutritConvention qutrit_convention();

Operator build_qutrit_effective(const TwoQutritParams &p, const CompositeSpace &space);
/// Rotated (Sigma_x -> Sigma_z) and rotating-wave form of the effective model:
///   g Sigma_z + omega a^dag a - (c lam_minus / 2)(a^dag Sigma_- + a Sigma_+),
/// with g = transverse_factor * gamma_x, c = coupling_factor. The 1/2 comes from
/// Sigma_x = (Sigma_+ + Sigma_-)/2 for spin-1 ladder operators.
Operator build_qutrit_jc(const TwoQutritParams &p, const CompositeSpace &space);

Operator build_chain_full(const ChainParams &p, const CompositeSpace &space);
/// Two-level model on the sector {|pattern>, |flipped pattern>} (in that order).
Operator build_chain_effective(const ChainParams &p, const std::vector<int> &pattern,
                               const CompositeSpace &space);

// Spin rotations that take the effective transverse field onto the z axis.
// For qubits R sigma_x R^dag = sigma_z and R sigma_z R^dag = -sigma_x
// (rotation by -pi/2 about y). With this sign the JC matrix run reproduces
// the closed forms with their stated signs. The qutrit analogue uses the
// spin-1 generator.
Matrix jc_rotation(SpinKind kind);

} // namespace rabi::models
