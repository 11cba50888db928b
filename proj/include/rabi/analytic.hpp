#pragma once

// Closed-form resonant JC predictions for |up,down> x |alpha> in sector b,
// evaluated term by term as stated, truncated at n_terms with a checked tail bound.
// All three take tau = lam_minus * t.

#include "rabi/hilbert.hpp"

namespace rabi::analytic {

struct JCPrediction {
  double alpha = 0.0;
  double lam_minus = 0.0;
  int n_terms = 0;
  double tail_bound = 0.0;
  Eigen::VectorXd c; // c_0 .. c_{n_terms}, renormalized

  double tau(double t) const { return lam_minus * t; }
};

/// Real alpha only. Throws TruncationError when the tail bound exceeds 1e-10.
JCPrediction make_prediction(double alpha, double lam_minus, int n_terms);

/// sum_n [c_n^2 cos(sqrt(n+1) tau) cos(sqrt(n) tau) + c_{n+2} c_n sin(sqrt(n+2) tau) sin(sqrt(n+1) tau)]
double sigma_z_closed_form(const JCPrediction &pred, double tau);

/// sum_n {c_n^2 [cos^2(sqrt(n+1) tau) - cos^2(sqrt(n) tau)] + (c_{n+1}^2 - c_n^2) sin^2(sqrt(n+1) tau)}
double xx_closed_form(const JCPrediction &pred, double tau);

/// (1/2) | 1 - sum_n c_n^2 cos(2 sqrt(n) tau) |
double concurrence_closed_form(const JCPrediction &pred, double tau);

/// Standard coherent-state JC estimates in units of 1/lam: Gaussian collapse
/// time sqrt(2) and revival spacing 2 pi sqrt(nbar). Used to place analysis
/// windows only.
struct CollapseRevival {
  double collapse;
  double revival;
};
CollapseRevival collapse_revival_times(double alpha);

struct Window {
  double lo, hi;
  bool contains(double x) const { return x >= lo && x <= hi; }
};

/// collapse: [3.5 t_c, t_r - 9], revival: [t_r - 4, t_r + 4] (tau units).
/// For alpha = 7 these are ~[4.95, 34.98] and ~[39.98, 47.98].
struct AnalysisWindows {
  Window collapse;
  Window revival;
};
AnalysisWindows analysis_windows(double alpha);

} // namespace rabi::analytic
