#include "rabi/analytic.hpp"

#include <cmath>
#include <sstream>

namespace rabi::analytic {

JCPrediction make_prediction(double alpha, double lam_minus, int n_terms) {
  if (!std::isfinite(alpha) || !std::isfinite(lam_minus))
    throw InvalidArgument("closed forms need finite alpha and lam_minus");
  if (n_terms < 2)
    throw InvalidArgument("closed forms need n_terms >= 2");
  JCPrediction p;
  p.alpha = alpha;
  p.lam_minus = lam_minus;
  p.n_terms = n_terms;
  // the c_{n+2} c_n cross term reaches two levels past the last full term
  p.tail_bound = 2.0 * poisson_tail(alpha * alpha, n_terms - 2);
  if (p.tail_bound > kCoherentTailTol) {
    std::ostringstream os;
    os << "closed-form truncation at n_terms=" << n_terms << " leaves tail bound " << p.tail_bound;
    throw TruncationError(os.str(), required_n_max(Complex(alpha), kCoherentTailTol / 2.0) + 2);
  }
  p.c = coherent_amplitudes(Complex(alpha), n_terms).real();
  return p;
}

double sigma_z_closed_form(const JCPrediction &pred, double tau) {
  if (tau < 0.0)
    throw InvalidArgument("tau must be non-negative");
  const auto &c = pred.c;
  const int N = pred.n_terms;
  double sum = 0.0;
  for (int n = 0; n <= N; ++n) {
    const double s0 = std::sqrt(double(n)), s1 = std::sqrt(n + 1.0), s2 = std::sqrt(n + 2.0);
    sum += c(n) * c(n) * std::cos(s1 * tau) * std::cos(s0 * tau);
    if (n + 2 <= N)
      sum += c(n + 2) * c(n) * std::sin(s2 * tau) * std::sin(s1 * tau);
  }
  return sum;
}

double xx_closed_form(const JCPrediction &pred, double tau) {
  if (tau < 0.0)
    throw InvalidArgument("tau must be non-negative");
  const auto &c = pred.c;
  const int N = pred.n_terms;
  double sum = 0.0;
  for (int n = 0; n <= N; ++n) {
    const double s0 = std::sqrt(double(n)), s1 = std::sqrt(n + 1.0);
    const double cn2 = c(n) * c(n);
    const double cn1 = n + 1 <= N ? c(n + 1) * c(n + 1) : 0.0;
    const double c1 = std::cos(s1 * tau), c0 = std::cos(s0 * tau), sn1 = std::sin(s1 * tau);
    sum += cn2 * (c1 * c1 - c0 * c0) + (cn1 - cn2) * sn1 * sn1;
  }
  return sum;
}

double concurrence_closed_form(const JCPrediction &pred, double tau) {
  if (tau < 0.0)
    throw InvalidArgument("tau must be non-negative");
  double sum = 0.0;
  for (int n = 0; n <= pred.n_terms; ++n)
    sum += pred.c(n) * pred.c(n) * std::cos(2.0 * std::sqrt(double(n)) * tau);
  return 0.5 * std::abs(1.0 - sum);
}

CollapseRevival collapse_revival_times(double alpha) {
  return {std::sqrt(2.0), 2.0 * M_PI * std::abs(alpha)};
}

AnalysisWindows analysis_windows(double alpha) {
  const auto t = collapse_revival_times(alpha);
  AnalysisWindows w{{3.5 * t.collapse, t.revival - 9.0}, {t.revival - 4.0, t.revival + 4.0}};
  if (!(w.collapse.hi > w.collapse.lo))
    throw InvalidArgument("alpha too small for separated collapse and revival windows");
  return w;
}

} // namespace rabi::analytic
