#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace oracle {

double poisson_tail(double mean, int n_max) {
  // sum the tail itself, term by term, so tiny tails keep their precision
  long double p = std::exp(-static_cast<long double>(mean));
  for (int n = 1; n <= n_max; ++n)
    p *= mean / n;
  long double tail = 0.0L;
  for (int n = n_max + 1; n < n_max + 5000; ++n) {
    p *= mean / n;
    tail += p;
    if (n > mean && p < 1e-30L * tail)
      break;
  }
  return static_cast<double>(tail);
}

std::vector<double> coherent_real(double alpha, int n_max) {
  std::vector<double> c(static_cast<std::size_t>(n_max) + 1);
  // log-free recursion from c_0 = 1, then renormalize
  long double v = 1.0L, norm = 0.0L;
  std::vector<long double> raw(c.size());
  for (int n = 0; n <= n_max; ++n) {
    if (n > 0)
      v *= alpha / std::sqrt(static_cast<long double>(n));
    raw[static_cast<std::size_t>(n)] = v;
    norm += v * v;
  }
  for (std::size_t n = 0; n < c.size(); ++n)
    c[n] = static_cast<double>(raw[n] / std::sqrt(norm));
  return c;
}

namespace {

// a + a^dag between Fock states
double quad(int n_out, int n_in) {
  if (n_out == n_in + 1)
    return std::sqrt(double(n_out));
  if (n_out + 1 == n_in)
    return std::sqrt(double(n_in));
  return 0.0;
}

double spin1_x(int m_out, int m_in) { return std::abs(m_out - m_in) == 1 ? 1.0 / std::sqrt(2.0) : 0.0; }

} // namespace

Mat two_qubit_hamiltonian(const TwoQubit &p, int n_max) {
  const int F = n_max + 1, D = 4 * F;
  Mat H = Mat::Zero(D, D);
  auto z = [](int s) { return s == 0 ? 1.0 : -1.0; };
  for (int s1 = 0; s1 < 2; ++s1)
    for (int s2 = 0; s2 < 2; ++s2)
      for (int n = 0; n < F; ++n) {
        const int i = (s1 * 2 + s2) * F + n;
        H(i, i) += p.omega * n + p.eps1 * z(s1) + p.eps2 * z(s2);
        H((1 - s1) * 2 * F + (1 - s2) * F + n, i) += p.gamma;
        for (int m = 0; m < F; ++m)
          H((s1 * 2 + s2) * F + m, i) += (p.lam1 * z(s1) + p.lam2 * z(s2)) * quad(m, n);
      }
  return H;
}

Mat two_qutrit_hamiltonian(const TwoQutrit &p, int n_max) {
  const int F = n_max + 1, D = 9 * F;
  Mat H = Mat::Zero(D, D);
  auto val = [](int level) { return 1 - level; }; // level 0 -> +1
  for (int l1 = 0; l1 < 3; ++l1)
    for (int l2 = 0; l2 < 3; ++l2)
      for (int n = 0; n < F; ++n) {
        const int i = (l1 * 3 + l2) * F + n;
        H(i, i) += p.omega * n + p.Omega * (val(l1) + val(l2));
        for (int k1 = 0; k1 < 3; ++k1)
          for (int k2 = 0; k2 < 3; ++k2)
            H((k1 * 3 + k2) * F + n, i) += p.gamma_x * spin1_x(val(k1), val(l1)) * spin1_x(val(k2), val(l2));
        for (int m = 0; m < F; ++m)
          H((l1 * 3 + l2) * F + m, i) += (p.lam1 * val(l1) + p.lam2 * val(l2)) * quad(m, n);
      }
  return H;
}

Mat chain_hamiltonian(const Chain &p, int n_max) {
  const int N = static_cast<int>(p.deltas.size());
  const int S = 1 << N, F = n_max + 1, D = S * F;
  Mat H = Mat::Zero(D, D);
  for (int s = 0; s < S; ++s) {
    double zsum = 0.0, coupling = 0.0;
    for (int k = 0; k < N; ++k) {
      const double z = ((s >> (N - 1 - k)) & 1) ? -1.0 : 1.0; // bit set = down
      zsum += z;
      coupling += p.deltas[static_cast<std::size_t>(k)] * z;
    }
    const int flipped = (S - 1) ^ s;
    for (int n = 0; n < F; ++n) {
      const int i = s * F + n;
      H(i, i) += p.omega * n + p.Omega * zsum;
      H(flipped * F + n, i) += p.gamma;
      for (int m = 0; m < F; ++m)
        H(s * F + m, i) += coupling * quad(m, n);
    }
  }
  return H;
}

Vec taylor_propagate(const Mat &H, Vec psi, double t, int steps, int order) {
  const double dt = t / steps;
  const Mat A = cd(0.0, -dt) * H;
  for (int s = 0; s < steps; ++s) {
    Vec term = psi, acc = psi;
    for (int k = 1; k <= order; ++k) {
      term = (A * term / static_cast<double>(k)).eval();
      acc += term;
    }
    psi = acc;
  }
  return psi;
}

JCExpectations jc_exact(cd a, cd b, double alpha, int n_max, double tau) {
  const auto c = coherent_real(alpha, n_max);
  std::vector<cd> up(c.size()), down(c.size());
  down[0] = b * c[0];
  for (int n = 0; n <= n_max; ++n) {
    const cd u0 = a * c[static_cast<std::size_t>(n)];
    if (n == n_max) {
      up[static_cast<std::size_t>(n)] = u0;
      break;
    }
    const cd d0 = b * c[static_cast<std::size_t>(n) + 1];
    const double th = std::sqrt(n + 1.0) * tau;
    up[static_cast<std::size_t>(n)] = std::cos(th) * u0 - cd(0, 1) * std::sin(th) * d0;
    down[static_cast<std::size_t>(n) + 1] = -cd(0, 1) * std::sin(th) * u0 + std::cos(th) * d0;
  }
  JCExpectations e{0, 0, 0};
  for (std::size_t n = 0; n < c.size(); ++n) {
    const cd x = std::conj(up[n]) * down[n]; // <up,n| ... |down,n>
    e.sx += 2.0 * x.real();
    e.sy += 2.0 * x.imag();
    e.sz += std::norm(up[n]) - std::norm(down[n]);
  }
  return e;
}

double wootters(const Mat &rho) {
  Mat sy(2, 2);
  sy << 0, cd(0, -1), cd(0, 1), 0;
  Mat yy = Mat::Zero(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      yy.block(2 * i, 2 * j, 2, 2) = sy(i, j) * sy;
  Mat tilde = yy * rho.conjugate() * yy;
  Eigen::ComplexEigenSolver<Mat> es(rho * tilde);
  std::vector<double> mu;
  for (int k = 0; k < 4; ++k)
    mu.push_back(std::sqrt(std::max(0.0, es.eigenvalues()(k).real())));
  std::sort(mu.rbegin(), mu.rend());
  return std::max(0.0, mu[0] - mu[1] - mu[2] - mu[3]);
}

} // namespace oracle
