// Acceptance suite: one PASS/FAIL line per criterion, INFO lines for the
// diagnostics that explain a verdict. Exit status is 1 if any criterion fails.

#include "oracles.hpp"

#include "rabi/analytic.hpp"
#include "rabi/commands.hpp"
#include "rabi/scenario.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>

using namespace rabi;
using namespace rabi::scenario;

namespace {

int g_failures = 0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void verdict(const char *id, const char *title, bool ok, const std::string &detail) {
  std::printf("%s  %s %s: %s\n", ok ? "PASS" : "FAIL", id, title, detail.c_str());
  std::fflush(stdout);
  if (!ok)
    ++g_failures;
}

void info(const char *id, const std::string &detail) {
  std::printf("INFO  %s %s\n", id, detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char *f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

/// Trajectory plus its tau column.
struct Sampled {
  PreparedRun prepared;
  dynamics::Trajectory tr;
  std::vector<double> tau;
};

Sampled simulate(const ScenarioConfig &cfg) {
  Sampled s{prepare(cfg), {}, {}};
  s.tr = run(s.prepared);
  const double f = s.prepared.time_columns.empty() ? 1.0 : s.prepared.time_columns.front().second;
  for (double t : s.tr.times)
    s.tau.push_back(f * t);
  return s;
}

double max_over(const Sampled &s, double lo, double hi, const std::function<double(std::size_t)> &f) {
  double m = 0.0;
  for (std::size_t k = 0; k < s.tau.size(); ++k)
    if (s.tau[k] >= lo && s.tau[k] <= hi)
      m = std::max(m, f(k));
  return m;
}

double mean_over(const std::vector<double> &x, const std::vector<double> &tau, double lo, double hi) {
  double sum = 0.0;
  int n = 0;
  for (std::size_t k = 0; k < tau.size(); ++k)
    if (tau[k] >= lo && tau[k] <= hi) {
      sum += x[k];
      ++n;
    }
  return n ? sum / n : NAN;
}

double max_commutator(const Operator &H, const std::vector<symmetry::NamedOperator> &ops, std::string *worst) {
  double m = 0.0;
  for (const auto &c : ops) {
    const double v = symmetry::commutator_norm(H, c.op);
    if (v >= m) {
      m = v;
      *worst = c.name;
    }
  }
  return m;
}

// --- criteria ---------------------------------------------------------------

void symmetry_suite() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::string detail;
  for (const char *name : {"fig1", "fig4", "chain_n4_dfs"}) {
    const auto cfg = load_preset(name);
    const auto space = full_space(cfg);
    const Operator H = full_hamiltonian(cfg, space);
    const auto spec = model_spec(cfg);
    std::string worst;
    const double comm = max_commutator(H, symmetry::constants_of_motion(spec, space), &worst);
    const auto sectors = symmetry::enumerate_subspaces(spec, space);
    const double off = symmetry::verify_block_structure(H, sectors).off_block_max;
    ok = ok && comm <= 1e-12 && off <= 1e-12;
    detail += std::string(name) + " [" + worst + "] comm=" + fmt("%.2e", comm) + " off_block=" + fmt("%.2e", off) + "; ";
    if (cfg.model == ModelKind::chain) {
      const auto n = sectors.size(), m2 = symmetry::count_chain_sectors(sectors, 2);
      ok = ok && n == 8 && m2 == 3;
      detail += "sectors=" + std::to_string(n) + " m2=" + std::to_string(m2) + "; ";
    }
    if (cfg.model == ModelKind::two_qutrit) {
      const double pc = symmetry::commutator_norm(H, symmetry::qutrit_parity(space));
      const double po = symmetry::verify_block_structure(H, symmetry::qutrit_parity_subspaces(space)).off_block_max;
      info("C1", "two-qutrit parity (-1)^(Sz_tot): comm=" + fmt("%.2e", pc) + " off_block=" + fmt("%.2e", po) +
                     " (Sigma1x Sigma2x changes Sz_tot by 0 or +-2)");
    }
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < 10.0;
  verdict("C1", "symmetry suite", ok, detail + "runtime=" + fmt("%.1f s", secs));
}

void projection_oracle() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  const models::TwoQubitParams q = std::get<models::TwoQubitParams>(load_preset("fig1").params);
  const models::TwoQutritParams r = std::get<models::TwoQutritParams>(load_preset("fig4").params);
  models::ChainParams c = std::get<models::ChainParams>(load_preset("chain_n4_dfs").params);
  c.deltas = {0.1, 0.2, 0.3, 0.4};
  for (int n_max : {8, 32}) {
    const auto fict = models::fictitious_space(SpinKind::qubit, n_max);
    {
      const auto space = models::two_qubit_space(n_max);
      const auto H = models::build_two_qubit_full(q, space);
      const auto sec = symmetry::enumerate_subspaces(symmetry::TwoQubitModel{q}, space);
      worst = std::max(worst, max_abs(symmetry::project_hamiltonian(H, sec[0]).matrix() -
                                      models::build_two_qubit_effective(q, models::Sector::a, fict).matrix()));
      worst = std::max(worst, max_abs(symmetry::project_hamiltonian(H, sec[1]).matrix() -
                                      models::build_two_qubit_effective(q, models::Sector::b, fict).matrix()));
    }
    {
      const auto space = models::two_qutrit_space(n_max);
      const auto sec = symmetry::enumerate_subspaces(symmetry::TwoQutritModel{r}, space);
      worst = std::max(worst, max_abs(symmetry::project_hamiltonian(models::build_two_qutrit_full(r, space), sec[2]).matrix() -
                                      models::build_qutrit_effective(r, models::fictitious_space(SpinKind::qutrit, n_max)).matrix()));
    }
    {
      const auto space = models::chain_space(4, n_max);
      const auto H = models::build_chain_full(c, space);
      for (const auto &b : symmetry::enumerate_subspaces(symmetry::ChainModel{c}, space)) {
        std::vector<int> pattern;
        for (char ch : b.label)
          pattern.push_back(ch == 'u' ? 1 : -1);
        worst = std::max(worst, max_abs(symmetry::project_hamiltonian(H, b).matrix() -
                                        models::build_chain_effective(c, pattern, fict).matrix()));
      }
    }
  }
  const double secs = seconds_since(t0);
  verdict("C2", "projection oracle", worst <= 1e-12 && secs < 10.0,
          "two-qubit a/b, qutrit Sz_tot=0, 8 chain sectors at n_max 8 and 32: max|P - H_eff|=" + fmt("%.2e", worst) +
              " runtime=" + fmt("%.1f s", secs));
}

void jc_cross_validation() {
  const auto t0 = Clock::now();
  const auto cfg = load_preset("fig1_jc");
  const auto s = simulate(cfg);
  const auto &p = std::get<models::TwoQubitParams>(cfg.params);
  const auto pred = analytic::make_prediction(7.0, p.lam1 - p.lam2, cfg.n_max);
  double dz = 0.0, dxx = 0.0, dxx_half = 0.0, doracle = 0.0;
  const double a = 1.0 / std::sqrt(2.0);
  for (std::size_t k = 0; k < s.tau.size(); ++k) {
    const double tau = s.tau[k];
    dz = std::max(dz, std::abs(s.tr.at("sigma1z")[k] - analytic::sigma_z_closed_form(pred, tau)));
    const double xx = analytic::xx_closed_form(pred, tau);
    dxx = std::max(dxx, std::abs(s.tr.at("sxx")[k] - xx));
    dxx_half = std::max(dxx_half, std::abs(s.tr.at("sxx")[k] - 0.5 * xx));
    if (k % 20 == 0) {
      const auto e = oracle::jc_exact(a, a, 7.0, cfg.n_max, tau);
      doracle = std::max({doracle, std::abs(s.tr.at("sigma1z")[k] - e.sx), std::abs(s.tr.at("sxx")[k] - e.sz)});
    }
  }
  const double secs = seconds_since(t0);
  verdict("C3", "JC closed-form cross-validation", dz <= 1e-8 && dxx <= 1e-8 && secs < 30.0,
          "tau in [0,50], " + std::to_string(s.tau.size()) + " samples: max|sigma1z - sigma_z form|=" + fmt("%.2e", dz) +
              " max|sxx - xx form|=" + fmt("%.2e", dxx) + " runtime=" + fmt("%.1f s", secs));
  const auto &conc = s.tr.at("concurrence");
  info("C3", "max|sxx - xx form / 2|=" + fmt("%.2e", dxx_half) +
                 "; independent block-by-block JC solution vs run: " + fmt("%.2e", doracle) +
                 "; concurrence: max|C - form|=" +
                 fmt("%.3f", max_over(s, 0, 50, [&](std::size_t k) { return std::abs(conc[k] - analytic::concurrence_closed_form(pred, s.tau[k])); })) +
                 " mean C on [20,40]=" + fmt("%.3f", mean_over(conc, s.tau, 20, 40)));
}

void fig1_and_fig2() {
  auto t0 = Clock::now();
  ScenarioConfig cfg = load_preset("fig1");
  cfg.grid.max = 48.0;
  cfg.grid.points = 2401;
  const auto s = simulate(cfg);
  const double secs = seconds_since(t0);
  const auto &p = std::get<models::TwoQubitParams>(cfg.params);
  const auto pred = analytic::make_prediction(7.0, p.lam1 - p.lam2, cfg.n_max);
  const auto &sxx = s.tr.at("sxx");
  const auto &conc = s.tr.at("concurrence");

  const double d6 = max_over(s, 0, 40, [&](std::size_t k) { return std::abs(sxx[k] - analytic::xx_closed_form(pred, s.tau[k])); });
  const double d6h = max_over(s, 0, 40, [&](std::size_t k) { return std::abs(sxx[k] - 0.5 * analytic::xx_closed_form(pred, s.tau[k])); });
  const double collapse = max_over(s, 5, 35, [&](std::size_t k) { return std::abs(sxx[k]); });
  const double revival = max_over(s, 40, 48, [&](std::size_t k) { return std::abs(sxx[k]); });
  const double form_revival = max_over(s, 40, 48, [&](std::size_t k) { return std::abs(analytic::xx_closed_form(pred, s.tau[k])); });
  verdict("C4", "full two-qubit run vs xx closed form", d6 <= 0.05 && collapse < 0.1 && revival > 0.3 && secs < 120.0,
          "max|sxx - form| on [0,40]=" + fmt("%.3f", d6) + " collapse max|sxx| on [5,35]=" + fmt("%.3f", collapse) +
              " revival max|sxx| on [40,48]=" + fmt("%.3f", revival) + " runtime=" + fmt("%.1f s", secs));
  const auto &rz = s.tr.at("sigma1z_rot");
  info("C4", "max|sxx - form/2| on [0,40]=" + fmt("%.3f", d6h) + "; closed form itself peaks at " +
                 fmt("%.3f", form_revival) + " on [40,48]; max|sigma1z_rot - sigma_z form| on [0,40]=" +
                 fmt("%.3f", max_over(s, 0, 40, [&](std::size_t k) { return std::abs(rz[k] - analytic::sigma_z_closed_form(pred, s.tau[k])); })));

  const double d7 = max_over(s, 0, 40, [&](std::size_t k) { return std::abs(conc[k] - analytic::concurrence_closed_form(pred, s.tau[k])); });
  const double mean = mean_over(conc, s.tau, 20, 40);
  std::vector<double> form7;
  for (double tau : s.tau)
    form7.push_back(analytic::concurrence_closed_form(pred, tau));
  verdict("C5", "concurrence vs closed form", d7 <= 0.05 && std::abs(mean - 0.5) <= 0.05,
          "max|C - form| on [0,40]=" + fmt("%.3f", d7) + " mean C on [20,40]=" + fmt("%.3f", mean));
  info("C5", "closed form mean on [20,40]=" + fmt("%.3f", mean_over(form7, s.tau, 20, 40)) +
                 "; numeric concurrence max on [0,40]=" + fmt("%.3f", max_over(s, 0, 40, [&](std::size_t k) { return conc[k]; })));

  // same comparisons with the sector-b splitting 2 gamma equal to omega; the
  // frame generator is then -(omega a^dag a + gamma sigma1x sigma2x)
  t0 = Clock::now();
  ScenarioConfig half = cfg;
  std::get<models::TwoQubitParams>(half.params).gamma = 0.5;
  half.frame = {-1.0, -0.5};
  const auto h = simulate(half);
  const auto &hx = h.tr.at("sxx");
  const auto &hz = h.tr.at("sigma1z_rot");
  info("C4", "gamma = omega/2, frame -(a^dag a + sxx/2): max|sxx - form/2| on [0,40]=" +
                 fmt("%.3f", max_over(h, 0, 40, [&](std::size_t k) { return std::abs(hx[k] - 0.5 * analytic::xx_closed_form(pred, h.tau[k])); })) +
                 " max|sigma1z_rot - sigma_z form|=" +
                 fmt("%.2e", max_over(h, 0, 40, [&](std::size_t k) { return std::abs(hz[k] - analytic::sigma_z_closed_form(pred, h.tau[k])); })) +
                 " collapse max|sxx| on [5,35]=" + fmt("%.3f", max_over(h, 5, 35, [&](std::size_t k) { return std::abs(hx[k]); })) +
                 " revival max|sxx| on [40,48]=" + fmt("%.3f", max_over(h, 40, 48, [&](std::size_t k) { return std::abs(hx[k]); })) +
                 " max|C - form| on [0,40]=" + fmt("%.3f", max_over(h, 0, 40, [&](std::size_t k) { return std::abs(h.tr.at("concurrence")[k] - analytic::concurrence_closed_form(pred, h.tau[k])); })) +
                 " mean C on [20,40]=" + fmt("%.3f", mean_over(h.tr.at("concurrence"), h.tau, 20, 40)) +
                 " runtime=" + fmt("%.1f s", seconds_since(t0)));
}

void decoupling() {
  ScenarioConfig cfg = load_preset("fig1");
  auto &p = std::get<models::TwoQubitParams>(cfg.params);
  p.lam2 = p.lam1;
  cfg.grid = {TimeAxis::t, 4.0e5, 2000};
  cfg.observables = {{"sxx", false, "sxx"}};
  const auto s = simulate(cfg);
  double worst = 0.0;
  for (double v : s.tr.at("sxx"))
    worst = std::max(worst, std::abs(v));
  const auto pred = analytic::make_prediction(7.0, 0.0, cfg.n_max);
  double eq5 = 0.0;
  for (double t : s.tr.times)
    eq5 = std::max(eq5, std::abs(analytic::sigma_z_closed_form(pred, pred.tau(t)) - 1.0));
  verdict("C6", "decoupling limit", worst <= 1e-10 && eq5 <= 1e-14,
          "lam1 = lam2, t in [0,4e5]: max|sxx|=" + fmt("%.2e", worst) + "; sigma_z form at lam_minus = 0: max|value - 1|=" +
              fmt("%.2e", eq5));
}

void sector_a() {
  const auto t0 = Clock::now();
  const auto cfg = load_preset("fig3");
  const auto s = simulate(cfg);
  double leak = 0.0, norm = 0.0, energy = 0.0;
  const double e0 = s.tr.at("energy")[0];
  for (std::size_t k = 0; k < s.tau.size(); ++k) {
    leak = std::max(leak, s.tr.at("leakage")[k]);
    norm = std::max(norm, std::abs(s.tr.at("norm")[k] - 1.0));
    energy = std::max(energy, std::abs(s.tr.at("energy")[k] - e0));
  }
  const auto dir = std::filesystem::temp_directory_path() / "rabi_acceptance";
  const int code = commands::compare(cfg, dir).exit_code;
  verdict("C7", "sector a run", leak <= 1e-10 && norm <= 1e-9 && energy <= 1e-9 * std::max(1.0, std::abs(e0)) && code == 3,
          "max leakage=" + fmt("%.2e", leak) + " norm drift=" + fmt("%.2e", norm) + " energy drift=" + fmt("%.2e", energy) +
              " (E0=" + fmt("%.3f", e0) + ") compare exit=" + std::to_string(code) + " runtime=" + fmt("%.1f s", seconds_since(t0)));
}

/// max |x - baseline| in the collapse window and in the revival window, baseline = collapse-window mean.
struct Envelope {
  double baseline, collapse, revival;
};

Envelope envelope(const Sampled &s, const std::string &series, const analytic::AnalysisWindows &w) {
  const auto &x = s.tr.at(series);
  const double b = mean_over(x, s.tau, w.collapse.lo, w.collapse.hi);
  return {b, max_over(s, w.collapse.lo, w.collapse.hi, [&](std::size_t k) { return std::abs(x[k] - b); }),
          max_over(s, w.revival.lo, w.revival.hi, [&](std::size_t k) { return std::abs(x[k] - b); })};
}

void qutrits() {
  const auto t0 = Clock::now();
  ScenarioConfig cfg = load_preset("fig4");
  const auto s = simulate(cfg);
  const double secs = seconds_since(t0);
  double leak = 0.0;
  for (double v : s.tr.at("leakage"))
    leak = std::max(leak, v);
  const auto w = analytic::analysis_windows(7.0);
  const auto e = envelope(s, "SxSx", w);
  verdict("C8", "two-qutrit run", leak <= 1e-10 && e.collapse < 0.1 && e.revival > 0.3 && secs < 180.0,
          "max leakage out of Sz_tot=0=" + fmt("%.3f", leak) + "; SxSx baseline " + fmt("%.3f", e.baseline) +
              ", collapse window [" + fmt("%.2f", w.collapse.lo) + "," + fmt("%.2f", w.collapse.hi) + "] max dev " +
              fmt("%.3f", e.collapse) + ", revival window [" + fmt("%.2f", w.revival.lo) + "," + fmt("%.2f", w.revival.hi) +
              "] max dev " + fmt("%.3f", e.revival) + " runtime=" + fmt("%.1f s", secs));

  for (double gx : {1.0, std::sqrt(2.0)}) {
    ScenarioConfig eff = cfg;
    eff.hamiltonian = HamiltonianKind::effective;
    std::get<models::TwoQutritParams>(eff.params).gamma_x = gx;
    const auto se = simulate(eff);
    const auto ee = envelope(se, "SxSx", w);
    info("C8", "Sz_tot=0 block alone, gamma_x=" + fmt("%.4f", gx) + ": baseline " + fmt("%.3f", ee.baseline) +
                   " collapse dev " + fmt("%.3f", ee.collapse) + " revival dev " + fmt("%.3f", ee.revival));
  }
}

void chain_aligned() {
  const auto cfg = load_preset("chain_n4_aligned");
  const auto &p = std::get<models::ChainParams>(cfg.params);
  const auto sp = models::chain_sector_params(p, {1, 1, 1, 1});
  bool ok = std::abs(sp.delta_eff - 0.04) <= 1e-12 && std::abs(sp.Omega_m - 4 * p.Omega) <= 1e-12;
  double worst = 0.0;
  for (int n_max : {8, 32}) {
    const auto space = models::chain_space(4, n_max);
    const auto sectors = symmetry::enumerate_subspaces(symmetry::ChainModel{p}, space);
    const auto &b = sectors.front();
    ok = ok && b.label == "uuuu";
    const Matrix P = symmetry::project_hamiltonian(models::build_chain_full(p, space), b).matrix();
    worst = std::max(worst, max_abs(P - models::build_chain_effective(p, {1, 1, 1, 1}, models::fictitious_space(SpinKind::qubit, n_max)).matrix()));
    worst = std::max({worst, std::abs(P(0, 1) - Complex(0.04)), std::abs(P(0, 0) - Complex(4 * p.Omega))});
  }
  verdict("C9", "aligned chain sector", ok && worst <= 1e-12,
          "delta_eff=" + fmt("%.15g", sp.delta_eff) + " Omega_m=" + fmt("%.15g", sp.Omega_m) +
              " max|projection - expected|=" + fmt("%.2e", worst));
}

void small_propagation() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  auto check = [&](const Operator &H, const oracle::Mat &ref, const StateVector &psi0) {
    const auto prop = dynamics::diagonalize(H);
    oracle::Vec psi = psi0.amplitudes();
    for (int step = 1; step <= 10; ++step) {
      psi = oracle::taylor_propagate(ref, psi, 10.0, 1000, 14);
      worst = std::max(worst, (dynamics::evolve(prop, psi0, 10.0 * step).amplitudes() - psi).norm());
    }
  };
  {
    const int n_max = 15; // 4 x 16 = 64
    const auto space = models::two_qubit_space(n_max);
    Vector spin = Vector::Zero(4);
    spin(1) = 1.0;
    check(models::build_two_qubit_full({1.0, 0.5, 0.3, 1.0, 0.8, 0.6}, space),
          oracle::two_qubit_hamiltonian({1.0, 0.5, 0.3, 1.0, 0.8, 0.6}, n_max), product_state(spin, 1.0, space));
  }
  {
    const int n_max = 6; // 9 x 7 = 63
    const auto space = models::two_qutrit_space(n_max);
    Vector spin = Vector::Zero(9);
    spin(2) = 0.5;
    spin(4) = std::sqrt(0.5);
    spin(6) = 0.5;
    check(models::build_two_qutrit_full({1.0, 0.5, 1.0, 1.0, 0.95}, space),
          oracle::two_qutrit_hamiltonian({1.0, 0.5, 1.0, 1.0, 0.95}, n_max), product_state(spin, 0.3, space));
  }
  verdict("C10", "small-instance propagation oracle", worst <= 1e-6,
          "dims 64 and 63, order-14 Taylor steps dt=0.01 to omega t=100: max state error=" + fmt("%.2e", worst) +
              " runtime=" + fmt("%.1f s", seconds_since(t0)));
}

} // namespace

int main() {
  try {
    symmetry_suite();
    projection_oracle();
    jc_cross_validation();
    fig1_and_fig2();
    decoupling();
    sector_a();
    qutrits();
    chain_aligned();
    small_propagation();
  } catch (const std::exception &e) {
    std::printf("FAIL  acceptance aborted: %s\n", e.what());
    return 2;
  }
  std::printf("%d criterion(s) failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
