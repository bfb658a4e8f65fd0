// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails. Arguments select criteria by number.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "abq/diagnostics.hpp"
#include "abq/experiment.hpp"
#include "abq/initial_conditions.hpp"
#include "abq/solver.hpp"

using namespace abq;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

fs::path preset(const std::string& name) { return fs::path(ABQ_PRESET_DIR) / (name + ".cfg"); }

fs::path work_dir(const std::string& name) {
  const fs::path p = fs::path(ABQ_ACCEPTANCE_OUT) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

double l2sq(const EnergyRecord& r) { return r.l2_u * r.l2_u + r.l2_theta * r.l2_theta; }

// 1. L2 balance of the full nonlinear run.
Verdict energy_identity() {
  const Grid g(128, 512);
  const Params p{1.0, 1.0, -1.0};
  const State ic = random_banded_state(g, 1e-2, 1);
  SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 10.0;
  const SimulationResult r = simulate(ic, p, cfg, 0.1, 0.0);
  if (r.failure) return {false, "run failed: " + r.failure->reason};
  const auto& rec = r.series.records();
  const double e0 = l2sq(rec.front());
  double worst = 0.0;
  for (std::size_t i = 1; i < rec.size(); ++i) {
    const double drift = l2sq(rec[i]) - e0 + r.exact_dissipation[i];
    worst = std::max(worst, std::abs(drift) / (e0 * rec[i].t));
  }
  return {worst < 1e-4, "max |L2(t) - L2(0) + D(t)| / (L2(0) t) = " + num(worst) + " (limit 1e-4)"};
}

// 2. Linearized single-mode evolution against the roots of the symbol
//    lambda^2 + (nu k2^2 + eta k1^2) lambda + nu eta k1^2 k2^2 + g0^2 k1^2/|k|^2.
Verdict linear_dispersion() {
  const Grid g(64, 256);
  const Params p{1.0, 1.0, -1.0};
  const std::vector<std::pair<int, int>> modes{
      {0, 1}, {0, 8},  {1, 0},  {1, 1},  {1, 2}, {1, 4},  {1, 8},  {1, 16}, {2, 0},  {2, 1},
      {2, 3}, {2, 8},  {2, 16}, {2, 24}, {3, 0}, {3, 2},  {3, 5},  {3, 12}, {3, 20}, {3, 30}};
  SolverConfig cfg;
  cfg.dt = 0.01;
  cfg.linearized_only = true;
  Integrator stepper(g, p, cfg);
  double worst = 0.0;
  for (const auto& [j, m] : modes) {
    const double k1 = 2 * oracle::kPi * j;
    const double k2 = 2 * oracle::kPi * m / g.ly();
    const double kk = k1 * k1 + k2 * k2;
    const double kn = std::sqrt(kk);
    const Complex a0(1.0, 0.3);
    const Complex th0(0.7, -0.2);
    State s(g);
    s.u1.mode(j, m) = -k2 / kn * a0;
    s.u2.mode(j, m) = k1 / kn * a0;
    s.theta.mode(j, m) = th0;
    s.u1.mode(-j, -m) = std::conj(s.u1.mode(j, m));
    s.u2.mode(-j, -m) = std::conj(s.u2.mode(j, m));
    s.theta.mode(-j, -m) = std::conj(th0);
    for (int n = 0; n < 100; ++n) s = stepper.step(s);
    const Complex a = -k2 / kn * s.u1.mode(j, m) + k1 / kn * s.u2.mode(j, m);
    const Complex th = s.theta.mode(j, m);

    const double c = p.g0 * k1 / kn;
    const auto lam = oracle::quadratic_roots(p.nu * k2 * k2 + p.eta * k1 * k1,
                                             p.nu * p.eta * k1 * k1 * k2 * k2 + c * c);
    const Complex da = -p.nu * k2 * k2 * a0 + c * th0;
    const Complex dth = -c * a0 - p.eta * k1 * k1 * th0;
    auto evolve = [&](Complex x0, Complex dx0) {
      return (std::exp(lam[0]) * (dx0 - lam[1] * x0) - std::exp(lam[1]) * (dx0 - lam[0] * x0)) /
             (lam[0] - lam[1]);
    };
    const Complex a_ref = evolve(a0, da);
    const Complex th_ref = evolve(th0, dth);
    const double err = std::sqrt(std::norm(a - a_ref) + std::norm(th - th_ref)) /
                       std::sqrt(std::norm(a_ref) + std::norm(th_ref));
    worst = std::max(worst, err);
  }
  return {worst < 1e-10, std::to_string(modes.size()) + " modes, max relative error at t = 1: " +
                             num(worst) + " (limit 1e-10)"};
}

struct DecayRun {
  RunConfig cfg;
  SimulationResult result;
  double delta = 0.0;
};

const DecayRun& decay_run() {
  static const DecayRun run = [] {
    RunConfig cfg = load_config(preset("theorem1-stability"));
    const State ic = make_initial_state(cfg);
    const double delta = default_delta(cfg.params, record(ic, cfg.params));
    SimulationResult result = simulate(ic, cfg.params, cfg.solver, cfg.observe.cadence, delta);
    return DecayRun{std::move(cfg), std::move(result), delta};
  }();
  return run;
}

// 3. Small-data stability: sup of the H2 norm and plateau of the integrals.
Verdict stability() {
  const DecayRun& d = decay_run();
  if (d.result.failure) return {false, "run failed: " + d.result.failure->reason};
  const EnergySeries& s = d.result.series;
  const double eps = d.cfg.ic.epsilon;
  double sup = 0.0;
  for (const auto& r : s.records()) sup = std::max(sup, std::hypot(r.h2_u, r.h2_theta));
  const double t_end = s.records().back().t;
  const auto times = s.times();
  const std::size_t start = static_cast<std::size_t>(
      std::lower_bound(times.begin(), times.end(), t_end / 10.0 - 1e-9) - times.begin());
  bool plateau = true;
  std::ostringstream os;
  os << "sup ||(u,theta)||_H2 = " << num(sup) << " (limit " << num(2 * eps) << ")";
  const std::pair<const char*, const std::vector<double>*> integrals[] = {
      {"I_d2u", &s.i_d2u()}, {"I_d1theta", &s.i_d1theta()}, {"I_d1u2", &s.i_d1u2()}};
  for (const auto& [name, series] : integrals) {
    const double total = series->back();
    const double rise = total - (*series)[start];
    const double frac = total > 0.0 ? rise / total : 0.0;
    plateau = plateau && frac < 0.01;
    os << "; " << name << " rise over [" << num(times[start]) << ", " << num(t_end)
       << "] = " << num(frac) << " of total";
  }
  return {sup <= 2 * eps && plateau, os.str()};
}

// 4. Algebraic decay of the oscillation on the same run.
Verdict decay() {
  const DecayRun& d = decay_run();
  if (d.result.failure) return {false, "run failed: " + d.result.failure->reason};
  const auto t = d.result.series.times();
  const auto f = d.result.series.oscillation_energy();
  const PowerLawFit fit = fit_decay_exponent(t, f, 5.0, 50.0);
  const DecayCertificate cert = certify_decay(t, f);
  const std::size_t from = 2 * t.size() / 3;
  bool tf_down = true;
  double worst_t = -1.0;
  for (std::size_t i = from + 1; i < t.size(); ++i) {
    if (t[i] * f[i] > t[i - 1] * f[i - 1]) {
      tf_down = false;
      if (worst_t < 0.0) worst_t = t[i];
    }
  }
  std::ostringstream os;
  os << "alpha on [5, 50] = " << num(fit.alpha) << " (need <= -1); certificate "
     << (cert.verdict ? "PASS" : "FAIL") << " (C0 = " << num(cert.c0) << ", C1 = " << num(cert.c1)
     << ", C2 = " << num(cert.c2) << (cert.reason.empty() ? "" : ", " + cert.reason)
     << "); t*osc_h1^2 nonincreasing over final third: " << (tf_down ? "yes" : "no");
  if (!tf_down) os << " (first increase at t = " << num(worst_t) << ")";
  return {fit.alpha <= -1.0 && cert.verdict && tf_down, os.str()};
}

// 5. Lyapunov functional nonincreasing at every sample.
Verdict lyapunov() {
  const DecayRun& d = decay_run();
  if (d.result.failure) return {false, "run failed: " + d.result.failure->reason};
  const auto l = lyapunov_series(d.result.series);
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < l.size(); ++i) worst = std::max(worst, l[i] - l[i - 1]);
  return {worst <= 1e-8, "delta = " + num(d.delta) + ", max L(t_i+1) - L(t_i) = " + num(worst) +
                             " (slack 1e-8)"};
}

// 6. Inequality lab at two resolutions.
Verdict inequalities() {
  const InequalityConfig lab = load_inequality_config(preset("inequalities"));
  const InequalityOutcome o = verify_inequalities(lab.trials, lab.seed, lab.resolutions);
  const std::set<std::string> explicit_bounds{"sobolev_1d_line", "sobolev_1d_torus", "poincare_l2"};
  const std::set<std::string> stable{"triple_product_general", "triple_product_oscillation"};
  bool pass = lab.resolutions.size() >= 2;
  std::ostringstream os;
  os << lab.trials << " trials at";
  for (int r : lab.resolutions) os << " " << r;
  std::size_t violations = 0;
  for (const auto& r : o.reports) {
    if (explicit_bounds.count(r.lemma) != 0) {
      violations += r.violations;
      if (r.trials != lab.trials) pass = false;
    }
  }
  pass = pass && violations == 0;
  os << "; explicit-constant violations: " << violations;
  for (const auto& [name, spread] : o.constant_spread) {
    if (stable.count(name) == 0) continue;
    pass = pass && spread < 2.0;
    os << "; " << name << " spread " << num(spread);
  }
  return {pass, os.str()};
}

// 7. Damped wave residuals.
Verdict wave_structure() {
  RunConfig cfg = load_config(preset("wave-structure"));
  const State ic = make_initial_state(cfg);
  const double h = cfg.observe.cadence;
  const double t0 = 1.0;
  auto collect = [&](bool linear) {
    SolverConfig sc = cfg.solver;
    sc.linearized_only = linear;
    std::vector<State> states;
    simulate(ic, cfg.params, sc, h, 0.0, [&](const State& s) {
      if (s.t >= t0 - 4.5 * h) states.push_back(s);
    });
    return states;
  };
  auto window = [&](const std::vector<State>& states, int stride) {
    const std::size_t c = 4;
    return StateWindow{{states[c - stride], states[c], states[c + stride]}};
  };
  const WaveTarget targets[] = {WaveTarget::kVelocity, WaveTarget::kTheta, WaveTarget::kVorticity};
  const char* names[] = {"u", "theta", "omega"};

  const auto lin = collect(true);
  const auto nl = collect(false);
  if (lin.size() < 9 || nl.size() < 9) return {false, "window states missing"};
  bool pass = true;
  std::ostringstream os;
  os << "linear residual at t = " << num(t0) << ", cadence " << num(h) << ":";
  for (int k = 0; k < 3; ++k) {
    const double r = wave_residual(window(lin, 1), targets[k], cfg.params, false).relative;
    pass = pass && r < 1e-5;
    os << " " << names[k] << " " << num(r);
  }
  os << " (limit 1e-5); nonlinear self-convergence order:";
  for (int k = 0; k < 3; ++k) {
    const auto a = wave_residual(window(nl, 4), targets[k], cfg.params, true).fields;
    const auto b = wave_residual(window(nl, 2), targets[k], cfg.params, true).fields;
    const auto c = wave_residual(window(nl, 1), targets[k], cfg.params, true).fields;
    double d1 = 0.0, d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      d1 += (a[i] - b[i]).coefficient_energy();
      d2 += (b[i] - c[i]).coefficient_energy();
    }
    const double order = std::log2(std::sqrt(d1 / d2));
    pass = pass && order >= 1.8;
    os << " " << names[k] << " " << num(order);
  }
  os << " (need >= 1.8)";
  return {pass, os.str()};
}

// 8. Decay certifier on closed-form series.
Verdict certifier() {
  std::vector<double> t, inv2, expo, one;
  for (int i = 0; i <= 10000; ++i) {
    t.push_back(0.01 * i);
    inv2.push_back(1.0 / ((1.0 + t.back()) * (1.0 + t.back())));
    expo.push_back(std::exp(-t.back()));
    one.push_back(1.0);
  }
  const DecayCertificate a = certify_decay(t, inv2);
  const DecayCertificate b = certify_decay(t, expo);
  const DecayCertificate c = certify_decay(t, one);
  const bool pass = a.verdict && std::abs(a.c2 - 4.0) <= 4e-4 && b.verdict && !c.verdict;
  return {pass, "(1+t)^-2 " + std::string(a.verdict ? "PASS" : "FAIL") + " C2 = " + num(a.c2) +
                    "; e^-t " + (b.verdict ? "PASS" : "FAIL") + "; constant " +
                    (c.verdict ? "PASS" : "FAIL")};
}

// 9. Byte-identical artifacts from identical configs.
Verdict determinism() {
  RunConfig cfg = load_config(preset("theorem2-decay"));
  cfg.solver.t_end = 10.0;
  const RunOutcome a = run(cfg, work_dir("determinism_a"));
  const RunOutcome b = run(cfg, work_dir("determinism_b"));
  const std::string ca = slurp(a.csv_path);
  const bool same = !ca.empty() && ca == slurp(b.csv_path) &&
                    slurp(a.checkpoint_path) == slurp(b.checkpoint_path);
  return {same && a.exit_code == kExitOk,
          "theorem2-decay preset to t = 10, twice: CSV " + std::to_string(ca.size()) + " bytes, " +
              (same ? "identical" : "different")};
}

// 10. Orthogonality of average and oscillation in H^k.
Verdict parseval() {
  const Grid g(32, 128);
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    const SpectralField f = oracle::random_band_field(g, rng);
    const DecompositionPair d = decompose(f);
    for (int k = 0; k <= 2; ++k) {
      const double whole = std::pow(sobolev_norm(f, k), 2);
      const double parts = std::pow(sobolev_norm(d.average, k), 2) + std::pow(sobolev_norm(d.oscillation, k), 2);
      worst = std::max(worst, std::abs(whole - parts) / whole);
    }
  }
  return {worst < 1e-12, "100 fields, k = 0, 1, 2: max relative defect " + num(worst) + " (limit 1e-12)"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, Verdict (*)()> criteria{
      {1, energy_identity}, {2, linear_dispersion}, {3, stability}, {4, decay},
      {5, lyapunov},        {6, inequalities},      {7, wave_structure}, {8, certifier},
      {9, determinism},     {10, parseval}};
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::stoi(argv[i]));
  if (selected.empty()) {
    for (const auto& [id, fn] : criteria) selected.push_back(id);
  }
  int failures = 0;
  for (int id : selected) {
    const auto it = criteria.find(id);
    if (it == criteria.end()) {
      std::printf("criterion %d: FAIL unknown criterion\n", id);
      ++failures;
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = it->second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %d: %s %s [%.0f s]\n", id, v.pass ? "PASS" : "FAIL", v.detail.c_str(), secs);
    std::fflush(stdout);
    if (!v.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
