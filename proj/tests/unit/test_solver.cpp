#include <array>
#include <cmath>
#include <utility>
#include <limits>
#include <random>
#include <stdexcept>

#include "../oracles.hpp"
#include "abq/initial_conditions.hpp"
#include "abq/solver.hpp"
#include "doctest.h"

using namespace abq;

namespace {

double rel_max(const oracle::Mat2& a, const oracle::Mat2& b) {
  double d = 0.0, n = 0.0;
  for (int i = 0; i < 4; ++i) {
    d = std::max(d, std::abs(a[i] - b[i]));
    n = std::max(n, std::abs(b[i]));
  }
  return d / n;
}

double state_distance(const State& a, const State& b) {
  return std::sqrt((a.u1 - b.u1).coefficient_energy() + (a.u2 - b.u2).coefficient_energy() +
                   (a.theta - b.theta).coefficient_energy());
}

double state_size(const State& a) {
  return std::sqrt(a.u1.coefficient_energy() + a.u2.coefficient_energy() +
                   a.theta.coefficient_energy());
}

// Per-mode projector I - k k^T/|k|^2, written out independently.
void project_oracle(SpectralField& v1, SpectralField& v2) {
  const Grid& g = v1.grid();
  for (int jj = 0; jj < g.nx(); ++jj) {
    for (int mm = 0; mm < g.ny(); ++mm) {
      const double k1 = 2 * oracle::kPi * g.signed_j(jj);
      const double k2 = 2 * oracle::kPi * g.signed_m(mm) / g.ly();
      const double kk = k1 * k1 + k2 * k2;
      if (kk == 0.0) continue;
      const std::size_t i = g.index(jj, mm);
      const Complex dot = k1 * v1[i] + k2 * v2[i];
      v1[i] -= k1 * dot / kk;
      v2[i] -= k2 * dot / kk;
    }
  }
}

State random_solenoidal(const Grid& g, std::mt19937_64& rng, double scale) {
  SpectralField w = oracle::random_band_field(g, rng);
  w.mode(0, 0) = 0.0;
  const VelocityPair u = velocity_from_vorticity(w);
  State s(u.v1, u.v2, oracle::random_band_field(g, rng), 0.0);
  s.u1 *= scale;
  s.u2 *= scale;
  s.theta *= scale;
  return s;
}

}  // namespace

TEST_CASE("scheme names and solver config validation") {
  CHECK(scheme_from_string("strang2") == Scheme::kStrang2);
  CHECK(scheme_from_string("lawson2") == Scheme::kLawson2);
  CHECK(to_string(Scheme::kLawson2) == "lawson2");
  CHECK_THROWS_AS(scheme_from_string("rk4"), std::invalid_argument);
  SolverConfig c;
  CHECK_NOTHROW(c.validate());
  c.dt = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.cfl_safety = 1.5;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.t_end = -1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("decoupled propagator with g0 = 0") {
  const Params p{0.7, 1.3, 0.0};
  for (double k1 : {0.0, 2 * oracle::kPi, 6 * oracle::kPi}) {
    for (double k2 : {0.0, 0.5, 3.0}) {
      const auto m = propagator_matrix(k1, k2, p, 0.01);
      CHECK(m[1] == 0.0);
      CHECK(m[2] == 0.0);
      CHECK(m[0] == doctest::Approx(std::exp(-p.nu * k2 * k2 * 0.01)).epsilon(1e-15));
      CHECK(m[3] == doctest::Approx(std::exp(-p.eta * k1 * k1 * 0.01)).epsilon(1e-15));
    }
  }
}

TEST_CASE("propagator matches the scaling-and-squaring exponential") {
  const Params p{1.0, 1.0, -1.0};
  const double k1 = 2 * oracle::kPi;
  const auto gen = linear_generator(k1, 0.0, p);
  CHECK(gen[0] == 0.0);
  CHECK(gen[1] == doctest::Approx(p.g0).epsilon(1e-15));
  CHECK(gen[2] == doctest::Approx(-p.g0).epsilon(1e-15));
  CHECK(gen[3] == doctest::Approx(-k1 * k1).epsilon(1e-15));
  CHECK(rel_max(propagator_matrix(k1, 0.0, p, 0.01), oracle::expm(gen, 0.01)) < 1e-12);

  const Grid g(32, 128);
  for (const Params& q : {Params{1.0, 1.0, -1.0}, Params{0.1, 3.0, 2.5}, Params{5.0, 0.01, -0.3}}) {
    for (double dt : {1e-3, 1e-2, 0.1}) {
      for (int jj = 0; jj <= g.band_j(); jj += 3) {
        for (int mm = 0; mm <= g.band_m(); mm += 7) {
          const double a = g.kappa1(jj), b = g.kappa2(mm);
          const auto gen = linear_generator(a, b, q);
          // Beyond this the oracle's repeated squaring loses the last digits.
          if (std::max(std::abs(gen[0]), std::abs(gen[3])) * dt > 64.0) continue;
          const auto got = propagator_matrix(a, b, q, dt);
          const auto ref = oracle::expm(gen, dt);
          CHECK(rel_max(got, ref) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("propagator near and at confluent eigenvalues") {
  const double k1 = 2 * oracle::kPi;
  // With k2 = 0 the discriminant is (eta k1^2 / 2)^2 - g0^2.
  const double eta_c = 2.0 / (k1 * k1);
  for (double f : {1.0, 1.0 + 1e-12, 1.0 - 1e-12, 1.0 + 1e-8, 1.0 - 1e-8, 1.0 + 1e-4, 1.0 - 1e-4}) {
    const Params p{1.0, eta_c * f, -1.0};
    for (double dt : {1e-3, 0.1, 2.0}) {
      const auto got = propagator_matrix(k1, 0.0, p, dt);
      const auto ref = oracle::expm(linear_generator(k1, 0.0, p), dt);
      CHECK(rel_max(got, ref) < 1e-12);
    }
  }
}

TEST_CASE("propagator eigenvalues follow the damped-wave symbol") {
  const Grid g(32, 128);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.05, 3.0);
  for (int trial = 0; trial < 40; ++trial) {
    const Params p{u(rng), u(rng), (trial % 2 ? 1.0 : -1.0) * u(rng)};
    const int jj = 1 + static_cast<int>(rng() % g.band_j());
    const int mm = static_cast<int>(rng() % (g.band_m() + 1));
    const double k1 = g.kappa1(jj), k2 = g.kappa2(mm);
    const double kk = k1 * k1 + k2 * k2;
    const double b = p.eta * k1 * k1 + p.nu * k2 * k2;
    const double c = p.nu * p.eta * k1 * k1 * k2 * k2 + p.g0 * p.g0 * k1 * k1 / kk;
    const auto gen = linear_generator(k1, k2, p);
    CHECK(-(gen[0] + gen[3]) == doctest::Approx(b).epsilon(1e-12));
    CHECK(gen[0] * gen[3] - gen[1] * gen[2] == doctest::Approx(c).epsilon(1e-12));
    const auto roots = oracle::quadratic_roots(b, c);
    CHECK(roots[0].real() <= 0.0);
    CHECK(roots[1].real() <= 0.0);
    const double dt = 1e-3;
    const auto m = propagator_matrix(k1, k2, p, dt);
    const Complex tr = std::exp(roots[0] * dt) + std::exp(roots[1] * dt);
    const Complex det = std::exp((roots[0] + roots[1]) * dt);
    CHECK(std::abs(m[0] + m[3] - tr) <= 1e-12 * std::abs(tr));
    CHECK(std::abs(m[0] * m[3] - m[1] * m[2] - det) <= 1e-12 * std::abs(det));
    // Contraction: symmetric part of the generator is negative semidefinite.
    const double a2 = m[0] * m[0] + m[2] * m[2], b2 = m[0] * m[1] + m[2] * m[3],
                 c2 = m[1] * m[1] + m[3] * m[3];
    const double smax = 0.5 * (a2 + c2) + std::sqrt(0.25 * (a2 - c2) * (a2 - c2) + b2 * b2);
    CHECK(smax <= 1.0 + 1e-14);
  }
}

TEST_CASE("propagator on k1 = 0 modes") {
  const Params p{0.8, 1.2, -1.0};
  const Grid g(16, 64);
  const LinearPropagator prop(g, p, 0.05);
  for (int mm = 1; mm < g.ny(); ++mm) {
    const auto& m = prop.matrix(0, mm);
    const double k2 = g.kappa2(mm);
    CHECK(m[0] == doctest::Approx(std::exp(-p.nu * k2 * k2 * 0.05)).epsilon(1e-15));
    CHECK(m[1] == 0.0);
    CHECK(m[2] == 0.0);
    CHECK(m[3] == 1.0);
  }
  State s(g);
  s.u1.mode(0, 3) = Complex(0.2, 0.1);
  s.u1.mode(0, -3) = Complex(0.2, -0.1);
  s.u2.mode(0, 3) = 0.4;
  s.theta.mode(0, 5) = 0.3;
  prop.apply(s);
  CHECK(s.u2.mode(0, 3) == Complex{});
  CHECK(s.theta.mode(0, 5) == Complex(0.3, 0.0));
  CHECK(std::abs(s.u1.mode(0, 3)) == doctest::Approx(std::abs(Complex(0.2, 0.1)) * prop.matrix(0, 3)[0]));
  CHECK_THROWS_AS(LinearPropagator(g, p, 0.0), std::invalid_argument);
}

TEST_CASE("mode Gramians match quadrature of the exponential") {
  auto simpson_gram = [](const oracle::Mat2& gen, double dt) {
    constexpr int kPanels = 400;
    std::array<double, 6> g{};
    for (int i = 0; i <= 2 * kPanels; ++i) {
      const double w = (i == 0 || i == 2 * kPanels) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      const auto e = oracle::expm(gen, dt * i / (2.0 * kPanels));
      g[0] += w * e[0] * e[0];
      g[1] += w * e[0] * e[1];
      g[2] += w * e[1] * e[1];
      g[3] += w * e[2] * e[2];
      g[4] += w * e[2] * e[3];
      g[5] += w * e[3] * e[3];
    }
    for (double& v : g) v *= dt / (6.0 * kPanels);
    return g;
  };
  for (const Params& q : {Params{1.0, 1.0, -1.0}, Params{0.1, 3.0, 2.5}, Params{0.0, 0.0, -1.0},
                          Params{2.0, 0.5, 0.0}}) {
    for (double dt : {1e-2, 0.1}) {
      for (const auto& [j, m] : {std::pair{1, 0}, {1, 3}, {2, 5}, {0, 4}, {3, 1}}) {
        const double k1 = 2 * oracle::kPi * j, k2 = 2 * oracle::kPi * m / 8.0;
        const auto gen = linear_generator(k1, k2, q);
        if (std::max(std::abs(gen[0]), std::abs(gen[3])) * dt > 8.0) continue;
        const auto got = mode_gramians(k1, k2, q, dt);
        const auto ref = simpson_gram(gen, dt);
        for (int i = 0; i < 6; ++i) CHECK(std::abs(got[i] - ref[i]) <= 1e-10 * dt);
      }
    }
  }
}

TEST_CASE("mode Gramians satisfy the energy identity in stiff regimes") {
  const Params p{1.0, 1.0, -1.0};
  for (const auto& [j, m] : {std::pair{10, 0}, {30, 1}, {60, 200}, {1, 400}, {5, 5}}) {
    const double k1 = 2 * oracle::kPi * j, k2 = 2 * oracle::kPi * m / 8.0;
    for (double dt : {1e-3, 1e-2, 0.1}) {
      const auto gm = mode_gramians(k1, k2, p, dt);
      const auto e = oracle::expm(linear_generator(k1, k2, p), dt);
      // 2 nu k2^2 G_a + 2 eta k1^2 G_theta = I - P^T P.
      const double wa = 2 * p.nu * k2 * k2, wt = 2 * p.eta * k1 * k1;
      CHECK(wa * gm[0] + wt * gm[3] == doctest::Approx(1 - e[0] * e[0] - e[2] * e[2]).epsilon(1e-9));
      CHECK(wa * gm[1] + wt * gm[4] == doctest::Approx(-e[0] * e[1] - e[2] * e[3]).epsilon(1e-9).scale(1.0));
      CHECK(wa * gm[2] + wt * gm[5] == doctest::Approx(1 - e[1] * e[1] - e[3] * e[3]).epsilon(1e-9));
      CHECK(gm[0] >= 0.0);
      CHECK(gm[5] >= 0.0);
      CHECK(gm[0] * gm[2] >= gm[1] * gm[1] * (1 - 1e-12));
    }
  }
}

TEST_CASE("exact energy integrals agree with fine Simpson quadrature") {
  const Grid g(16, 64);
  const Params p{1.0, 1.0, -1.0};
  const State ic = random_banded_state(g, 1e-2, 3);
  SolverConfig cfg;
  cfg.dt = 1e-4;
  cfg.t_end = 0.04;
  cfg.linearized_only = true;
  const double delta = 0.05;
  const SimulationResult fine = simulate(ic, p, cfg, 1e-4, delta);
  const auto& rec = fine.series.records();
  REQUIRE(rec.size() == 401);
  double s_d2u = 0.0, s_d1t = 0.0, s_d1u2 = 0.0;
  for (std::size_t i = 0; i + 2 < rec.size(); i += 2) {
    auto simpson = [&](auto f) { return 1e-4 / 3.0 * (f(rec[i]) + 4 * f(rec[i + 1]) + f(rec[i + 2])); };
    s_d2u += simpson([&](const EnergyRecord& r) { return 2 * p.nu * r.d2u_h2 * r.d2u_h2; });
    s_d1t += simpson([&](const EnergyRecord& r) { return 2 * p.eta * r.d1theta_h2 * r.d1theta_h2; });
    s_d1u2 += simpson([&](const EnergyRecord& r) { return delta * p.g0 * p.g0 * r.d1u2_l2 * r.d1u2_l2; });
  }
  cfg.dt = 1e-3;
  const SimulationResult coarse = simulate(ic, p, cfg, 1e-2, delta);
  REQUIRE(coarse.series.size() == 5);
  CHECK(coarse.series.i_d2u().back() == doctest::Approx(s_d2u).epsilon(1e-5));
  CHECK(coarse.series.i_d1theta().back() == doctest::Approx(s_d1t).epsilon(1e-5));
  CHECK(coarse.series.i_d1u2().back() == doctest::Approx(s_d1u2).epsilon(1e-5));
  CHECK(fine.series.i_d1theta().back() == doctest::Approx(s_d1t).epsilon(1e-5));
}

TEST_CASE("nonlinear tendency examples") {
  const Grid g(16, 64);
  std::mt19937_64 rng(4);
  State s(g);
  s.theta = oracle::random_band_field(g, rng);
  const Tendency t0 = nonlinear_tendency(s);
  CHECK(t0.u1.coefficient_energy() == 0.0);
  CHECK(t0.u2.coefficient_energy() == 0.0);
  CHECK(t0.theta.coefficient_energy() == 0.0);

  State shear(g);
  shear.u1 = oracle::random_field(g, rng, 0, g.band_m());
  shear.u1.mode(0, 0) = 0.0;
  const Tendency ts = nonlinear_tendency(shear);
  CHECK(std::sqrt(ts.u1.coefficient_energy()) < 1e-14 * std::sqrt(shear.u1.coefficient_energy()));
  CHECK(std::sqrt(ts.u2.coefficient_energy()) < 1e-14 * std::sqrt(shear.u1.coefficient_energy()));

  State bad = s;
  bad.theta.mode(1, 1) = std::numeric_limits<double>::quiet_NaN();
  bad.t = 2.5;
  try {
    nonlinear_tendency(bad);
    FAIL("expected NumericalBlowup");
  } catch (const NumericalBlowup& e) {
    CHECK(e.time() == 2.5);
  }
}

TEST_CASE("nonlinear tendency matches a convolution oracle") {
  const Grid g(16, 32, 4.0);
  std::mt19937_64 rng(5);
  const State s = random_solenoidal(g, rng, 1.0);
  const Tendency got = nonlinear_tendency(s);

  auto adv = [&](const SpectralField& f) {
    SpectralField r = oracle::convolution(s.u1, oracle::derivative(f, 1));
    r += oracle::convolution(s.u2, oracle::derivative(f, 2));
    return oracle::band_limit(r);
  };
  SpectralField r1 = adv(s.u1), r2 = adv(s.u2);
  project_oracle(r1, r2);
  r1 *= -1.0;
  r2 *= -1.0;
  SpectralField rt = adv(s.theta);
  rt *= -1.0;
  auto rel = [](const SpectralField& a, const SpectralField& b) {
    return std::sqrt((a - b).coefficient_energy() / b.coefficient_energy());
  };
  CHECK(rel(got.u1, r1) < 1e-10);
  CHECK(rel(got.u2, r2) < 1e-10);
  CHECK(rel(got.theta, rt) < 1e-10);
}

TEST_CASE("zero data stays zero") {
  const Grid g(16, 64);
  for (Scheme sc : {Scheme::kStrang2, Scheme::kLawson2}) {
    SolverConfig cfg;
    cfg.dt = 0.01;
    cfg.scheme = sc;
    Integrator it(g, Params{}, cfg);
    State s(g);
    for (int n = 0; n < 20; ++n) s = it.step(s);
    CHECK(state_size(s) == 0.0);
    CHECK(s.t == doctest::Approx(0.2));
  }
}

TEST_CASE("linearized steps equal powers of the exact propagator") {
  const Grid g(16, 64);
  const Params p{1.0, 1.0, -1.0};
  for (Scheme sc : {Scheme::kStrang2, Scheme::kLawson2}) {
    for (auto [j, m] : {std::pair{1, 0}, std::pair{1, 3}, std::pair{2, 7}, std::pair{4, 1}}) {
      const State ic = single_mode_state(g, j, m, 1e-2);
      SolverConfig cfg;
      cfg.dt = 1e-3;
      cfg.linearized_only = true;
      cfg.scheme = sc;
      Integrator it(g, p, cfg);
      State s = ic;
      const int n = 137;
      for (int i = 0; i < n; ++i) s = it.step(s);
      const double k1 = 2 * oracle::kPi * j, k2 = 2 * oracle::kPi * m / g.ly();
      const double kn = std::hypot(k1, k2);
      const auto e = oracle::expm(linear_generator(k1, k2, p), n * cfg.dt);
      const Complex a0 = (-k2 * ic.u1.mode(j, m) + k1 * ic.u2.mode(j, m)) / kn;
      const Complex t0 = ic.theta.mode(j, m);
      const Complex a1 = e[0] * a0 + e[1] * t0;
      const Complex t1 = e[2] * a0 + e[3] * t0;
      const Complex ga = (-k2 * s.u1.mode(j, m) + k1 * s.u2.mode(j, m)) / kn;
      CHECK(std::abs(ga - a1) <= 1e-12 * std::abs(a1));
      CHECK(std::abs(s.theta.mode(j, m) - t1) <= 1e-12 * std::abs(t1));
    }
  }
}

TEST_CASE("steps preserve divergence-free velocity and zero vertical average") {
  const Grid g(16, 64);
  std::mt19937_64 rng(6);
  for (Scheme sc : {Scheme::kStrang2, Scheme::kLawson2}) {
    State s = random_banded_state(g, 0.5, 3);
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.scheme = sc;
    Integrator it(g, Params{}, cfg);
    for (int n = 0; n < 50; ++n) {
      s = it.step(s);
      CHECK(relative_divergence(s.u1, s.u2) < 1e-12);
      CHECK(horizontal_average(s.u2).coefficient_energy() == 0.0);
      CHECK(s.u1.hermitian_defect() < 1e-15);
      CHECK(s.theta.hermitian_defect() < 1e-15);
    }
  }
}

TEST_CASE("exact dissipation agrees with quadrature of the dissipation rate") {
  const Grid g(16, 64);
  const Params p{1.0, 1.0, -1.0};
  const State ic = random_banded_state(g, 1e-2, 8);
  SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 0.2;
  cfg.linearized_only = true;
  const SimulationResult r = simulate(ic, p, cfg, 1e-3, 0.05);
  const auto& rec = r.series.records();
  REQUIRE(rec.size() == 201);
  // Simpson over the records, panel width 1e-3.
  double sim = 0.0;
  for (std::size_t i = 0; i + 2 < rec.size(); i += 2) {
    auto rate = [&](std::size_t k) {
      return 2 * p.nu * rec[k].d2u_l2 * rec[k].d2u_l2 + 2 * p.eta * rec[k].d1theta_l2 * rec[k].d1theta_l2;
    };
    sim += 1e-3 / 3.0 * (rate(i) + 4 * rate(i + 1) + rate(i + 2));
  }
  CHECK(r.exact_dissipation.back() == doctest::Approx(sim).epsilon(1e-7));
  const double l20 = rec.front().l2_u * rec.front().l2_u + rec.front().l2_theta * rec.front().l2_theta;
  const double l2t = rec.back().l2_u * rec.back().l2_u + rec.back().l2_theta * rec.back().l2_theta;
  CHECK(std::abs(l2t - l20 + r.exact_dissipation.back()) <= 1e-13 * l20);
}

TEST_CASE("vorticity norm is nonincreasing without buoyancy") {
  const Grid g(16, 64);
  State s = random_banded_state(g, 0.5, 9);
  s.theta = SpectralField(g);
  SolverConfig cfg;
  cfg.dt = 2e-3;
  Integrator it(g, Params{1.0, 1.0, 0.0}, cfg);
  double prev = sobolev_norm(vorticity(s), 0);
  for (int n = 0; n < 200; ++n) {
    s = it.step(s);
    const double w = sobolev_norm(vorticity(s), 0);
    CHECK(w <= prev * (1 + 1e-12));
    prev = w;
  }
  CHECK(s.theta.coefficient_energy() == 0.0);
}

TEST_CASE("inviscid energy drift converges at the scheme order") {
  const Grid g(16, 64);
  const State ic = random_banded_state(g, 20.0, 10, 2 * oracle::kPi);
  const Params p{0.0, 0.0, -1.0};
  auto drift = [&](double dt, Scheme sc) {
    SolverConfig cfg;
    cfg.dt = dt;
    cfg.scheme = sc;
    Integrator it(g, p, cfg);
    State s = ic;
    const int n = static_cast<int>(std::lround(0.5 / dt));
    for (int i = 0; i < n; ++i) s = it.step(s);
    auto e = [](const State& x) {
      return x.u1.coefficient_energy() + x.u2.coefficient_energy() + x.theta.coefficient_energy();
    };
    return std::abs(e(s) - e(ic)) / e(ic);
  };
  for (Scheme sc : {Scheme::kStrang2, Scheme::kLawson2}) {
    const double d1 = drift(0.01, sc);
    const double d2 = drift(0.005, sc);
    CHECK(d1 < 1e-3);
    CHECK(std::log2(d1 / d2) >= 1.8);
  }
}

TEST_CASE("second-order convergence in dt") {
  const Grid g(16, 64);
  const State ic = random_banded_state(g, 5.0, 11, 2 * oracle::kPi);
  const Params p{1.0, 1.0, -1.0};
  auto run = [&](double dt, Scheme sc) {
    SolverConfig cfg;
    cfg.dt = dt;
    cfg.scheme = sc;
    Integrator it(g, p, cfg);
    State s = ic;
    const int n = static_cast<int>(std::lround(0.4 / dt));
    for (int i = 0; i < n; ++i) s = it.step(s);
    return s;
  };
  for (Scheme sc : {Scheme::kStrang2, Scheme::kLawson2}) {
    const double h = 0.02;
    const State ref = run(h / 8, sc);
    const double e1 = state_distance(run(h, sc), ref);
    const double e2 = state_distance(run(h / 2, sc), ref);
    CHECK(e1 > 0.0);
    CHECK(std::log2(e1 / e2) >= 1.8);
  }
}

TEST_CASE("CFL check rejects oversize steps") {
  const Grid g(16, 64);
  const State s = random_banded_state(g, 50.0, 12);
  SolverConfig cfg;
  cfg.dt = 0.5;
  cfg.check_cfl = true;
  Integrator it(g, Params{}, cfg);
  try {
    it.step(s);
    FAIL("expected CflViolation");
  } catch (const CflViolation& e) {
    CHECK(e.suggested_dt() < cfg.dt);
    CHECK(e.suggested_dt() > 0.0);
  }
  cfg.check_cfl = false;
  Integrator loose(g, Params{}, cfg);
  CHECK_NOTHROW(loose.step(State(g)));
}

TEST_CASE("blowup ends the simulation with a failure marker") {
  const Grid g(16, 64);
  const State ic = random_banded_state(g, 1e5, 13, 2 * oracle::kPi);
  SolverConfig cfg;
  cfg.dt = 0.05;
  cfg.t_end = 20.0;
  const SimulationResult r = simulate(ic, Params{}, cfg, 0.05, 0.01);
  REQUIRE(r.failure.has_value());
  CHECK(r.failure->time > 0.0);
  CHECK(r.failure->time <= 20.0);
  CHECK(r.final_state.all_finite());
  CHECK_FALSE(r.series.empty());
  CHECK(r.series.records().back().t < r.failure->time);
}

TEST_CASE("simulate bookkeeping") {
  const Grid g(16, 64);
  const State ic = random_banded_state(g, 1e-2, 14);
  SolverConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 0.0;
  const SimulationResult zero = simulate(ic, Params{}, cfg, 0.1, 0.05);
  CHECK(zero.series.size() == 1);
  CHECK(zero.series.records()[0] == record(ic, Params{}));
  CHECK(zero.final_state == ic);
  CHECK_FALSE(zero.failure.has_value());

  cfg.t_end = 1.0;
  CHECK_THROWS_AS(simulate(ic, Params{}, cfg, 0.015, 0.05), std::invalid_argument);
  const SimulationResult r = simulate(ic, Params{}, cfg, 0.1, 0.05);
  REQUIRE(r.series.size() == 11);
  for (std::size_t i = 0; i < r.series.size(); ++i) {
    CHECK(r.series.records()[i].t == doctest::Approx(0.1 * i).epsilon(1e-14));
  }
  CHECK(r.final_state.t == doctest::Approx(1.0));
  CHECK(r.max_divergence < 1e-12);
  CHECK(r.max_average_u2 == 0.0);

  State later = r.final_state;
  cfg.t_end = 1.5;
  const SimulationResult cont = simulate(later, Params{}, cfg, 0.1, 0.05);
  CHECK(cont.series.size() == 6);
  CHECK(cont.series.records().front().t == doctest::Approx(1.0));
  cfg.t_end = 0.5;
  CHECK_THROWS_AS(simulate(later, Params{}, cfg, 0.1, 0.05), std::invalid_argument);
}

TEST_CASE("twin simulations are bitwise identical") {
  const Grid g(16, 64);
  SolverConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 1.0;
  const SimulationResult a = simulate(random_banded_state(g, 0.1, 15), Params{}, cfg, 0.1, 0.05);
  const SimulationResult b = simulate(random_banded_state(g, 0.1, 15), Params{}, cfg, 0.1, 0.05);
  CHECK(a.series.records() == b.series.records());
  CHECK(a.final_state == b.final_state);
  CHECK(a.exact_dissipation == b.exact_dissipation);
}

TEST_CASE("enforce constraints") {
  const Grid g(16, 64);
  std::mt19937_64 rng(16);
  State s(oracle::random_band_field(g, rng), oracle::random_band_field(g, rng),
          oracle::random_band_field(g, rng), 0.0);
  enforce_constraints(s);
  CHECK(relative_divergence(s.u1, s.u2) < 1e-14);
  CHECK(horizontal_average(s.u2).coefficient_energy() == 0.0);
}

TEST_CASE("random banded initial data") {
  const Grid g(32, 128);
  const double eps = 1e-2;
  const State s = random_banded_state(g, eps, 42);
  const double h2u = std::hypot(sobolev_norm(s.u1, 2), sobolev_norm(s.u2, 2));
  CHECK(h2u == doctest::Approx(eps / 2).epsilon(1e-12));
  CHECK(sobolev_norm(s.theta, 2) == doctest::Approx(eps / 2).epsilon(1e-12));
  CHECK(relative_divergence(s.u1, s.u2) < 1e-14);
  CHECK(horizontal_average(s.u2).coefficient_energy() == 0.0);
  CHECK(s.u1.hermitian_defect() == 0.0);
  CHECK(s.theta.hermitian_defect() == 0.0);
  CHECK(dealias(s.theta) == s.theta);
  CHECK(boundary_ratio(s) < 1e-12);
  CHECK(random_banded_state(g, eps, 42) == s);
  CHECK_FALSE(random_banded_state(g, eps, 43) == s);
  CHECK(random_band_m(g) < g.band_m());
  CHECK(random_band_m(g) > 0);
  CHECK_THROWS_AS(random_banded_state(g, 0.0, 1), std::invalid_argument);
}

TEST_CASE("single mode initial data") {
  const Grid g(16, 64);
  const State s = single_mode_state(g, 2, 3, 0.02);
  CHECK(std::hypot(sobolev_norm(s.u1, 2), sobolev_norm(s.u2, 2)) == doctest::Approx(0.01).epsilon(1e-13));
  CHECK(sobolev_norm(s.theta, 2) == doctest::Approx(0.01).epsilon(1e-13));
  CHECK(relative_divergence(s.u1, s.u2) < 1e-15);
  const State shear = single_mode_state(g, 0, 2, 0.02);
  CHECK(shear.u2.coefficient_energy() == 0.0);
  CHECK_THROWS_AS(single_mode_state(g, 0, 0, 0.02), std::invalid_argument);
}
