#include "abq/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace abq {

std::string to_string(Scheme s) { return s == Scheme::kStrang2 ? "strang2" : "lawson2"; }

Scheme scheme_from_string(const std::string& name) {
  if (name == "strang2") return Scheme::kStrang2;
  if (name == "lawson2") return Scheme::kLawson2;
  throw std::invalid_argument("unknown scheme '" + name + "' (expected strang2 or lawson2)");
}

void SolverConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("solver: dt must be > 0");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) {
    throw std::invalid_argument("solver: t_end must be >= 0");
  }
  if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) {
    throw std::invalid_argument("solver: cfl_safety must lie in (0, 1]");
  }
}

NumericalBlowup::NumericalBlowup(double time, const std::string& what)
    : std::runtime_error(what), time_(time) {}

namespace {
std::string cfl_message(double dt, double suggested) {
  std::ostringstream os;
  os << "CFL violation: dt = " << dt << " exceeds admissible " << suggested;
  return os.str();
}
}  // namespace

CflViolation::CflViolation(double dt, double suggested_dt)
    : std::runtime_error(cfl_message(dt, suggested_dt)), suggested_dt_(suggested_dt) {}

std::array<double, 4> linear_generator(double k1, double k2, const Params& params) {
  const double kk = k1 * k1 + k2 * k2;
  const double c = kk > 0.0 ? params.g0 * k1 / std::sqrt(kk) : 0.0;
  return {-params.nu * k2 * k2, c, -c, -params.eta * k1 * k1};
}

std::array<double, 4> propagator_matrix(double k1, double k2, const Params& params, double dt) {
  const auto m = linear_generator(k1, k2, params);
  const double p = m[0];
  const double q = m[3];
  const double c = m[1];
  if (c == 0.0) return {std::exp(p * dt), 0.0, 0.0, std::exp(q * dt)};
  const double mu = 0.5 * (p + q);
  const double half_gap = 0.5 * (p - q);
  // Discriminant of the characteristic polynomial, (lambda - mu)^2 = disc.
  const double disc = half_gap * half_gap - c * c;
  const double z = disc * dt * dt;

  // e^{mu dt} [C I + S (M - mu I)], C = cosh(sqrt(disc) dt),
  // S = sinh(sqrt(disc) dt) / sqrt(disc).
  double ec = 0.0;
  double es = 0.0;
  if (std::abs(z) < 1.0) {
    // Near-confluent eigenvalues: power series in z converges fast here.
    double cs = 1.0;
    double ss = 1.0;
    double term_c = 1.0;
    double term_s = 1.0;
    for (int n = 1; n < 30; ++n) {
      term_c *= z / ((2.0 * n - 1.0) * (2.0 * n));
      term_s *= z / ((2.0 * n) * (2.0 * n + 1.0));
      cs += term_c;
      ss += term_s;
      if (std::abs(term_c) < 1e-18 * std::abs(cs) && std::abs(term_s) < 1e-18 * std::abs(ss)) break;
    }
    const double e = std::exp(mu * dt);
    ec = e * cs;
    es = e * dt * ss;
  } else if (disc > 0.0) {
    const double s = std::sqrt(disc);
    const double lambda_fast = mu - s;
    // Vieta keeps the slow root accurate when the gap is large.
    const double lambda_slow = (p * q + c * c) / lambda_fast;
    const double e_slow = std::exp(lambda_slow * dt);
    ec = 0.5 * (e_slow + std::exp(lambda_fast * dt));
    es = -e_slow * std::expm1(-2.0 * s * dt) / (2.0 * s);
  } else {
    const double w = std::sqrt(-disc);
    const double e = std::exp(mu * dt);
    ec = e * std::cos(w * dt);
    es = e * std::sin(w * dt) / w;
  }
  return {ec + es * half_gap, es * c, -es * c, ec - es * half_gap};
}

namespace {

// Solves M^T G + G M = R for symmetric G, with M = [[a, b], [d, e]] and
// G, R packed as (11, 12, 22).
std::array<double, 3> solve_lyapunov(const std::array<double, 4>& m, const std::array<double, 3>& r) {
  const double a = m[0], b = m[1], d = m[2], e = m[3];
  std::array<std::array<double, 4>, 3> sys = {{
      {2.0 * a, 2.0 * d, 0.0, r[0]},
      {b, a + e, d, r[1]},
      {0.0, 2.0 * b, 2.0 * e, r[2]},
  }};
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int row = col + 1; row < 3; ++row) {
      if (std::abs(sys[row][col]) > std::abs(sys[piv][col])) piv = row;
    }
    std::swap(sys[col], sys[piv]);
    for (int row = col + 1; row < 3; ++row) {
      const double f = sys[row][col] / sys[col][col];
      for (int k = col; k < 4; ++k) sys[row][k] -= f * sys[col][k];
    }
  }
  std::array<double, 3> x{};
  for (int row = 2; row >= 0; --row) {
    double v = sys[row][3];
    for (int k = row + 1; k < 3; ++k) v -= sys[row][k] * x[k];
    x[row] = v / sys[row][row];
  }
  return x;
}

double exp_integral(double rate, double dt) {
  return rate == 0.0 ? dt : std::expm1(rate * dt) / rate;
}

}  // namespace

std::array<double, 6> mode_gramians(double k1, double k2, const Params& params, double dt) {
  const auto m = linear_generator(k1, k2, params);
  if (m[1] == 0.0) {
    return {exp_integral(2.0 * m[0], dt), 0.0, 0.0, 0.0, 0.0, exp_integral(2.0 * m[3], dt)};
  }
  if (std::abs(m[0] + m[3]) * dt < 1e-6) {
    // Nearly conservative mode: the Lyapunov system is singular, but the
    // integrand is smooth on the scale of dt.
    constexpr int kPanels = 64;
    std::array<double, 6> g{};
    for (int i = 0; i <= 2 * kPanels; ++i) {
      const double w = (i == 0 || i == 2 * kPanels) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      const auto p = propagator_matrix(k1, k2, params, dt * i / (2.0 * kPanels));
      g[0] += w * p[0] * p[0];
      g[1] += w * p[0] * p[1];
      g[2] += w * p[1] * p[1];
      g[3] += w * p[2] * p[2];
      g[4] += w * p[2] * p[3];
      g[5] += w * p[3] * p[3];
    }
    for (double& v : g) v *= dt / (6.0 * kPanels);
    return g;
  }
  const auto p = propagator_matrix(k1, k2, params, dt);
  const auto ga = solve_lyapunov(m, {p[0] * p[0] - 1.0, p[0] * p[1], p[1] * p[1]});
  const auto gt = solve_lyapunov(m, {p[2] * p[2], p[2] * p[3], p[3] * p[3] - 1.0});
  return {ga[0], ga[1], ga[2], gt[0], gt[1], gt[2]};
}

LinearPropagator::LinearPropagator(const Grid& grid, const Params& params, double dt)
    : grid_(grid), dt_(dt), modes_(grid.size()) {
  if (!(dt > 0.0)) throw std::invalid_argument("linear propagator: dt must be > 0");
  for (int jj = 0; jj < grid.nx(); ++jj) {
    const double k1 = grid.kappa1(jj);
    for (int mm = 0; mm < grid.ny(); ++mm) {
      const double k2 = grid.kappa2(mm);
      const double kk = k1 * k1 + k2 * k2;
      ModeData& mode = modes_[grid.index(jj, mm)];
      mode.matrix = propagator_matrix(k1, k2, params, dt);
      if (kk == 0.0) continue;
      mode.gramians = mode_gramians(k1, k2, params, dt);
      const double h2 = (1.0 + kk) * (1.0 + kk);
      const bool d1_ok = !grid.is_nyquist_j(jj);
      mode.w_d2u = grid.is_nyquist_m(mm) ? 0.0 : h2 * k2 * k2;
      mode.w_d1u2 = d1_ok ? k1 * k1 * k1 * k1 / kk : 0.0;
      mode.w_d1theta = d1_ok ? h2 * k1 * k1 : 0.0;
    }
  }
}

LinearStageIntegrals LinearPropagator::apply(State& state) const {
  const Grid& g = grid_;
  if (!(state.grid() == g)) throw std::invalid_argument("linear propagator: grid mismatch");
  double removed = 0.0;
  DissipationIncrements inc;
  for (int jj = 0; jj < g.nx(); ++jj) {
    const double k1 = g.kappa1(jj);
    for (int mm = 0; mm < g.ny(); ++mm) {
      const std::size_t i = g.index(jj, mm);
      const double k2 = g.kappa2(mm);
      const double kn = std::sqrt(k1 * k1 + k2 * k2);
      if (kn == 0.0) {
        state.u2[i] = 0.0;
        continue;
      }
      const double e1 = -k2 / kn;
      const double e2 = k1 / kn;
      const Complex a = e1 * state.u1[i] + e2 * state.u2[i];
      const Complex th = state.theta[i];
      const ModeData& mode = modes_[i];
      const auto& m = mode.matrix;
      const Complex a_new = m[0] * a + m[1] * th;
      const Complex th_new = m[2] * a + m[3] * th;
      removed += std::norm(state.u1[i]) + std::norm(state.u2[i]) + std::norm(th) -
                 std::norm(a_new) - std::norm(th_new);
      const double aa = std::norm(a);
      const double at = (std::conj(a) * th).real();
      const double tt = std::norm(th);
      const auto& gm = mode.gramians;
      const double int_a = gm[0] * aa + 2.0 * gm[1] * at + gm[2] * tt;
      const double int_t = gm[3] * aa + 2.0 * gm[4] * at + gm[5] * tt;
      inc.d2u_h2 += mode.w_d2u * int_a;
      inc.d1u2_l2 += mode.w_d1u2 * int_a;
      inc.d1theta_h2 += mode.w_d1theta * int_t;
      state.u1[i] = e1 * a_new;
      state.u2[i] = e2 * a_new;
      state.theta[i] = th_new;
    }
  }
  const double area = g.area();
  inc.d2u_h2 *= area;
  inc.d1u2_l2 *= area;
  inc.d1theta_h2 *= area;
  return {area * removed, inc};
}

LinearPropagator build_linear_propagator(const Grid& grid, const Params& params, double dt) {
  return LinearPropagator(grid, params, dt);
}

Tendency nonlinear_tendency(const State& state) {
  if (!state.all_finite()) {
    throw NumericalBlowup(state.t, "non-finite coefficients at t = " + format_double(state.t));
  }
  const Grid& g = state.grid();
  // Rotational form: u.grad u = grad(|u|^2/2) + omega (-u2, u1), and the
  // gradient is removed by the projection.
  SpectralField omega(g);
  SpectralField d1th(g);
  SpectralField d2th(g);
  for (int jj = 0; jj < g.nx(); ++jj) {
    const double k1 = g.is_nyquist_j(jj) ? 0.0 : g.kappa1(jj);
    for (int mm = 0; mm < g.ny(); ++mm) {
      const double k2 = g.is_nyquist_m(mm) ? 0.0 : g.kappa2(mm);
      const std::size_t i = g.index(jj, mm);
      const Complex ik1(0.0, k1);
      const Complex ik2(0.0, k2);
      omega[i] = ik1 * state.u2[i] - ik2 * state.u1[i];
      d1th[i] = ik1 * state.theta[i];
      d2th[i] = ik2 * state.theta[i];
    }
  }
  const auto u1 = inverse_transform(state.u1);
  const auto u2 = inverse_transform(state.u2);
  const auto w = inverse_transform(omega);
  const auto t1 = inverse_transform(d1th);
  const auto t2 = inverse_transform(d2th);

  std::vector<double> a1(g.size()), a2(g.size()), at(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    a1[i] = w[i] * u2[i];
    a2[i] = -w[i] * u1[i];
    at[i] = -(u1[i] * t1[i] + u2[i] * t2[i]);
  }
  auto n1 = forward_transform(g, a1);
  auto n2 = forward_transform(g, a2);
  auto nt = forward_transform(g, at);
  dealias_in_place(n1);
  dealias_in_place(n2);
  dealias_in_place(nt);
  auto projected = leray_project(n1, n2);
  return {std::move(projected.v1), std::move(projected.v2), std::move(nt)};
}

void enforce_constraints(State& state) {
  const Grid& g = state.grid();
  for (int mm = 0; mm < g.ny(); ++mm) state.u2[g.index(0, mm)] = 0.0;
  auto p = leray_project(state.u1, state.u2);
  state.u1 = std::move(p.v1);
  state.u2 = std::move(p.v2);
}

namespace {

State add_scaled(const State& base, double h, const Tendency& k) {
  State out = base;
  out.u1.axpy(h, k.u1);
  out.u2.axpy(h, k.u2);
  out.theta.axpy(h, k.theta);
  return out;
}

void require_finite(const State& s, double t) {
  if (!s.all_finite()) {
    throw NumericalBlowup(t, "non-finite coefficients after step ending at t = " + format_double(t));
  }
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

Integrator::Integrator(const Grid& grid, const Params& params, const SolverConfig& config)
    : grid_(grid),
      params_(params),
      config_(config),
      half_(grid, params, 0.5 * config.dt),
      full_(grid, params, config.dt) {
  config_.validate();
  if (!(params.nu >= 0.0 && params.eta >= 0.0 && std::isfinite(params.g0))) {
    throw std::invalid_argument("solver: nu, eta must be >= 0 and g0 finite");
  }
}

void Integrator::check_cfl(const State& state) const {
  const double umax = std::max({max_abs(inverse_transform(state.u1)),
                                max_abs(inverse_transform(state.u2)), 1e-8});
  const double admissible = config_.cfl_safety * std::min(grid_.dx1(), grid_.dx2()) / umax;
  if (config_.dt > admissible) throw CflViolation(config_.dt, admissible);
}

State Integrator::strang(const State& state) {
  State s = state;
  LinearStageIntegrals integrals = half_.apply(s);
  if (!config_.linearized_only) {
    const Tendency k1 = nonlinear_tendency(s);
    const State mid = add_scaled(s, 0.5 * config_.dt, k1);
    const Tendency k2 = nonlinear_tendency(mid);
    s.u1.axpy(config_.dt, k2.u1);
    s.u2.axpy(config_.dt, k2.u2);
    s.theta.axpy(config_.dt, k2.theta);
  }
  integrals += half_.apply(s);
  last_ = integrals;
  return s;
}

State Integrator::lawson(const State& state) {
  if (config_.linearized_only) {
    State s = state;
    last_ = full_.apply(s);
    return s;
  }
  // Integrating-factor Heun: y1 = P(y + h k1), y' = P(y + h/2 k1) + h/2 N(y1).
  const Tendency k1 = nonlinear_tendency(state);
  State predictor = add_scaled(state, config_.dt, k1);
  full_.apply(predictor);
  predictor.t = state.t + config_.dt;
  const Tendency k2 = nonlinear_tendency(predictor);
  State s = add_scaled(state, 0.5 * config_.dt, k1);
  last_ = full_.apply(s);
  s.u1.axpy(0.5 * config_.dt, k2.u1);
  s.u2.axpy(0.5 * config_.dt, k2.u2);
  s.theta.axpy(0.5 * config_.dt, k2.theta);
  return s;
}

State Integrator::step(const State& state) {
  if (!(state.grid() == grid_)) throw std::invalid_argument("step: state grid mismatch");
  if (config_.check_cfl) check_cfl(state);
  State out = config_.scheme == Scheme::kStrang2 ? strang(state) : lawson(state);
  enforce_constraints(out);
  out.t = state.t + config_.dt;
  require_finite(out, out.t);
  return out;
}

State step(const State& state, const Params& params, const SolverConfig& cfg) {
  Integrator integrator(state.grid(), params, cfg);
  return integrator.step(state);
}

double boundary_ratio(const State& state) {
  const Grid& g = state.grid();
  const int strip = static_cast<int>(std::ceil(g.ny() / 8.0));
  double inner = 0.0;
  double edge = 0.0;
  for (const SpectralField* f : {&state.u1, &state.u2, &state.theta}) {
    const auto s = inverse_transform(*f);
    for (int i1 = 0; i1 < g.nx(); ++i1) {
      for (int i2 = 0; i2 < g.ny(); ++i2) {
        const double v = std::abs(s[g.index(i1, i2)]);
        inner = std::max(inner, v);
        if (i2 < strip || i2 > g.ny() - strip) edge = std::max(edge, v);
      }
    }
  }
  return inner > 0.0 ? edge / inner : 0.0;
}

SimulationResult simulate(const State& ic, const Params& params, const SolverConfig& cfg,
                          double cadence, double delta, const StateObserver& observer) {
  cfg.validate();
  if (!(cadence > 0.0)) throw std::invalid_argument("simulate: cadence must be > 0");
  const double ratio = cadence / cfg.dt;
  const long stride = std::lround(ratio);
  if (stride < 1 || std::abs(ratio - static_cast<double>(stride)) > 1e-9 * ratio) {
    throw std::invalid_argument("simulate: cadence must be a positive multiple of dt");
  }
  const double t0 = ic.t;
  if (!(cfg.t_end >= t0)) throw std::invalid_argument("simulate: t_end precedes the initial time");
  const double steps_real = (cfg.t_end - t0) / cfg.dt;
  const long n_steps = std::lround(steps_real);
  if (std::abs(steps_real - static_cast<double>(n_steps)) > 1e-9 * std::max(1.0, steps_real)) {
    throw std::invalid_argument("simulate: t_end - t0 must be a multiple of dt");
  }

  SimulationResult result{EnergySeries(params, delta), {}, ic, std::nullopt};
  Integrator integrator(ic.grid(), params, cfg);
  double dissipated = 0.0;
  DissipationIncrements pending;

  auto observe = [&](const State& s) {
    result.series.append(record(s, params), pending);
    pending = {};
    result.exact_dissipation.push_back(dissipated);
    result.max_divergence = std::max(result.max_divergence, relative_divergence(s.u1, s.u2));
    const auto avg = horizontal_average(s.u2);
    result.max_average_u2 = std::max(result.max_average_u2, std::sqrt(avg.coefficient_energy()));
    result.max_boundary_ratio = std::max(result.max_boundary_ratio, boundary_ratio(s));
    if (observer) observer(s);
  };

  State current = ic;
  observe(current);
  for (long n = 1; n <= n_steps; ++n) {
    try {
      State next = integrator.step(current);
      next.t = t0 + static_cast<double>(n) * cfg.dt;
      dissipated += integrator.last_dissipation();
      pending += integrator.last_integrals().increments;
      current = std::move(next);
    } catch (const NumericalBlowup& e) {
      result.failure = Failure{e.time(), e.what()};
      break;
    }
    if (n % stride == 0 || n == n_steps) observe(current);
  }
  result.boundary_warning = result.max_boundary_ratio > kBoundaryWarningRatio;
  result.final_state = std::move(current);
  return result;
}

}  // namespace abq
