#include "abq/diagnostics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace abq {

namespace {

double sq(double x) { return x * x; }

double pair_norm(const SpectralField& a, const SpectralField& b, int s,
                 DerivativeMask mask = DerivativeMask::kNone) {
  return std::sqrt(sq(sobolev_norm(a, s, mask)) + sq(sobolev_norm(b, s, mask)));
}

}  // namespace

EnergyRecord record(const State& state, const Params& params) {
  (void)params;
  EnergyRecord r;
  r.t = state.t;
  r.l2_u = pair_norm(state.u1, state.u2, 0);
  r.l2_theta = sobolev_norm(state.theta, 0);
  r.h1_u = pair_norm(state.u1, state.u2, 1);
  r.h1_theta = sobolev_norm(state.theta, 1);
  r.h2_u = pair_norm(state.u1, state.u2, 2);
  r.h2_theta = sobolev_norm(state.theta, 2);
  r.d2u_h2 = pair_norm(state.u1, state.u2, 2, DerivativeMask::kD2);
  r.d1theta_h2 = sobolev_norm(state.theta, 2, DerivativeMask::kD1);
  r.d1u2_l2 = sobolev_norm(state.u2, 0, DerivativeMask::kD1);
  r.d2u_l2 = pair_norm(state.u1, state.u2, 0, DerivativeMask::kD2);
  r.d1theta_l2 = sobolev_norm(state.theta, 0, DerivativeMask::kD1);

  const auto u1 = decompose(state.u1);
  const auto u2 = decompose(state.u2);
  const auto th = decompose(state.theta);
  r.osc_h1 = std::sqrt(sq(pair_norm(u1.oscillation, u2.oscillation, 1)) +
                       sq(sobolev_norm(th.oscillation, 1)));
  r.avg_h1 = std::sqrt(sq(pair_norm(u1.average, u2.average, 1)) + sq(sobolev_norm(th.average, 1)));
  r.cross = inner_product(u2.oscillation, th.oscillation);
  return r;
}

EnergySeries::EnergySeries(const Params& params, double delta) : params_(params), delta_(delta) {
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw std::invalid_argument("energy series: delta must be >= 0");
  }
}

void EnergySeries::append(const EnergyRecord& rec) {
  const double a = 2.0 * params_.nu * sq(rec.d2u_h2);
  const double b = 2.0 * params_.eta * sq(rec.d1theta_h2);
  const double c = delta_ * sq(params_.g0 * rec.d1u2_l2);
  if (records_.empty()) {
    i_d2u_.push_back(0.0);
    i_d1theta_.push_back(0.0);
    i_d1u2_.push_back(0.0);
  } else {
    const EnergyRecord& prev = records_.back();
    if (!(rec.t >= prev.t)) {
      throw std::invalid_argument("energy series: records must be time-ordered");
    }
    const double h = 0.5 * (rec.t - prev.t);
    i_d2u_.push_back(i_d2u_.back() + h * (a + 2.0 * params_.nu * sq(prev.d2u_h2)));
    i_d1theta_.push_back(i_d1theta_.back() + h * (b + 2.0 * params_.eta * sq(prev.d1theta_h2)));
    i_d1u2_.push_back(i_d1u2_.back() + h * (c + delta_ * sq(params_.g0 * prev.d1u2_l2)));
  }
  records_.push_back(rec);
}

void EnergySeries::append(const EnergyRecord& rec, const DissipationIncrements& since_previous) {
  if (records_.empty()) {
    append(rec);
    return;
  }
  if (!(rec.t >= records_.back().t)) {
    throw std::invalid_argument("energy series: records must be time-ordered");
  }
  i_d2u_.push_back(i_d2u_.back() + 2.0 * params_.nu * since_previous.d2u_h2);
  i_d1theta_.push_back(i_d1theta_.back() + 2.0 * params_.eta * since_previous.d1theta_h2);
  i_d1u2_.push_back(i_d1u2_.back() + delta_ * sq(params_.g0) * since_previous.d1u2_l2);
  records_.push_back(rec);
}

std::vector<double> EnergySeries::times() const {
  std::vector<double> t;
  t.reserve(records_.size());
  for (const auto& r : records_) t.push_back(r.t);
  return t;
}

std::vector<double> EnergySeries::oscillation_energy() const {
  std::vector<double> f;
  f.reserve(records_.size());
  for (const auto& r : records_) f.push_back(sq(r.osc_h1));
  return f;
}

std::vector<double> energy_functional(const EnergySeries& series) {
  std::vector<double> e;
  e.reserve(series.size());
  double running = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& r = series.records()[i];
    running = std::max(running, sq(r.h2_u) + sq(r.h2_theta));
    e.push_back(running + series.i_d2u()[i] + series.i_d1theta()[i] + series.i_d1u2()[i]);
  }
  return e;
}

double default_delta(const Params& params, const EnergyRecord& first) {
  double delta = 0.1 * std::min({params.nu, params.eta, 1.0});
  const double osc2 = sq(first.osc_h1);
  while (delta > 0.0 && osc2 - delta * first.cross < 0.5 * osc2) delta *= 0.5;
  return delta;
}

DeltaTooLarge::DeltaTooLarge(double delta, double max_delta)
    : std::invalid_argument("delta = " + format_double(delta) +
                            " breaks L >= osc_h1^2/2; largest admissible delta is " +
                            format_double(max_delta)),
      max_delta_(max_delta) {}

std::vector<double> lyapunov_series(const EnergySeries& series) {
  const double delta = series.delta();
  std::vector<double> out;
  out.reserve(series.size());
  double max_delta = std::numeric_limits<double>::infinity();
  bool violated = false;
  for (const auto& r : series.records()) {
    const double osc2 = sq(r.osc_h1);
    const double l = osc2 - delta * r.cross;
    if (r.cross > 0.0) max_delta = std::min(max_delta, 0.5 * osc2 / r.cross);
    if (l < 0.5 * osc2) violated = true;
    out.push_back(l);
  }
  if (violated) throw DeltaTooLarge(delta, max_delta);
  return out;
}

double StateWindow::spacing() const {
  if (states.size() < 3) throw std::invalid_argument("state window: need at least 3 states");
  const double h = states[1].t - states[0].t;
  if (!(h > 0.0)) throw std::invalid_argument("state window: times must increase");
  for (std::size_t i = 1; i < states.size(); ++i) {
    const double hi = states[i].t - states[i - 1].t;
    if (std::abs(hi - h) > 1e-9 * h) throw std::invalid_argument("state window: nonuniform spacing");
  }
  return h;
}

const State& StateWindow::centre() const {
  spacing();
  return states[(states.size() - 1) / 2];
}
const State& StateWindow::before() const {
  spacing();
  return states[(states.size() - 1) / 2 - 1];
}
const State& StateWindow::after() const {
  spacing();
  return states[(states.size() - 1) / 2 + 1];
}

namespace {

/// Components of the wave-equation target for one state.
std::vector<SpectralField> target_fields(const State& s, WaveTarget target) {
  switch (target) {
    case WaveTarget::kVelocity:
      return {s.u1, s.u2};
    case WaveTarget::kTheta:
      return {s.theta};
    case WaveTarget::kVorticity:
      return {vorticity(s)};
  }
  return {};
}

/// Nonlinear source quantities evaluated on one state; their time
/// derivatives enter the forcing of the wave equation.
std::vector<SpectralField> advective_terms(const State& s, WaveTarget target) {
  switch (target) {
    case WaveTarget::kVelocity: {
      auto p = leray_project(advect(s.u1, s.u2, s.u1), advect(s.u1, s.u2, s.u2));
      return {std::move(p.v1), std::move(p.v2)};
    }
    case WaveTarget::kTheta:
      return {advect(s.u1, s.u2, s.theta)};
    case WaveTarget::kVorticity:
      return {advect(s.u1, s.u2, vorticity(s))};
  }
  return {};
}

/// Forcing N for each component of the target, at the window centre.
std::vector<SpectralField> wave_forcing(const StateWindow& w, WaveTarget target,
                                        const Params& params) {
  const double h = w.spacing();
  const State& c = w.centre();
  const auto a_before = advective_terms(w.before(), target);
  const auto a_centre = advective_terms(c, target);
  const auto a_after = advective_terms(w.after(), target);
  const SpectralField ut = advect(c.u1, c.u2, c.theta);
  const Grid& g = c.grid();

  std::vector<SpectralField> out;
  for (std::size_t comp = 0; comp < a_centre.size(); ++comp) {
    // -(d_t - D) A with D = eta d11 (velocity, vorticity) or nu d22 (theta).
    SpectralField n(g);
    for (int jj = 0; jj < g.nx(); ++jj) {
      const double k1 = g.kappa1(jj);
      for (int mm = 0; mm < g.ny(); ++mm) {
        const double k2 = g.kappa2(mm);
        const std::size_t i = g.index(jj, mm);
        const double damp =
            target == WaveTarget::kTheta ? params.nu * k2 * k2 : params.eta * k1 * k1;
        const Complex dt_a = (a_after[comp][i] - a_before[comp][i]) / (2.0 * h);
        n[i] = -(dt_a + damp * a_centre[comp][i]);
      }
    }
    out.push_back(std::move(n));
  }

  switch (target) {
    case WaveTarget::kVelocity: {
      // -g0 P((u.grad theta) e2)
      auto p = leray_project(SpectralField(g), ut);
      out[0].axpy(-params.g0, p.v1);
      out[1].axpy(-params.g0, p.v2);
      break;
    }
    case WaveTarget::kTheta: {
      // +g0 [P(u.grad u)]_2
      const auto p = leray_project(advect(c.u1, c.u2, c.u1), advect(c.u1, c.u2, c.u2));
      out[0].axpy(params.g0, p.v2);
      break;
    }
    case WaveTarget::kVorticity:
      out[0].axpy(-params.g0, spectral_derivative(ut, Axis::kX1));
      break;
  }
  return out;
}

using Components = std::vector<SpectralField>;
using ModeMask = bool (*)(const Grid&, int, int);

bool horizontal_nonzero(const Grid&, int jj, int) { return jj != 0; }
bool all_modes(const Grid&, int, int) { return true; }
bool average_nonzero(const Grid&, int jj, int mm) { return jj == 0 && mm != 0; }
bool average_modes(const Grid&, int jj, int) { return jj == 0; }

double masked_norm(const Components& comps, ModeMask mask) {
  double sum = 0.0;
  for (const auto& f : comps) {
    const Grid& g = f.grid();
    for (int jj = 0; jj < g.nx(); ++jj) {
      for (int mm = 0; mm < g.ny(); ++mm) {
        if (mask(g, jj, mm)) sum += std::norm(f[g.index(jj, mm)]);
      }
    }
  }
  return comps.empty() ? 0.0 : std::sqrt(comps.front().grid().area() * sum);
}

/// Residual = sum of the signed terms, measured on the masked modes.
ResidualReport make_report(const std::vector<Components>& terms, ModeMask mask) {
  ResidualReport rep;
  Components total = terms.front();
  for (std::size_t t = 1; t < terms.size(); ++t) {
    for (std::size_t c = 0; c < total.size(); ++c) total[c] += terms[t][c];
  }
  for (auto& f : total) {
    const Grid& g = f.grid();
    for (int jj = 0; jj < g.nx(); ++jj) {
      for (int mm = 0; mm < g.ny(); ++mm) {
        if (!mask(g, jj, mm)) f[g.index(jj, mm)] = 0.0;
      }
    }
  }
  double largest = 0.0;
  for (const auto& t : terms) largest = std::max(largest, masked_norm(t, mask));
  rep.absolute = masked_norm(total, mask);
  if (largest > 0.0) {
    rep.relative = rep.absolute / largest;
  } else {
    rep.degenerate = true;
  }
  rep.fields = std::move(total);
  return rep;
}

/// Per-mode multiplier applied to every component.
Components scale_modes(const Components& comps, double factor,
                       double (*symbol)(double k1, double k2, const Params&),
                       const Params& params) {
  Components out;
  for (const auto& f : comps) {
    const Grid& g = f.grid();
    SpectralField r(g);
    for (int jj = 0; jj < g.nx(); ++jj) {
      const double k1 = g.kappa1(jj);
      for (int mm = 0; mm < g.ny(); ++mm) {
        const std::size_t i = g.index(jj, mm);
        r[i] = factor * symbol(k1, g.kappa2(mm), params) * f[i];
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

Components combine(const Components& a, double sa, const Components& b, double sb) {
  Components out;
  for (std::size_t c = 0; c < a.size(); ++c) {
    SpectralField r = a[c];
    r *= sa;
    r.axpy(sb, b[c]);
    out.push_back(std::move(r));
  }
  return out;
}

double unit_symbol(double, double, const Params&) { return 1.0; }
double damping_symbol(double k1, double k2, const Params& p) {
  return p.eta * k1 * k1 + p.nu * k2 * k2;
}
double product_symbol(double k1, double k2, const Params& p) {
  return p.nu * p.eta * k1 * k1 * k2 * k2;
}
double coupling_symbol(double k1, double k2, const Params& p) {
  const double kk = k1 * k1 + k2 * k2;
  return kk > 0.0 ? p.g0 * p.g0 * k1 * k1 / kk : 0.0;
}
double vertical_diffusion_symbol(double, double k2, const Params& p) { return p.nu * k2 * k2; }

}  // namespace

ResidualReport wave_residual(const StateWindow& window, WaveTarget target, const Params& params,
                             bool include_nonlinear) {
  const double h = window.spacing();
  const auto xm = target_fields(window.before(), target);
  const auto x0 = target_fields(window.centre(), target);
  const auto xp = target_fields(window.after(), target);

  Components tt = combine(xp, 1.0, xm, 1.0);
  for (std::size_t c = 0; c < tt.size(); ++c) {
    tt[c].axpy(-2.0, x0[c]);
    tt[c] *= 1.0 / (h * h);
  }
  const Components xt = combine(xp, 0.5 / h, xm, -0.5 / h);

  std::vector<Components> terms{tt, scale_modes(xt, 1.0, damping_symbol, params),
                                scale_modes(x0, 1.0, product_symbol, params),
                                scale_modes(x0, 1.0, coupling_symbol, params)};
  if (include_nonlinear) {
    terms.push_back(scale_modes(wave_forcing(window, target, params), -1.0, unit_symbol, params));
  }
  return make_report(terms, horizontal_nonzero);
}

ResidualReport regularization_identity_check(const StateWindow& window, const Params& params) {
  const double h = window.spacing();
  const State& c = window.centre();
  SpectralField lhs = spectral_derivative(c.u2, Axis::kX1);
  lhs *= params.g0;
  SpectralField dt_d1theta = spectral_derivative(window.after().theta - window.before().theta, Axis::kX1);
  dt_d1theta *= 0.5 / h;
  const SpectralField d1_adv = spectral_derivative(advect(c.u1, c.u2, c.theta), Axis::kX1);
  SpectralField diff = spectral_derivative(c.theta, Axis::kX1, 3);
  diff *= -params.eta;
  return make_report({{lhs}, {dt_d1theta}, {d1_adv}, {diff}}, all_modes);
}

AveragedResidual limit_1d_residual(const StateWindow& window, const Params& params) {
  const double h = window.spacing();
  const State& c = window.centre();
  const State& b = window.before();
  const State& a = window.after();

  const Components dt_avg_u{horizontal_average((a.u1 - b.u1)), horizontal_average((a.u2 - b.u2))};
  Components dt_u = dt_avg_u;
  for (auto& f : dt_u) f *= 0.5 / h;
  const Components adv_u{horizontal_average(advect(c.u1, c.u2, oscillation(c.u1))),
                         horizontal_average(advect(c.u1, c.u2, oscillation(c.u2)))};
  const SpectralField p_avg = horizontal_average(recover_pressure(c, params));
  const Components grad_p{SpectralField(c.grid()), spectral_derivative(p_avg, Axis::kX2)};
  SpectralField buoy = horizontal_average(c.theta);
  buoy *= -params.g0;
  const Components buoyancy{SpectralField(c.grid()), buoy};
  const Components avg_u{horizontal_average(c.u1), horizontal_average(c.u2)};
  const Components diffusion = scale_modes(avg_u, 1.0, vertical_diffusion_symbol, params);

  SpectralField dt_theta = horizontal_average(a.theta - b.theta);
  dt_theta *= 0.5 / h;
  const SpectralField adv_theta = horizontal_average(advect(c.u1, c.u2, oscillation(c.theta)));

  // The (0,0) momentum mode carries the hydrostatic part of a constant
  // theta, which the zero-mean pressure gauge cannot represent.
  return {make_report({dt_u, adv_u, grad_p, buoyancy, diffusion}, average_nonzero),
          make_report({{dt_theta}, {adv_theta}}, average_modes)};
}

PowerLawFit fit_decay_exponent(std::span<const double> t, std::span<const double> f, double t_a,
                               double t_b) {
  if (t.size() != f.size()) throw std::invalid_argument("fit_decay_exponent: length mismatch");
  if (!(t_a >= 1.0)) throw std::invalid_argument("fit_decay_exponent: window must start at t >= 1");
  if (!(t_b > t_a)) throw std::invalid_argument("fit_decay_exponent: empty window");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_a || t[i] > t_b) continue;
    if (!(f[i] > 0.0)) throw std::invalid_argument("fit_decay_exponent: f must be > 0 on the window");
    const double x = std::log1p(t[i]);
    const double y = std::log(f[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 8) {
    throw std::invalid_argument("fit_decay_exponent: window holds " + std::to_string(n) +
                                " samples, need at least 8");
  }
  const double dn = static_cast<double>(n);
  const double mx = sx / dn;
  const double my = sy / dn;
  const double alpha = (sxy - dn * mx * my) / (sxx - dn * mx * mx);
  return {alpha, std::exp(my - alpha * mx), n};
}

DecayCertificate certify_decay(std::span<const double> t, std::span<const double> f) {
  if (t.size() != f.size()) throw std::invalid_argument("certify_decay: length mismatch");
  if (t.size() < 2) throw std::invalid_argument("certify_decay: need at least 2 samples");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!std::isfinite(f[i]) || !std::isfinite(t[i])) {
      throw std::invalid_argument("certify_decay: non-finite sample");
    }
    if (f[i] < 0.0) {
      throw std::invalid_argument("certify_decay: negative sample at t = " + format_double(t[i]));
    }
    if (i > 0 && !(t[i] > t[i - 1])) throw std::invalid_argument("certify_decay: times must increase");
  }
  if (t.front() < 0.0) throw std::invalid_argument("certify_decay: times must be >= 0");

  DecayCertificate cert;
  const std::size_t n = t.size();
  double trapezoid = 0.0;
  for (std::size_t i = 1; i < n; ++i) trapezoid += 0.5 * (t[i] - t[i - 1]) * (f[i] + f[i - 1]);

  const std::size_t tail_begin = n - n / 3;
  std::vector<double> tt;
  std::vector<double> ft;
  bool tail_zero = true;
  for (std::size_t i = tail_begin; i < n; ++i) {
    if (f[i] > 0.0) tail_zero = false;
    if (t[i] >= 1.0) {
      tt.push_back(t[i]);
      ft.push_back(f[i]);
    }
  }
  double tail = 0.0;
  if (tail_zero) {
    cert.integrable = true;
    cert.tail_exponent = -std::numeric_limits<double>::infinity();
  } else if (tt.size() < 8 || std::find(ft.begin(), ft.end(), 0.0) != ft.end()) {
    cert.reason = "tail cannot be fitted (need 8 positive samples with t >= 1 in the final third)";
  } else {
    const PowerLawFit fit = fit_decay_exponent(tt, ft, tt.front(), tt.back());
    cert.tail_exponent = fit.alpha;
    if (fit.alpha < -1.0) {
      cert.integrable = true;
      tail = f[n - 1] * (1.0 + t[n - 1]) / (-fit.alpha - 1.0);
    } else {
      cert.reason = "non-integrable tail: fitted exponent " + format_double(fit.alpha) + " >= -1";
    }
  }
  cert.c0 = trapezoid + tail;

  constexpr double kFloor = 1e-30;
  double ratio = 1.0;
  double running_min = std::max(f[0], kFloor);
  for (std::size_t i = 1; i < n; ++i) {
    ratio = std::max(ratio, f[i] / running_min);
    running_min = std::min(running_min, std::max(f[i], kFloor));
  }
  cert.c1 = ratio;
  cert.c2 = std::max(2.0 * cert.c1 * f[0], 4.0 * cert.c0 * cert.c1);

  bool envelope = true;
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (f[i] > cert.c2 / (1.0 + t[i])) {
      envelope = false;
      const double excess = f[i] * (1.0 + t[i]) / cert.c2;
      if (excess > worst) {
        worst = excess;
        cert.worst_violation_t = t[i];
      }
    }
  }

  cert.tail_tf_decreasing = true;
  for (std::size_t i = tail_begin + 1; i < n; ++i) {
    if (t[i] * f[i] > t[i - 1] * f[i - 1]) cert.tail_tf_decreasing = false;
  }

  cert.verdict = envelope && cert.integrable;
  if (!envelope) {
    cert.reason = (cert.reason.empty() ? "" : cert.reason + "; ") +
                  "envelope f <= C2/(1+t) violated, worst at t = " +
                  format_double(*cert.worst_violation_t);
  }
  return cert;
}

const std::vector<std::string>& series_columns() {
  static const std::vector<std::string> cols{
      "t",          "l2_u",       "l2_theta", "h1_u",   "h1_theta", "h2_u",     "h2_theta", "d2u_h2",
      "d1theta_h2", "d1u2_l2",    "osc_h1",   "avg_h1", "cross",    "lyapunov", "E"};
  return cols;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_series_csv(std::ostream& out, const EnergySeries& series,
                      const std::vector<std::string>& header_lines) {
  for (const auto& line : header_lines) out << "# " << line << '\n';
  const auto& cols = series_columns();
  for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
  out << '\n';
  const auto lyap = lyapunov_series(series);
  const auto energy = energy_functional(series);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& r = series.records()[i];
    const double row[] = {r.t,      r.l2_u,       r.l2_theta, r.h1_u,   r.h1_theta,
                          r.h2_u,   r.h2_theta,   r.d2u_h2,   r.d1theta_h2, r.d1u2_l2,
                          r.osc_h1, r.avg_h1,     r.cross,    lyap[i],  energy[i]};
    for (std::size_t c = 0; c < std::size(row); ++c) out << (c ? "," : "") << format_double(row[c]);
    out << '\n';
  }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  return out;
}

double parse_cell(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::runtime_error("csv line " + std::to_string(line_no) + ": cannot parse '" + s + "'");
  }
  return v;
}

}  // namespace

CsvColumn read_csv_column(const std::string& path, const std::string& column) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open series file '" + path + "'");
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    header = split_csv(line);
    break;
  }
  const auto find = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::runtime_error("column '" + name + "' not found in " + path);
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t ti = find("t");
  const std::size_t ci = find(column);
  CsvColumn out;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw std::runtime_error("csv line " + std::to_string(line_no) + ": expected " +
                               std::to_string(header.size()) + " cells");
    }
    out.t.push_back(parse_cell(cells[ti], line_no));
    out.values.push_back(parse_cell(cells[ci], line_no));
  }
  return out;
}

}  // namespace abq
