#include "abq/field_algebra.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace abq {

void Params::validate() const {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw std::invalid_argument("params: nu must be > 0");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw std::invalid_argument("params: eta must be > 0");
  if (g0 == 0.0 || !std::isfinite(g0)) throw std::invalid_argument("params: g0 must be nonzero");
}

DecompositionPair decompose(const SpectralField& f) {
  const Grid& g = f.grid();
  DecompositionPair out{SpectralField(g), SpectralField(g)};
  for (int jj = 0; jj < g.nx(); ++jj) {
    auto& dst = jj == 0 ? out.average : out.oscillation;
    for (int mm = 0; mm < g.ny(); ++mm) {
      const std::size_t i = g.index(jj, mm);
      dst[i] = f[i];
    }
  }
  return out;
}

SpectralField horizontal_average(const SpectralField& f) { return decompose(f).average; }
SpectralField oscillation(const SpectralField& f) { return decompose(f).oscillation; }

VelocityPair leray_project(const SpectralField& v1, const SpectralField& v2) {
  const Grid& g = v1.grid();
  if (!(g == v2.grid())) throw std::invalid_argument("leray_project: grid mismatch");
  VelocityPair out{v1, v2};
  for (int jj = 0; jj < g.nx(); ++jj) {
    const double k1 = g.kappa1(jj);
    for (int mm = 0; mm < g.ny(); ++mm) {
      const double k2 = g.kappa2(mm);
      const double kk = k1 * k1 + k2 * k2;
      if (kk == 0.0) continue;
      const std::size_t i = g.index(jj, mm);
      // Matrix form keeps axis-aligned modes exact.
      out.v1[i] = (k2 * k2 * v1[i] - k1 * k2 * v2[i]) / kk;
      out.v2[i] = (k1 * k1 * v2[i] - k1 * k2 * v1[i]) / kk;
    }
  }
  return out;
}

SpectralField vorticity(const SpectralField& u1, const SpectralField& u2) {
  return spectral_derivative(u2, Axis::kX1) - spectral_derivative(u1, Axis::kX2);
}

SpectralField vorticity(const State& state) { return vorticity(state.u1, state.u2); }

SpectralField inverse_laplacian(const SpectralField& f) {
  const Grid& g = f.grid();
  SpectralField out(g);
  for (int jj = 0; jj < g.nx(); ++jj) {
    const double k1 = g.kappa1(jj);
    for (int mm = 0; mm < g.ny(); ++mm) {
      const double k2 = g.kappa2(mm);
      const double kk = k1 * k1 + k2 * k2;
      if (kk == 0.0) continue;
      const std::size_t i = g.index(jj, mm);
      out[i] = -f[i] / kk;
    }
  }
  return out;
}

namespace {
void require_zero_mean(const SpectralField& f, const char* who) {
  const double mean = std::abs(f.mode(0, 0));
  const double scale = std::sqrt(f.coefficient_energy());
  if (mean > 1e-12 * scale && mean > 0.0) {
    throw std::invalid_argument(std::string(who) +
                                ": nonzero (0,0) mode, inverse Laplacian undefined");
  }
}
}  // namespace

SpectralField streamfunction(const SpectralField& omega) {
  require_zero_mean(omega, "streamfunction");
  return inverse_laplacian(omega);
}

VelocityPair velocity_from_vorticity(const SpectralField& omega) {
  const SpectralField psi = streamfunction(omega);
  VelocityPair out{spectral_derivative(psi, Axis::kX2), spectral_derivative(psi, Axis::kX1)};
  out.v1 *= -1.0;
  return out;
}

SpectralField advect(const SpectralField& v1, const SpectralField& v2, const SpectralField& f) {
  const auto s1 = inverse_transform(v1);
  const auto s2 = inverse_transform(v2);
  const auto d1 = inverse_transform(spectral_derivative(f, Axis::kX1));
  const auto d2 = inverse_transform(spectral_derivative(f, Axis::kX2));
  std::vector<double> prod(s1.size());
  for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = s1[i] * d1[i] + s2[i] * d2[i];
  auto out = forward_transform(f.grid(), prod);
  dealias_in_place(out);
  return out;
}

SpectralField divergence(const SpectralField& v1, const SpectralField& v2) {
  return spectral_derivative(v1, Axis::kX1) + spectral_derivative(v2, Axis::kX2);
}

double relative_divergence(const SpectralField& v1, const SpectralField& v2) {
  const Grid& g = v1.grid();
  double num = 0.0;
  double den = 0.0;
  for (int jj = 0; jj < g.nx(); ++jj) {
    const double k1 = g.kappa1(jj);
    for (int mm = 0; mm < g.ny(); ++mm) {
      const double k2 = g.kappa2(mm);
      const std::size_t i = g.index(jj, mm);
      num += std::norm(k1 * v1[i] + k2 * v2[i]);
      den += (k1 * k1 + k2 * k2) * (std::norm(v1[i]) + std::norm(v2[i]));
    }
  }
  return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

SpectralField recover_pressure(const State& state, const Params& params) {
  const auto n1 = advect(state.u1, state.u2, state.u1);
  const auto n2 = advect(state.u1, state.u2, state.u2);
  SpectralField rhs = divergence(n1, n2);
  rhs *= -1.0;
  rhs.axpy(params.g0, spectral_derivative(state.theta, Axis::kX2));
  return inverse_laplacian(rhs);
}

double sobolev_norm(const SpectralField& f, int s, DerivativeMask mask) {
  if (s < 0 || s > 2) throw std::invalid_argument("sobolev_norm: s must be 0, 1 or 2");
  const Grid& g = f.grid();
  std::vector<double> k2sq(static_cast<std::size_t>(g.ny()));
  for (int mm = 0; mm < g.ny(); ++mm) k2sq[mm] = g.kappa2(mm) * g.kappa2(mm);
  double sum = 0.0;
  for (int jj = 0; jj < g.nx(); ++jj) {
    const double k1sq = g.kappa1(jj) * g.kappa1(jj);
    if (mask == DerivativeMask::kD1 && (g.is_nyquist_j(jj) || k1sq == 0.0)) continue;
    for (int mm = 0; mm < g.ny(); ++mm) {
      const double a = std::norm(f[g.index(jj, mm)]);
      if (a == 0.0) continue;
      const double base = 1.0 + k1sq + k2sq[mm];
      double w = s == 0 ? 1.0 : (s == 1 ? base : base * base);
      if (mask == DerivativeMask::kD1) w *= k1sq;
      if (mask == DerivativeMask::kD2) w *= g.is_nyquist_m(mm) ? 0.0 : k2sq[mm];
      sum += w * a;
    }
  }
  return std::sqrt(g.area() * sum);
}

double homogeneous_norm(const SpectralField& f, int s) {
  if (s < 0) throw std::invalid_argument("homogeneous_norm: s must be >= 0");
  const Grid& g = f.grid();
  double sum = 0.0;
  for (int jj = 0; jj < g.nx(); ++jj) {
    const double k1 = g.kappa1(jj);
    for (int mm = 0; mm < g.ny(); ++mm) {
      const double k2 = g.kappa2(mm);
      sum += std::pow(k1 * k1 + k2 * k2, s) * std::norm(f[g.index(jj, mm)]);
    }
  }
  return std::sqrt(g.area() * sum);
}

double inner_product(const SpectralField& f, const SpectralField& g) {
  if (!(f.grid() == g.grid())) throw std::invalid_argument("inner_product: grid mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < f.coeffs().size(); ++i) sum += (f[i] * std::conj(g[i])).real();
  return f.grid().area() * sum;
}

double velocity_h2_via_vorticity(const SpectralField& u1, const SpectralField& u2) {
  const SpectralField omega = vorticity(u1, u2);
  const double l2 = std::pow(sobolev_norm(u1, 0), 2) + std::pow(sobolev_norm(u2, 0), 2);
  const double w = std::pow(sobolev_norm(omega, 0), 2);
  const double gw = std::pow(homogeneous_norm(omega, 1), 2);
  return std::sqrt(l2 + w + gw);
}

}  // namespace abq
