#include "abq/initial_conditions.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace abq {

namespace {

// Window amplitude floor at distance 3 ly/8 from the centre.
constexpr double kWindowFloor = 1e-13;
// Relative level at which the window spectrum is treated as zero.
constexpr double kSpectralFloor = 1e-17;

SpectralField localize(const SpectralField& f) {
  const Grid& g = f.grid();
  const double sigma = localization_sigma(g);
  auto s = inverse_transform(f);
  for (int i2 = 0; i2 < g.ny(); ++i2) {
    const double x2 = i2 * g.dx2() - 0.5 * g.ly();
    const double w = std::exp(-x2 * x2 / (2.0 * sigma * sigma));
    for (int i1 = 0; i1 < g.nx(); ++i1) s[g.index(i1, i2)] *= w;
  }
  auto out = forward_transform(g, s);
  dealias_in_place(out);
  out.symmetrize();
  return out;
}

SpectralField draw(const Grid& g, std::mt19937_64& rng, double k0) {
  std::normal_distribution<double> normal;
  SpectralField f(g);
  const int bj = g.band_j();
  const int bm = random_band_m(g);
  for (int j = -bj; j <= bj; ++j) {
    for (int m = -bm; m <= bm; ++m) {
      const double k1 = 2.0 * std::numbers::pi * j;
      const double k2 = 2.0 * std::numbers::pi * m / g.ly();
      const double kk = k1 * k1 + k2 * k2;
      const double sd = std::sqrt(kk * std::exp(-kk / (k0 * k0)));
      const double re = normal(rng);
      const double im = normal(rng);
      f.mode(j, m) = sd * Complex(re, im);
    }
  }
  f.symmetrize();
  return f;
}

void scale_to(SpectralField& f, double target) {
  const double n = sobolev_norm(f, 2);
  if (n > 0.0) f *= target / n;
}

}  // namespace

double localization_sigma(const Grid& grid) {
  return (3.0 * grid.ly() / 8.0) / std::sqrt(2.0 * std::log(1.0 / kWindowFloor));
}

int random_band_m(const Grid& grid) {
  const double sigma = localization_sigma(grid);
  const double k_window = std::sqrt(2.0 * std::log(1.0 / kSpectralFloor)) / sigma;
  const int m_window =
      static_cast<int>(std::ceil(k_window * grid.ly() / (2.0 * std::numbers::pi)));
  return std::max(1, grid.band_m() - m_window);
}

State random_banded_state(const Grid& grid, double epsilon, std::uint64_t seed, double k0) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("random initial data: epsilon must be > 0");
  if (!(k0 > 0.0)) throw std::invalid_argument("random initial data: k0 must be > 0");
  std::mt19937_64 rng(seed);
  const SpectralField psi = localize(draw(grid, rng, k0));
  SpectralField theta = localize(draw(grid, rng, k0));

  SpectralField u1 = spectral_derivative(psi, Axis::kX2);
  u1 *= -1.0;
  SpectralField u2 = spectral_derivative(psi, Axis::kX1);
  const double un = std::hypot(sobolev_norm(u1, 2), sobolev_norm(u2, 2));
  if (un > 0.0) {
    u1 *= 0.5 * epsilon / un;
    u2 *= 0.5 * epsilon / un;
  }
  scale_to(theta, 0.5 * epsilon);
  return State(std::move(u1), std::move(u2), std::move(theta), 0.0);
}

State single_mode_state(const Grid& grid, int j, int m, double epsilon) {
  if (j == 0 && m == 0) throw std::invalid_argument("single mode: (j, m) must be nonzero");
  if (std::abs(j) > grid.band_j() || std::abs(m) > grid.band_m()) {
    throw std::invalid_argument("single mode: (j, m) outside the dealias band");
  }
  if (!(epsilon > 0.0)) throw std::invalid_argument("single mode: epsilon must be > 0");
  SpectralField psi(grid);
  psi.mode(j, m) = 0.5;
  psi.mode(-j, -m) = 0.5;
  SpectralField theta = psi;
  SpectralField u1 = spectral_derivative(psi, Axis::kX2);
  u1 *= -1.0;
  SpectralField u2 = spectral_derivative(psi, Axis::kX1);
  const double un = std::hypot(sobolev_norm(u1, 2), sobolev_norm(u2, 2));
  if (un > 0.0) {
    u1 *= 0.5 * epsilon / un;
    u2 *= 0.5 * epsilon / un;
  }
  scale_to(theta, 0.5 * epsilon);
  return State(std::move(u1), std::move(u2), std::move(theta), 0.0);
}

}  // namespace abq
