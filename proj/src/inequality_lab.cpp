#include "abq/inequality_lab.hpp"

#include "abq/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace abq {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kLabK0 = 8.0 * std::numbers::pi;
// Round-off allowance for bounds with explicit constants.
constexpr double kRoundoff = 1e-12;

double spectrum_sd(double kk, double slope, double k0) {
  return std::sqrt(std::pow(1.0 + kk, 0.5 * slope) * std::exp(-kk / (k0 * k0)));
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

/// Real periodic samples of a random band-limited function on [0, length)
/// with modes |k| <= kmax.
std::vector<Complex> random_1d_coeffs(int n, double length, int kmax, double slope,
                                      std::mt19937_64& rng, bool mean_zero) {
  std::normal_distribution<double> normal;
  std::vector<Complex> c(static_cast<std::size_t>(n));
  for (int k = 0; k <= kmax; ++k) {
    const double kappa = kTwoPi * k / length;
    const double sd = spectrum_sd(kappa * kappa, slope, kLabK0);
    const double re = normal(rng);
    const double im = normal(rng);
    if (k == 0) {
      c[0] = mean_zero ? 0.0 : sd * re;
    } else {
      c[static_cast<std::size_t>(k)] = sd * Complex(re, im);
      c[static_cast<std::size_t>(n - k)] = std::conj(c[static_cast<std::size_t>(k)]);
    }
  }
  return c;
}

struct TrialOutcome {
  bool skipped = false;
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Runs trials sequentially with per-trial seeds seed + i and folds the
/// outcomes in trial order.
TrialReport run_trials(const std::string& lemma, std::size_t trials, std::uint64_t seed,
                       int resolution, bool explicit_constant,
                       const std::function<TrialOutcome(std::mt19937_64&, double)>& trial) {
  if (trials < 1) throw std::invalid_argument(lemma + ": trials must be >= 1");
  TrialReport rep;
  rep.lemma = lemma;
  rep.trials = trials;
  rep.seed = seed;
  rep.resolution = resolution;
  rep.explicit_constant = explicit_constant;
  for (std::size_t i = 0; i < trials; ++i) {
    std::mt19937_64 rng(seed + i);
    const TrialOutcome o = trial(rng, kSlopes[i % 3]);
    if (o.skipped) {
      ++rep.skipped;
      continue;
    }
    if (o.rhs == 0.0) {
      if (o.lhs != 0.0) {
        ++rep.violations;
        if (!rep.violating_seed) rep.violating_seed = seed + i;
        rep.max_ratio = std::numeric_limits<double>::infinity();
      }
      continue;
    }
    const double ratio = o.lhs / o.rhs;
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    if (explicit_constant && ratio > 1.0 + kRoundoff) {
      ++rep.violations;
      if (!rep.violating_seed) rep.violating_seed = seed + i;
    }
  }
  rep.empirical_constant = rep.max_ratio;
  return rep;
}

Grid lab_grid(int resolution) { return Grid(resolution, resolution, kLabLy); }

}  // namespace

SpectralField random_lab_field(const Grid& grid, std::mt19937_64& rng, double slope, double k0) {
  std::normal_distribution<double> normal;
  SpectralField f(grid);
  const int bj = grid.band_j();
  const int bm = grid.band_m();
  for (int j = -bj; j <= bj; ++j) {
    for (int m = -bm; m <= bm; ++m) {
      const double k1 = kTwoPi * j;
      const double k2 = kTwoPi * m / grid.ly();
      const double sd = spectrum_sd(k1 * k1 + k2 * k2, slope, k0);
      const double re = normal(rng);
      const double im = normal(rng);
      f.mode(j, m) = sd * Complex(re, im);
    }
  }
  f.symmetrize();
  return f;
}

Sobolev1dTerms sobolev_1d_terms(std::span<const Complex> coeffs, double length) {
  const int n = static_cast<int>(coeffs.size());
  double s0 = 0.0;
  double s1 = 0.0;
  for (int i = 0; i < n; ++i) {
    const int k = i < n / 2 ? i : i - n;
    const double kappa = kTwoPi * k / length;
    const double a = std::norm(coeffs[static_cast<std::size_t>(i)]);
    s0 += a;
    s1 += kappa * kappa * a;
  }
  return {max_abs(oversampled_samples_1d(coeffs, 4)), std::sqrt(length * s0),
          std::sqrt(length * s1)};
}

TripleTerms triple_product_terms(const SpectralField& f, const SpectralField& g,
                                 const SpectralField& h) {
  const Grid& grid = f.grid();
  if (!(grid == g.grid()) || !(grid == h.grid())) {
    throw std::invalid_argument("triple_product_terms: grid mismatch");
  }
  const SpectralField ft = oscillation(f);
  const auto fs = oversampled_samples(f, 2);
  const auto fts = oversampled_samples(ft, 2);
  const auto gs = oversampled_samples(g, 2);
  const auto hs = oversampled_samples(h, 2);
  double ig = 0.0;
  double io = 0.0;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    ig += fs[i] * gs[i] * hs[i];
    io += fts[i] * gs[i] * hs[i];
  }
  const double w = grid.area() / static_cast<double>(fs.size());

  const double nf = sobolev_norm(f, 0);
  const double nd1f = sobolev_norm(f, 0, DerivativeMask::kD1);
  const double nft = sobolev_norm(ft, 0);
  const double nd1ft = sobolev_norm(ft, 0, DerivativeMask::kD1);
  const double gfac = std::sqrt(sobolev_norm(g, 0) * sobolev_norm(g, 0, DerivativeMask::kD2));
  const double nh = sobolev_norm(h, 0);
  TripleTerms t;
  t.lhs_general = std::abs(w * ig);
  t.lhs_oscillation = std::abs(w * io);
  t.rhs_general = std::sqrt(nf * (nf + nd1f)) * gfac * nh;
  t.rhs_oscillation = std::sqrt(nft * nd1ft) * gfac * nh;
  return t;
}

std::optional<double> poincare_ratio(const SpectralField& f) {
  const SpectralField ft = oscillation(f);
  const double d1 = sobolev_norm(ft, 0, DerivativeMask::kD1);
  if (d1 == 0.0) return std::nullopt;
  return kTwoPi * sobolev_norm(ft, 0) / d1;
}

std::optional<double> poincare_linf_ratio(const SpectralField& f) {
  const SpectralField ft = oscillation(f);
  const double d1 = sobolev_norm(ft, 1, DerivativeMask::kD1);
  if (d1 == 0.0) return std::nullopt;
  return max_abs(oversampled_samples(ft, 4)) / d1;
}

TrialReport check_sobolev_1d(std::size_t trials, std::uint64_t seed, LineDomain domain,
                             int resolution) {
  if (domain == LineDomain::kTorus) {
    const int n = resolution;
    return run_trials("sobolev_1d_torus", trials, seed, resolution, true,
                      [n](std::mt19937_64& rng, double slope) {
                        const auto c = random_1d_coeffs(n, 1.0, n / 3, slope, rng, false);
                        const auto s = sobolev_1d_terms(c, 1.0);
                        return TrialOutcome{false, s.linf,
                                            std::sqrt(2.0 * s.l2 * s.dl2) + s.l2};
                      });
  }
  // Long torus with data localized well inside it.
  const int n = static_cast<int>(kLineLength) * resolution;
  const double sigma = kLineLength / 16.0;
  return run_trials(
      "sobolev_1d_line", trials, seed, resolution, true,
      [n, sigma](std::mt19937_64& rng, double slope) {
        const auto c = random_1d_coeffs(n, kLineLength, n / 6, slope, rng, false);
        auto s = inverse_transform_1d(c);
        for (int i = 0; i < n; ++i) {
          const double x = i * kLineLength / n - 0.5 * kLineLength;
          s[static_cast<std::size_t>(i)] *= std::exp(-x * x / (2.0 * sigma * sigma));
        }
        auto w = forward_transform_1d(s);
        for (int i = 0; i < n; ++i) {
          const int k = i < n / 2 ? i : i - n;
          if (std::abs(k) > n / 3) w[static_cast<std::size_t>(i)] = 0.0;
        }
        const auto t = sobolev_1d_terms(w, kLineLength);
        return TrialOutcome{false, t.linf, std::sqrt(2.0 * t.l2 * t.dl2)};
      });
}

TrialReport check_sobolev_1d_mean_zero(std::size_t trials, std::uint64_t seed, int resolution) {
  const int n = resolution;
  return run_trials("sobolev_1d_mean_zero", trials, seed, resolution, false,
                    [n](std::mt19937_64& rng, double slope) {
                      const auto c = random_1d_coeffs(n, 1.0, n / 3, slope, rng, true);
                      const auto s = sobolev_1d_terms(c, 1.0);
                      return TrialOutcome{s.linf == 0.0, s.linf, std::sqrt(s.l2 * s.dl2)};
                    });
}

TrialReport check_triple_product(std::size_t trials, std::uint64_t seed, TripleVariant variant,
                                 int resolution) {
  const Grid grid = lab_grid(resolution);
  const bool general = variant == TripleVariant::kGeneral;
  return run_trials(general ? "triple_product_general" : "triple_product_oscillation", trials,
                    seed, resolution, false, [&grid, general](std::mt19937_64& rng, double slope) {
                      const SpectralField f = random_lab_field(grid, rng, slope);
                      const SpectralField g = random_lab_field(grid, rng, slope);
                      const SpectralField h = random_lab_field(grid, rng, slope);
                      const TripleTerms t = triple_product_terms(f, g, h);
                      const double lhs = general ? t.lhs_general : t.lhs_oscillation;
                      const double rhs = general ? t.rhs_general : t.rhs_oscillation;
                      return TrialOutcome{lhs == 0.0 && rhs == 0.0, lhs, rhs};
                    });
}

TrialReport check_poincare_oscillation(std::size_t trials, std::uint64_t seed, int resolution) {
  const Grid grid = lab_grid(resolution);
  return run_trials("poincare_l2", trials, seed, resolution, true,
                    [&grid](std::mt19937_64& rng, double slope) {
                      const auto r = poincare_ratio(random_lab_field(grid, rng, slope));
                      if (!r) return TrialOutcome{true, 0.0, 0.0};
                      return TrialOutcome{false, *r, 1.0};
                    });
}

TrialReport check_poincare_linf(std::size_t trials, std::uint64_t seed, int resolution) {
  const Grid grid = lab_grid(resolution);
  return run_trials("poincare_linf", trials, seed, resolution, false,
                    [&grid](std::mt19937_64& rng, double slope) {
                      const auto r = poincare_linf_ratio(random_lab_field(grid, rng, slope));
                      if (!r) return TrialOutcome{true, 0.0, 0.0};
                      return TrialOutcome{false, *r, 1.0};
                    });
}

std::vector<TrialReport> run_inequality_suite(std::size_t trials, std::uint64_t seed,
                                              int resolution) {
  return {check_sobolev_1d(trials, seed, LineDomain::kLine, resolution),
          check_sobolev_1d(trials, seed, LineDomain::kTorus, resolution),
          check_sobolev_1d_mean_zero(trials, seed, resolution),
          check_triple_product(trials, seed, TripleVariant::kGeneral, resolution),
          check_triple_product(trials, seed, TripleVariant::kOscillation, resolution),
          check_poincare_oscillation(trials, seed, resolution),
          check_poincare_linf(trials, seed, resolution)};
}

std::string format_report(const TrialReport& r) {
  std::ostringstream os;
  os << "lemma=" << r.lemma << " resolution=" << r.resolution << " trials=" << r.trials
     << " skipped=" << r.skipped << " violations=" << r.violations
     << " max_ratio=" << format_double(r.max_ratio)
     << " empirical_constant=" << format_double(r.empirical_constant) << " seed=" << r.seed
     << " violating_seed=";
  if (r.violating_seed) {
    os << *r.violating_seed;
  } else {
    os << "none";
  }
  os << " explicit_constant=" << (r.explicit_constant ? "yes" : "no");
  return os.str();
}

}  // namespace abq
