// Randomized checks of anisotropic Sobolev, triple-product and Poincare
// inequalities on band-limited fields.
#pragma once

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "abq/field_algebra.hpp"

namespace abq {

struct TrialReport {
  std::string lemma;
  std::size_t trials = 0;
  /// Trials where both sides vanished and nothing was tested.
  std::size_t skipped = 0;
  std::size_t violations = 0;
  /// Worst LHS / RHS. For bounds with an explicit constant the RHS includes
  /// it and max_ratio <= 1 is required; otherwise it equals the empirical
  /// constant.
  double max_ratio = 0.0;
  std::optional<std::uint64_t> violating_seed;
  double empirical_constant = 0.0;
  std::uint64_t seed = 0;
  int resolution = 0;
  bool explicit_constant = false;
};

enum class LineDomain { kLine, kTorus };
enum class TripleVariant { kGeneral, kOscillation };

/// Spectral slopes of the random ensemble; trial i uses kSlopes[i % 3].
inline constexpr double kSlopes[3] = {0.0, -1.0, -2.0};

/// Side length of the square lab grid in x2 (x1 has period 1).
inline constexpr double kLabLy = 4.0;
/// Period of the long torus standing in for the line.
inline constexpr double kLineLength = 8.0;

/// Random real field on `grid`: in-band coefficients with variance
/// (1+|k|^2)^(slope/2) exp(-|k|^2/k0^2).
SpectralField random_lab_field(const Grid& grid, std::mt19937_64& rng, double slope,
                               double k0 = 8.0 * std::numbers::pi);

struct Sobolev1dTerms {
  double linf = 0.0;   // on a 4x oversampled grid
  double l2 = 0.0;
  double dl2 = 0.0;    // ||f'||
};

/// Norms of the periodic function sum_k c_k e^{2 pi i k x / length};
/// coefficients in FFT order.
Sobolev1dTerms sobolev_1d_terms(std::span<const Complex> coeffs, double length);

struct TripleTerms {
  double lhs_general = 0.0;      // |int f g h|
  double lhs_oscillation = 0.0;  // |int f~ g h|
  /// ||f||^1/2 (||f|| + ||d1 f||)^1/2 ||g||^1/2 ||d2 g||^1/2 ||h||
  double rhs_general = 0.0;
  /// ||f~||^1/2 ||d1 f~||^1/2 ||g||^1/2 ||d2 g||^1/2 ||h||
  double rhs_oscillation = 0.0;
};

/// Integrals are exact for band-limited inputs (2x oversampled quadrature).
TripleTerms triple_product_terms(const SpectralField& f, const SpectralField& g,
                                 const SpectralField& h);

/// 2 pi ||f~|| / ||d1 f~||; empty when f has no oscillation.
std::optional<double> poincare_ratio(const SpectralField& f);

/// ||f~||_inf / ||d1 f~||_{H^1}; empty when f has no oscillation.
std::optional<double> poincare_linf_ratio(const SpectralField& f);

/// Explicit constant sqrt 2; the torus form adds ||f||_{L^2}.
TrialReport check_sobolev_1d(std::size_t trials, std::uint64_t seed, LineDomain domain,
                             int resolution = 64);
/// Mean-zero torus functions, generic constant.
TrialReport check_sobolev_1d_mean_zero(std::size_t trials, std::uint64_t seed,
                                       int resolution = 64);
TrialReport check_triple_product(std::size_t trials, std::uint64_t seed, TripleVariant variant,
                                 int resolution = 64);
/// Explicit constant 1/(2 pi) for the L^2 bound.
TrialReport check_poincare_oscillation(std::size_t trials, std::uint64_t seed,
                                       int resolution = 64);
TrialReport check_poincare_linf(std::size_t trials, std::uint64_t seed, int resolution = 64);

/// Every check at one resolution.
std::vector<TrialReport> run_inequality_suite(std::size_t trials, std::uint64_t seed,
                                              int resolution);

/// One line per report: lemma=... trials=... max_ratio=... ...
std::string format_report(const TrialReport& r);

}  // namespace abq
