// Initial data for perturbation runs.
#pragma once

#include <cstdint>
#include <numbers>

#include "abq/field_algebra.hpp"

namespace abq {

inline constexpr double kDefaultK0 = 8.0 * std::numbers::pi;

/// Gaussian profile in x2 centred at ly/2 whose amplitude is below 1e-13
/// within ly/8 of the periodic boundary.
double localization_sigma(const Grid& grid);

/// Largest |m| whose random coefficient is drawn, leaving room in the
/// dealias band for the spectral tail of the localization window.
int random_band_m(const Grid& grid);

/// Random band-limited state: streamfunction psi and theta drawn with
/// variance ~ |k|^2 exp(-|k|^2/k0^2), localized in x2, u = (-d2 psi, d1 psi).
/// Scaled so that ||u||_{H^2} = ||theta||_{H^2} = epsilon/2. Deterministic in
/// (grid, epsilon, seed, k0).
State random_banded_state(const Grid& grid, double epsilon, std::uint64_t seed,
                          double k0 = kDefaultK0);

/// Real single Fourier mode (j, m) != (0, 0) in the streamfunction and in
/// theta, each scaled to H^2 norm epsilon/2. For j = 0 the velocity is a
/// horizontal shear.
State single_mode_state(const Grid& grid, int j, int m, double epsilon);

}  // namespace abq
