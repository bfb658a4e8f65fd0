// Sample-space <-> coefficient-space transforms, spectral derivatives and
// dealiasing on a Grid.
#pragma once

#include <span>
#include <vector>

#include "abq/grid.hpp"
#include "abq/spectral_field.hpp"

namespace abq {

enum class Axis { kX1 = 1, kX2 = 2 };

/// Samples are row-major over (i1, i2) with x1 = i1/nx, x2 = i2*ly/ny.
/// Throws std::invalid_argument when samples.size() != nx*ny.
SpectralField forward_transform(const Grid& grid, std::span<const double> samples);

/// Samples of the field. Coefficients are assumed Hermitian (real data);
/// only the half spectrum m >= 0 is read.
std::vector<double> inverse_transform(const SpectralField& f);

/// Multiplies coefficient (j, m) by (i kappa)^order along the chosen axis.
/// Odd-order derivatives zero the Nyquist row/column so real data stays real.
SpectralField spectral_derivative(const SpectralField& f, Axis axis, int order = 1);

/// Zeroes every coefficient with |j| > band_j or |m| > band_m.
SpectralField dealias(SpectralField f);
void dealias_in_place(SpectralField& f);

/// Dealiased pseudo-spectral product a*b.
SpectralField multiply(const SpectralField& a, const SpectralField& b);

/// Samples of the band-limited interpolant on a grid refined by `factor`
/// in both directions. Nyquist coefficients are split symmetrically.
std::vector<double> oversampled_samples(const SpectralField& f, int factor);

/// One-dimensional periodic transforms (length n, arbitrary period) used by
/// the inequality lab. Same normalization as the 2D transforms.
std::vector<Complex> forward_transform_1d(std::span<const double> samples);
std::vector<double> inverse_transform_1d(std::span<const Complex> coeffs);
std::vector<double> oversampled_samples_1d(std::span<const Complex> coeffs, int factor);

}  // namespace abq
