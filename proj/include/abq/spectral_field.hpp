// Fourier-coefficient carrier for scalar fields on a Grid.
#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "abq/grid.hpp"

namespace abq {

using Complex = std::complex<double>;

/// Fourier-series coefficients of a scalar field: f(x) = sum_k c_k e^{ik.x}.
///
/// With this normalization the constant field 1 has c_(0,0) = 1 and the
/// Parseval identity reads  (1/|Omega|) int |f|^2 = sum_k |c_k|^2.
class SpectralField {
 public:
  explicit SpectralField(const Grid& grid);
  SpectralField(const Grid& grid, std::vector<Complex> coeffs);

  const Grid& grid() const { return grid_; }
  std::span<const Complex> coeffs() const { return coeffs_; }
  std::span<Complex> coeffs() { return coeffs_; }

  Complex& operator[](std::size_t i) { return coeffs_[i]; }
  const Complex& operator[](std::size_t i) const { return coeffs_[i]; }

  /// Access by signed mode index (j, m).
  Complex& mode(int j, int m) { return coeffs_[grid_.mode_index(j, m)]; }
  const Complex& mode(int j, int m) const {
    return coeffs_[grid_.mode_index(j, m)];
  }

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s);
  SpectralField& operator*=(Complex s);
  /// this += s * other
  SpectralField& axpy(double s, const SpectralField& other);

  /// Largest |c(-k) - conj(c(k))|, zero for fields representing real data.
  double hermitian_defect() const;
  /// Replaces c(k) and c(-k) by their Hermitian average.
  void symmetrize();
  bool all_finite() const;

  /// sum_k |c_k|^2
  double coefficient_energy() const;

  friend bool operator==(const SpectralField&, const SpectralField&) = default;

 private:
  Grid grid_;
  std::vector<Complex> coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

}  // namespace abq
