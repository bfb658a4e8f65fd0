#include "abq/spectral_field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace abq {

SpectralField::SpectralField(const Grid& grid) : grid_(grid), coeffs_(grid.size()) {}

SpectralField::SpectralField(const Grid& grid, std::vector<Complex> coeffs)
    : grid_(grid), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != grid_.size()) {
    throw std::invalid_argument("spectral field: coefficient count does not match grid");
  }
}

namespace {
void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw std::invalid_argument("spectral field: grid mismatch");
}
}  // namespace

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

SpectralField& SpectralField::operator*=(Complex s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

SpectralField& SpectralField::axpy(double s, const SpectralField& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += s * other.coeffs_[i];
  return *this;
}

double SpectralField::hermitian_defect() const {
  double worst = 0.0;
  for (int jj = 0; jj < grid_.nx(); ++jj) {
    for (int mm = 0; mm < grid_.ny(); ++mm) {
      const int j = grid_.signed_j(jj);
      const int m = grid_.signed_m(mm);
      const Complex a = coeffs_[grid_.index(jj, mm)];
      const Complex b = coeffs_[grid_.mode_index(-j, -m)];
      worst = std::max(worst, std::abs(b - std::conj(a)));
    }
  }
  return worst;
}

void SpectralField::symmetrize() {
  std::vector<Complex> out(coeffs_.size());
  for (int jj = 0; jj < grid_.nx(); ++jj) {
    for (int mm = 0; mm < grid_.ny(); ++mm) {
      const int j = grid_.signed_j(jj);
      const int m = grid_.signed_m(mm);
      const std::size_t i = grid_.index(jj, mm);
      out[i] = 0.5 * (coeffs_[i] + std::conj(coeffs_[grid_.mode_index(-j, -m)]));
    }
  }
  coeffs_ = std::move(out);
}

bool SpectralField::all_finite() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Complex& c) {
    return std::isfinite(c.real()) && std::isfinite(c.imag());
  });
}

double SpectralField::coefficient_energy() const {
  double s = 0.0;
  for (const auto& c : coeffs_) s += std::norm(c);
  return s;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

}  // namespace abq
