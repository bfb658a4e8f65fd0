// Discretization of the strip T x R, with R truncated to a periodic box.
#pragma once

#include <cstddef>
#include <numbers>

namespace abq {

/// Uniform doubly periodic grid on [0, 1) x [0, ly).
///
/// Spectral storage follows FFT order: storage index jj in [0, nx) maps to
/// the signed horizontal index j = jj for jj < nx/2 and j = jj - nx
/// otherwise (same for mm -> m along x2). Coefficient (jj, mm) lives at
/// flat offset jj * ny + mm.
class Grid {
 public:
  static constexpr double kDefaultDealias = 2.0 / 3.0;
  static constexpr double kDefaultLy = 8.0;

  /// Throws std::invalid_argument unless nx, ny are even and >= 8,
  /// ly >= 4 and dealias_fraction lies in (0, 1].
  Grid(int nx, int ny, double ly = kDefaultLy,
       double dealias_fraction = kDefaultDealias);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double lx() const { return 1.0; }
  double ly() const { return ly_; }
  double dealias_fraction() const { return dealias_; }
  double area() const { return ly_; }
  std::size_t size() const { return static_cast<std::size_t>(nx_) * ny_; }
  double dx1() const { return 1.0 / nx_; }
  double dx2() const { return ly_ / ny_; }

  int signed_j(int jj) const { return jj < nx_ / 2 ? jj : jj - nx_; }
  int signed_m(int mm) const { return mm < ny_ / 2 ? mm : mm - ny_; }
  int storage_j(int j) const { return j >= 0 ? j : j + nx_; }
  int storage_m(int m) const { return m >= 0 ? m : m + ny_; }

  double kappa1(int jj) const {
    return 2.0 * std::numbers::pi * signed_j(jj);
  }
  double kappa2(int mm) const {
    return 2.0 * std::numbers::pi * signed_m(mm) / ly_;
  }

  std::size_t index(int jj, int mm) const {
    return static_cast<std::size_t>(jj) * ny_ + mm;
  }
  /// Flat offset of the signed mode (j, m).
  std::size_t mode_index(int j, int m) const {
    return index(storage_j(j), storage_m(m));
  }

  bool is_nyquist_j(int jj) const { return jj == nx_ / 2; }
  bool is_nyquist_m(int mm) const { return mm == ny_ / 2; }

  /// Largest |j| (resp. |m|) kept by dealias().
  int band_j() const;
  int band_m() const;
  bool in_band(int jj, int mm) const;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int nx_;
  int ny_;
  double ly_;
  double dealias_;
};

}  // namespace abq
