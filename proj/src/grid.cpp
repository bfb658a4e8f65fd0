#include "abq/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace abq {

Grid::Grid(int nx, int ny, double ly, double dealias_fraction)
    : nx_(nx), ny_(ny), ly_(ly), dealias_(dealias_fraction) {
  if (nx < 8 || ny < 8 || nx % 2 != 0 || ny % 2 != 0) {
    throw std::invalid_argument("grid: nx and ny must be even and >= 8 (got " +
                                std::to_string(nx) + "x" + std::to_string(ny) + ")");
  }
  if (!(ly >= 4.0) || !std::isfinite(ly)) {
    throw std::invalid_argument("grid: ly must be finite and >= 4*lx");
  }
  if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0)) {
    throw std::invalid_argument("grid: dealias fraction must lie in (0, 1]");
  }
}

int Grid::band_j() const {
  return static_cast<int>(std::floor(dealias_ * nx_ / 2.0 + 1e-12));
}

int Grid::band_m() const {
  return static_cast<int>(std::floor(dealias_ * ny_ / 2.0 + 1e-12));
}

bool Grid::in_band(int jj, int mm) const {
  const int j = signed_j(jj);
  const int m = signed_m(mm);
  return std::abs(j) <= band_j() && std::abs(m) <= band_m();
}

}  // namespace abq
