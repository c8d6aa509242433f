#include "nlturing/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nlturing {

void Grid2D::validate() const {
  if (nx == 0 || ny == 0) throw std::invalid_argument("grid: nx and ny must be positive");
  if (!(dx > 0.0) || !(dy > 0.0) || !std::isfinite(dx) || !std::isfinite(dy)) {
    throw std::invalid_argument("grid: dx and dy must be positive");
  }
}

double max_abs_difference(const Field2D& a, const Field2D& b) {
  if (a.nx != b.nx || a.ny != b.ny) throw std::invalid_argument("field shapes differ");
  double m = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) m = std::max(m, std::abs(a.data[n] - b.data[n]));
  return m;
}

}  // namespace nlturing
