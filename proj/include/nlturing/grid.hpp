#pragma once

#include <cstddef>
#include <vector>

namespace nlturing {

/// Periodic rectangular grid. Index i runs along x (columns), j along y.
struct Grid2D {
  std::size_t nx = 200;
  std::size_t ny = 200;
  double dx = 0.25;
  double dy = 0.25;

  double lx() const { return static_cast<double>(nx) * dx; }
  double ly() const { return static_cast<double>(ny) * dy; }
  std::size_t size() const { return nx * ny; }

  /// Throws std::invalid_argument for empty grids or non-positive spacing.
  void validate() const;
};

/// Row-major scalar field, `data[j * nx + i]`.
struct Field2D {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<double> data;

  Field2D() = default;
  Field2D(std::size_t nx_, std::size_t ny_, double value = 0.0)
      : nx(nx_), ny(ny_), data(nx_ * ny_, value) {}
  explicit Field2D(const Grid2D& g, double value = 0.0) : Field2D(g.nx, g.ny, value) {}

  double& operator()(std::size_t i, std::size_t j) { return data[j * nx + i]; }
  double operator()(std::size_t i, std::size_t j) const { return data[j * nx + i]; }
  std::size_t size() const { return data.size(); }

  bool operator==(const Field2D&) const = default;
};

struct FieldPair {
  Field2D u;
  Field2D v;
  double time = 0.0;

  bool operator==(const FieldPair&) const = default;
};

double max_abs_difference(const Field2D& a, const Field2D& b);

}  // namespace nlturing
