#include "nlturing/convolution.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "nlturing/dispersion.hpp"

namespace nlturing {

namespace {

// FFTW's planner is not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

double signed_wavenumber(std::size_t idx, std::size_t n, double extent) {
  const auto s = static_cast<long>(idx);
  const auto half = static_cast<long>(n / 2);
  const long m = s <= half ? s : s - static_cast<long>(n);
  return 2.0 * std::numbers::pi * static_cast<double>(m) / extent;
}

std::vector<double> gaussian_weights(double sigma, double h, std::size_t& radius) {
  radius = static_cast<std::size_t>(std::ceil(6.0 * sigma / h));
  std::vector<double> w(2 * radius + 1);
  double sum = 0.0;
  for (std::size_t m = 0; m < w.size(); ++m) {
    const double x = (static_cast<double>(m) - static_cast<double>(radius)) * h;
    w[m] = std::exp(-0.5 * x * x / (sigma * sigma));
    sum += w[m];
  }
  for (double& x : w) x /= sum;
  return w;
}

}  // namespace

struct SpectralConvolver::Impl {
  Grid2D grid;
  std::size_t nxc;
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  std::vector<double> multiplier;  // psi(k) / (nx ny) on the half spectrum
};

SpectralConvolver::SpectralConvolver(const Grid2D& grid, double sigma)
    : impl_(std::make_unique<Impl>()) {
  grid.validate();
  if (!(sigma >= 0.0)) throw std::invalid_argument("convolution: sigma must be >= 0");
  auto& s = *impl_;
  s.grid = grid;
  s.nxc = grid.nx / 2 + 1;
  const int nx = static_cast<int>(grid.nx), ny = static_cast<int>(grid.ny);
  {
    std::lock_guard lock(planner_mutex());
    s.real = fftw_alloc_real(grid.size());
    s.spec = fftw_alloc_complex(grid.ny * s.nxc);
    s.forward = fftw_plan_dft_r2c_2d(ny, nx, s.real, s.spec, FFTW_ESTIMATE);
    s.backward = fftw_plan_dft_c2r_2d(ny, nx, s.spec, s.real, FFTW_ESTIMATE);
  }
  if (!s.forward || !s.backward) throw std::runtime_error("FFTW plan creation failed");

  const double norm = 1.0 / static_cast<double>(grid.size());
  s.multiplier.resize(grid.ny * s.nxc);
  for (std::size_t j = 0; j < grid.ny; ++j) {
    const double ky = signed_wavenumber(j, grid.ny, grid.ly());
    for (std::size_t i = 0; i < s.nxc; ++i) {
      const double kx = signed_wavenumber(i, grid.nx, grid.lx());
      s.multiplier[j * s.nxc + i] = kernel_fourier(std::hypot(kx, ky), sigma) * norm;
    }
  }
}

SpectralConvolver::~SpectralConvolver() {
  auto& s = *impl_;
  std::lock_guard lock(planner_mutex());
  if (s.forward) fftw_destroy_plan(s.forward);
  if (s.backward) fftw_destroy_plan(s.backward);
  fftw_free(s.real);
  fftw_free(s.spec);
}

void SpectralConvolver::apply(const Field2D& in, Field2D& out) {
  auto& s = *impl_;
  if (in.nx != s.grid.nx || in.ny != s.grid.ny) {
    throw std::invalid_argument("convolution: field does not match grid");
  }
  std::copy(in.data.begin(), in.data.end(), s.real);
  fftw_execute(s.forward);
  for (std::size_t n = 0; n < s.multiplier.size(); ++n) {
    s.spec[n][0] *= s.multiplier[n];
    s.spec[n][1] *= s.multiplier[n];
  }
  fftw_execute(s.backward);
  out.nx = in.nx;
  out.ny = in.ny;
  out.data.assign(s.real, s.real + in.size());
}

Field2D direct_convolve(const Field2D& in, const Grid2D& grid, double sigma,
                        ExecutionPolicy policy) {
  grid.validate();
  if (!(sigma >= 0.0)) throw std::invalid_argument("convolution: sigma must be >= 0");
  if (sigma == 0.0) return in;
  if (6.0 * sigma > 0.5 * std::min(grid.lx(), grid.ly())) {
    throw std::invalid_argument("convolution: 6 sigma exceeds half the domain extent");
  }
  std::size_t rx = 0, ry = 0;
  const auto wx = gaussian_weights(sigma, grid.dx, rx);
  const auto wy = gaussian_weights(sigma, grid.dy, ry);
  const std::size_t nx = grid.nx, ny = grid.ny;
  const auto n_rows = static_cast<long>(ny);
  const bool par = policy == ExecutionPolicy::Parallel;

  Field2D tmp(grid), out(grid, 0.0);
#pragma omp parallel if (par)
  {
    std::vector<double> row(nx + 2 * rx);
#pragma omp for
    for (long jl = 0; jl < n_rows; ++jl) {
      const auto j = static_cast<std::size_t>(jl);
      const double* src = &in.data[j * nx];
      // row[q] holds in(q - rx) with periodic wrap
      for (std::size_t q = 0; q < row.size(); ++q) row[q] = src[(q + nx * (rx / nx + 1) - rx) % nx];
      double* dst = &tmp.data[j * nx];
      for (std::size_t i = 0; i < nx; ++i) {
        double acc = 0.0;
        for (std::size_t m = 0; m < wx.size(); ++m) acc += wx[m] * row[i + m];
        dst[i] = acc;
      }
    }
  }
#pragma omp parallel for if (par)
  for (long jl = 0; jl < n_rows; ++jl) {
    const auto j = static_cast<std::size_t>(jl);
    double* dst = &out.data[j * nx];
    for (std::size_t m = 0; m < wy.size(); ++m) {
      const std::size_t jj = (j + ny * (ry / ny + 1) + m - ry) % ny;
      const double w = wy[m];
      const double* src = &tmp.data[jj * nx];
#pragma omp simd
      for (std::size_t i = 0; i < nx; ++i) dst[i] += w * src[i];
    }
  }
  return out;
}

Field2D convolve_periodic(const Field2D& in, double sigma, const Grid2D& grid,
                          ConvolutionPath path) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("convolution: sigma must be >= 0");
  if (sigma == 0.0) return in;
  if (path == ConvolutionPath::DirectQuadrature) return direct_convolve(in, grid, sigma);
  SpectralConvolver conv(grid, sigma);
  Field2D out;
  conv.apply(in, out);
  return out;
}

Field2D laplacian_periodic(const Field2D& in, const Grid2D& grid, ExecutionPolicy policy) {
  grid.validate();
  if (in.nx != grid.nx || in.ny != grid.ny) {
    throw std::invalid_argument("laplacian: field does not match grid");
  }
  const std::size_t nx = grid.nx, ny = grid.ny;
  const double cx = 1.0 / (grid.dx * grid.dx), cy = 1.0 / (grid.dy * grid.dy);
  Field2D out(grid);
  const auto n_rows = static_cast<long>(ny);
#pragma omp parallel for if (policy == ExecutionPolicy::Parallel)
  for (long jl = 0; jl < n_rows; ++jl) {
    const auto j = static_cast<std::size_t>(jl);
    const std::size_t jm = (j + ny - 1) % ny, jp = (j + 1) % ny;
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t im = (i + nx - 1) % nx, ip = (i + 1) % nx;
      const double c = in(i, j);
      out(i, j) = cx * (in(ip, j) + in(im, j) - 2.0 * c) + cy * (in(i, jp) + in(i, jm) - 2.0 * c);
    }
  }
  return out;
}

}  // namespace nlturing
