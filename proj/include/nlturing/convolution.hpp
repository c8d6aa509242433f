#pragma once

#include <complex>
#include <memory>

#include "nlturing/grid.hpp"

namespace nlturing {

enum class ConvolutionPath { Spectral, DirectQuadrature };
enum class ExecutionPolicy { Serial, Parallel };

/// Periodic convolution with the normalized Gaussian of width sigma, done by
/// FFT and multiplication with the analytic transform. Plans are built once
/// per instance; `apply` is not reentrant on the same instance.
class SpectralConvolver {
 public:
  SpectralConvolver(const Grid2D& grid, double sigma);
  ~SpectralConvolver();
  SpectralConvolver(const SpectralConvolver&) = delete;
  SpectralConvolver& operator=(const SpectralConvolver&) = delete;

  void apply(const Field2D& in, Field2D& out);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Trapezoidal quadrature over a square window of radius ceil(6 sigma / dx)
/// cells, using the separable sampled Gaussian with weights renormalized to
/// one. Throws std::invalid_argument when 6 sigma exceeds half the extent.
Field2D direct_convolve(const Field2D& in, const Grid2D& grid, double sigma,
                        ExecutionPolicy policy = ExecutionPolicy::Parallel);

/// Either path; sigma = 0 returns the input unchanged.
Field2D convolve_periodic(const Field2D& in, double sigma, const Grid2D& grid,
                          ConvolutionPath path);

/// 5-point periodic Laplacian.
Field2D laplacian_periodic(const Field2D& in, const Grid2D& grid,
                           ExecutionPolicy policy = ExecutionPolicy::Parallel);

}  // namespace nlturing
