#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "nlturing/model.hpp"

namespace nlturing {

/// Fourier transform of the normalized 2-D Gaussian kernel, exp(-sigma^2 k^2 / 2).
double kernel_fourier(double k, double sigma);

/// Spatial linearization around a coexistence state. The local part of the
/// prey self-interaction is zero; the density-dependent term enters through
/// the kernel with weight (eta / kappa) u*.
struct LinearizationCoefficients {
  double a11 = 0.0;
  double a12 = 0.0;
  double a21 = 0.0;
  double a22 = 0.0;
  double nonlocal_weight = 0.0;

  static LinearizationCoefficients at(const ModelParams& p, const Equilibrium& e);

  /// a11 - w psi(k) - k^2, the prey diagonal of the linearized operator.
  double prey_diagonal(double k, double sigma) const;
};

struct WaveSample {
  double k = 0.0;
  double trace_k = 0.0;
  double det_k = 0.0;
  std::complex<double> lambda_plus;
  std::complex<double> lambda_minus;
};

/// Trace, determinant and eigenvalues of the linearized operator for a plane
/// wave of radial wavenumber k. Throws std::domain_error if the supplied
/// equilibrium is not temporally stable.
WaveSample dispersion_sample(double k, const ModelParams& p, const Equilibrium& e);

/// d D / d k at fixed d.
double dispersion_det_slope(double k, const ModelParams& p, const Equilibrium& e);

/// The elimination equation whose positive roots are the candidate critical
/// wavenumbers, independent of d.
double turing_elimination(double k, const LinearizationCoefficients& lin, double sigma);

/// d that makes D(k) vanish at the given k.
double critical_diffusion_at(double k, const LinearizationCoefficients& lin, double sigma);

struct TuringPoint {
  double k_t = 0.0;
  double d_t = 0.0;
  double sigma = 0.0;
};

struct TuringSearch {
  double k_min = 1e-4;
  double k_max = 10.0;
  std::size_t samples = 2000;
};

/// Critical wavenumber and diffusion ratio. `p.d` is ignored.
/// Throws NumericalError when no Turing bifurcation exists.
TuringPoint turing_threshold(const ModelParams& p, const Equilibrium& e,
                             const TuringSearch& search = {});

struct TuringCurvePoint {
  double eta;
  double sigma;
  double k_t;
  double d_t;
};

struct TuringCurve {
  std::vector<TuringCurvePoint> points;
  std::vector<double> failed_eta;
};

/// Thresholds across an eta sweep at fixed (kappa, alpha, sigma), each using
/// the stable coexistence state. Sweep points are computed in parallel.
TuringCurve turing_curve(const std::vector<double>& etas, double kappa, double alpha,
                         double sigma);

}  // namespace nlturing
