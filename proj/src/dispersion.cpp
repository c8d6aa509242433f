#include "nlturing/dispersion.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace nlturing {

double kernel_fourier(double k, double sigma) {
  return std::exp(-0.5 * sigma * sigma * k * k);
}

LinearizationCoefficients LinearizationCoefficients::at(const ModelParams& p,
                                                        const Equilibrium& e) {
  const double u = e.u_star, v = e.v_star;
  LinearizationCoefficients c;
  c.a11 = 0.0;
  c.a12 = -(1.0 + 2.0 * p.alpha * v) * u;
  c.a21 = (1.0 + p.alpha * v) * v;
  c.a22 = p.alpha * u * v;
  c.nonlocal_weight = p.eta / p.kappa * u;
  return c;
}

double LinearizationCoefficients::prey_diagonal(double k, double sigma) const {
  return a11 - nonlocal_weight * kernel_fourier(k, sigma) - k * k;
}

WaveSample dispersion_sample(double k, const ModelParams& p, const Equilibrium& e) {
  const auto temporal = classify_equilibrium(e, p);
  if (!(temporal.jacobian.trace < 0.0 && temporal.jacobian.det > 0.0)) {
    throw std::domain_error(
        "dispersion_sample: homogeneous state must be temporally stable");
  }
  const auto lin = LinearizationCoefficients::at(p, e);
  const double b = lin.prey_diagonal(k, p.sigma);
  const double k2 = k * k;

  WaveSample s;
  s.k = k;
  s.trace_k = b + lin.a22 - p.d * k2;
  s.det_k = b * (lin.a22 - p.d * k2) - lin.a12 * lin.a21;
  const std::complex<double> root =
      std::sqrt(std::complex<double>(s.trace_k * s.trace_k - 4.0 * s.det_k, 0.0));
  s.lambda_plus = 0.5 * (s.trace_k + root);
  s.lambda_minus = 0.5 * (s.trace_k - root);
  return s;
}

double dispersion_det_slope(double k, const ModelParams& p, const Equilibrium& e) {
  const auto lin = LinearizationCoefficients::at(p, e);
  const double s2 = p.sigma * p.sigma;
  const double b = lin.prey_diagonal(k, p.sigma);
  const double db = lin.nonlocal_weight * s2 * k * kernel_fourier(k, p.sigma) - 2.0 * k;
  return db * (lin.a22 - p.d * k * k) - 2.0 * p.d * k * b;
}

double turing_elimination(double k, const LinearizationCoefficients& lin,
                          double sigma) {
  const double b = lin.prey_diagonal(k, sigma);
  const double k2 = k * k;
  const double coupling = lin.a12 * lin.a21;
  return 2.0 * lin.a22 * b * b -
         coupling * (2.0 * lin.a11 - 4.0 * k2 -
                     lin.nonlocal_weight * (2.0 - k2 * sigma * sigma) *
                         kernel_fourier(k, sigma));
}

double critical_diffusion_at(double k, const LinearizationCoefficients& lin,
                             double sigma) {
  const double b = lin.prey_diagonal(k, sigma);
  return (lin.a22 * b - lin.a12 * lin.a21) / (k * k * b);
}

TuringPoint turing_threshold(const ModelParams& p, const Equilibrium& e,
                             const TuringSearch& search) {
  const auto temporal = classify_equilibrium(e, p);
  if (!(temporal.jacobian.trace < 0.0 && temporal.jacobian.det > 0.0)) {
    throw std::domain_error(
        "turing_threshold: homogeneous state must be temporally stable");
  }
  const auto lin = LinearizationCoefficients::at(p, e);
  auto g = [&](double k) { return turing_elimination(k, lin, p.sigma); };

  std::optional<TuringPoint> best;
  const std::size_t n = search.samples;
  double k_prev = search.k_min;
  double g_prev = g(k_prev);
  for (std::size_t i = 1; i < n; ++i) {
    const double k = search.k_min + (search.k_max - search.k_min) *
                                        static_cast<double>(i) /
                                        static_cast<double>(n - 1);
    const double gk = g(k);
    if ((gk < 0.0) != (g_prev < 0.0) || gk == 0.0) {
      double lo = k_prev, hi = k, glo = g_prev;
      while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if ((gm < 0.0) == (glo < 0.0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      const double root = 0.5 * (lo + hi);
      const double d = critical_diffusion_at(root, lin, p.sigma);
      // Onset as d decreases happens at the largest critical d.
      if (d > 0.0 && (!best || d > best->d_t)) best = TuringPoint{root, d, p.sigma};
    }
    k_prev = k;
    g_prev = gk;
  }
  if (!best) throw NumericalError("no Turing bifurcation for these parameters");
  return *best;
}

TuringCurve turing_curve(const std::vector<double>& etas, double kappa, double alpha,
                         double sigma) {
  std::vector<std::optional<TuringCurvePoint>> slots(etas.size());
  const auto n = static_cast<long>(etas.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const ModelParams p{etas[idx], kappa, alpha, 1.0, sigma};
    try {
      const auto e = stable_coexistence(p);
      const auto tp = turing_threshold(p, e);
      slots[idx] = TuringCurvePoint{p.eta, sigma, tp.k_t, tp.d_t};
    } catch (const std::exception&) {
      // reported through failed_eta
    }
  }
  TuringCurve curve;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i]) curve.points.push_back(*slots[i]);
    else curve.failed_eta.push_back(etas[i]);
  }
  return curve;
}

}  // namespace nlturing
