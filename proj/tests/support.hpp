#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "nlturing/amplitude.hpp"
#include "nlturing/dispersion.hpp"
#include "nlturing/model.hpp"

namespace testsupport {

/// Seeded source for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return integer(0, 1) == 1; }

  nlturing::ModelParams params() {
    nlturing::ModelParams p;
    p.eta = log_uniform(0.1, 5.0);
    p.kappa = log_uniform(0.2, 4.0);
    p.alpha = log_uniform(0.05, 50.0);
    return p;
  }

  /// Amplitude coefficients with m1 > 0, m2 > m1, tau0 > 0 and |h0| >= 0.1.
  nlturing::WnaCoefficients admissible_coefficients() {
    nlturing::WnaCoefficients c;
    c.tau0 = uniform(0.5, 5.0);
    c.h0 = (coin() ? 1.0 : -1.0) * uniform(0.1, 5.0);
    c.m1 = log_uniform(0.5, 100.0);
    c.m2 = c.m1 + log_uniform(0.5, 300.0);
    c.turing.d_t = uniform(0.1, 0.5);
    c.turing.k_t = uniform(0.5, 1.5);
    const auto t = nlturing::mu_thresholds(c);
    c.mu1 = t.mu1;
    c.mu3 = t.mu3;
    c.mu4 = t.mu4;
    c.thresholds_valid = true;
    return c;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline nlturing::ModelParams reference_params(double sigma = 0.0, double d = 1.0) {
  nlturing::ModelParams p;
  p.eta = 0.92;
  p.kappa = 0.65;
  p.alpha = 10.0;
  p.sigma = sigma;
  p.d = d;
  return p;
}

/// Real roots of a continuous function on [lo, hi] by a uniform sign scan and
/// plain bisection. Kept deliberately naive.
template <class F>
std::vector<double> bisection_roots(F f, double lo, double hi, int samples, double tol) {
  std::vector<double> roots;
  double a = lo, fa = f(a);
  for (int i = 1; i <= samples; ++i) {
    const double b = lo + (hi - lo) * i / samples;
    const double fb = f(b);
    if (fa == 0.0) roots.push_back(a);
    else if (fa * fb < 0.0) {
      double x0 = a, x1 = b, f0 = fa;
      while (x1 - x0 > tol) {
        const double m = 0.5 * (x0 + x1);
        const double fm = f(m);
        if ((fm < 0.0) == (f0 < 0.0)) {
          x0 = m;
          f0 = fm;
        } else {
          x1 = m;
        }
      }
      roots.push_back(0.5 * (x0 + x1));
    }
    a = b;
    fa = fb;
  }
  return roots;
}

}  // namespace testsupport
