#include "nlturing/pattern.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace nlturing {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

long signed_index(std::size_t idx, std::size_t n) {
  const auto s = static_cast<long>(idx);
  return s <= static_cast<long>(n / 2) ? s : s - static_cast<long>(n);
}

struct Mode {
  double kx, ky, power;
  long bin;
};

// Full-plane power spectrum of the mean-removed field, DC excluded.
std::vector<Mode> power_modes(const Field2D& f, const Grid2D& g) {
  const std::size_t nxc = g.nx / 2 + 1;
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan plan = nullptr;
  {
    std::lock_guard lock(planner_mutex());
    real = fftw_alloc_real(g.size());
    spec = fftw_alloc_complex(g.ny * nxc);
    plan = fftw_plan_dft_r2c_2d(static_cast<int>(g.ny), static_cast<int>(g.nx), real, spec,
                                FFTW_ESTIMATE);
  }
  double mean = 0.0;
  for (double x : f.data) mean += x;
  mean /= static_cast<double>(f.size());
  for (std::size_t n = 0; n < f.size(); ++n) real[n] = f.data[n] - mean;
  fftw_execute(plan);

  const double dkx = 2.0 * std::numbers::pi / g.lx();
  const double dky = 2.0 * std::numbers::pi / g.ly();
  std::vector<Mode> modes;
  modes.reserve(g.size());
  for (std::size_t j = 0; j < g.ny; ++j) {
    for (std::size_t i = 0; i < g.nx; ++i) {
      if (i == 0 && j == 0) continue;
      // The other half plane follows from conjugate symmetry.
      const bool stored = i < nxc;
      const std::size_t si = stored ? i : g.nx - i;
      const std::size_t sj = stored ? j : (g.ny - j) % g.ny;
      const double re = spec[sj * nxc + si][0], im = spec[sj * nxc + si][1];
      const double kx = dkx * static_cast<double>(signed_index(i, g.nx));
      const double ky = dky * static_cast<double>(signed_index(j, g.ny));
      const double k = std::hypot(kx, ky);
      modes.push_back({kx, ky, re * re + im * im, std::lround(k / dkx)});
    }
  }
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
    fftw_free(real);
    fftw_free(spec);
  }
  return modes;
}

double angle_between(const Mode& a, const Mode& b) {
  const double d = std::abs(std::atan2(a.ky, a.kx) - std::atan2(b.ky, b.kx));
  return std::min(d, 2.0 * std::numbers::pi - d);
}

void check_grid(const Field2D& f, const Grid2D& g) {
  g.validate();
  if (f.nx != g.nx || f.ny != g.ny) throw std::invalid_argument("field does not match grid");
}

}  // namespace

std::string to_string(PatternClass c) {
  switch (c) {
    case PatternClass::Homogeneous: return "Homogeneous";
    case PatternClass::HotSpot: return "HotSpot";
    case PatternClass::ColdSpot: return "ColdSpot";
    case PatternClass::Stripe: return "Stripe";
    case PatternClass::Unclassified: return "Unclassified";
  }
  return "?";
}

SpectralSummary spectral_summary(const Field2D& field, const Grid2D& grid,
                                 const PatternThresholds& th) {
  check_grid(field, grid);
  SpectralSummary s;
  s.bin_width = 2.0 * std::numbers::pi / grid.lx();

  const double n = static_cast<double>(field.size());
  double mean = 0.0;
  for (double x : field.data) mean += x;
  mean /= n;
  double m2 = 0.0, m3 = 0.0;
  for (double x : field.data) {
    const double y = x - mean;
    m2 += y * y;
    m3 += y * y * y;
  }
  m2 /= n;
  m3 /= n;
  s.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;

  const auto modes = power_modes(field, grid);
  long max_bin = 0;
  double total = 0.0;
  for (const auto& m : modes) {
    total += m.power;
    max_bin = std::max(max_bin, m.bin);
  }
  // Relative to the field scale, anything this small is round-off.
  if (!(total > 1e-24 * n * n * std::max(1.0, mean * mean))) return s;

  std::vector<double> radial(static_cast<std::size_t>(max_bin) + 1, 0.0);
  for (const auto& m : modes) radial[static_cast<std::size_t>(m.bin)] += m.power;
  const auto peak =
      static_cast<long>(std::max_element(radial.begin() + 1, radial.end()) - radial.begin());
  s.dominant_k = static_cast<double>(peak) * s.bin_width;

  std::vector<Mode> ring;
  double ring_power = 0.0;
  for (const auto& m : modes) {
    if (std::abs(m.bin - peak) <= 1) {
      ring.push_back(m);
      ring_power += m.power;
    }
  }
  s.power_fraction = std::clamp(ring_power / total, 0.0, 1.0);

  // Greedy non-maximum suppression in angle.
  std::stable_sort(ring.begin(), ring.end(),
                   [](const Mode& a, const Mode& b) { return a.power > b.power; });
  const double floor = th.ring_peak_fraction * ring.front().power;
  const double sep = th.min_peak_separation_deg * std::numbers::pi / 180.0;
  std::vector<Mode> peaks;
  for (const auto& m : ring) {
    if (m.power < floor) break;
    const bool isolated = std::all_of(peaks.begin(), peaks.end(), [&](const Mode& p) {
      return angle_between(m, p) >= sep - 1e-12;
    });
    if (isolated) peaks.push_back(m);
  }
  s.angular_peaks = static_cast<int>(peaks.size());
  return s;
}

PatternClass classify_pattern(const Field2D& field, const Grid2D& grid,
                              const PatternThresholds& th) {
  check_grid(field, grid);
  const auto [lo, hi] = std::minmax_element(field.data.begin(), field.data.end());
  double mean = 0.0;
  for (double x : field.data) mean += x;
  mean /= static_cast<double>(field.size());
  const auto s = spectral_summary(field, grid, th);
  if (*hi - *lo < th.relative_range * std::abs(mean) || s.power_fraction < th.power_fraction) {
    return PatternClass::Homogeneous;
  }
  if (s.angular_peaks == 2) return PatternClass::Stripe;
  if (s.angular_peaks == 6) {
    if (s.skewness > th.skewness) return PatternClass::HotSpot;
    if (s.skewness < -th.skewness) return PatternClass::ColdSpot;
  }
  return PatternClass::Unclassified;
}

double cross_correlation(const Field2D& u, const Field2D& v) {
  if (u.nx != v.nx || u.ny != v.ny || u.data.empty()) {
    throw std::invalid_argument("cross_correlation: fields must share a non-empty grid");
  }
  const double n = static_cast<double>(u.size());
  double mu = 0.0, mv = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    mu += u.data[k];
    mv += v.data[k];
  }
  mu /= n;
  mv /= n;
  double suu = 0.0, svv = 0.0, suv = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double a = u.data[k] - mu, b = v.data[k] - mv;
    suu += a * a;
    svv += b * b;
    suv += a * b;
  }
  if (!(suu > 0.0) || !(svv > 0.0)) {
    throw std::invalid_argument("cross_correlation: zero-variance field");
  }
  return std::clamp(suv / std::sqrt(suu * svv), -1.0, 1.0);
}

double measured_wavenumber_check(const Field2D& field, const Grid2D& grid,
                                 const TuringPoint& tp) {
  if (!(tp.k_t > 0.0)) throw std::invalid_argument("k_T must be positive");
  return std::abs(spectral_summary(field, grid).dominant_k - tp.k_t) / tp.k_t;
}

}  // namespace nlturing
