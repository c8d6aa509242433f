#pragma once

#include <string>

#include "nlturing/dispersion.hpp"
#include "nlturing/grid.hpp"

namespace nlturing {

struct SpectralSummary {
  double dominant_k = 0.0;
  int angular_peaks = 0;
  double power_fraction = 0.0;
  double skewness = 0.0;
  /// Width of the radial bins, 2 pi / lx.
  double bin_width = 0.0;
};

struct PatternThresholds {
  double power_fraction = 0.05;
  double relative_range = 1e-4;
  double skewness = 0.2;
  double ring_peak_fraction = 0.5;
  double min_peak_separation_deg = 15.0;
};

enum class PatternClass { Homogeneous, HotSpot, ColdSpot, Stripe, Unclassified };
std::string to_string(PatternClass c);

/// Power spectrum of the mean-removed field, binned radially. The dominant
/// ring is the peak bin and its two neighbours.
SpectralSummary spectral_summary(const Field2D& field, const Grid2D& grid,
                                 const PatternThresholds& th = {});

/// Homogeneous when the range is below relative_range |mean| or the ring
/// holds less than `power_fraction` of the power. Otherwise two ring peaks
/// are stripes, six are hexagons split by the sign of the skewness.
PatternClass classify_pattern(const Field2D& field, const Grid2D& grid,
                              const PatternThresholds& th = {});

/// Pearson correlation. Throws std::invalid_argument on a zero-variance field
/// or mismatched shapes.
double cross_correlation(const Field2D& u, const Field2D& v);

/// |dominant_k - k_T| / k_T.
double measured_wavenumber_check(const Field2D& field, const Grid2D& grid,
                                 const TuringPoint& tp);

}  // namespace nlturing
