#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nlturing/pattern.hpp"
#include "support.hpp"

using namespace nlturing;
using testsupport::Gen;

namespace {

constexpr double kPi = std::numbers::pi;

const Grid2D kGrid{200, 200, 0.25, 0.25};

using Wave = std::pair<int, int>;

// Sum of cosines over integer wave vectors (in units of 2 pi / extent).
Field2D waves(const Grid2D& g, const std::vector<Wave>& ks, double base = 0.0, double amp = 1.0) {
  Field2D f(g, base);
  for (std::size_t j = 0; j < g.ny; ++j) {
    for (std::size_t i = 0; i < g.nx; ++i) {
      for (const auto& [mx, my] : ks) {
        f(i, j) += amp * std::cos(2 * kPi * (mx * static_cast<double>(i) / g.nx + my * static_cast<double>(j) / g.ny));
      }
    }
  }
  return f;
}

// Resonant triad closest to three 120-degree wave vectors of index m.
std::vector<Wave> hex_triad(int m) {
  const int hy = static_cast<int>(std::lround(m * std::sqrt(3.0) / 2.0));
  return {{m, 0}, {-m / 2, hy}, {-(m - m / 2), -hy}};
}

Field2D shifted(const Field2D& f, std::size_t di, std::size_t dj) {
  Field2D out(f.nx, f.ny);
  for (std::size_t j = 0; j < f.ny; ++j) {
    for (std::size_t i = 0; i < f.nx; ++i) out((i + di) % f.nx, (j + dj) % f.ny) = f(i, j);
  }
  return out;
}

Field2D scaled(const Field2D& f, double a, double b) {
  Field2D out = f;
  for (double& x : out.data) x = a * x + b;
  return out;
}

}  // namespace

TEST_CASE("class names") {
  CHECK(to_string(PatternClass::Homogeneous) == "Homogeneous");
  CHECK(to_string(PatternClass::HotSpot) == "HotSpot");
  CHECK(to_string(PatternClass::ColdSpot) == "ColdSpot");
  CHECK(to_string(PatternClass::Stripe) == "Stripe");
  CHECK(to_string(PatternClass::Unclassified) == "Unclassified");
}

TEST_CASE("constant field") {
  const Field2D c(kGrid, 0.47);
  const auto s = spectral_summary(c, kGrid);
  CHECK(s.power_fraction == 0.0);
  CHECK(s.dominant_k == 0.0);
  CHECK(s.angular_peaks == 0);
  CHECK(s.bin_width == doctest::Approx(2 * kPi / 50.0));
  CHECK(classify_pattern(c, kGrid) == PatternClass::Homogeneous);
}

TEST_CASE("tiny ripples count as homogeneous") {
  const auto f = waves(kGrid, {{7, 0}}, 0.5, 1e-6);
  CHECK(classify_pattern(f, kGrid) == PatternClass::Homogeneous);
}

TEST_CASE("synthetic stripes") {
  for (int m : {4, 7, 11}) {
    for (const Wave& w : {Wave{m, 0}, Wave{0, m}}) {
      const auto f = waves(kGrid, {w}, 1.0, 0.2);
      const auto s = spectral_summary(f, kGrid);
      CHECK(s.angular_peaks == 2);
      CHECK(std::abs(s.dominant_k - m * s.bin_width) <= s.bin_width);
      CHECK(s.power_fraction == doctest::Approx(1.0));
      CHECK(std::abs(s.skewness) < 1e-10);
      CHECK(classify_pattern(f, kGrid) == PatternClass::Stripe);
    }
  }
}

TEST_CASE("synthetic hexagons") {
  for (int m : {6, 7, 9}) {
    CAPTURE(m);
    const auto hot = waves(kGrid, hex_triad(m), 0.5, 0.05);
    const auto s = spectral_summary(hot, kGrid);
    CHECK(s.angular_peaks == 6);
    CHECK(s.angular_peaks % 2 == 0);
    CHECK(s.skewness > 0.2);
    CHECK(std::abs(s.dominant_k - m * s.bin_width) <= s.bin_width);
    CHECK(classify_pattern(hot, kGrid) == PatternClass::HotSpot);
    const auto cold = waves(kGrid, hex_triad(m), 0.5, -0.05);
    CHECK(classify_pattern(cold, kGrid) == PatternClass::ColdSpot);
  }
}

TEST_CASE("weak skewness stays unclassified") {
  const auto f = waves(kGrid, hex_triad(7), 0.5, 0.05);
  PatternThresholds th;
  th.skewness = 10.0;
  CHECK(classify_pattern(f, kGrid, th) == PatternClass::Unclassified);
}

TEST_CASE("classification invariances") {
  Gen g(51);
  for (int trial = 0; trial < 30; ++trial) {
    const int m = g.integer(5, 10);
    Field2D f;
    switch (g.integer(0, 2)) {
      case 0: f = waves(kGrid, {{m, 0}}, 1.0, g.uniform(0.01, 0.3)); break;
      case 1: f = waves(kGrid, hex_triad(m), 1.0, g.uniform(0.01, 0.3)); break;
      default: f = waves(kGrid, hex_triad(m), 1.0, -g.uniform(0.01, 0.3)); break;
    }
    const auto base = classify_pattern(f, kGrid);
    const auto s0 = spectral_summary(f, kGrid);
    const auto moved = shifted(f, static_cast<std::size_t>(g.integer(0, 199)), static_cast<std::size_t>(g.integer(0, 199)));
    CHECK(classify_pattern(moved, kGrid) == base);
    const auto s1 = spectral_summary(moved, kGrid);
    CHECK(s1.dominant_k == s0.dominant_k);
    CHECK(s1.angular_peaks == s0.angular_peaks);
    CHECK(s1.skewness == doctest::Approx(s0.skewness).epsilon(1e-9));
    CHECK(classify_pattern(scaled(f, 1.0, g.uniform(-0.5, 2.0)), kGrid) == base);

    const auto neg = classify_pattern(scaled(f, -1.0, 3.0), kGrid);
    if (base == PatternClass::HotSpot) CHECK(neg == PatternClass::ColdSpot);
    else if (base == PatternClass::ColdSpot) CHECK(neg == PatternClass::HotSpot);
    else CHECK(neg == base);
  }
}

TEST_CASE("hot prey spots pair with cold predator spots iff the eigenvector components differ in sign") {
  Gen g(52);
  for (int trial = 0; trial < 40; ++trial) {
    const double f1 = (g.coin() ? 1 : -1) * g.uniform(0.2, 1.0);
    const double g1 = (g.coin() ? 1 : -1) * g.uniform(0.2, 1.0);
    const auto h = waves(kGrid, hex_triad(7), 0.0, 0.01);
    const auto u = scaled(h, f1, 0.4);
    const auto v = scaled(h, g1, 0.2);
    const auto cu = classify_pattern(u, kGrid), cv = classify_pattern(v, kGrid);
    const bool opposite = (cu == PatternClass::HotSpot && cv == PatternClass::ColdSpot) ||
                          (cu == PatternClass::ColdSpot && cv == PatternClass::HotSpot);
    CHECK(opposite == (f1 * g1 < 0.0));
    CHECK((cross_correlation(u, v) < 0.0) == (f1 * g1 < 0.0));
  }
}

TEST_CASE("cross correlation") {
  Gen g(53);
  Field2D f(kGrid);
  for (double& x : f.data) x = g.uniform(-1, 1);
  CHECK(cross_correlation(f, f) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cross_correlation(f, scaled(f, -2.0, 5.0)) == doctest::Approx(-1.0).epsilon(1e-12));
  Field2D other(kGrid);
  for (double& x : other.data) x = g.uniform(-1, 1);
  const double r = cross_correlation(f, other);
  CHECK(std::abs(r) < 0.05);
  CHECK(cross_correlation(other, f) == doctest::Approx(r).epsilon(1e-12));
  CHECK_THROWS_AS(cross_correlation(f, Field2D(kGrid, 1.0)), std::invalid_argument);
  CHECK_THROWS_AS(cross_correlation(f, Field2D(10, 10, 0.0)), std::invalid_argument);
}

TEST_CASE("measured wavenumber") {
  const TuringPoint tp{0.870919, 0.271539, 0.0};
  const double bin = 2 * kPi / kGrid.lx();
  const int m = static_cast<int>(std::lround(tp.k_t / bin));
  const auto f = waves(kGrid, hex_triad(m), 0.5, 0.05);
  CHECK(measured_wavenumber_check(f, kGrid, tp) <= bin / tp.k_t);
  const auto far = waves(kGrid, hex_triad(2 * m), 0.5, 0.05);
  CHECK(measured_wavenumber_check(far, kGrid, tp) == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("mismatched grid is rejected") {
  CHECK_THROWS_AS(spectral_summary(Field2D(10, 10), kGrid), std::invalid_argument);
}
