#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>

#include "nlturing/dispersion.hpp"
#include "nlturing/pattern.hpp"
#include "nlturing/simulation.hpp"
#include "nlturing/snapshot_io.hpp"
#include "support.hpp"

using namespace nlturing;
using testsupport::Gen;
using testsupport::reference_params;

namespace {

constexpr double kPi = std::numbers::pi;

Grid2D grid(std::size_t nx, std::size_t ny, double dx = 0.25) { return {nx, ny, dx, dx}; }

// Sum of a few random low-order Fourier modes plus an offset.
Field2D smooth_field(const Grid2D& g, Gen& gen) {
  Field2D f(g);
  struct Mode {
    int mx, my;
    double a, phase;
  };
  std::vector<Mode> modes;
  for (int m = 0; m < 6; ++m) {
    modes.push_back({gen.integer(-8, 8), gen.integer(-8, 8), gen.uniform(-1, 1), gen.uniform(0, 2 * kPi)});
  }
  const double offset = gen.uniform(-1, 1);
  for (std::size_t j = 0; j < g.ny; ++j) {
    for (std::size_t i = 0; i < g.nx; ++i) {
      double s = offset;
      for (const auto& m : modes) {
        s += m.a * std::cos(2 * kPi * (m.mx * static_cast<double>(i) / g.nx + m.my * static_cast<double>(j) / g.ny) + m.phase);
      }
      f(i, j) = s;
    }
  }
  return f;
}

Field2D plane_wave(const Grid2D& g, int mx, int my) {
  Field2D f(g);
  for (std::size_t j = 0; j < g.ny; ++j) {
    for (std::size_t i = 0; i < g.nx; ++i) {
      f(i, j) = std::cos(2 * kPi * (mx * static_cast<double>(i) / g.nx + my * static_cast<double>(j) / g.ny));
    }
  }
  return f;
}

double mean(const Field2D& f) {
  double s = 0.0;
  for (double x : f.data) s += x;
  return s / static_cast<double>(f.size());
}

SimConfig base_config(double sigma, double d, const Grid2D& g) {
  SimConfig c;
  c.params = reference_params(sigma, d);
  c.grid = g;
  c.dt = 0.01;
  return c;
}

// Cosine amplitude of mode mx along x, averaged over y.
double mode_amplitude(const Field2D& f, double base, int mx) {
  double s = 0.0;
  for (std::size_t j = 0; j < f.ny; ++j) {
    for (std::size_t i = 0; i < f.nx; ++i) {
      s += (f(i, j) - base) * std::cos(2 * kPi * mx * static_cast<double>(i) / f.nx);
    }
  }
  return 2.0 * s / static_cast<double>(f.size());
}

// Measured growth rate of a single x-mode started along the unstable
// eigenvector of the continuous linear operator.
std::pair<double, double> growth_rates(double sigma, double d, int mx) {
  const auto g = grid(200, 8);
  auto cfg = base_config(sigma, d, g);
  const auto e = stable_coexistence(cfg.params);
  const double k = 2 * kPi * mx / g.lx();
  const auto lin = LinearizationCoefficients::at(cfg.params, e);
  const auto sample = dispersion_sample(k, cfg.params, e);
  const double lam = sample.lambda_plus.real();
  const double m11 = lin.prey_diagonal(k, sigma);
  Eigen::Vector2d r(lin.a12, lam - m11);
  r /= r.norm();
  const double eps = 1e-5;
  FieldPair s{Field2D(g), Field2D(g), 0.0};
  for (std::size_t j = 0; j < g.ny; ++j) {
    for (std::size_t i = 0; i < g.nx; ++i) {
      const double c = std::cos(2 * kPi * mx * static_cast<double>(i) / g.nx);
      s.u(i, j) = e.u_star + eps * r(0) * c;
      s.v(i, j) = e.v_star + eps * r(1) * c;
    }
  }
  const double a0 = std::hypot(mode_amplitude(s.u, e.u_star, mx), mode_amplitude(s.v, e.v_star, mx));
  EulerStepper stepper(cfg);
  const double horizon = 5.0;
  for (int n = 0; n < static_cast<int>(std::lround(horizon / cfg.dt)); ++n) stepper.step(s);
  const double a1 = std::hypot(mode_amplitude(s.u, e.u_star, mx), mode_amplitude(s.v, e.v_star, mx));
  return {std::log(a1 / a0) / horizon, lam};
}

}  // namespace

TEST_CASE("grid validation") {
  CHECK_NOTHROW(grid(4, 4).validate());
  CHECK_THROWS_AS(grid(0, 4).validate(), std::invalid_argument);
  CHECK_THROWS_AS(grid(4, 4, 0.0).validate(), std::invalid_argument);
  CHECK(grid(200, 200).lx() == 50.0);
}

TEST_CASE("initial condition") {
  const auto g = grid(16, 16);
  const Equilibrium e{0.4, 0.15};
  const auto flat = initial_condition(g, e, 0.0, 7);
  for (double x : flat.u.data) CHECK(x == 0.4);
  for (double x : flat.v.data) CHECK(x == 0.15);

  CHECK(initial_condition(g, e, 0.01, 7) == initial_condition(g, e, 0.01, 7));
  CHECK_FALSE(initial_condition(g, e, 0.01, 7) == initial_condition(g, e, 0.01, 8));

  const auto s = initial_condition(g, e, 0.01, 9);
  for (std::size_t n = 0; n < s.u.size(); ++n) {
    CHECK(std::abs(s.u.data[n] - 0.4) <= 0.01);
    CHECK(std::abs(s.v.data[n] - 0.15) <= 0.01);
  }

  // Sample means of uniform noise: std of the mean is amp / sqrt(3 N).
  const double amp = 0.01;
  const double sd = amp / std::sqrt(3.0 * static_cast<double>(g.size()));
  double acc = 0.0, acc2 = 0.0;
  int outside = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const double m = mean(initial_condition(g, e, amp, seed).u) - 0.4;
    acc += m;
    acc2 += m * m;
    if (std::abs(m) > amp / std::sqrt(static_cast<double>(g.size()))) ++outside;
  }
  CHECK(std::abs(acc / 100.0) <= 4.0 * sd / 10.0);
  CHECK(std::sqrt(acc2 / 100.0) == doctest::Approx(sd).epsilon(0.25));
  CHECK(outside <= 5);
}

TEST_CASE("convolution of a constant field") {
  const auto g = grid(64, 48);
  const Field2D c(g, 2.5);
  for (double sigma : {0.0, 0.3, 1.0}) {
    for (auto path : {ConvolutionPath::Spectral, ConvolutionPath::DirectQuadrature}) {
      const auto out = convolve_periodic(c, sigma, g, path);
      for (double x : out.data) CHECK(x == doctest::Approx(2.5).epsilon(1e-13));
    }
  }
}

TEST_CASE("zero width returns the input") {
  const auto g = grid(32, 32);
  Gen gen(41);
  const auto f = smooth_field(g, gen);
  CHECK(convolve_periodic(f, 0.0, g, ConvolutionPath::Spectral) == f);
  CHECK(convolve_periodic(f, 0.0, g, ConvolutionPath::DirectQuadrature) == f);
}

TEST_CASE("plane waves are scaled by the kernel transform") {
  const auto g = grid(128, 96);
  for (double sigma : {0.25, 0.75, 1.5}) {
    for (auto [mx, my] : {std::pair{1, 0}, std::pair{5, 3}, std::pair{0, 7}, std::pair{9, -4}}) {
      const auto f = plane_wave(g, mx, my);
      const double kx = 2 * kPi * mx / g.lx(), ky = 2 * kPi * my / g.ly();
      const double scale = std::exp(-0.5 * sigma * sigma * (kx * kx + ky * ky));
      for (auto path : {ConvolutionPath::Spectral, ConvolutionPath::DirectQuadrature}) {
        const auto out = convolve_periodic(f, sigma, g, path);
        double err = 0.0;
        for (std::size_t n = 0; n < f.size(); ++n) err = std::max(err, std::abs(out.data[n] - scale * f.data[n]));
        CHECK(err <= 1e-6);
      }
    }
  }
}

TEST_CASE("spectral and quadrature paths agree on smooth fields") {
  const auto g = grid(200, 200);
  Gen gen(42);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const double sigma = gen.uniform(0.25, 1.5);
    const auto f = smooth_field(g, gen);
    const auto a = convolve_periodic(f, sigma, g, ConvolutionPath::Spectral);
    const auto b = convolve_periodic(f, sigma, g, ConvolutionPath::DirectQuadrature);
    worst = std::max(worst, max_abs_difference(a, b));
  }
  CHECK(worst <= 1e-5);
}

TEST_CASE("quadrature is schedule independent") {
  const auto g = grid(96, 80);
  Gen gen(43);
  const auto f = smooth_field(g, gen);
  CHECK(direct_convolve(f, g, 0.9, ExecutionPolicy::Serial) == direct_convolve(f, g, 0.9, ExecutionPolicy::Parallel));
}

TEST_CASE("kernel window wider than half the box is rejected") {
  const auto g = grid(40, 40);  // extent 10, half 5
  const Field2D f(g, 1.0);
  CHECK_NOTHROW(convolve_periodic(f, 0.8, g, ConvolutionPath::DirectQuadrature));
  CHECK_THROWS_AS(convolve_periodic(f, 0.9, g, ConvolutionPath::DirectQuadrature), std::invalid_argument);
  CHECK_THROWS_AS(convolve_periodic(f, -0.1, g, ConvolutionPath::Spectral), std::invalid_argument);
}

TEST_CASE("Laplacian") {
  const auto g = grid(100, 60);
  for (double x : laplacian_periodic(Field2D(g, 3.0), g).data) CHECK(x == 0.0);

  const auto f = plane_wave(g, 1, 0);
  const double k = 2 * kPi / g.lx();
  const auto lap = laplacian_periodic(f, g);
  const double tol = 2.0 * std::pow(k, 4) * g.dx * g.dx / 12.0;
  for (std::size_t n = 0; n < f.size(); ++n) CHECK(std::abs(lap.data[n] + k * k * f.data[n]) <= tol);

  // Sawtooth in i: zero in the interior, large at the wrap.
  Field2D saw(g);
  for (std::size_t j = 0; j < g.ny; ++j) {
    for (std::size_t i = 0; i < g.nx; ++i) saw(i, j) = static_cast<double>(i);
  }
  const auto ls = laplacian_periodic(saw, g);
  const double jump = static_cast<double>(g.nx) / (g.dx * g.dx);
  for (std::size_t j = 0; j < g.ny; ++j) {
    for (std::size_t i = 1; i + 1 < g.nx; ++i) CHECK(std::abs(ls(i, j)) <= 1e-9);
    CHECK(ls(0, j) == doctest::Approx(jump));
    CHECK(ls(g.nx - 1, j) == doctest::Approx(-jump));
  }
  CHECK(laplacian_periodic(saw, g, ExecutionPolicy::Serial) == ls);
}

TEST_CASE("homogeneous equilibrium is a fixed point") {
  for (double sigma : {0.0, 1.0}) {
    const auto g = grid(64, 64);
    auto cfg = base_config(sigma, 0.25, g);
    const auto e = stable_coexistence(cfg.params);
    FieldPair s{Field2D(g, e.u_star), Field2D(g, e.v_star), 0.0};
    EulerStepper stepper(cfg);
    const int steps = 200;
    for (int n = 0; n < steps; ++n) stepper.step(s);
    double err = 0.0;
    for (double x : s.u.data) err = std::max(err, std::abs(x - e.u_star));
    for (double x : s.v.data) err = std::max(err, std::abs(x - e.v_star));
    CHECK(err <= 1e-12 * steps);
    CHECK(s.time == doctest::Approx(2.0).epsilon(1e-12));
  }
}

TEST_CASE("single step matches the update formula") {
  const auto g = grid(24, 20);
  auto cfg = base_config(0.6, 0.3, g);
  const auto e = stable_coexistence(cfg.params);
  const auto s0 = initial_condition(g, e, 0.05, 3);
  const auto s1 = step_euler(s0, cfg);
  const auto lu = laplacian_periodic(s0.u, g), lv = laplacian_periodic(s0.v, g);
  const auto ku = convolve_periodic(s0.u, 0.6, g, ConvolutionPath::Spectral);
  const auto& p = cfg.params;
  for (std::size_t n = 0; n < s0.u.size(); ++n) {
    const double u = s0.u.data[n], v = s0.v.data[n], f = (1 + p.alpha * v) * u * v;
    const double un = u + cfg.dt * (lu.data[n] + p.eta * u * (1 - ku.data[n] / p.kappa) - f);
    const double vn = v + cfg.dt * (p.d * lv.data[n] + f - v);
    CHECK(s1.u.data[n] == doctest::Approx(un).epsilon(1e-13));
    CHECK(s1.v.data[n] == doctest::Approx(vn).epsilon(1e-13));
  }
  CHECK(s1.time == doctest::Approx(cfg.dt));
}

TEST_CASE("serial and parallel steppers are bit identical") {
  for (auto path : {ConvolutionPath::Spectral, ConvolutionPath::DirectQuadrature}) {
    const auto g = grid(80, 72);
    auto cfg = base_config(1.2, 0.2, g);
    cfg.convolution_path = path;
    const auto e = stable_coexistence(cfg.params);
    auto a = initial_condition(g, e, 0.01, 11);
    auto b = a;
    auto cs = cfg;
    cs.policy = ExecutionPolicy::Serial;
    EulerStepper ps(cfg), ss(cs);
    for (int n = 0; n < 50; ++n) {
      const double ra = ps.step(a), rb = ss.step(b);
      CHECK(ra == rb);
    }
    CHECK(a == b);
  }
}

TEST_CASE("run_to_steady is deterministic") {
  const auto g = grid(48, 48);
  auto cfg = base_config(0.5, 0.2, g);
  cfg.t_max = 20.0;
  cfg.snapshot_interval = 5.0;
  const auto e = stable_coexistence(cfg.params);
  const auto a = run_to_steady(cfg, e);
  auto cp = cfg;
  cp.policy = ExecutionPolicy::Serial;
  const auto b = run_to_steady(cp, e);
  CHECK_FALSE(a.converged);
  CHECK(a.steps == 2000);
  REQUIRE(a.series.frames.size() == b.series.frames.size());
  CHECK(a.series.frames.size() == 5);
  for (std::size_t n = 0; n < a.series.frames.size(); ++n) CHECK(a.series.frames[n] == b.series.frames[n]);
  CHECK(a.final_state == b.final_state);
  CHECK(a.final_state.time == doctest::Approx(20.0));

  std::size_t seen = 0;
  run_to_steady(cfg, e, [&](const FieldPair& s) {
    CHECK(s == a.series.frames[seen]);
    ++seen;
  });
  CHECK(seen == a.series.frames.size());
}

TEST_CASE("linear growth and decay rates match the dispersion relation") {
  for (double sigma : {0.0, 1.5}) {
    const auto p = reference_params(sigma);
    const auto tp = turing_threshold(p, stable_coexistence(p));
    const int mx = static_cast<int>(std::lround(tp.k_t * 50.0 / (2 * kPi)));
    for (double f : {0.95, 1.05}) {
      CAPTURE(sigma);
      CAPTURE(f);
      const auto [measured, predicted] = growth_rates(sigma, tp.d_t * f, mx);
      CHECK((predicted > 0.0) == (f < 1.0));
      CHECK(std::abs(measured - predicted) <= 0.1 * std::abs(predicted));
    }
  }
}

TEST_CASE("time step bound") {
  auto cfg = base_config(0.0, 1.0, grid(16, 16));
  cfg.dt = 0.25 * 0.25 / 4.0;
  CHECK_NOTHROW(cfg.validate());
  cfg.dt *= 1.01;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.dt = 0.01;
  cfg.params.d = 1.5;
  CHECK_NOTHROW(cfg.validate());
  cfg.params.d = 1.6;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.params.d = 1.0;
  CHECK_THROWS_AS(EulerStepper(SimConfig{cfg.params, cfg.grid, 0.02}), std::invalid_argument);
}

TEST_CASE("non-finite entries abort the step") {
  const auto g = grid(16, 16);
  auto cfg = base_config(0.0, 0.3, g);
  const auto e = stable_coexistence(cfg.params);
  auto s = initial_condition(g, e, 0.01, 1);
  s.v(3, 5) = std::numeric_limits<double>::quiet_NaN();
  EulerStepper stepper(cfg);
  CHECK_THROWS_AS(stepper.step(s), NumericalError);
  s = initial_condition(g, e, 0.01, 1);
  s.u(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(stepper.step(s), NumericalError);
}

TEST_CASE("negative mass fraction") {
  FieldPair s{Field2D(2, 1), Field2D(2, 1), 0.0};
  s.u.data = {-1.0, 3.0};
  s.v.data = {0.0, 0.0};
  CHECK(negative_mass_fraction(s) == doctest::Approx(0.25));
  s.u.data = {1.0, 3.0};
  CHECK(negative_mass_fraction(s) == 0.0);
}

TEST_CASE("snapshot round trips") {
  const auto dir = std::filesystem::temp_directory_path() / "nlturing_test_snap";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto g = grid(13, 7);
  Gen gen(44);
  Field2D f(g);
  for (double& x : f.data) x = gen.uniform(-1e3, 1e3) * std::pow(10.0, gen.integer(-200, 200));

  write_field_csv(dir / "f.csv", f);
  CHECK(read_field_csv(dir / "f.csv") == f);
  write_field_raw(dir / "f.raw", f);
  CHECK(read_field_raw(dir / "f.raw") == f);
  CHECK(std::filesystem::file_size(dir / "f.raw") == 16 + 8 * f.size());
  {
    std::ifstream in(dir / "f.raw", std::ios::binary);
    char head[16];
    in.read(head, 16);
    CHECK(std::string(head, 4) == "NLTF");
    CHECK(static_cast<unsigned char>(head[4]) == 13);
    CHECK(static_cast<unsigned char>(head[8]) == 7);
    for (int b = 12; b < 16; ++b) CHECK(head[b] == 0);
  }
  std::ofstream(dir / "bad.raw", std::ios::binary) << "XXXXjunk";
  CHECK_THROWS(read_field_raw(dir / "bad.raw"));

  Field2D ramp(g);
  for (std::size_t n = 0; n < ramp.size(); ++n) ramp.data[n] = static_cast<double>(n);
  write_field_pgm(dir / "f.pgm", ramp);
  {
    std::ifstream in(dir / "f.pgm", std::ios::binary);
    std::string magic;
    std::size_t w = 0, h = 0, maxv = 0;
    in >> magic >> w >> h >> maxv;
    in.get();
    CHECK(magic == "P5");
    CHECK(w == 13);
    CHECK(h == 7);
    CHECK(maxv == 255);
    std::string px((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    REQUIRE(px.size() == ramp.size());
    // Top row of the image is the last grid row.
    auto pixel = [&](std::size_t i, std::size_t j) { return static_cast<unsigned char>(px[(g.ny - 1 - j) * g.nx + i]); };
    CHECK(pixel(0, 0) == 0);
    CHECK(pixel(g.nx - 1, g.ny - 1) == 255);
    CHECK(pixel(5, 3) == std::lround(255.0 * ramp(5, 3) / static_cast<double>(ramp.size() - 1)));
    std::ifstream sc(dir / "f.pgm.scale");
    std::string k1, k2;
    double lo = 0, hi = 0;
    sc >> k1 >> lo >> k2 >> hi;
    CHECK(k1 == "min");
    CHECK(lo == 0.0);
    CHECK(k2 == "max");
    CHECK(hi == static_cast<double>(ramp.size() - 1));
  }

  SnapshotWriter w(dir / "series", SnapshotFormat::Raw, false);
  FieldPair s{f, ramp, 1.5};
  w.write(s);
  s.time = 3.0;
  w.write(s);
  std::size_t raw_files = 0;
  for (const auto& path : w.files()) raw_files += path.extension() == ".raw";
  CHECK(raw_files == 4);
  std::ifstream idx(dir / "series" / "index.csv");
  std::string line;
  std::getline(idx, line);
  CHECK(line == "time,filename");
  int rows = 0;
  while (std::getline(idx, line)) ++rows;
  CHECK(rows == 4);
  CHECK(read_field_raw(dir / "series" / "u_000000.raw") == f);
  CHECK(read_field_raw(dir / "series" / "v_000001.raw") == ramp);
  std::filesystem::remove_all(dir);
}

TEST_CASE("above threshold the perturbation dies out") {
  const auto g = grid(64, 64);
  auto cfg = base_config(0.0, 0.35, g);
  cfg.steady_tol = 1e-8;
  const auto e = stable_coexistence(cfg.params);
  const auto r = run_to_steady(cfg, e);
  CHECK(r.converged);
  double dev = 0.0;
  for (double x : r.final_state.u.data) dev = std::max(dev, std::abs(x - e.u_star));
  CHECK(dev <= 1e-4 * e.u_star);
  CHECK(classify_pattern(r.final_state.u, g) == PatternClass::Homogeneous);
  CHECK(r.worst_negative_mass == 0.0);
}
