#include "nlturing/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>
#include <stdexcept>

namespace nlturing {

namespace {

struct Kinetics {
  double dt, cx, cy, eta, inv_kappa, alpha, d;
};

struct RowView {
  const double* u;
  const double* v;
  const double* u_up;
  const double* v_up;
  const double* u_down;
  const double* v_down;
  const double* cu;
};

// One cell of the fused Laplacian + reaction + Euler update. `poison` turns
// NaN whenever an input or output is non-finite (inf * 0 is NaN).
inline void euler_cell(const RowView& r, std::size_t i, std::size_t ip, std::size_t im,
                       const Kinetics& k, double* __restrict un, double* __restrict vn,
                       double& rate, double& poison) {
  const double uc = r.u[i], vc = r.v[i];
  const double lap_u = k.cx * (r.u[ip] + r.u[im] - 2.0 * uc) + k.cy * (r.u_up[i] + r.u_down[i] - 2.0 * uc);
  const double lap_v = k.cx * (r.v[ip] + r.v[im] - 2.0 * vc) + k.cy * (r.v_up[i] + r.v_down[i] - 2.0 * vc);
  const double predation = (1.0 + k.alpha * vc) * uc * vc;
  const double fu = lap_u + k.eta * uc * (1.0 - r.cu[i] * k.inv_kappa) - predation;
  const double fv = k.d * lap_v + predation - vc;
  un[i] = uc + k.dt * fu;
  vn[i] = vc + k.dt * fv;
  const double a = std::abs(fu), b = std::abs(fv);
  const double m = a > b ? a : b;
  rate = rate > m ? rate : m;
  poison += fu * 0.0 + fv * 0.0;
}

std::pair<double, double> euler_row(const RowView& r, std::size_t nx, const Kinetics& k,
                                    double* __restrict un, double* __restrict vn) {
  double rate = 0.0, poison = 0.0;
  if (nx == 1) {
    euler_cell(r, 0, 0, 0, k, un, vn, rate, poison);
    return {rate, poison};
  }
  euler_cell(r, 0, 1, nx - 1, k, un, vn, rate, poison);
  // Reordering only touches the max and the NaN probe, never the fields.
#pragma omp simd reduction(max : rate) reduction(+ : poison)
  for (std::size_t i = 1; i < nx - 1; ++i) euler_cell(r, i, i + 1, i - 1, k, un, vn, rate, poison);
  euler_cell(r, nx - 1, 0, nx - 2, k, un, vn, rate, poison);
  return {rate, poison};
}

}  // namespace

void SimConfig::validate() const {
  params.validate(true);
  grid.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const double h = std::min(grid.dx, grid.dy);
  const double bound = h * h / (4.0 * std::max(1.0, params.d));
  if (dt > bound) {
    throw std::invalid_argument("dt exceeds the explicit diffusion bound dx^2 / (4 max(1, d))");
  }
  if (!(t_max >= 0.0)) throw std::invalid_argument("t_max must be non-negative");
  if (!(steady_tol > 0.0)) throw std::invalid_argument("steady_tol must be positive");
  if (!(steady_window > 0.0)) throw std::invalid_argument("steady_window must be positive");
  if (params.sigma > 0.0 && convolution_path == ConvolutionPath::DirectQuadrature &&
      6.0 * params.sigma > 0.5 * std::min(grid.lx(), grid.ly())) {
    throw std::invalid_argument("6 sigma exceeds half the domain extent");
  }
}

FieldPair initial_condition(const Grid2D& grid, const Equilibrium& e, double amplitude,
                            std::uint64_t seed) {
  grid.validate();
  std::mt19937_64 rng(seed);
  // 53 random bits mapped to [-1, 1), identical across standard libraries.
  auto draw = [&rng] {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  };
  FieldPair s{Field2D(grid), Field2D(grid), 0.0};
  for (double& x : s.u.data) x = e.u_star + amplitude * draw();
  for (double& x : s.v.data) x = e.v_star + amplitude * draw();
  return s;
}

EulerStepper::EulerStepper(const SimConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  if (cfg_.params.sigma > 0.0 && cfg_.convolution_path == ConvolutionPath::Spectral) {
    spectral_ = std::make_unique<SpectralConvolver>(cfg_.grid, cfg_.params.sigma);
  }
  kernel_u_ = Field2D(cfg_.grid);
  next_u_ = Field2D(cfg_.grid);
  next_v_ = Field2D(cfg_.grid);
}

EulerStepper::~EulerStepper() = default;

double EulerStepper::step(FieldPair& s) {
  const Grid2D& g = cfg_.grid;
  if (s.u.nx != g.nx || s.u.ny != g.ny || s.v.nx != g.nx || s.v.ny != g.ny) {
    throw std::invalid_argument("state does not match grid");
  }
  const ModelParams& p = cfg_.params;
  const Field2D* ku = &s.u;
  if (p.sigma > 0.0) {
    if (spectral_) {
      spectral_->apply(s.u, kernel_u_);
    } else {
      kernel_u_ = direct_convolve(s.u, g, p.sigma, cfg_.policy);
    }
    ku = &kernel_u_;
  }

  const std::size_t nx = g.nx, ny = g.ny;
  const double cx = 1.0 / (g.dx * g.dx), cy = 1.0 / (g.dy * g.dy);
  const double dt = cfg_.dt;
  const double eta = p.eta, inv_kappa = 1.0 / p.kappa, alpha = p.alpha, d = p.d;
  const double* u = s.u.data.data();
  const double* v = s.v.data.data();
  const double* cu = ku->data.data();
  double* un = next_u_.data.data();
  double* vn = next_v_.data.data();

  const Kinetics kin{dt, cx, cy, eta, inv_kappa, alpha, d};
  double rate = 0.0;
  double poison = 0.0;
  const auto n_rows = static_cast<long>(ny);
#pragma omp parallel for reduction(max : rate) reduction(+ : poison) \
    if (cfg_.policy == ExecutionPolicy::Parallel)
  for (long jl = 0; jl < n_rows; ++jl) {
    const auto j = static_cast<std::size_t>(jl);
    const RowView row{u + j * nx,
                      v + j * nx,
                      u + ((j + 1) % ny) * nx,
                      v + ((j + 1) % ny) * nx,
                      u + ((j + ny - 1) % ny) * nx,
                      v + ((j + ny - 1) % ny) * nx,
                      cu + j * nx};
    const auto [r, z] = euler_row(row, nx, kin, un + j * nx, vn + j * nx);
    rate = std::max(rate, r);
    poison += z;
  }
  if (!std::isfinite(poison) || !std::isfinite(rate)) {
    throw NumericalError("non-finite field value at t = " + std::to_string(s.time + dt));
  }
  std::swap(s.u.data, next_u_.data);
  std::swap(s.v.data, next_v_.data);
  ++steps_;
  s.time += dt;
  return rate;
}

FieldPair step_euler(const FieldPair& state, const SimConfig& cfg) {
  EulerStepper stepper(cfg);
  FieldPair out = state;
  stepper.step(out);
  return out;
}

double negative_mass_fraction(const FieldPair& s) {
  double neg = 0.0, total = 0.0;
  for (const Field2D* f : {&s.u, &s.v}) {
    for (double x : f->data) {
      total += std::abs(x);
      if (x < 0.0) neg -= x;
    }
  }
  return total > 0.0 ? neg / total : 0.0;
}

RunResult run_to_steady(const SimConfig& cfg, const Equilibrium& e,
                        const SnapshotObserver& observer) {
  cfg.validate();
  const double amp =
      cfg.perturbation_amplitude > 0.0 ? cfg.perturbation_amplitude : 1e-2 * e.u_star;
  return run_from(cfg, initial_condition(cfg.grid, e, amp, cfg.seed), observer);
}

RunResult run_from(const SimConfig& cfg, FieldPair state, const SnapshotObserver& observer) {
  EulerStepper stepper(cfg);
  RunResult result;
  const double t0 = state.time;
  const auto total_steps = static_cast<std::uint64_t>(std::llround(cfg.t_max / cfg.dt));
  const auto window_steps =
      static_cast<std::uint64_t>(std::ceil(cfg.steady_window / cfg.dt - 1e-9));
  const std::uint64_t snap_every =
      cfg.snapshot_interval > 0.0
          ? std::max<std::uint64_t>(1, static_cast<std::uint64_t>(
                                           std::llround(cfg.snapshot_interval / cfg.dt)))
          : 0;
  constexpr std::uint64_t kMassCheckEvery = 1000;

  auto emit = [&](const FieldPair& s) {
    if (observer) observer(s);
    else result.series.frames.push_back(s);
  };
  auto check_mass = [&](const FieldPair& s) {
    const double f = negative_mass_fraction(s);
    result.worst_negative_mass = std::max(result.worst_negative_mass, f);
    if (f > 1e-8) result.negative_mass_flag = true;
  };

  if (snap_every) emit(state);
  std::uint64_t quiet = 0;
  std::uint64_t n = 0;
  while (n < total_steps) {
    const double rate = stepper.step(state);
    ++n;
    state.time = t0 + static_cast<double>(n) * cfg.dt;
    quiet = rate < cfg.steady_tol ? quiet + 1 : 0;
    if (snap_every && n % snap_every == 0) emit(state);
    if (n % kMassCheckEvery == 0) check_mass(state);
    if (quiet >= window_steps) {
      result.converged = true;
      break;
    }
  }
  check_mass(state);
  if (snap_every && n % snap_every != 0) emit(state);
  result.steps = n;
  result.final_state = std::move(state);
  return result;
}

}  // namespace nlturing
