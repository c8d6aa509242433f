#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "nlturing/convolution.hpp"
#include "nlturing/grid.hpp"
#include "nlturing/model.hpp"

namespace nlturing {

struct SimConfig {
  ModelParams params;
  Grid2D grid;
  double dt = 0.01;
  double t_max = 5000.0;
  std::uint64_t seed = 20240601;
  /// Absolute amplitude of the initial noise. Non-positive means 1e-2 u*.
  double perturbation_amplitude = 0.0;
  /// Snapshot spacing in time units; non-positive disables snapshots.
  double snapshot_interval = 0.0;
  ConvolutionPath convolution_path = ConvolutionPath::Spectral;
  ExecutionPolicy policy = ExecutionPolicy::Parallel;
  double steady_tol = 1e-6;
  double steady_window = 100.0;

  /// Throws std::invalid_argument on a bad grid or parameters, or when dt
  /// violates dt <= dx^2 / (4 max(1, d)).
  void validate() const;
};

/// u = u* + amplitude xi_u, v = v* + amplitude xi_v with xi uniform in
/// [-1, 1] from a 64-bit Mersenne Twister seeded with `seed` (all of u is
/// drawn first, then v).
FieldPair initial_condition(const Grid2D& grid, const Equilibrium& e, double amplitude,
                            std::uint64_t seed);

/// One forward Euler step of the nonlocal reaction-diffusion system. Owns the
/// convolution plans and scratch buffers for a fixed configuration.
class EulerStepper {
 public:
  explicit EulerStepper(const SimConfig& cfg);
  ~EulerStepper();
  EulerStepper(const EulerStepper&) = delete;
  EulerStepper& operator=(const EulerStepper&) = delete;

  /// Advances `state` in place and returns the max-norm of (new - old) / dt
  /// over both fields. Throws NumericalError if any entry becomes non-finite.
  double step(FieldPair& state);

  std::uint64_t steps_taken() const { return steps_; }

 private:
  SimConfig cfg_;
  std::unique_ptr<SpectralConvolver> spectral_;
  Field2D kernel_u_, next_u_, next_v_;
  std::uint64_t steps_ = 0;
};

/// Convenience wrapper: a copy of `state` advanced by one step.
FieldPair step_euler(const FieldPair& state, const SimConfig& cfg);

/// Sum of negative entries over both fields divided by the total absolute
/// mass. Zero when every entry is non-negative.
double negative_mass_fraction(const FieldPair& state);

using SnapshotObserver = std::function<void(const FieldPair&)>;

struct SnapshotSeries {
  std::vector<FieldPair> frames;
};

struct RunResult {
  FieldPair final_state;
  SnapshotSeries series;
  bool converged = false;
  std::uint64_t steps = 0;
  /// Largest negative-mass fraction seen at check points.
  double worst_negative_mass = 0.0;
  bool negative_mass_flag = false;
};

/// Steps from `initial_condition` until the per-unit-time change stays below
/// steady_tol for steady_window time units, or t_max. When an observer is
/// given, snapshots are passed to it instead of being stored.
RunResult run_to_steady(const SimConfig& cfg, const Equilibrium& e,
                        const SnapshotObserver& observer = {});

/// Same, starting from a given state.
RunResult run_from(const SimConfig& cfg, FieldPair state,
                   const SnapshotObserver& observer = {});

}  // namespace nlturing
