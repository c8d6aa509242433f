#include <benchmark/benchmark.h>

#include <cmath>

#include "nlturing/convolution.hpp"
#include "nlturing/simulation.hpp"

using namespace nlturing;

namespace {

SimConfig config(double sigma, ExecutionPolicy policy, ConvolutionPath path) {
  SimConfig c;
  c.params = ModelParams{0.92, 0.65, 10.0, 0.25, sigma};
  c.policy = policy;
  c.convolution_path = path;
  return c;
}

Field2D wavy(const Grid2D& g) {
  Field2D f(g);
  for (std::size_t j = 0; j < g.ny; ++j) {
    for (std::size_t i = 0; i < g.nx; ++i) f(i, j) = std::sin(0.1 * i) * std::cos(0.07 * j) + 0.5;
  }
  return f;
}

// args: sigma x 100, policy (0 serial, 1 parallel), path (0 spectral, 1 direct)
void BM_EulerStep(benchmark::State& state) {
  const auto cfg = config(state.range(0) / 100.0,
                          state.range(1) ? ExecutionPolicy::Parallel : ExecutionPolicy::Serial,
                          state.range(2) ? ConvolutionPath::DirectQuadrature : ConvolutionPath::Spectral);
  const auto e = stable_coexistence(cfg.params);
  auto s = initial_condition(cfg.grid, e, 1e-3, 1);
  EulerStepper stepper(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(stepper.step(s));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(cfg.grid.size()));
}
BENCHMARK(BM_EulerStep)
    ->ArgNames({"sigma100", "parallel", "direct"})
    ->Args({0, 0, 0})
    ->Args({0, 1, 0})
    ->Args({150, 0, 0})
    ->Args({150, 1, 0})
    ->Args({150, 0, 1})
    ->Args({150, 1, 1})
    ->Unit(benchmark::kMicrosecond);

void BM_Laplacian(benchmark::State& state) {
  const Grid2D g;
  const auto f = wavy(g);
  const auto policy = state.range(0) ? ExecutionPolicy::Parallel : ExecutionPolicy::Serial;
  for (auto _ : state) benchmark::DoNotOptimize(laplacian_periodic(f, g, policy));
}
BENCHMARK(BM_Laplacian)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_Convolution(benchmark::State& state) {
  const Grid2D g;
  const auto f = wavy(g);
  const double sigma = state.range(0) / 100.0;
  if (state.range(1) == 0) {
    SpectralConvolver conv(g, sigma);
    Field2D out(g);
    for (auto _ : state) {
      conv.apply(f, out);
      benchmark::DoNotOptimize(out.data.data());
    }
  } else {
    const auto policy = state.range(1) == 2 ? ExecutionPolicy::Parallel : ExecutionPolicy::Serial;
    for (auto _ : state) benchmark::DoNotOptimize(direct_convolve(f, g, sigma, policy));
  }
}
// mode: 0 spectral, 1 direct serial, 2 direct parallel
BENCHMARK(BM_Convolution)
    ->ArgNames({"sigma100", "mode"})
    ->ArgsProduct({{25, 75, 150}, {0, 1, 2}})
    ->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
