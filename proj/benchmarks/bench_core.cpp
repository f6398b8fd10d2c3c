// Microbenchmarks for the hot paths: field evaluation, the RK4 stepper, the
// equilibrium solver, and a full closed-loop simulation step.

#include <benchmark/benchmark.h>

#include <array>
#include <cmath>
#include <memory>
#include <vector>

#include "isotrack/analysis.hpp"
#include "isotrack/fields.hpp"
#include "isotrack/sim.hpp"

namespace {

using namespace isotrack;

std::shared_ptr<const Field> circular() {
  return std::make_shared<CircularExpField>(30.0, 0.1, Vec2{5.0, 5.0});
}

std::shared_ptr<const Field> gaussian() {
  return std::make_shared<MultiGaussianField>(std::vector<MultiGaussianField::Component>{
      {20.0, {20.0, 20.0}, 600.0},
      {30.0, {-30.0, -20.0}, 400.0},
      {10.0, {-20.0, 30.0}, 800.0},
  });
}

std::shared_ptr<const Field> grid() {
  constexpr int n = 64;
  std::vector<double> values(n * n);
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      values[static_cast<std::size_t>(iy) * n + ix] =
          30.0 * std::exp(-0.1 * std::hypot(ix - 32.0, iy - 32.0));
    }
  }
  return std::make_shared<GridField>(Vec2{-32.0, -32.0}, 1.0, 1.0, n, n, std::move(values));
}

void BM_FieldValue(benchmark::State& state, std::shared_ptr<const Field> f) {
  Vec2 p{11.0, 5.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(f->value(p));
    p.x = p.x < 12.0 ? p.x + 1e-6 : 11.0;  // defeat value caching, stay in range
  }
}

void BM_FieldGradient(benchmark::State& state, std::shared_ptr<const Field> f) {
  Vec2 p{11.0, 5.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(f->gradient(p));
    p.x = p.x < 12.0 ? p.x + 1e-6 : 11.0;
  }
}

void BM_Rk4Step(benchmark::State& state) {
  const auto deriv = [](const std::array<double, 4>& s) {
    return std::array<double, 4>{std::cos(s[2]), std::sin(s[2]), 0.1 * s[3], -0.05 * s[2]};
  };
  std::array<double, 4> y{0.0, 0.0, 0.5, 1.0};
  for (auto _ : state) {
    y = rk4_step(deriv, y, 0.01);
    benchmark::DoNotOptimize(y);
    if (!std::isfinite(y[0]) || std::abs(y[0]) > 1e6) y = {0.0, 0.0, 0.5, 1.0};
  }
}

void BM_EquilibriumSolve(benchmark::State& state) {
  const Gains g{10.0, 1.0, 0.3, 1.0, 0.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_equilibrium(g, 2.0, 4.0546510810816438, 0.5, 20.0));
  }
}

void BM_Simulation(benchmark::State& state) {
  SimConfig cfg;
  cfg.field = circular();
  cfg.gains = {10.0, 1.0, 0.3, 1.0, 0.0};
  cfg.v = 0.5;
  cfg.s_d = 20.0;
  cfg.dt = 0.01;
  cfg.duration = 10.0;
  cfg.initial = {{11.0, 5.0}, -kPi / 2.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_simulation(cfg));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<int64_t>(cfg.duration / cfg.dt));
}

BENCHMARK_CAPTURE(BM_FieldValue, circular_exp, circular());
BENCHMARK_CAPTURE(BM_FieldValue, gaussian_sum, gaussian());
BENCHMARK_CAPTURE(BM_FieldValue, grid_bilinear, grid());
BENCHMARK_CAPTURE(BM_FieldGradient, circular_exp, circular());
BENCHMARK_CAPTURE(BM_FieldGradient, gaussian_sum, gaussian());
BENCHMARK_CAPTURE(BM_FieldGradient, grid_bilinear, grid());
BENCHMARK(BM_Rk4Step);
BENCHMARK(BM_EquilibriumSolve);
BENCHMARK(BM_Simulation)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
