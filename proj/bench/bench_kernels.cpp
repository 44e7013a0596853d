// Serial vs flat vs dynamic kernels on a small city-like case and on the
// synthetic skewed workload.

#include "gbt/citygen.hpp"
#include "gbt/pipeline.hpp"

#include <benchmark/benchmark.h>

namespace {

struct CityCase {
  gbt::Scene scene;
  gbt::PipelineInput input;

  CityCase() {
    gbt::CityParams p;
    p.half_size = 80.0;
    p.blocks = 4;
    scene = gbt::build_scene(gbt::city_blocks(p));
    input.scene = &scene;
    input.source.position = gbt::Vec3(0.0, 0.0, 2.0);
    input.source.frequencies_hz = {500.0};
    input.source.beam_eps_m = 10.0;
    input.grid.n_theta = 32;
    input.grid.n_phi = 32;
    input.trace.n_steps = 3000;
    input.atmosphere = gbt::Atmosphere::from_conditions(20.0, 70.0, 1.0);
    for (int j = 0; j < 20; ++j) {
      for (int i = 0; i < 20; ++i) input.observers.emplace_back(-60.0 + 6.0 * i, -60.0 + 6.0 * j, 1.5);
    }
  }
};

CityCase& city() {
  static CityCase c;
  return c;
}

void BM_Pipeline(benchmark::State& state) {
  gbt::ExecPlan plan;
  plan.mode = static_cast<gbt::Mode>(state.range(0));
  plan.workers = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) {
    auto r = gbt::run_pipeline(city().input, plan);
    benchmark::DoNotOptimize(r.field.pressure.data());
  }
}
BENCHMARK(BM_Pipeline)
    ->ArgNames({"mode", "workers"})
    ->Args({0, 1})
    ->Args({1, 1})->Args({1, 2})->Args({1, 4})
    ->Args({2, 1})->Args({2, 2})->Args({2, 4})
    ->Unit(benchmark::kMillisecond);

void BM_Skewed(benchmark::State& state) {
  const auto mode = static_cast<gbt::Mode>(state.range(0));
  const auto workers = static_cast<std::size_t>(state.range(1));
  gbt::SkewedWorkload work(gbt::SkewedWorkload::skewed_counts(1000, 64, 100, 250, 3), 16);
  for (auto _ : state) {
    work.reset();
    if (mode == gbt::Mode::dynamic) {
      gbt::run_dynamic(work, workers, 4096);
    } else if (mode == gbt::Mode::flat) {
      gbt::run_flat(work.tasks(), workers, [&](std::size_t b, std::size_t e) {
        for (std::size_t t = b; t < e; ++t) work.accumulate(t, 0, work.items(t));
      });
    } else {
      for (std::size_t t = 0; t < work.tasks(); ++t) work.accumulate(t, 0, work.items(t));
    }
    benchmark::DoNotOptimize(work.results().data());
  }
}
BENCHMARK(BM_Skewed)
    ->ArgNames({"mode", "workers"})
    ->Args({0, 1})->Args({1, 4})->Args({2, 4})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
