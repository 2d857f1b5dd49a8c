#include <benchmark/benchmark.h>

#include <random>

#include "divot/decide.hpp"
#include "divot/divergence.hpp"
#include "divot/optimize.hpp"
#include "divot/ot1d.hpp"
#include "divot/synth.hpp"

using namespace divot;

namespace {

SamplePair cubic_pairs(std::size_t n) {
  GeneratorSpec g;
  g.mechanism = Mechanism::cubic;
  g.n = n;
  g.seed = 1;
  PreprocessOptions o;
  o.max_n = n;
  return preprocess(generate(g), o);
}

struct Prepared {
  BatchedSample sample;
  SourceDraws draws;
};

Prepared prepare(std::size_t n, double batch_frac) {
  const auto pairs = cubic_pairs(n);
  const auto positions = select_positions(pairs, 50);
  Prepared p;
  p.sample = gather(make_batches(pairs, positions, batch_frac), pairs.xs(), pairs.ys());
  p.draws = draw_sources(NoiseSource::standard_normal, p.sample.sizes(), 7);
  return p;
}

void BM_W2Sorted(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  std::vector<double> a(n), b(n);
  for (auto& v : a) v = g(rng);
  for (auto& v : b) v = g(rng);
  for (auto _ : state) benchmark::DoNotOptimize(w2_squared_1d(a, b));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_W2Sorted)->RangeMultiplier(10)->Range(100, 100000)->Complexity(benchmark::oNLogN);

void BM_RawMeasure(benchmark::State& state) {
  const auto p = prepare(10000, 0.001 * static_cast<double>(state.range(0)));
  const MeasureParams params;
  for (auto _ : state) benchmark::DoNotOptimize(raw_measure(p.sample, p.draws, params));
}
BENCHMARK(BM_RawMeasure)->Arg(1)->Arg(10)->Arg(50);

void BM_FitTheta(benchmark::State& state) {
  const auto p = prepare(10000, 0.001);
  const auto method = state.range(0) == 0 ? ThetaMethod::closed_form : ThetaMethod::bisection;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_theta(p.sample, p.draws, MeasureParams{}, FitConfig{}, method));
  }
}
BENCHMARK(BM_FitTheta)->Arg(0)->Arg(1);

void BM_ScoreDirection(benchmark::State& state) {
  const auto pairs = cubic_pairs(10000);
  auto cfg = PipelineConfig::defaults(Mode::anm);
  cfg.batch_frac = 0.001;
  for (auto _ : state) {
    benchmark::DoNotOptimize(score_direction(pairs, Direction::x_to_y, cfg, 9).loss);
  }
}
BENCHMARK(BM_ScoreDirection)->Unit(benchmark::kMillisecond);

void BM_InferDirection(benchmark::State& state) {
  const auto pairs = cubic_pairs(static_cast<std::size_t>(state.range(0)));
  const auto mode = state.range(1) == 0 ? Mode::anm : Mode::pnl;
  const auto cfg = PipelineConfig::defaults(mode);
  for (auto _ : state) benchmark::DoNotOptimize(infer_direction(pairs, cfg, 5).decision);
}
BENCHMARK(BM_InferDirection)
    ->Args({500, 0})
    ->Args({500, 1})
    ->Args({5000, 0})
    ->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
