#include <benchmark/benchmark.h>

#include "tspr/experiment.hpp"
#include "tspr/linop.hpp"
#include "tspr/measurement.hpp"
#include "tspr/metrics.hpp"
#include "tspr/pr_base.hpp"
#include "tspr/rng.hpp"
#include "tspr/tensor.hpp"

using namespace tspr;

namespace {

Vec random_vec(Index n, std::uint64_t seed) {
  auto gen = rng::substream(seed, rng::Stream::kSynth);
  return rng::complex_gaussian(n, gen);
}

void bm_cdp_forward(benchmark::State& state) {
  const Index n = state.range(0);
  MeasurementEnsemble ens = gen_cdp(n, 2, 1, 1);
  Vec x = random_vec(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(ens.ops[0].forward(x));
  state.SetItemsProcessed(state.iterations() * 2 * n);
}

void bm_gaussian_forward(benchmark::State& state) {
  const Index n = state.range(0);
  MeasurementEnsemble ens = gen_gaussian(n, 2 * n, 1, true, 1);
  Vec x = random_vec(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(ens.ops[0].forward(x));
  state.SetItemsProcessed(state.iterations() * 2 * n);
}

void bm_cgls(benchmark::State& state) {
  const Index n = state.range(0);
  auto gen = rng::substream(3, rng::Stream::kSynth);
  Mat a = rng::complex_gaussian_matrix(4 * n, n, gen);
  Vec b = random_vec(4 * n, 4);
  LinearMap map = dense_map(a);
  for (auto _ : state)
    benchmark::DoNotOptimize(cgls(map, b, Vec::Zero(n), CglsConfig{50, 1e-10}));
}

void bm_tucker_reconstruct(benchmark::State& state) {
  const Index n = state.range(0);
  auto gen = rng::substream(5, rng::Stream::kSynth);
  TuckerFactors f;
  f.D = rng::complex_gaussian_matrix(n, 4, gen);
  f.E = rng::complex_gaussian_matrix(n, 4, gen);
  f.F = rng::complex_gaussian_matrix(20, 3, gen);
  f.core = ComplexTensor3(random_vec(4 * 4 * 3, 6), 4, 4, 3);
  for (auto _ : state) benchmark::DoNotOptimize(tucker_reconstruct(f));
}

void bm_hosvd(benchmark::State& state) {
  const Index n = state.range(0);
  ComplexTensor3 x = synth_tensor(n, n, 20, {4, 4, 3}, 7);
  for (auto _ : state) benchmark::DoNotOptimize(hosvd(x, 4, 4, 3));
}

void bm_rwf(benchmark::State& state) {
  const Index n = state.range(0);
  MeasurementEnsemble ens = gen_gaussian(n, 4 * n, 1, true, 8);
  ComplexTensor3 truth(random_vec(n, 9), n, 1, 1);
  attach_observations(ens, truth);
  Vec x0 = Vec(truth.frame_vec(0)) + 0.1 * random_vec(n, 10);
  for (auto _ : state)
    benchmark::DoNotOptimize(rwf(ens.observations[0], ens.ops[0], x0, RwfConfig{25, 0.8}));
}

void bm_frame_dist(benchmark::State& state) {
  const Index n = state.range(0);
  Vec x = random_vec(n, 11), y = random_vec(n, 12);
  for (auto _ : state) benchmark::DoNotOptimize(frame_dist(y, x));
}

}  // namespace

BENCHMARK(bm_cdp_forward)->Arg(256)->Arg(1024)->Arg(4096);
BENCHMARK(bm_gaussian_forward)->Arg(256)->Arg(1024);
BENCHMARK(bm_cgls)->Arg(64)->Arg(256);
BENCHMARK(bm_tucker_reconstruct)->Arg(16)->Arg(64);
BENCHMARK(bm_hosvd)->Arg(16)->Arg(32);
BENCHMARK(bm_rwf)->Arg(256)->Arg(1024);
BENCHMARK(bm_frame_dist)->Arg(1024)->Arg(65536);

BENCHMARK_MAIN();
