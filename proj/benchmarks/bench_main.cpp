// benchmarks/bench_main.cpp

// Copyright 2026  rtflab authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <random>

#include <benchmark/benchmark.h>

#include "rtflab/beamform.hpp"
#include "rtflab/identities.hpp"
#include "rtflab/linalg.hpp"
#include "rtflab/rtf.hpp"
#include "rtflab/scene.hpp"
#include "rtflab/stft.hpp"

namespace {

using namespace rtflab;

void BM_HermitianEig6(benchmark::State& state) {
  std::mt19937_64 rng(7);
  ExactModelInstance inst = make_exact_model_instance(rng, 4, 2);
  for (auto _ : state) {
    EigResult e = hermitian_eig(inst.ry);
    benchmark::DoNotOptimize(e);
  }
}
BENCHMARK(BM_HermitianEig6);

void BM_GevdWeightsBin(benchmark::State& state) {
  std::mt19937_64 rng(7);
  ExactModelInstance inst = make_exact_model_instance(rng, 4, 2);
  ComplexMatrix estimates = build_estimate_matrix(inst.ry, inst.ma, inst.me);
  for (auto _ : state) {
    WeightVector w = gevd_weights(estimates, inst.ry, inst.rn);
    benchmark::DoNotOptimize(w);
  }
}
BENCHMARK(BM_GevdWeightsBin);

void BM_MvdrWeightsBin(benchmark::State& state) {
  std::mt19937_64 rng(7);
  ExactModelInstance inst = make_exact_model_instance(rng, 4, 2);
  for (auto _ : state) {
    ComplexVector w = mvdr_weights(inst.rn, inst.h);
    benchmark::DoNotOptimize(w);
  }
}
BENCHMARK(BM_MvdrWeightsBin);

void BM_StftAnalyzeSecond(benchmark::State& state) {
  StftConfig cfg;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  MultichannelSignal sig(6, std::vector<double>(16000));
  for (auto& ch : sig)
    for (double& v : ch) v = g(rng);
  for (auto _ : state) {
    Spectrogram spec = analyze(sig, cfg);
    benchmark::DoNotOptimize(spec);
  }
}
BENCHMARK(BM_StftAnalyzeSecond);

void BM_DiffuseNoiseSecond(benchmark::State& state) {
  SceneConfig cfg;
  cfg.geometry.lma_positions = {
      {-0.075, 0.0, 0.0}, {-0.068, 0.0, 0.0}, {0.068, 0.0, 0.0}, {0.075, 0.0, 0.0}};
  cfg.geometry.external_positions = {{-1.2, 1.0, 0.0}, {1.2, 1.0, 0.0}};
  StftConfig stft_cfg;
  for (auto _ : state) {
    MultichannelSignal noise = synthesize_diffuse_noise(cfg.geometry, 1.0, cfg, stft_cfg);
    benchmark::DoNotOptimize(noise);
  }
}
BENCHMARK(BM_DiffuseNoiseSecond);

}  // namespace

BENCHMARK_MAIN();
