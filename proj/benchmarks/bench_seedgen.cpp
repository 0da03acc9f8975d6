// Copyright 2026 The seedgen Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include <benchmark/benchmark.h>

#include "seedgen/diffusion.hpp"
#include "seedgen/evaluation.hpp"
#include "seedgen/nn.hpp"
#include "seedgen/retrieval.hpp"
#include "seedgen/rng.hpp"
#include "seedgen/world.hpp"

namespace {

using namespace seedgen;
using Eigen::MatrixXd;
using Eigen::RowVectorXd;

nn::Params random_params(const nn::NetworkSpec& spec, std::uint64_t seed) {
  nn::Params p = nn::init_params(spec, seed);
  Rng rng(seed);
  for (auto& v : p.values) v = static_cast<float>(0.1 * rng.normal());
  return p;
}

const nn::NetworkSpec kSpec{16, 32, 64, 6, 16};

void BM_Forward(benchmark::State& state) {
  const nn::Network net(random_params(kSpec, 1));
  Rng rng(2);
  const auto batch = state.range(0);
  const MatrixXd x = rng.normal_matrix(16, batch), c = rng.normal_matrix(32, batch);
  const RowVectorXd noise = rng.normal_matrix(1, batch);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(x, noise, c));
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_Forward)->Arg(1)->Arg(16)->Arg(128);

void BM_ForwardBackward(benchmark::State& state) {
  const nn::Network net(random_params(kSpec, 1));
  Rng rng(3);
  const auto batch = state.range(0);
  const MatrixXd x = rng.normal_matrix(16, batch), c = rng.normal_matrix(32, batch);
  const MatrixXd up = rng.normal_matrix(16, batch);
  const RowVectorXd noise = rng.normal_matrix(1, batch);
  for (auto _ : state) {
    nn::ForwardTrace trace;
    net.forward(x, noise, c, &trace);
    benchmark::DoNotOptimize(nn::grad_params(trace, up));
  }
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_ForwardBackward)->Arg(128);

void BM_TrainStep(benchmark::State& state) {
  TrainConfig cfg;
  DiffusionTrainer trainer(kSpec, ScheduleConfig{}, cfg);
  Rng rng(4);
  const MatrixXd q = rng.normal_matrix(32, 128);
  MatrixXd t = rng.normal_matrix(16, 128);
  t.colwise().normalize();
  for (auto _ : state) benchmark::DoNotOptimize(trainer.train_step(q, t));
}
BENCHMARK(BM_TrainStep)->Unit(benchmark::kMillisecond);

// Seed embeddings per second at the default solver settings.
void BM_Sample(benchmark::State& state) {
  const NetworkDenoiser model(DenoiserModel{random_params(kSpec, 5), ScheduleConfig{}});
  Rng rng(6);
  const Eigen::VectorXd cond = rng.normal_matrix(32, 1);
  SamplerConfig s;
  s.steps = 256;
  s.omega = state.range(1) ? 2.0 : 0.0;
  const int count = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample(model, cond, model.schedule(), s, count));
    ++s.seed;
  }
  state.SetItemsProcessed(state.iterations() * count);
}
BENCHMARK(BM_Sample)->Args({4, 0})->Args({50, 0})->Args({50, 1})->Unit(benchmark::kMillisecond);

void BM_SampleSteered(benchmark::State& state) {
  const NetworkDenoiser model(DenoiserModel{random_params(kSpec, 5), ScheduleConfig{}});
  Rng rng(7);
  const Eigen::VectorXd cond = rng.normal_matrix(32, 1);
  Eigen::VectorXd v = rng.normal_matrix(16, 1);
  v.normalize();
  SamplerConfig s;
  s.steers.push_back({v, 0.05});
  for (auto _ : state) benchmark::DoNotOptimize(sample(model, cond, model.schedule(), s, 50));
  state.SetItemsProcessed(state.iterations() * 50);
}
BENCHMARK(BM_SampleSteered)->Unit(benchmark::kMillisecond);

const World& bench_world() {
  static const World w = generate_world(WorldConfig{});
  return w;
}

void BM_TopK(benchmark::State& state) {
  const Index index(bench_world().catalog);
  Rng rng(8);
  MatrixXd seeds = rng.normal_matrix(16, state.range(0));
  seeds.colwise().normalize();
  for (auto _ : state) benchmark::DoNotOptimize(top_k(index, seeds, 50));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TopK)->Arg(1)->Arg(50);

void BM_FusedRetrieval(benchmark::State& state) {
  const Index index(bench_world().catalog);
  Rng rng(9);
  MatrixXd seeds = rng.normal_matrix(16, 50);
  seeds.colwise().normalize();
  for (auto _ : state) benchmark::DoNotOptimize(fused_retrieval(index, seeds, 100));
}
BENCHMARK(BM_FusedRetrieval);

}  // namespace

int main(int argc, char** argv) {
#if defined(__GLIBC__)
  mallopt(M_MMAP_THRESHOLD, 256 << 20);
  mallopt(M_TRIM_THRESHOLD, 512 << 20);
#endif
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
