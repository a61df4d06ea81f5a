// Copyright 2026 The crm-active Authors
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

#include <random>
#include <vector>

#include <benchmark/benchmark.h>
#include <spdlog/spdlog.h>

#include "crmactive/clustering.hpp"
#include "crmactive/engine.hpp"
#include "crmactive/kernels.hpp"
#include "crmactive/relevance.hpp"
#include "crmactive/selection.hpp"
#include "crmactive/synthetic.hpp"

namespace {

using namespace crmactive;

Dataset benchmark_dataset(std::size_t per_cluster) {
  SyntheticSpec spec;
  spec.n_clusters = 6;
  spec.samples_per_cluster = per_cluster;
  spec.num_concepts = 8;
  spec.feature_dim = 4;
  spec.label_noise = 0.05;
  spec.seed = 7;
  return generate_synthetic(spec);
}

void BM_GaussianKernel(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  std::vector<double> a(dim), b(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    a[i] = normal(rng);
    b[i] = normal(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_kernel(a, b, 1.0));
}
BENCHMARK(BM_GaussianKernel)->Arg(4)->Arg(64)->Arg(512);

void BM_CombinedKernel(benchmark::State& state) {
  const auto concepts = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(2);
  Sample a{"a", {}, {0.1, 0.2, 0.3, 0.4}, LabelSet(concepts)};
  Sample b{"b", {}, {0.4, 0.1, 0.0, 0.2}, LabelSet(concepts)};
  for (std::size_t w = 0; w < concepts; w += 3) a.labels->set(w);
  for (std::size_t w = 0; w < concepts; w += 4) b.labels->set(w);
  KernelParams params{1.0, std::vector<double>(concepts, 0.3)};
  for (auto _ : state) benchmark::DoNotOptimize(combined_kernel(a, b, params));
}
BENCHMARK(BM_CombinedKernel)->Arg(8)->Arg(260);

void BM_WordPosteriors(benchmark::State& state) {
  const auto dataset = benchmark_dataset(static_cast<std::size_t>(state.range(0)));
  std::vector<TrainingPoint> training;
  for (const auto& s : dataset.samples()) {
    if (s.labels) training.push_back({s.id, s.features, *s.labels});
  }
  const auto model = RelevanceModel::train(training, {0.5, 0.25}, dataset.normalization().active_dims());
  const auto& query = dataset.samples().front().features;
  for (auto _ : state) benchmark::DoNotOptimize(model.word_posteriors(query));
  state.counters["training"] = static_cast<double>(training.size());
}
BENCHMARK(BM_WordPosteriors)->Arg(40)->Arg(200);

void BM_XMeans(benchmark::State& state) {
  const auto dataset = benchmark_dataset(static_cast<std::size_t>(state.range(0)));
  PointStore store;
  std::vector<SampleId> ids;
  for (const auto& s : dataset.samples()) {
    store.add(s.id, s.features);
    ids.push_back(s.id);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(xmeans(store, ids, 2, default_k_max(ids.size()), 3));
  }
}
BENCHMARK(BM_XMeans)->Arg(40)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_ScoringRound(benchmark::State& state) {
  const auto dataset = benchmark_dataset(static_cast<std::size_t>(state.range(0)));
  RunConfig config;
  config.seed = 5;
  config.lambda = 0.5;
  config.beta = 0.25;
  Session session(dataset, config);
  session.start();
  const auto& unlabeled = session.unlabeled();
  const ScoringInputs inputs{session.model(), session.clusters(), session.store(), session.sigma(),
                             config.annotation_length, config.epsilon, config.weights, false};
  for (auto _ : state) {
    const auto scores = score_unlabeled(unlabeled, inputs);
    benchmark::DoNotOptimize(select_batch(scores, config.batch_size));
  }
  state.counters["unlabeled"] = static_cast<double>(unlabeled.size());
}
BENCHMARK(BM_ScoringRound)->Arg(40)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::off);
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
