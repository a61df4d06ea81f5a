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

#include "crmactive/selection.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "crmactive/error.hpp"
#include "crmactive/kernels.hpp"

namespace crmactive {

double uncertainty(std::span<const double> posteriors, std::size_t k, double epsilon) {
  if (k < 1 || k >= posteriors.size()) throw InvalidArgument("uncertainty needs 1 <= k < D");
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  std::vector<double> sorted(posteriors.begin(), posteriors.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const double gap = sorted[0] - sorted[k];
  return 1.0 / std::max(gap, epsilon);
}

double uncertainty(FeatureView features, const RelevanceModel& model, std::size_t k, double epsilon) {
  return uncertainty(model.word_posteriors(features), k, epsilon);
}

double kde_within_cluster(const SampleId& id, const ClusterState& state, const PointStore& store, double sigma) {
  const Cluster& cluster = state.cluster_of(id);
  const auto x = store.features(id);
  double sum = 0.0;
  for (const auto& member : cluster.members) sum += gaussian_kernel(x, store.features(member), sigma);
  return sum / static_cast<double>(cluster.members.size());
}

DensityTable::DensityTable(const ClusterState& state, const PointStore& store, double sigma) {
  if (!(sigma > 0.0)) throw InvalidArgument("sigma must be positive");
  for (const auto& cluster : state.clusters) {
    const std::size_t n = cluster.members.size();
    std::vector<FeatureView> feats;
    feats.reserve(n);
    for (const auto& id : cluster.members) feats.push_back(store.features(id));
    std::vector<double> sums(n, 1.0);  // self term
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double k = gaussian_kernel(feats[i], feats[j], sigma);
        sums[i] += k;
        sums[j] += k;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sums[i] / static_cast<double>(n);
      kde_.emplace(cluster.members[i], p);
      global_max_ = std::max(global_max_, p);
    }
  }
}

double DensityTable::kde(const SampleId& id) const {
  const auto it = kde_.find(id);
  if (it == kde_.end()) throw StateError("sample '" + id + "' is not clustered");
  return it->second;
}

double density(const SampleId& id, const ClusterState& state, const PointStore& store, double sigma,
               double global_max) {
  if (!(global_max > 0.0)) throw InvalidArgument("global density maximum must be positive");
  return kde_within_cluster(id, state, store, sigma) / global_max;
}

double diversity(FeatureView features, std::span<const FeatureView> representatives, double sigma) {
  if (representatives.empty()) throw InvalidArgument("diversity needs at least one representative");
  const double self = gaussian_kernel(features, features, sigma);
  double best = 0.0;
  for (const auto& rep : representatives) {
    const double cosine = gaussian_kernel(features, rep, sigma) / std::sqrt(self * gaussian_kernel(rep, rep, sigma));
    best = std::max(best, cosine);
  }
  return 1.0 - best;
}

double informativeness(double unct, double den, double div, const SelectionWeights& weights) {
  return weights.uncertainty * unct + weights.density * den + weights.diversity * div;
}

std::vector<InfoScore> score_unlabeled(std::span<const SampleId> unlabeled, const ScoringInputs& inputs) {
  const DensityTable densities(inputs.clusters, inputs.store, inputs.sigma);
  const auto reps = inputs.clusters.representative_features(inputs.store);

  std::vector<InfoScore> scores;
  scores.reserve(unlabeled.size());
  for (const auto& id : unlabeled) {
    const auto x = inputs.store.features(id);
    InfoScore s;
    s.sample_id = id;
    s.unct = uncertainty(x, inputs.model, inputs.annotation_length, inputs.epsilon);
    s.den = densities.density(id);
    s.div = diversity(x, reps, inputs.sigma);
    scores.push_back(std::move(s));
  }
  if (inputs.rescale_uncertainty && !scores.empty()) {
    const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end(),
                                              [](const InfoScore& a, const InfoScore& b) { return a.unct < b.unct; });
    const double min_u = lo->unct;
    const double span = hi->unct - min_u;
    for (auto& s : scores) s.unct = span > 0 ? (s.unct - min_u) / span : 0.0;
  }
  for (auto& s : scores) s.info = informativeness(s.unct, s.den, s.div, inputs.weights);
  return scores;
}

std::vector<SampleId> select_batch(std::span<const InfoScore> scores, std::size_t batch_size) {
  std::vector<const InfoScore*> order;
  order.reserve(scores.size());
  for (const auto& s : scores) order.push_back(&s);
  const std::size_t take = std::min(batch_size, order.size());
  auto by_info = [](const InfoScore* a, const InfoScore* b) {
    if (a->info != b->info) return a->info > b->info;
    return a->sample_id < b->sample_id;
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(), by_info);
  std::vector<SampleId> batch;
  batch.reserve(take);
  for (std::size_t i = 0; i < take; ++i) batch.push_back(order[i]->sample_id);
  return batch;
}

std::vector<SampleId> select_batch_random(std::span<const SampleId> unlabeled, std::size_t batch_size,
                                          std::uint64_t seed) {
  std::vector<SampleId> pool(unlabeled.begin(), unlabeled.end());
  std::sort(pool.begin(), pool.end());
  std::mt19937_64 rng(seed);
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(std::min(batch_size, pool.size()));
  return pool;
}

}  // namespace crmactive
