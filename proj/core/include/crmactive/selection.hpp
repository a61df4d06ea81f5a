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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "crmactive/clustering.hpp"
#include "crmactive/config.hpp"
#include "crmactive/relevance.hpp"
#include "crmactive/types.hpp"

namespace crmactive {

struct InfoScore {
  SampleId sample_id;
  double unct = 0.0;
  double den = 0.0;
  double div = 0.0;
  double info = 0.0;
};

// 1 / max(P(w_1|x) - P(w_{k+1}|x), epsilon) over the posterior-ranked concepts.
double uncertainty(std::span<const double> posteriors, std::size_t k, double epsilon);
double uncertainty(FeatureView features, const RelevanceModel& model, std::size_t k, double epsilon);

// Kernel density of every clustered point, each taken within its own cluster:
// p(x) = 1/|C| sum_{x_i in C} K_gauss(x, x_i).
class DensityTable {
 public:
  DensityTable(const ClusterState& state, const PointStore& store, double sigma);

  double kde(const SampleId& id) const;
  double global_max() const { return global_max_; }
  double density(const SampleId& id) const { return kde(id) / global_max_; }

 private:
  std::unordered_map<SampleId, double> kde_;
  double global_max_ = 0.0;
};

double kde_within_cluster(const SampleId& id, const ClusterState& state, const PointStore& store, double sigma);
double density(const SampleId& id, const ClusterState& state, const PointStore& store, double sigma,
               double global_max);

// 1 - max_i K(x, s_i) / sqrt(K(x,x) K(s_i,s_i)) over the representatives.
double diversity(FeatureView features, std::span<const FeatureView> representatives, double sigma);

double informativeness(double unct, double den, double div, const SelectionWeights& weights);

struct ScoringInputs {
  const RelevanceModel& model;
  const ClusterState& clusters;
  const PointStore& store;
  double sigma = 1.0;
  std::size_t annotation_length = 1;
  double epsilon = 1e-9;
  SelectionWeights weights;
  bool rescale_uncertainty = false;
};

std::vector<InfoScore> score_unlabeled(std::span<const SampleId> unlabeled, const ScoringInputs& inputs);

// Descending info, ties by ascending id; min(K, |scores|) ids.
std::vector<SampleId> select_batch(std::span<const InfoScore> scores, std::size_t batch_size);

// Uniform draw without replacement.
std::vector<SampleId> select_batch_random(std::span<const SampleId> unlabeled, std::size_t batch_size,
                                          std::uint64_t seed);

}  // namespace crmactive
