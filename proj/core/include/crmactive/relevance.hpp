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
#include <vector>

#include <nlohmann/json.hpp>

#include "crmactive/types.hpp"

namespace crmactive {

struct SmoothingParams {
  double lambda = 0.5;  // word smoothing weight in [0,1]
  double beta = 0.25;   // per-dimension feature variance, > 0
};

struct TrainingPoint {
  SampleId id;
  std::vector<double> features;
  LabelSet labels;
};

struct ConceptScore {
  std::size_t word = 0;
  double posterior = 0.0;
};

struct RankedSample {
  SampleId id;
  double score = 0.0;
};

// Normalized continuous relevance model. Training only snapshots the labeled
// set and its collection statistics; every query sums over the training points
// with a uniform prior P(J) = 1/|T|:
//
//   P(w|J)   = (1-lambda) * [w in J] / m_J + lambda * N_w / sum_v N_v
//   P(r_i|J) = N(r_i; r_i^J, beta)
//
// where m_J is the number of concepts annotating J. Dimensions flagged inactive
// (zero variance on the training split) are left out of the feature product.
class RelevanceModel {
 public:
  static RelevanceModel train(std::vector<TrainingPoint> training, SmoothingParams smoothing,
                              std::vector<bool> active_dims = {});

  std::size_t num_concepts() const { return num_concepts_; }
  std::size_t feature_dim() const { return feature_dim_; }
  std::size_t training_size() const { return training_.size(); }
  const std::vector<TrainingPoint>& training() const { return training_; }
  const SmoothingParams& smoothing() const { return smoothing_; }
  const std::vector<double>& collection_counts() const { return collection_counts_; }
  double vocab_total() const { return vocab_total_; }
  const std::vector<bool>& active_dims() const { return active_dims_; }

  // log P(words, features); words are concept indices.
  double log_joint(std::span<const std::size_t> words, FeatureView features) const;

  // P(w | features) for every concept, normalized over the vocabulary.
  std::vector<double> word_posteriors(FeatureView features) const;

  // Top-k concepts, strictly by descending posterior, ties by concept index.
  std::vector<ConceptScore> annotate(FeatureView features, std::size_t k) const;

  // Top-t candidates by P(concept | features), ties by sample id.
  std::vector<RankedSample> retrieve(std::size_t word, std::span<const Sample* const> candidates,
                                     std::size_t t) const;

  // Ranking shared by retrieve() and the evaluation harness, which computes
  // each candidate's posterior vector once for all queries.
  static std::vector<RankedSample> rank_by_posterior(std::size_t word, std::span<const SampleId> ids,
                                                     std::span<const std::vector<double>> posteriors,
                                                     std::size_t t);
  static std::vector<ConceptScore> rank_concepts(std::span<const double> posteriors);

  nlohmann::json to_json() const;
  static RelevanceModel from_json(const nlohmann::json& j);

 private:
  RelevanceModel() = default;
  void precompute();
  // log P(J) + sum_i log P(r_i|J) for every training point
  std::vector<double> feature_terms(FeatureView features) const;
  void check_features(FeatureView features) const;

  std::vector<TrainingPoint> training_;
  SmoothingParams smoothing_;
  std::size_t num_concepts_ = 0;
  std::size_t feature_dim_ = 0;
  std::vector<bool> active_dims_;
  std::vector<double> collection_counts_;
  double vocab_total_ = 0.0;
  std::vector<double> log_word_given_point_;  // |T| x D, row major
};

struct SmoothingSearch {
  std::size_t annotation_length = 3;
  std::size_t folds = 10;
  std::vector<double> lambda_grid;
  std::vector<double> beta_grid;
};

// Grid search scored by pooled held-out annotation precision. Fold membership
// is position modulo fold count; the first best grid point (lambda-major)
// wins.
SmoothingParams select_smoothing(std::span<const TrainingPoint> labeled, const SmoothingSearch& search,
                                 const std::vector<bool>& active_dims = {});

}  // namespace crmactive
