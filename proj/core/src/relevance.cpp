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

#include "crmactive/relevance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "crmactive/error.hpp"
#include "crmactive/evaluation.hpp"
#include "crmactive/log_math.hpp"

namespace crmactive {

RelevanceModel RelevanceModel::train(std::vector<TrainingPoint> training, SmoothingParams smoothing,
                                     std::vector<bool> active_dims) {
  if (training.empty()) throw InvalidArgument("cannot train on an empty labeled set");
  if (!(smoothing.lambda >= 0.0 && smoothing.lambda <= 1.0)) throw InvalidArgument("lambda must be in [0,1]");
  if (!(smoothing.beta > 0.0)) throw InvalidArgument("beta must be positive");

  RelevanceModel model;
  model.num_concepts_ = training.front().labels.size();
  model.feature_dim_ = training.front().features.size();
  if (model.num_concepts_ == 0) throw InvalidArgument("training point '" + training.front().id + "' is unlabeled");
  for (const auto& p : training) {
    if (p.labels.size() != model.num_concepts_) throw InvalidArgument("training point '" + p.id + "' is unlabeled");
    if (p.features.size() != model.feature_dim_) throw InvalidArgument("training point '" + p.id + "' has wrong dimension");
  }
  if (active_dims.empty()) active_dims.assign(model.feature_dim_, true);
  if (active_dims.size() != model.feature_dim_) throw InvalidArgument("active dimension mask has wrong length");

  model.training_ = std::move(training);
  model.smoothing_ = smoothing;
  model.active_dims_ = std::move(active_dims);
  model.precompute();
  return model;
}

void RelevanceModel::precompute() {
  collection_counts_.assign(num_concepts_, 0.0);
  for (const auto& p : training_) {
    for (std::size_t w : p.labels.positives()) collection_counts_[w] += 1.0;
  }
  vocab_total_ = std::accumulate(collection_counts_.begin(), collection_counts_.end(), 0.0);

  const double lambda = smoothing_.lambda;
  log_word_given_point_.assign(training_.size() * num_concepts_, kNegInf);
  for (std::size_t j = 0; j < training_.size(); ++j) {
    const auto& labels = training_[j].labels;
    const double m = static_cast<double>(labels.count());
    for (std::size_t w = 0; w < num_concepts_; ++w) {
      const double own = (labels.test(w) && m > 0) ? (1.0 - lambda) / m : 0.0;
      const double background = vocab_total_ > 0 ? lambda * collection_counts_[w] / vocab_total_ : 0.0;
      const double p = own + background;
      log_word_given_point_[j * num_concepts_ + w] = p > 0 ? std::log(p) : kNegInf;
    }
  }
}

void RelevanceModel::check_features(FeatureView features) const {
  if (features.size() != feature_dim_) {
    throw InvalidArgument("feature vector has " + std::to_string(features.size()) + " dimensions, model expects " +
                          std::to_string(feature_dim_));
  }
}

std::vector<double> RelevanceModel::feature_terms(FeatureView features) const {
  check_features(features);
  const double beta = smoothing_.beta;
  const double log_norm = -0.5 * std::log(2.0 * std::numbers::pi * beta);
  const double log_prior = -std::log(static_cast<double>(training_.size()));
  std::vector<double> terms(training_.size(), log_prior);
  for (std::size_t j = 0; j < training_.size(); ++j) {
    const auto& r = training_[j].features;
    double sum = 0.0;
    for (std::size_t i = 0; i < feature_dim_; ++i) {
      if (!active_dims_[i]) continue;
      const double d = features[i] - r[i];
      sum += log_norm - d * d / (2.0 * beta);
    }
    terms[j] += sum;
  }
  return terms;
}

double RelevanceModel::log_joint(std::span<const std::size_t> words, FeatureView features) const {
  std::vector<std::size_t> unique(words.begin(), words.end());
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  for (std::size_t w : unique) {
    if (w >= num_concepts_) throw InvalidArgument("unknown concept index " + std::to_string(w));
  }
  auto terms = feature_terms(features);
  for (std::size_t j = 0; j < terms.size(); ++j) {
    for (std::size_t w : unique) terms[j] += log_word_given_point_[j * num_concepts_ + w];
  }
  return log_sum_exp(terms);
}

std::vector<double> RelevanceModel::word_posteriors(FeatureView features) const {
  const auto terms = feature_terms(features);
  std::vector<double> log_joint_by_word(num_concepts_);
  std::vector<double> scratch(training_.size());
  for (std::size_t w = 0; w < num_concepts_; ++w) {
    for (std::size_t j = 0; j < training_.size(); ++j) {
      scratch[j] = terms[j] + log_word_given_point_[j * num_concepts_ + w];
    }
    log_joint_by_word[w] = log_sum_exp(scratch);
  }
  const double log_evidence = log_sum_exp(log_joint_by_word);
  if (log_evidence == kNegInf) throw Error("relevance model assigns zero probability to every concept");
  std::vector<double> posteriors(num_concepts_);
  for (std::size_t w = 0; w < num_concepts_; ++w) posteriors[w] = std::exp(log_joint_by_word[w] - log_evidence);
  return posteriors;
}

std::vector<ConceptScore> RelevanceModel::rank_concepts(std::span<const double> posteriors) {
  std::vector<ConceptScore> ranked(posteriors.size());
  for (std::size_t w = 0; w < posteriors.size(); ++w) ranked[w] = {w, posteriors[w]};
  std::stable_sort(ranked.begin(), ranked.end(), [](const ConceptScore& a, const ConceptScore& b) {
    return a.posterior > b.posterior;
  });
  return ranked;
}

std::vector<ConceptScore> RelevanceModel::annotate(FeatureView features, std::size_t k) const {
  if (k < 1 || k > num_concepts_) throw InvalidArgument("annotation length must be in [1, D]");
  auto ranked = rank_concepts(word_posteriors(features));
  ranked.resize(k);
  return ranked;
}

std::vector<RankedSample> RelevanceModel::rank_by_posterior(std::size_t word, std::span<const SampleId> ids,
                                                            std::span<const std::vector<double>> posteriors,
                                                            std::size_t t) {
  if (ids.size() != posteriors.size()) throw InvalidArgument("ids and posteriors differ in length");
  if (t > ids.size()) throw InvalidArgument("retrieval depth exceeds the candidate count");
  std::vector<RankedSample> ranked;
  ranked.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ranked.push_back({ids[i], posteriors[i].at(word)});
  std::sort(ranked.begin(), ranked.end(), [](const RankedSample& a, const RankedSample& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  });
  ranked.resize(t);
  return ranked;
}

std::vector<RankedSample> RelevanceModel::retrieve(std::size_t word, std::span<const Sample* const> candidates,
                                                   std::size_t t) const {
  if (word >= num_concepts_) throw InvalidArgument("unknown concept index " + std::to_string(word));
  if (t > candidates.size()) throw InvalidArgument("retrieval depth exceeds the candidate count");
  std::vector<SampleId> ids;
  std::vector<std::vector<double>> posteriors;
  ids.reserve(candidates.size());
  posteriors.reserve(candidates.size());
  for (const Sample* s : candidates) {
    ids.push_back(s->id);
    posteriors.push_back(word_posteriors(s->features));
  }
  return rank_by_posterior(word, ids, posteriors, t);
}

nlohmann::json RelevanceModel::to_json() const {
  nlohmann::json training = nlohmann::json::array();
  for (const auto& p : training_) {
    training.push_back({{"id", p.id}, {"features", p.features}, {"labels", p.labels.positives()}});
  }
  return {{"lambda", smoothing_.lambda},
          {"beta", smoothing_.beta},
          {"num_concepts", num_concepts_},
          {"feature_dim", feature_dim_},
          {"active_dims", active_dims_},
          {"collection_counts", collection_counts_},
          {"training", std::move(training)}};
}

RelevanceModel RelevanceModel::from_json(const nlohmann::json& j) {
  try {
    const auto num_concepts = j.at("num_concepts").get<std::size_t>();
    std::vector<TrainingPoint> training;
    for (const auto& p : j.at("training")) {
      const auto positives = p.at("labels").get<std::vector<std::size_t>>();
      training.push_back({p.at("id").get<std::string>(), p.at("features").get<std::vector<double>>(),
                          LabelSet::from_indices(num_concepts, positives)});
    }
    return train(std::move(training), {j.at("lambda").get<double>(), j.at("beta").get<double>()},
                 j.at("active_dims").get<std::vector<bool>>());
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed model: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw DataError(std::string("invalid model: ") + e.what());
  }
}

SmoothingParams select_smoothing(std::span<const TrainingPoint> labeled, const SmoothingSearch& search,
                                 const std::vector<bool>& active_dims) {
  if (labeled.empty()) throw InvalidArgument("cannot cross-validate on an empty labeled set");
  if (search.lambda_grid.empty() || search.beta_grid.empty()) throw InvalidArgument("empty smoothing grid");
  const std::size_t n = labeled.size();
  if (n < 2) return {search.lambda_grid[search.lambda_grid.size() / 2], search.beta_grid[search.beta_grid.size() / 2]};
  const std::size_t folds = std::clamp<std::size_t>(search.folds, 2, n);
  const std::size_t k = std::min(search.annotation_length, labeled.front().labels.size());

  SmoothingParams best{search.lambda_grid.front(), search.beta_grid.front()};
  double best_score = -1.0;
  for (double lambda : search.lambda_grid) {
    for (double beta : search.beta_grid) {
      std::vector<LabelSet> predicted;
      std::vector<LabelSet> truth;
      for (std::size_t f = 0; f < folds; ++f) {
        std::vector<TrainingPoint> train_part;
        for (std::size_t i = 0; i < n; ++i) {
          if (i % folds != f) train_part.push_back(labeled[i]);
        }
        const auto model = RelevanceModel::train(std::move(train_part), {lambda, beta}, active_dims);
        for (std::size_t i = f; i < n; i += folds) {
          LabelSet guess(model.num_concepts());
          for (const auto& c : model.annotate(labeled[i].features, k)) guess.set(c.word);
          predicted.push_back(std::move(guess));
          truth.push_back(labeled[i].labels);
        }
      }
      const double score = annotation_precision(predicted, truth).mean;
      if (score > best_score) {
        best_score = score;
        best = {lambda, beta};
      }
    }
  }
  return best;
}

}  // namespace crmactive
