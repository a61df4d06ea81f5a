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

#include "crmactive/engine.hpp"

#include <algorithm>
#include <set>

#include "crmactive/error.hpp"
#include "crmactive/evaluation.hpp"
#include "crmactive/kernels.hpp"

namespace crmactive {

nlohmann::json to_json(const RoundMetrics& m) {
  return {{"round", m.round},
          {"labeled_count", m.labeled_count},
          {"annotation_ap", m.annotation_ap},
          {"retrieval_ap", m.retrieval_ap},
          {"per_concept_precision", m.per_concept_precision}};
}

RoundMetrics metrics_from_json(const nlohmann::json& j) {
  RoundMetrics m;
  m.round = j.at("round").get<std::size_t>();
  m.labeled_count = j.at("labeled_count").get<std::size_t>();
  m.annotation_ap = j.at("annotation_ap").get<double>();
  m.retrieval_ap = j.at("retrieval_ap").get<double>();
  m.per_concept_precision = j.at("per_concept_precision").get<std::vector<double>>();
  return m;
}

std::string_view to_string(Strategy s) { return s == Strategy::crm_active ? "crm_active" : "random"; }

std::string_view to_string(SessionStatus s) {
  switch (s) {
    case SessionStatus::created:
      return "created";
    case SessionStatus::awaiting_labels:
      return "awaiting_labels";
    case SessionStatus::finished:
      return "finished";
  }
  return "unknown";
}

LabelSet GroundTruthOracle::label(const Sample& sample) {
  if (!sample.labels) throw Error("ground-truth oracle has no labels for '" + sample.id + "'");
  return *sample.labels;
}

Session::Session(const Dataset& dataset, RunConfig config, Strategy strategy)
    : dataset_(&dataset), config_(std::move(config)), strategy_(strategy), rng_(config_.seed) {
  config_.validate_for(dataset);
}

const RelevanceModel& Session::model() const {
  if (!model_) throw StateError("session has not been started");
  return *model_;
}

EntropyParams Session::entropy_params() const {
  return EntropyParams{KernelParams{sigma_, gamma_}, config_.normalize_entropy_kernel};
}

std::vector<TrainingPoint> Session::training_points() const {
  std::vector<TrainingPoint> points;
  points.reserve(labeled_.size());
  for (const auto& id : labeled_) {
    const auto f = store_.features(id);
    points.push_back({id, std::vector<double>(f.begin(), f.end()), *store_.labels(id)});
  }
  return points;
}

void Session::start() {
  if (status_ != SessionStatus::created) throw StateError("session already started");
  const Dataset& data = *dataset_;
  const auto training = data.training_ids();
  for (const auto& id : training) store_.add(id, data.sample(id).features);
  for (const auto& id : data.splits().initial_labeled) store_.reveal(id, *data.sample(id).labels);
  labeled_ = data.splits().initial_labeled;
  unlabeled_ = data.splits().unlabeled;
  std::sort(unlabeled_.begin(), unlabeled_.end());

  if (config_.sigma) {
    sigma_ = *config_.sigma;
  } else {
    std::vector<FeatureView> feats;
    feats.reserve(training.size());
    for (const auto& id : training) feats.push_back(store_.features(id));
    sigma_ = median_distance_bandwidth(feats, config_.seed);
  }

  const auto active = data.normalization().active_dims();
  if (config_.lambda && config_.beta) {
    smoothing_ = {*config_.lambda, *config_.beta};
  } else {
    SmoothingSearch search;
    search.annotation_length = config_.annotation_length;
    search.folds = config_.cv_folds;
    search.lambda_grid = config_.lambda ? std::vector<double>{*config_.lambda} : config_.lambda_grid;
    search.beta_grid = config_.beta ? std::vector<double>{*config_.beta} : config_.beta_grid;
    smoothing_ = select_smoothing(training_points(), search, active);
  }

  if (strategy_ == Strategy::crm_active) {
    const std::size_t k_max = config_.xmeans_k_max.value_or(default_k_max(training.size()));
    clusters_ = initial_clustering(store_, training, config_.xmeans_k_min, k_max, config_.seed);
  }
  begin_round();
}

void Session::begin_round() {
  model_ = RelevanceModel::train(training_points(), smoothing_, dataset_->normalization().active_dims());

  const auto test = dataset_->test_samples();
  const auto annotation = evaluate_annotation(*model_, test, config_.annotation_length);
  const auto retrieval = evaluate_retrieval(*model_, test, config_.retrieval_depth);
  history_.push_back({round_, labeled_.size(), annotation.mean, retrieval.mean, annotation.per_concept});

  batch_.clear();
  scores_.clear();
  if (unlabeled_.empty()) {
    status_ = SessionStatus::finished;
    return;
  }

  if (strategy_ == Strategy::crm_active) {
    std::vector<LabelSet> labels;
    labels.reserve(labeled_.size());
    for (const auto& id : labeled_) labels.push_back(*store_.labels(id));
    gamma_ = estimate_gamma(labels);
    update_h_worst(clusters_, store_, entropy_params());

    const ScoringInputs inputs{*model_, clusters_, store_, sigma_, config_.annotation_length,
                               config_.epsilon, config_.weights, config_.rescale_uncertainty};
    scores_ = score_unlabeled(unlabeled_, inputs);
    batch_ = select_batch(scores_, config_.batch_size);
  } else {
    batch_ = select_batch_random(unlabeled_, config_.batch_size, rng_());
  }
  status_ = SessionStatus::awaiting_labels;
}

void Session::complete_round(const std::map<SampleId, LabelSet>& labels) {
  if (status_ != SessionStatus::awaiting_labels) throw StateError("session is not awaiting labels");
  if (labels.size() != batch_.size()) throw InvalidArgument("labels must cover exactly the current batch");
  for (const auto& id : batch_) {
    const auto it = labels.find(id);
    if (it == labels.end()) throw InvalidArgument("missing labels for batch member '" + id + "'");
    if (it->second.size() != dataset_->num_concepts()) throw InvalidArgument("label vector for '" + id + "' has wrong length");
  }

  for (const auto& id : batch_) {
    store_.reveal(id, labels.at(id));
    labeled_.push_back(id);
    labeling_order_.push_back({round_, id});
  }
  const std::set<SampleId> taken(batch_.begin(), batch_.end());
  std::erase_if(unlabeled_, [&](const SampleId& id) { return taken.contains(id); });

  if (strategy_ == Strategy::crm_active) refine_after_batch(clusters_, batch_, store_, entropy_params());
  ++round_;
  begin_round();
}

nlohmann::json Session::snapshot() const {
  nlohmann::json history = nlohmann::json::array();
  for (const auto& m : history_) history.push_back(to_json(m));
  nlohmann::json order = nlohmann::json::array();
  for (const auto& e : labeling_order_) order.push_back({{"round", e.round}, {"sample_id", e.sample_id}});
  nlohmann::json clusters = nlohmann::json::array();
  for (const auto& c : clusters_.clusters) {
    clusters.push_back({{"id", c.id},
                        {"members", c.members},
                        {"representative", c.representative},
                        {"labeled_members", c.labeled_members},
                        {"centroid", c.centroid}});
  }
  nlohmann::json scores = nlohmann::json::array();
  for (const auto& s : scores_) {
    scores.push_back({{"sample_id", s.sample_id}, {"unct", s.unct}, {"den", s.den}, {"div", s.div}, {"info", s.info}});
  }
  return {{"status", to_string(status_)},
          {"strategy", to_string(strategy_)},
          {"round", round_},
          {"labeled", labeled_},
          {"unlabeled", unlabeled_},
          {"batch", batch_},
          {"scores", std::move(scores)},
          {"history", std::move(history)},
          {"labeling_order", std::move(order)},
          {"sigma", sigma_},
          {"lambda", smoothing_.lambda},
          {"beta", smoothing_.beta},
          {"gamma", gamma_},
          {"h_worst", clusters_.h_worst ? nlohmann::json(*clusters_.h_worst) : nlohmann::json()},
          {"clusters", std::move(clusters)}};
}

SessionResult run_session(const Dataset& dataset, const RunConfig& config, Oracle& oracle, Strategy strategy) {
  Session session(dataset, config, strategy);
  session.start();
  SessionResult result;
  while (session.status() == SessionStatus::awaiting_labels) {
    result.score_dumps.push_back(session.current_scores());
    result.batches.push_back(session.current_batch());
    std::map<SampleId, LabelSet> labels;
    for (const auto& id : session.current_batch()) labels.emplace(id, oracle.label(dataset.sample(id)));
    session.complete_round(labels);
  }
  result.history = session.history();
  result.labeling_order = session.labeling_order();
  if (strategy == Strategy::crm_active) {
    result.clusters = cluster_summary(session.clusters(), session.store(), session.entropy_params());
  }
  result.model = session.model().to_json();
  return result;
}

std::vector<RoundMetrics> average_histories(std::span<const std::vector<RoundMetrics>> histories) {
  if (histories.empty()) throw InvalidArgument("nothing to average");
  const std::size_t rounds = histories.front().size();
  for (const auto& h : histories) {
    if (h.size() != rounds) throw InvalidArgument("histories differ in length");
  }
  const double n = static_cast<double>(histories.size());
  std::vector<RoundMetrics> avg = histories.front();
  for (std::size_t r = 0; r < rounds; ++r) {
    auto& m = avg[r];
    m.annotation_ap = 0.0;
    m.retrieval_ap = 0.0;
    std::fill(m.per_concept_precision.begin(), m.per_concept_precision.end(), 0.0);
    for (const auto& h : histories) {
      m.annotation_ap += h[r].annotation_ap;
      m.retrieval_ap += h[r].retrieval_ap;
      for (std::size_t d = 0; d < m.per_concept_precision.size(); ++d) {
        m.per_concept_precision[d] += h[r].per_concept_precision.at(d);
      }
    }
    m.annotation_ap /= n;
    m.retrieval_ap /= n;
    for (double& p : m.per_concept_precision) p /= n;
  }
  return avg;
}

BaselineResult run_baseline_random(const Dataset& dataset, const RunConfig& config,
                                   std::span<const std::uint64_t> seeds) {
  if (seeds.empty()) throw InvalidArgument("random baseline needs at least one seed");
  BaselineResult result;
  GroundTruthOracle oracle;
  for (std::uint64_t seed : seeds) {
    RunConfig run = config;
    run.seed = seed;
    result.seeds.push_back(seed);
    result.per_seed.push_back(run_session(dataset, run, oracle, Strategy::random).history);
  }
  result.averaged = average_histories(result.per_seed);
  return result;
}

}  // namespace crmactive
