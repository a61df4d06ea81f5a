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
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "crmactive/clustering.hpp"
#include "crmactive/config.hpp"
#include "crmactive/dataset.hpp"
#include "crmactive/relevance.hpp"
#include "crmactive/selection.hpp"

namespace crmactive {

struct RoundMetrics {
  std::size_t round = 0;
  std::size_t labeled_count = 0;
  double annotation_ap = 0.0;
  double retrieval_ap = 0.0;
  std::vector<double> per_concept_precision;

  friend bool operator==(const RoundMetrics&, const RoundMetrics&) = default;
};

nlohmann::json to_json(const RoundMetrics& m);
RoundMetrics metrics_from_json(const nlohmann::json& j);

struct LabelingEvent {
  std::size_t round = 0;  // round whose evaluation preceded the selection
  SampleId sample_id;
};

enum class Strategy { crm_active, random };
enum class SessionStatus { created, awaiting_labels, finished };

std::string_view to_string(Strategy s);
std::string_view to_string(SessionStatus s);

class Oracle {
 public:
  virtual ~Oracle() = default;
  virtual LabelSet label(const Sample& sample) = 0;
};

// Answers from the dataset's hidden labels.
class GroundTruthOracle : public Oracle {
 public:
  LabelSet label(const Sample& sample) override;
};

// One active-learning run. Rounds are driven externally: start() trains and
// evaluates on the initial labeled set and issues the first batch;
// complete_round() accepts the batch labels, refines clusters, retrains,
// evaluates and issues the next batch. The dataset must outlive the session.
class Session {
 public:
  Session(const Dataset& dataset, RunConfig config, Strategy strategy = Strategy::crm_active);

  void start();
  void complete_round(const std::map<SampleId, LabelSet>& labels);

  SessionStatus status() const { return status_; }
  Strategy strategy() const { return strategy_; }
  std::size_t round() const { return round_; }
  const RunConfig& config() const { return config_; }
  const Dataset& dataset() const { return *dataset_; }

  const std::vector<SampleId>& current_batch() const { return batch_; }
  const std::vector<InfoScore>& current_scores() const { return scores_; }
  const std::vector<RoundMetrics>& history() const { return history_; }
  const std::vector<LabelingEvent>& labeling_order() const { return labeling_order_; }
  const std::vector<SampleId>& labeled() const { return labeled_; }
  const std::vector<SampleId>& unlabeled() const { return unlabeled_; }

  const RelevanceModel& model() const;
  const ClusterState& clusters() const { return clusters_; }
  const PointStore& store() const { return store_; }
  double sigma() const { return sigma_; }
  const SmoothingParams& smoothing() const { return smoothing_; }
  EntropyParams entropy_params() const;

  // Everything that defines the session's logical state, for persistence
  // checks and inspection.
  nlohmann::json snapshot() const;

 private:
  void begin_round();
  std::vector<TrainingPoint> training_points() const;

  const Dataset* dataset_;
  RunConfig config_;
  Strategy strategy_;
  SessionStatus status_ = SessionStatus::created;
  std::size_t round_ = 0;

  PointStore store_;
  ClusterState clusters_;
  std::vector<SampleId> labeled_;
  std::vector<SampleId> unlabeled_;  // sorted
  std::vector<SampleId> batch_;
  std::vector<InfoScore> scores_;
  std::vector<double> gamma_;
  double sigma_ = 1.0;
  SmoothingParams smoothing_;
  std::optional<RelevanceModel> model_;
  std::vector<RoundMetrics> history_;
  std::vector<LabelingEvent> labeling_order_;
  std::mt19937_64 rng_;
};

struct SessionResult {
  std::vector<RoundMetrics> history;
  std::vector<LabelingEvent> labeling_order;
  std::vector<std::vector<InfoScore>> score_dumps;  // per round, before selection
  std::vector<std::vector<SampleId>> batches;
  nlohmann::json clusters;  // final cluster summary (null for random)
  nlohmann::json model;     // final model snapshot
};

SessionResult run_session(const Dataset& dataset, const RunConfig& config, Oracle& oracle,
                          Strategy strategy = Strategy::crm_active);

struct BaselineResult {
  std::vector<std::uint64_t> seeds;
  std::vector<std::vector<RoundMetrics>> per_seed;
  std::vector<RoundMetrics> averaged;
};

std::vector<RoundMetrics> average_histories(std::span<const std::vector<RoundMetrics>> histories);

BaselineResult run_baseline_random(const Dataset& dataset, const RunConfig& config,
                                   std::span<const std::uint64_t> seeds);

}  // namespace crmactive
