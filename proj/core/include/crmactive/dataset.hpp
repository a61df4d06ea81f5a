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
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "crmactive/types.hpp"

namespace crmactive {

struct Splits {
  std::vector<SampleId> initial_labeled;
  std::vector<SampleId> unlabeled;
  std::vector<SampleId> test;
};

// Per-dimension z-score parameters estimated on the training split (initial
// labeled + unlabeled). Dimensions with zero variance map to a constant 0 and
// are flagged so Gaussian products can skip them.
struct NormalizationStats {
  std::vector<double> mean;
  std::vector<double> stddev;
  std::vector<bool> zero_variance;

  std::vector<double> apply(FeatureView raw) const;
  std::vector<bool> active_dims() const;
  std::size_t num_active() const;
};

nlohmann::json to_json(const NormalizationStats& stats);
NormalizationStats normalization_from_json(const nlohmann::json& j);

// Immutable after construction; the constructor validates every ingestion
// invariant and throws DataError on the first violation.
class Dataset {
 public:
  Dataset(std::vector<std::string> vocabulary, std::size_t feature_dim, std::vector<Sample> samples,
          Splits splits);

  const std::vector<Concept>& vocabulary() const { return vocabulary_; }
  std::vector<std::string> concept_names() const;
  std::size_t num_concepts() const { return vocabulary_.size(); }
  std::size_t feature_dim() const { return feature_dim_; }

  std::span<const Sample> samples() const { return samples_; }
  bool contains(const SampleId& id) const { return index_.contains(id); }
  const Sample& sample(const SampleId& id) const;

  const Splits& splits() const { return splits_; }
  const NormalizationStats& normalization() const { return normalization_; }

  // initial_labeled followed by unlabeled, in file order
  std::vector<SampleId> training_ids() const;
  std::vector<const Sample*> test_samples() const;

  std::optional<std::size_t> concept_index(std::string_view name) const;
  LabelSet labels_from_names(std::span<const std::string> names) const;
  std::vector<std::string> label_names(const LabelSet& labels) const;

 private:
  void validate_and_normalize();

  std::vector<Concept> vocabulary_;
  std::size_t feature_dim_ = 0;
  std::vector<Sample> samples_;
  std::unordered_map<SampleId, std::size_t> index_;
  Splits splits_;
  NormalizationStats normalization_;
};

enum class DatasetFormat { json, csv };

// Format inferred from the extension (.csv, otherwise JSON).
DatasetFormat format_for_path(const std::filesystem::path& path);

Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format);
Dataset load_dataset(const std::filesystem::path& path);

Dataset dataset_from_json(const nlohmann::json& doc);
nlohmann::json dataset_to_json(const Dataset& dataset);

// CSV files carry `id,f0..f{M-1},labels`; splits (and optionally the
// vocabulary order) live in a sidecar `<stem>.splits.json`.
Dataset dataset_from_csv(std::string_view csv_text, const nlohmann::json& sidecar);
std::filesystem::path csv_sidecar_path(const std::filesystem::path& csv_path);

void save_dataset(const Dataset& dataset, const std::filesystem::path& path, DatasetFormat format);
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);

}  // namespace crmactive
