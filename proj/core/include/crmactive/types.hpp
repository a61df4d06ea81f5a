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
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace crmactive {

using SampleId = std::string;
using FeatureView = std::span<const double>;

struct Concept {
  std::string name;
  std::size_t index = 0;
};

// Presence/absence of each vocabulary concept for one sample.
class LabelSet {
 public:
  LabelSet() = default;
  explicit LabelSet(std::size_t num_concepts) : bits_(num_concepts, 0) {}

  static LabelSet from_indices(std::size_t num_concepts, std::span<const std::size_t> positives);

  std::size_t size() const { return bits_.size(); }
  bool test(std::size_t word) const { return bits_.at(word) != 0; }
  void set(std::size_t word, bool present = true) { bits_.at(word) = present ? 1 : 0; }

  std::size_t count() const;
  std::vector<std::size_t> positives() const;
  bool shares_concept_with(const LabelSet& other) const;

  friend bool operator==(const LabelSet&, const LabelSet&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

struct Sample {
  SampleId id;
  std::vector<double> raw_features;
  // z-scored with the training-split statistics of the owning dataset
  std::vector<double> features;
  std::optional<LabelSet> labels;
};

}  // namespace crmactive
