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

#include "crmactive/types.hpp"

#include <algorithm>

#include "crmactive/error.hpp"

namespace crmactive {

LabelSet LabelSet::from_indices(std::size_t num_concepts, std::span<const std::size_t> positives) {
  LabelSet labels(num_concepts);
  for (std::size_t d : positives) {
    if (d >= num_concepts) throw InvalidArgument("concept index out of range");
    labels.set(d);
  }
  return labels;
}

std::size_t LabelSet::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::vector<std::size_t> LabelSet::positives() const {
  std::vector<std::size_t> out;
  for (std::size_t d = 0; d < bits_.size(); ++d) {
    if (bits_[d]) out.push_back(d);
  }
  return out;
}

bool LabelSet::shares_concept_with(const LabelSet& other) const {
  const std::size_t n = std::min(bits_.size(), other.bits_.size());
  for (std::size_t d = 0; d < n; ++d) {
    if (bits_[d] && other.bits_[d]) return true;
  }
  return false;
}

}  // namespace crmactive
