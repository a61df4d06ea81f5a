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
#include <span>
#include <vector>

#include "crmactive/relevance.hpp"
#include "crmactive/types.hpp"

namespace crmactive {

struct PrecisionResult {
  std::vector<double> per_concept;  // one value per vocabulary concept
  double mean = 0.0;                // unweighted mean over concepts ("AP")
};

// Per-concept precision TP/(TP+FP) over samples where the concept was
// predicted; a concept that is never predicted scores 0.
PrecisionResult annotation_precision(std::span<const LabelSet> predicted, std::span<const LabelSet> truth);

// Top-k annotation of every test sample, scored with annotation_precision.
PrecisionResult evaluate_annotation(const RelevanceModel& model, std::span<const Sample* const> test,
                                    std::size_t k);

// Single-concept queries over the test samples; precision@t averaged over the
// vocabulary.
PrecisionResult evaluate_retrieval(const RelevanceModel& model, std::span<const Sample* const> test,
                                   std::size_t t);

}  // namespace crmactive
