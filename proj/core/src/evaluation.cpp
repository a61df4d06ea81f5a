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

#include "crmactive/evaluation.hpp"

#include <numeric>
#include <unordered_map>

#include "crmactive/error.hpp"

namespace crmactive {

PrecisionResult annotation_precision(std::span<const LabelSet> predicted, std::span<const LabelSet> truth) {
  if (predicted.size() != truth.size()) throw InvalidArgument("prediction and truth counts differ");
  if (predicted.empty()) throw InvalidArgument("no samples to evaluate");
  const std::size_t num_concepts = truth.front().size();
  std::vector<double> tp(num_concepts, 0.0);
  std::vector<double> predicted_count(num_concepts, 0.0);
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i].size() != num_concepts || truth[i].size() != num_concepts) {
      throw InvalidArgument("label vectors differ in length");
    }
    for (std::size_t w : predicted[i].positives()) {
      predicted_count[w] += 1.0;
      if (truth[i].test(w)) tp[w] += 1.0;
    }
  }
  PrecisionResult result;
  result.per_concept.resize(num_concepts);
  for (std::size_t w = 0; w < num_concepts; ++w) {
    result.per_concept[w] = predicted_count[w] > 0 ? tp[w] / predicted_count[w] : 0.0;
  }
  result.mean = std::accumulate(result.per_concept.begin(), result.per_concept.end(), 0.0) /
                static_cast<double>(num_concepts);
  return result;
}

PrecisionResult evaluate_annotation(const RelevanceModel& model, std::span<const Sample* const> test, std::size_t k) {
  if (test.empty()) throw InvalidArgument("empty test set");
  std::vector<LabelSet> predicted;
  std::vector<LabelSet> truth;
  predicted.reserve(test.size());
  truth.reserve(test.size());
  for (const Sample* s : test) {
    if (!s->labels) throw InvalidArgument("test sample '" + s->id + "' has no ground truth");
    LabelSet guess(model.num_concepts());
    for (const auto& c : model.annotate(s->features, k)) guess.set(c.word);
    predicted.push_back(std::move(guess));
    truth.push_back(*s->labels);
  }
  return annotation_precision(predicted, truth);
}

PrecisionResult evaluate_retrieval(const RelevanceModel& model, std::span<const Sample* const> test, std::size_t t) {
  if (test.empty()) throw InvalidArgument("empty test set");
  if (t < 1 || t > test.size()) throw InvalidArgument("retrieval depth must be in [1, |test|]");
  std::vector<SampleId> ids;
  std::vector<std::vector<double>> posteriors;
  std::vector<const LabelSet*> truth;
  for (const Sample* s : test) {
    if (!s->labels) throw InvalidArgument("test sample '" + s->id + "' has no ground truth");
    ids.push_back(s->id);
    posteriors.push_back(model.word_posteriors(s->features));
    truth.push_back(&*s->labels);
  }
  std::unordered_map<SampleId, const LabelSet*> truth_of;
  for (std::size_t i = 0; i < ids.size(); ++i) truth_of.emplace(ids[i], truth[i]);

  PrecisionResult result;
  result.per_concept.resize(model.num_concepts());
  for (std::size_t w = 0; w < model.num_concepts(); ++w) {
    const auto ranked = RelevanceModel::rank_by_posterior(w, ids, posteriors, t);
    double hits = 0.0;
    for (const auto& r : ranked) {
      if (truth_of.at(r.id)->test(w)) hits += 1.0;
    }
    result.per_concept[w] = hits / static_cast<double>(t);
  }
  result.mean = std::accumulate(result.per_concept.begin(), result.per_concept.end(), 0.0) /
                static_cast<double>(model.num_concepts());
  return result;
}

}  // namespace crmactive
