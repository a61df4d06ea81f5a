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

#include "crmactive/exports.hpp"

#include <set>

#include "crmactive/error.hpp"

namespace crmactive {

namespace {

// Shortest representation that round-trips.
std::string num(double v) { return nlohmann::json(v).dump(); }

}  // namespace

void write_metrics_csv(std::ostream& out, std::span<const RoundMetrics> history) {
  out << "round,labeled_count,annotation_ap,retrieval_ap\n";
  for (const auto& m : history) {
    out << m.round << ',' << m.labeled_count << ',' << num(m.annotation_ap) << ',' << num(m.retrieval_ap) << '\n';
  }
}

void write_concept_csv(std::ostream& out, std::span<const RoundMetrics> history,
                       std::span<const std::string> vocabulary) {
  out << "round,concept,precision\n";
  for (const auto& m : history) {
    if (m.per_concept_precision.size() != vocabulary.size()) throw InvalidArgument("vocabulary size mismatch");
    for (std::size_t d = 0; d < vocabulary.size(); ++d) {
      out << m.round << ',' << vocabulary[d] << ',' << num(m.per_concept_precision[d]) << '\n';
    }
  }
}

void write_score_csv(std::ostream& out, std::span<const std::vector<InfoScore>> rounds,
                     std::span<const std::vector<SampleId>> batches) {
  out << "round,sample_id,unct,den,div,info,selected\n";
  for (std::size_t r = 0; r < rounds.size(); ++r) {
    std::set<SampleId> selected;
    if (r < batches.size()) selected.insert(batches[r].begin(), batches[r].end());
    for (const auto& s : rounds[r]) {
      out << r << ',' << s.sample_id << ',' << num(s.unct) << ',' << num(s.den) << ',' << num(s.div) << ','
          << num(s.info) << ',' << (selected.contains(s.sample_id) ? 1 : 0) << '\n';
    }
  }
}

nlohmann::json labeling_order_json(std::span<const LabelingEvent> order) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& e : order) out.push_back({{"round", e.round}, {"sample_id", e.sample_id}});
  return out;
}

}  // namespace crmactive
