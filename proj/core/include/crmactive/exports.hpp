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

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "crmactive/engine.hpp"

namespace crmactive {

// round,labeled_count,annotation_ap,retrieval_ap
void write_metrics_csv(std::ostream& out, std::span<const RoundMetrics> history);
// round,concept,precision
void write_concept_csv(std::ostream& out, std::span<const RoundMetrics> history,
                       std::span<const std::string> vocabulary);
// round,sample_id,unct,den,div,info,selected
void write_score_csv(std::ostream& out, std::span<const std::vector<InfoScore>> rounds,
                     std::span<const std::vector<SampleId>> batches);

nlohmann::json labeling_order_json(std::span<const LabelingEvent> order);

}  // namespace crmactive
