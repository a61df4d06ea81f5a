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
#include <vector>

#include <nlohmann/json.hpp>

namespace crmactive {

class Dataset;

struct SelectionWeights {
  double uncertainty = 1.0 / 3.0;
  double density = 1.0 / 3.0;
  double diversity = 1.0 / 3.0;
};

struct RunConfig {
  std::size_t batch_size = 20;         // K
  std::size_t annotation_length = 3;   // k, top-k concepts per sample
  std::size_t retrieval_depth = 5;     // t, top-t samples per query

  // Unset values are resolved at session start: sigma by the median pairwise
  // distance heuristic, lambda/beta by cross-validation on the initial set.
  std::optional<double> sigma;
  std::optional<double> lambda;
  std::optional<double> beta;

  SelectionWeights weights;
  std::uint64_t seed = 0;
  double epsilon = 1e-9;

  bool normalize_entropy_kernel = false;
  bool rescale_uncertainty = false;

  std::size_t xmeans_k_min = 2;
  std::optional<std::size_t> xmeans_k_max;  // default ceil(sqrt(N))

  std::size_t cv_folds = 10;
  std::vector<double> lambda_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<double> beta_grid{0.05, 0.1, 0.25, 0.5, 1.0};

  // Throws InvalidArgument.
  void validate() const;
  void validate_for(const Dataset& dataset) const;
};

nlohmann::json to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::json& j);

}  // namespace crmactive
