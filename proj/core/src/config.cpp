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

#include "crmactive/config.hpp"

#include <cmath>
#include <string>

#include "crmactive/dataset.hpp"
#include "crmactive/error.hpp"

namespace crmactive {

void RunConfig::validate() const {
  if (batch_size < 1) throw InvalidArgument("batch_size must be >= 1");
  if (annotation_length < 1) throw InvalidArgument("annotation_length must be >= 1");
  if (retrieval_depth < 1) throw InvalidArgument("retrieval_depth must be >= 1");
  if (sigma && !(*sigma > 0.0)) throw InvalidArgument("sigma must be positive");
  if (lambda && !(*lambda >= 0.0 && *lambda <= 1.0)) throw InvalidArgument("lambda must be in [0,1]");
  if (beta && !(*beta > 0.0)) throw InvalidArgument("beta must be positive");
  if (weights.uncertainty < 0 || weights.density < 0 || weights.diversity < 0) {
    throw InvalidArgument("selection weights must be non-negative");
  }
  if (!(weights.uncertainty + weights.density + weights.diversity > 0)) {
    throw InvalidArgument("selection weights must not all be zero");
  }
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (xmeans_k_min < 1) throw InvalidArgument("xmeans_k_min must be >= 1");
  if (xmeans_k_max && *xmeans_k_max < xmeans_k_min) throw InvalidArgument("xmeans_k_max < xmeans_k_min");
  if (cv_folds < 2) throw InvalidArgument("cv_folds must be >= 2");
  if (lambda_grid.empty() || beta_grid.empty()) throw InvalidArgument("smoothing grids must be non-empty");
  for (double l : lambda_grid) {
    if (!(l >= 0.0 && l <= 1.0)) throw InvalidArgument("lambda grid values must be in [0,1]");
  }
  for (double b : beta_grid) {
    if (!(b > 0.0)) throw InvalidArgument("beta grid values must be positive");
  }
}

void RunConfig::validate_for(const Dataset& dataset) const {
  validate();
  if (annotation_length >= dataset.num_concepts()) {
    throw InvalidArgument("annotation_length must be smaller than the vocabulary size (" +
                          std::to_string(dataset.num_concepts()) + ")");
  }
  if (retrieval_depth > dataset.splits().test.size()) {
    throw InvalidArgument("retrieval_depth exceeds the number of test samples");
  }
}

nlohmann::json to_json(const RunConfig& c) {
  auto opt = [](const auto& v) { return v ? nlohmann::json(*v) : nlohmann::json(); };
  return {{"batch_size", c.batch_size},
          {"annotation_length", c.annotation_length},
          {"retrieval_depth", c.retrieval_depth},
          {"sigma", opt(c.sigma)},
          {"lambda", opt(c.lambda)},
          {"beta", opt(c.beta)},
          {"weights", {{"uncertainty", c.weights.uncertainty}, {"density", c.weights.density}, {"diversity", c.weights.diversity}}},
          {"seed", c.seed},
          {"epsilon", c.epsilon},
          {"normalize_entropy_kernel", c.normalize_entropy_kernel},
          {"rescale_uncertainty", c.rescale_uncertainty},
          {"xmeans_k_min", c.xmeans_k_min},
          {"xmeans_k_max", opt(c.xmeans_k_max)},
          {"cv_folds", c.cv_folds},
          {"lambda_grid", c.lambda_grid},
          {"beta_grid", c.beta_grid}};
}

RunConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DataError("config must be a JSON object");
  RunConfig c;
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key) && !j.at(key).is_null()) field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
    };
    auto get_opt = [&](const char* key, auto& field) {
      if (j.contains(key) && !j.at(key).is_null()) field = j.at(key).get<typename std::remove_reference_t<decltype(field)>::value_type>();
    };
    get("batch_size", c.batch_size);
    get("annotation_length", c.annotation_length);
    get("retrieval_depth", c.retrieval_depth);
    get_opt("sigma", c.sigma);
    get_opt("lambda", c.lambda);
    get_opt("beta", c.beta);
    if (j.contains("weights")) {
      const auto& w = j.at("weights");
      if (w.is_array()) {
        if (w.size() != 3) throw DataError("weights array must have 3 entries");
        c.weights = {w[0].get<double>(), w[1].get<double>(), w[2].get<double>()};
      } else {
        c.weights.uncertainty = w.value("uncertainty", c.weights.uncertainty);
        c.weights.density = w.value("density", c.weights.density);
        c.weights.diversity = w.value("diversity", c.weights.diversity);
      }
    }
    get("seed", c.seed);
    get("epsilon", c.epsilon);
    get("normalize_entropy_kernel", c.normalize_entropy_kernel);
    get("rescale_uncertainty", c.rescale_uncertainty);
    get("xmeans_k_min", c.xmeans_k_min);
    get_opt("xmeans_k_max", c.xmeans_k_max);
    get("cv_folds", c.cv_folds);
    get("lambda_grid", c.lambda_grid);
    get("beta_grid", c.beta_grid);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed config: ") + e.what());
  }
  c.validate();
  return c;
}

}  // namespace crmactive
