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

#include "crmactive/dataset.hpp"

namespace crmactive {

// Gaussian blobs in feature space, each blob owning 1-3 concepts.
struct SyntheticSpec {
  std::size_t n_clusters = 3;
  std::size_t samples_per_cluster = 20;
  std::size_t num_concepts = 5;
  std::size_t feature_dim = 2;
  double label_noise = 0.0;
  std::uint64_t seed = 0;

  // Blob centres are drawn from N(0, center_scale^2) per dimension and the
  // points of a blob from N(centre, cluster_spread^2).
  double center_scale = 4.0;
  double cluster_spread = 1.0;
  double test_fraction = 0.1;
  double initial_fraction = 0.1;
};

Dataset generate_synthetic(const SyntheticSpec& spec);

}  // namespace crmactive
