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
#include <span>
#include <vector>

#include "crmactive/types.hpp"

namespace crmactive {

struct KernelParams {
  double sigma = 1.0;          // Gaussian bandwidth
  std::vector<double> gamma;   // per-concept occurrence probability, each in (0,1)
};

double squared_distance(FeatureView a, FeatureView b);

// exp(-|a-b|^2 / (2 sigma^2))
double log_gaussian_kernel(FeatureView a, FeatureView b, double sigma);
double gaussian_kernel(FeatureView a, FeatureView b, double sigma);

// prod_d g^{y_d} g^{y'_d} (1-g)^{1-y_d} (1-g)^{1-y'_d}
double log_bernoulli_kernel(const LabelSet& a, const LabelSet& b, std::span<const double> gamma);
double bernoulli_kernel(const LabelSet& a, const LabelSet& b, std::span<const double> gamma);

// Bernoulli (labels) times Gaussian (features). Kept in log space so sums of
// kernels can be formed with log-sum-exp by the caller.
double log_combined_kernel(FeatureView features_a, const LabelSet& labels_a, FeatureView features_b,
                           const LabelSet& labels_b, const KernelParams& params);
double combined_kernel(const Sample& a, const Sample& b, const KernelParams& params);

// Laplace-smoothed concept frequencies: (count_d + 1) / (n + 2).
std::vector<double> estimate_gamma(std::span<const LabelSet> labels);
std::vector<double> estimate_gamma(std::span<const Sample* const> labeled);

// Median Euclidean distance over up to `max_pairs` random distinct pairs.
// Falls back to 1.0 when fewer than two points or every distance is zero.
double median_distance_bandwidth(std::span<const FeatureView> points, std::uint64_t seed,
                                 std::size_t max_pairs = 1000);

}  // namespace crmactive
