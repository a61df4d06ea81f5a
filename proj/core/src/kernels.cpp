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

#include "crmactive/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "crmactive/error.hpp"

namespace crmactive {

double squared_distance(FeatureView a, FeatureView b) {
  if (a.size() != b.size()) throw InvalidArgument("feature vectors differ in length");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

double log_gaussian_kernel(FeatureView a, FeatureView b, double sigma) {
  if (!(sigma > 0.0)) throw InvalidArgument("sigma must be positive");
  return -squared_distance(a, b) / (2.0 * sigma * sigma);
}

double gaussian_kernel(FeatureView a, FeatureView b, double sigma) {
  return std::exp(log_gaussian_kernel(a, b, sigma));
}

double log_bernoulli_kernel(const LabelSet& a, const LabelSet& b, std::span<const double> gamma) {
  if (a.size() != b.size() || a.size() != gamma.size()) throw InvalidArgument("label vectors differ in length");
  double log_k = 0.0;
  for (std::size_t d = 0; d < gamma.size(); ++d) {
    const double g = gamma[d];
    if (!(g > 0.0 && g < 1.0)) throw InvalidArgument("gamma values must lie in (0,1)");
    const double log_g = std::log(g);
    const double log_1mg = std::log1p(-g);
    log_k += (a.test(d) ? log_g : log_1mg) + (b.test(d) ? log_g : log_1mg);
  }
  return log_k;
}

double bernoulli_kernel(const LabelSet& a, const LabelSet& b, std::span<const double> gamma) {
  return std::exp(log_bernoulli_kernel(a, b, gamma));
}

double log_combined_kernel(FeatureView features_a, const LabelSet& labels_a, FeatureView features_b,
                           const LabelSet& labels_b, const KernelParams& params) {
  return log_bernoulli_kernel(labels_a, labels_b, params.gamma) +
         log_gaussian_kernel(features_a, features_b, params.sigma);
}

double combined_kernel(const Sample& a, const Sample& b, const KernelParams& params) {
  if (!a.labels || !b.labels) throw InvalidArgument("combined kernel needs labeled samples");
  return std::exp(log_combined_kernel(a.features, *a.labels, b.features, *b.labels, params));
}

std::vector<double> estimate_gamma(std::span<const LabelSet> labels) {
  if (labels.empty()) throw InvalidArgument("cannot estimate concept probabilities from no samples");
  const std::size_t num_concepts = labels.front().size();
  std::vector<double> counts(num_concepts, 0.0);
  for (const auto& l : labels) {
    if (l.size() != num_concepts) throw InvalidArgument("label vectors differ in length");
    for (std::size_t d : l.positives()) counts[d] += 1.0;
  }
  const double denom = static_cast<double>(labels.size()) + 2.0;
  for (double& c : counts) c = (c + 1.0) / denom;
  return counts;
}

std::vector<double> estimate_gamma(std::span<const Sample* const> labeled) {
  std::vector<LabelSet> labels;
  labels.reserve(labeled.size());
  for (const Sample* s : labeled) {
    if (!s->labels) throw InvalidArgument("sample '" + s->id + "' is unlabeled");
    labels.push_back(*s->labels);
  }
  return estimate_gamma(labels);
}

double median_distance_bandwidth(std::span<const FeatureView> points, std::uint64_t seed, std::size_t max_pairs) {
  const std::size_t n = points.size();
  if (n < 2) return 1.0;
  std::vector<double> distances;
  const std::size_t all_pairs = n * (n - 1) / 2;
  if (all_pairs <= max_pairs) {
    distances.reserve(all_pairs);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) distances.push_back(std::sqrt(squared_distance(points[i], points[j])));
    }
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    distances.reserve(max_pairs);
    while (distances.size() < max_pairs) {
      const std::size_t i = pick(rng);
      const std::size_t j = pick(rng);
      if (i == j) continue;
      distances.push_back(std::sqrt(squared_distance(points[i], points[j])));
    }
  }
  const auto mid = distances.begin() + static_cast<std::ptrdiff_t>(distances.size() / 2);
  std::nth_element(distances.begin(), mid, distances.end());
  const double median = *mid;
  return median > 0.0 ? median : 1.0;
}

}  // namespace crmactive
