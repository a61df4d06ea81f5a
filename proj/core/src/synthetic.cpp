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

#include "crmactive/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "crmactive/error.hpp"

namespace crmactive {

namespace {

std::string sample_name(std::size_t i, std::size_t total) {
  const std::size_t width = std::to_string(total > 0 ? total - 1 : 0).size();
  std::string digits = std::to_string(i);
  return "s" + std::string(width - digits.size(), '0') + digits;
}

}  // namespace

Dataset generate_synthetic(const SyntheticSpec& spec) {
  if (spec.n_clusters == 0 || spec.samples_per_cluster == 0 || spec.num_concepts == 0 || spec.feature_dim == 0) {
    throw InvalidArgument("synthetic spec counts must be positive");
  }
  if (!(spec.label_noise >= 0.0 && spec.label_noise <= 1.0)) throw InvalidArgument("label_noise must be in [0,1]");
  if (!(spec.test_fraction >= 0.0 && spec.test_fraction < 1.0) ||
      !(spec.initial_fraction > 0.0 && spec.initial_fraction <= 1.0)) {
    throw InvalidArgument("split fractions out of range");
  }
  // Round-robin coverage gives every concept to some blob; a blob holds at most 3.
  const std::size_t per_blob_needed = (spec.num_concepts + spec.n_clusters - 1) / spec.n_clusters;
  if (per_blob_needed > 3) throw InvalidArgument("too many concepts for 1-3 concepts per blob");

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> centre_dist(0.0, spec.center_scale);
  std::normal_distribution<double> point_dist(0.0, spec.cluster_spread);
  std::uniform_int_distribution<std::size_t> concept_count(1, 3);
  std::bernoulli_distribution flip(spec.label_noise);

  std::vector<std::vector<double>> centres(spec.n_clusters, std::vector<double>(spec.feature_dim));
  for (auto& c : centres) {
    for (auto& v : c) v = centre_dist(rng);
  }

  std::vector<LabelSet> blob_labels(spec.n_clusters, LabelSet(spec.num_concepts));
  for (std::size_t d = 0; d < spec.num_concepts; ++d) blob_labels[d % spec.n_clusters].set(d);
  for (auto& labels : blob_labels) {
    const std::size_t target = std::min(concept_count(rng), spec.num_concepts);
    while (labels.count() < target) {
      std::uniform_int_distribution<std::size_t> pick(0, spec.num_concepts - 1);
      labels.set(pick(rng));
    }
  }

  const std::size_t total = spec.n_clusters * spec.samples_per_cluster;
  std::vector<Sample> samples;
  samples.reserve(total);
  for (std::size_t i = 0; i < total; ++i) {
    const std::size_t blob = i / spec.samples_per_cluster;
    Sample s;
    s.id = sample_name(i, total);
    s.raw_features.resize(spec.feature_dim);
    for (std::size_t m = 0; m < spec.feature_dim; ++m) s.raw_features[m] = centres[blob][m] + point_dist(rng);
    LabelSet labels = blob_labels[blob];
    for (std::size_t d = 0; d < spec.num_concepts; ++d) {
      if (flip(rng)) labels.set(d, !labels.test(d));
    }
    s.labels = std::move(labels);
    samples.push_back(std::move(s));
  }

  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  const auto n_test = std::min<std::size_t>(static_cast<std::size_t>(std::llround(spec.test_fraction * total)),
                                            total - 1);
  const std::vector<std::size_t> test(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
  std::vector<std::size_t> training(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());

  // Initial labeled set: one positive per concept first, then fill in
  // shuffled order.
  std::vector<bool> chosen(total, false);
  std::vector<std::size_t> initial;
  for (std::size_t d = 0; d < spec.num_concepts; ++d) {
    bool covered = false;
    for (std::size_t i : initial) covered = covered || samples[i].labels->test(d);
    if (covered) continue;
    for (std::size_t i : training) {
      if (!chosen[i] && samples[i].labels->test(d)) {
        chosen[i] = true;
        initial.push_back(i);
        break;
      }
    }
  }
  const auto n_initial = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(spec.initial_fraction * static_cast<double>(total))));
  for (std::size_t i : training) {
    if (initial.size() >= n_initial) break;
    if (!chosen[i]) {
      chosen[i] = true;
      initial.push_back(i);
    }
  }

  Splits splits;
  for (std::size_t i : initial) splits.initial_labeled.push_back(samples[i].id);
  for (std::size_t i : training) {
    if (!chosen[i]) splits.unlabeled.push_back(samples[i].id);
  }
  for (std::size_t i : test) splits.test.push_back(samples[i].id);
  std::sort(splits.initial_labeled.begin(), splits.initial_labeled.end());
  std::sort(splits.unlabeled.begin(), splits.unlabeled.end());
  std::sort(splits.test.begin(), splits.test.end());

  std::vector<std::string> vocabulary;
  for (std::size_t d = 0; d < spec.num_concepts; ++d) vocabulary.push_back("c" + std::to_string(d));
  return Dataset(std::move(vocabulary), spec.feature_dim, std::move(samples), std::move(splits));
}

}  // namespace crmactive
