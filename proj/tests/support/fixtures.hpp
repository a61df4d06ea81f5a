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

#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "crmactive/clustering.hpp"
#include "crmactive/relevance.hpp"
#include "crmactive/types.hpp"
#include "naive.hpp"

namespace fixtures {

inline std::string id_of(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "p%03zu", i);
  return buf;
}

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t dim, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  std::vector<double> v(dim);
  for (auto& x : v) x = n(rng);
  return v;
}

// Random labels with at least one positive concept.
inline naive::Bits random_bits(std::mt19937_64& rng, std::size_t concepts) {
  std::bernoulli_distribution coin(0.4);
  naive::Bits bits(concepts, 0);
  for (auto& b : bits) b = coin(rng) ? 1 : 0;
  bits[std::uniform_int_distribution<std::size_t>(0, concepts - 1)(rng)] = 1;
  return bits;
}

inline crmactive::LabelSet to_labels(const naive::Bits& bits) {
  crmactive::LabelSet l(bits.size());
  for (std::size_t d = 0; d < bits.size(); ++d) l.set(d, bits[d] != 0);
  return l;
}

inline std::vector<naive::Point> random_points(std::mt19937_64& rng, std::size_t n, std::size_t dim,
                                               std::size_t concepts, double scale = 1.0) {
  std::vector<naive::Point> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back({id_of(i), random_vector(rng, dim, scale), random_bits(rng, concepts)});
  return pts;
}

inline std::vector<crmactive::TrainingPoint> training(const std::vector<naive::Point>& pts) {
  std::vector<crmactive::TrainingPoint> out;
  for (const auto& p : pts) out.push_back({p.id, p.features, to_labels(p.labels)});
  return out;
}

inline double relative_error(long double expected, double actual) {
  if (expected == static_cast<long double>(actual)) return 0.0;  // includes matching infinities
  const long double denom = std::max<long double>(std::fabs(expected), 1e-300L);
  return static_cast<double>(std::fabs(expected - actual) / denom);
}

}  // namespace fixtures
