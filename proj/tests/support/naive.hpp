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

// Direct-arithmetic reference implementations used as test oracles. They
// evaluate the textbook formulas in long double without log-space tricks, so
// they are only meant for tiny instances.

#include <cstddef>
#include <string>
#include <vector>

namespace naive {

using Vec = std::vector<double>;
using Bits = std::vector<int>;

struct Point {
  std::string id;
  Vec features;
  Bits labels;
};

long double gaussian(const Vec& a, const Vec& b, long double sigma);
long double bernoulli(const Bits& a, const Bits& b, const Vec& gamma);
long double combined(const Point& a, const Point& b, long double sigma, const Vec& gamma);

// P(words, r) summed over every training point with P(J) = 1/|T|.
long double joint(const std::vector<Point>& training, long double lambda, long double beta,
                  const std::vector<std::size_t>& words, const Vec& r);
std::vector<long double> posteriors(const std::vector<Point>& training, long double lambda, long double beta,
                                    const Vec& r);

long double entropy(const std::vector<Point>& labeled, long double sigma, const Vec& gamma, bool normalized);

// clusters[c] lists the points of cluster c; returns p(x)/max p over all points.
long double density(const Vec& x, const std::vector<Vec>& own_cluster, const std::vector<std::vector<Vec>>& clusters,
                    long double sigma);
long double diversity(const Vec& x, const std::vector<Vec>& reps, long double sigma);

long double uncertainty(std::vector<long double> post, std::size_t k, long double epsilon);

struct Scored {
  std::string id;
  double info;
};
// Repeated linear-scan argmax.
std::vector<std::string> select_batch(std::vector<Scored> scores, std::size_t k);

}  // namespace naive
