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

#include "crmactive/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <spdlog/spdlog.h>

#include "crmactive/error.hpp"
#include "crmactive/log_math.hpp"

namespace crmactive {

// PointStore

void PointStore::add(const SampleId& id, std::vector<double> features) {
  if (points_.contains(id)) throw InvalidArgument("duplicate point '" + id + "'");
  if (points_.empty()) {
    feature_dim_ = features.size();
  } else if (features.size() != feature_dim_) {
    throw InvalidArgument("point '" + id + "' has wrong dimension");
  }
  points_.emplace(id, Entry{std::move(features), std::nullopt, 0});
  order_.push_back(id);
}

void PointStore::reveal(const SampleId& id, LabelSet labels) {
  auto it = points_.find(id);
  if (it == points_.end()) throw InvalidArgument("unknown point '" + id + "'");
  if (!it->second.labels) it->second.label_order = next_label_order_++;
  it->second.labels = std::move(labels);
}

FeatureView PointStore::features(const SampleId& id) const {
  const auto it = points_.find(id);
  if (it == points_.end()) throw InvalidArgument("unknown point '" + id + "'");
  return it->second.features;
}

const LabelSet* PointStore::labels(const SampleId& id) const {
  const auto it = points_.find(id);
  if (it == points_.end()) throw InvalidArgument("unknown point '" + id + "'");
  return it->second.labels ? &*it->second.labels : nullptr;
}

std::size_t PointStore::label_order(const SampleId& id) const {
  const auto it = points_.find(id);
  if (it == points_.end() || !it->second.labels) throw InvalidArgument("point '" + id + "' is not labeled");
  return it->second.label_order;
}

// ClusterState

Cluster& ClusterState::cluster(int id) {
  for (auto& c : clusters) {
    if (c.id == id) return c;
  }
  throw StateError("no cluster with id " + std::to_string(id));
}

const Cluster& ClusterState::cluster(int id) const {
  for (const auto& c : clusters) {
    if (c.id == id) return c;
  }
  throw StateError("no cluster with id " + std::to_string(id));
}

bool ClusterState::has_cluster(int id) const {
  return std::any_of(clusters.begin(), clusters.end(), [id](const Cluster& c) { return c.id == id; });
}

const Cluster& ClusterState::cluster_of(const SampleId& sample) const {
  const auto it = assignment.find(sample);
  if (it == assignment.end()) throw StateError("sample '" + sample + "' is not clustered");
  return cluster(it->second);
}

std::vector<FeatureView> ClusterState::representative_features(const PointStore& store) const {
  std::vector<FeatureView> reps;
  reps.reserve(clusters.size());
  for (const auto& c : clusters) reps.push_back(store.features(c.representative));
  return reps;
}

namespace {

struct LloydResult {
  std::vector<std::vector<double>> centroids;
  std::vector<std::size_t> assignment;
  double sse = 0.0;
};

double sq_dist(FeatureView a, FeatureView b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

std::size_t nearest(FeatureView x, const std::vector<std::vector<double>>& centroids) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = sq_dist(x, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

LloydResult lloyd(const std::vector<FeatureView>& x, std::vector<std::vector<double>> centroids,
                  const KMeansOptions& options) {
  const std::size_t n = x.size();
  const std::size_t k = centroids.size();
  const std::size_t dim = centroids.front().size();
  std::vector<std::size_t> assign(n);
  for (std::size_t i = 0; i < n; ++i) assign[i] = nearest(x[i], centroids);

  for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t a : assign) ++counts[a];
    if (options.reseed_empty) {
      for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] != 0) continue;
        // farthest point from its own centroid, taken from a cluster that can spare it
        std::size_t far = n;
        double far_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
          if (counts[assign[i]] < 2) continue;
          const double d = sq_dist(x[i], centroids[assign[i]]);
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        if (far == n) break;
        --counts[assign[far]];
        assign[far] = c;
        counts[c] = 1;
      }
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      std::fill(centroids[c].begin(), centroids[c].end(), 0.0);
    }
    for (std::size_t i = 0; i < n; ++i) {
      auto& cen = centroids[assign[i]];
      for (std::size_t m = 0; m < dim; ++m) cen[m] += x[i][m];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      for (double& v : centroids[c]) v /= static_cast<double>(counts[c]);
    }
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t a = nearest(x[i], centroids);
      if (a != assign[i]) {
        assign[i] = a;
        changed = true;
      }
    }
    if (!changed) break;
  }

  LloydResult result{std::move(centroids), std::move(assign), 0.0};
  for (std::size_t i = 0; i < n; ++i) result.sse += sq_dist(x[i], result.centroids[result.assignment[i]]);
  return result;
}

std::vector<std::vector<double>> kmeans_plus_plus(const std::vector<FeatureView>& x, std::size_t k,
                                                  std::mt19937_64& rng) {
  const std::size_t n = x.size();
  std::vector<std::vector<double>> centroids;
  std::vector<bool> used(n, false);
  std::uniform_int_distribution<std::size_t> first(0, n - 1);
  std::size_t pick = first(rng);
  centroids.emplace_back(x[pick].begin(), x[pick].end());
  used[pick] = true;
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = sq_dist(x[i], centroids.back());
  while (centroids.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += used[i] ? 0.0 : d2[i];
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double r = u(rng);
      pick = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (used[i] || d2[i] <= 0.0) continue;
        pick = i;
        r -= d2[i];
        if (r <= 0.0) break;
      }
    } else {
      // every remaining point coincides with a centroid
      pick = n;
      for (std::size_t i = 0; i < n && pick == n; ++i) {
        if (!used[i]) pick = i;
      }
    }
    used[pick] = true;
    centroids.emplace_back(x[pick].begin(), x[pick].end());
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], sq_dist(x[i], centroids.back()));
  }
  return centroids;
}

std::vector<Cluster> build_clusters(std::span<const SampleId> points, const LloydResult& fit, const PointStore& store) {
  std::vector<Cluster> clusters(fit.centroids.size());
  for (std::size_t i = 0; i < points.size(); ++i) clusters[fit.assignment[i]].members.push_back(points[i]);
  std::erase_if(clusters, [](const Cluster& c) { return c.members.empty(); });
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    clusters[c].id = static_cast<int>(c);
    refresh_cluster(clusters[c], store);
  }
  return clusters;
}

// Entropy over labeled members; a single member is accepted here (the grid
// search evaluates clusters with one member removed).
double entropy_of(std::span<const SampleId> labeled, const PointStore& store, const EntropyParams& params) {
  const std::size_t n = labeled.size();
  std::vector<FeatureView> feats;
  std::vector<const LabelSet*> labels;
  for (const auto& id : labeled) {
    feats.push_back(store.features(id));
    labels.push_back(store.labels(id));
    if (!labels.back()) throw StateError("sample '" + id + "' is not labeled");
  }
  std::vector<double> self(n, 0.0);
  if (params.normalize_kernel) {
    for (std::size_t i = 0; i < n; ++i) {
      self[i] = log_combined_kernel(feats[i], *labels[i], feats[i], *labels[i], params.kernel);
    }
  }
  const double log_n = std::log(static_cast<double>(n));
  std::vector<double> row(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      row[j] = log_combined_kernel(feats[i], *labels[i], feats[j], *labels[j], params.kernel);
      if (params.normalize_kernel) row[j] -= 0.5 * (self[i] + self[j]);
    }
    total += log_sum_exp(row) - log_n;
  }
  return -total / static_cast<double>(n);
}

}  // namespace

std::vector<Cluster> kmeans(const PointStore& store, std::span<const SampleId> points, std::size_t k,
                            std::uint64_t seed, std::optional<std::span<const std::vector<double>>> initial_centroids,
                            const KMeansOptions& options) {
  if (k < 1 || k > points.size()) throw InvalidArgument("k must be in [1, number of points]");
  std::vector<FeatureView> x;
  x.reserve(points.size());
  for (const auto& id : points) x.push_back(store.features(id));

  if (initial_centroids) {
    if (initial_centroids->size() != k) throw InvalidArgument("initial centroid count differs from k");
    std::vector<std::vector<double>> init(initial_centroids->begin(), initial_centroids->end());
    for (const auto& c : init) {
      if (c.size() != store.feature_dim()) throw InvalidArgument("initial centroid has wrong dimension");
    }
    return build_clusters(points, lloyd(x, std::move(init), options), store);
  }

  std::optional<LloydResult> best;
  const std::size_t restarts = std::max<std::size_t>(1, options.restarts);
  for (std::size_t r = 0; r < restarts; ++r) {
    std::mt19937_64 rng(seed + 0x9E3779B97F4A7C15ULL * r);
    auto fit = lloyd(x, kmeans_plus_plus(x, k, rng), options);
    if (!best || fit.sse < best->sse) best = std::move(fit);
  }
  return build_clusters(points, *best, store);
}

double within_cluster_sse(const PointStore& store, std::span<const Cluster> clusters) {
  double sse = 0.0;
  for (const auto& c : clusters) {
    for (const auto& id : c.members) sse += sq_dist(store.features(id), c.centroid);
  }
  return sse;
}

double bic_score(const PointStore& store, std::span<const Cluster> clusters) {
  std::size_t n = 0;
  for (const auto& c : clusters) n += c.members.size();
  const double k = static_cast<double>(clusters.size());
  const double dim = static_cast<double>(store.feature_dim());
  const double nd = static_cast<double>(n);
  const double sse = within_cluster_sse(store, clusters);
  const double dof = dim * (nd - k);
  const double variance = std::max(dof > 0 ? sse / dof : 0.0, 1e-12);

  double log_l = -0.5 * nd * dim * std::log(2.0 * std::numbers::pi * variance) - sse / (2.0 * variance);
  for (const auto& c : clusters) {
    const double nk = static_cast<double>(c.members.size());
    log_l += nk * std::log(nk / nd);
  }
  const double params = k * (dim + 1.0);
  return log_l - 0.5 * params * std::log(nd);
}

XMeansResult xmeans(const PointStore& store, std::span<const SampleId> points, std::size_t k_min, std::size_t k_max,
                    std::uint64_t seed) {
  if (k_min < 1 || k_min > k_max || k_max > points.size()) {
    throw InvalidArgument("X-Means range must satisfy 1 <= k_min <= k_max <= number of points");
  }
  XMeansResult result;
  double best = -std::numeric_limits<double>::infinity();
  KMeansOptions options;
  options.restarts = 5;
  for (std::size_t k = k_min; k <= k_max; ++k) {
    auto clusters = kmeans(store, points, k, seed + k, std::nullopt, options);
    const double bic = bic_score(store, clusters);
    result.bic_by_k.emplace_back(k, bic);
    if (bic > best) {
      best = bic;
      result.clusters = std::move(clusters);
    }
  }
  return result;
}

std::vector<double> centroid_of(const PointStore& store, std::span<const SampleId> members) {
  std::vector<double> centroid(store.feature_dim(), 0.0);
  if (members.empty()) return centroid;
  for (const auto& id : members) {
    const auto f = store.features(id);
    for (std::size_t m = 0; m < centroid.size(); ++m) centroid[m] += f[m];
  }
  for (double& v : centroid) v /= static_cast<double>(members.size());
  return centroid;
}

SampleId representative(const Cluster& cluster, const PointStore& store) {
  if (cluster.members.empty()) throw InvalidArgument("empty cluster has no representative");
  const SampleId* best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& id : cluster.members) {
    const double d = sq_dist(store.features(id), cluster.centroid);
    if (d < best_d || (d == best_d && best && id < *best)) {
      best_d = d;
      best = &id;
    }
  }
  return *best;
}

void refresh_cluster(Cluster& cluster, const PointStore& store) {
  std::sort(cluster.members.begin(), cluster.members.end());
  cluster.labeled_members.clear();
  if (cluster.members.empty()) {
    cluster.representative.clear();
    cluster.centroid.assign(store.feature_dim(), 0.0);
    return;
  }
  cluster.centroid = centroid_of(store, cluster.members);
  cluster.representative = representative(cluster, store);
  for (const auto& id : cluster.members) {
    if (store.is_labeled(id)) cluster.labeled_members.push_back(id);
  }
  std::sort(cluster.labeled_members.begin(), cluster.labeled_members.end(),
            [&](const SampleId& a, const SampleId& b) { return store.label_order(a) < store.label_order(b); });
}

bool label_share_ok(const SampleId& sample, const Cluster& cluster, const PointStore& store) {
  if (!std::binary_search(cluster.members.begin(), cluster.members.end(), sample)) {
    throw InvalidArgument("sample '" + sample + "' is not in cluster " + std::to_string(cluster.id));
  }
  const LabelSet* own = store.labels(sample);
  if (!own) throw InvalidArgument("sample '" + sample + "' is not labeled");
  bool has_other = false;
  for (const auto& id : cluster.members) {
    if (id == sample) continue;
    const LabelSet* other = store.labels(id);
    if (!other) continue;
    has_other = true;
    if (own->shares_concept_with(*other)) return true;
  }
  return !has_other;
}

int redistribute(ClusterState& state, int cluster_id, const SampleId& seed_sample, const PointStore& store) {
  Cluster& original = state.cluster(cluster_id);
  if (!std::binary_search(original.members.begin(), original.members.end(), seed_sample)) {
    throw InvalidArgument("seed '" + seed_sample + "' is not in cluster " + std::to_string(cluster_id));
  }

  std::vector<SampleId> unlabeled;
  std::vector<SampleId> kept_labeled;
  for (const auto& id : original.members) {
    if (id == seed_sample) continue;
    (store.is_labeled(id) ? kept_labeled : unlabeled).push_back(id);
  }

  Cluster split;
  split.id = state.next_id++;
  split.members.push_back(seed_sample);
  std::vector<SampleId> stay = std::move(kept_labeled);

  if (!unlabeled.empty()) {
    const auto rep = store.features(original.representative);
    const auto seed = store.features(seed_sample);
    std::vector<std::vector<double>> init{{rep.begin(), rep.end()}, {seed.begin(), seed.end()}};
    std::vector<FeatureView> x;
    for (const auto& id : unlabeled) x.push_back(store.features(id));
    KMeansOptions options;
    options.reseed_empty = false;
    const auto fit = lloyd(x, std::move(init), options);
    for (std::size_t i = 0; i < unlabeled.size(); ++i) {
      (fit.assignment[i] == 1 ? split.members : stay).push_back(unlabeled[i]);
    }
  }

  original.members = std::move(stay);
  refresh_cluster(original, store);
  refresh_cluster(split, store);
  for (const auto& id : split.members) state.assignment[id] = split.id;
  if (original.members.empty()) {
    std::erase_if(state.clusters, [cluster_id](const Cluster& c) { return c.id == cluster_id; });
  }
  state.clusters.push_back(std::move(split));
  return state.clusters.back().id;
}

double empirical_entropy(std::span<const SampleId> labeled, const PointStore& store, const EntropyParams& params) {
  if (labeled.size() < 2) throw InvalidArgument("empirical entropy needs at least 2 labeled members");
  return entropy_of(labeled, store, params);
}

double empirical_entropy(const Cluster& cluster, const PointStore& store, const EntropyParams& params) {
  return empirical_entropy(cluster.labeled_members, store, params);
}

std::optional<double> update_h_worst(ClusterState& state, const PointStore& store, const EntropyParams& params) {
  std::optional<double> worst;
  for (auto& c : state.clusters) {
    refresh_cluster(c, store);
    if (c.labeled_members.size() < 2) continue;
    const double h = empirical_entropy(c, store, params);
    spdlog::debug("cluster {}: h={:.6g} over {} labeled", c.id, h, c.labeled_members.size());
    if (!worst || h > *worst) worst = h;
  }
  state.h_worst = worst;
  return worst;
}

void refine_after_batch(ClusterState& state, std::span<const SampleId> new_labels, const PointStore& store,
                        const EntropyParams& params) {
  for (const auto& id : new_labels) {
    if (!state.assignment.contains(id)) throw StateError("newly labeled sample '" + id + "' is not clustered");
    if (!store.is_labeled(id)) throw StateError("newly labeled sample '" + id + "' has no revealed labels");
  }
  for (auto& c : state.clusters) refresh_cluster(c, store);

  for (const auto& a : new_labels) {
    const int cid = state.assignment.at(a);
    const Cluster& cluster = state.cluster(cid);
    if (!state.h_worst) {
      if (!label_share_ok(a, cluster, store)) redistribute(state, cid, a, store);
      continue;
    }
    const double threshold = *state.h_worst;
    if (cluster.labeled_members.size() < 2) continue;
    if (empirical_entropy(cluster, store, params) <= threshold) continue;

    // First labeled member (labeling order) whose removal brings the cluster
    // within the threshold.
    const std::vector<SampleId> labeled = cluster.labeled_members;
    std::optional<SampleId> knock_out;
    SampleId fallback;
    double fallback_h = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < labeled.size(); ++r) {
      std::vector<SampleId> rest;
      rest.reserve(labeled.size() - 1);
      for (std::size_t i = 0; i < labeled.size(); ++i) {
        if (i != r) rest.push_back(labeled[i]);
      }
      if (rest.size() < 2) {
        knock_out = labeled[r];
        break;
      }
      const double h = entropy_of(rest, store, params);
      if (h <= threshold) {
        knock_out = labeled[r];
        break;
      }
      if (h < fallback_h) {
        fallback_h = h;
        fallback = labeled[r];
      }
    }
    if (!knock_out) {
      spdlog::warn("cluster {}: no single removal meets h_worst={:.6g}; splitting off '{}' (h={:.6g})", cid, threshold,
                   fallback, fallback_h);
      knock_out = fallback;
    }
    redistribute(state, cid, *knock_out, store);
  }
}

ClusterState make_state(std::vector<Cluster> clusters, const PointStore& store) {
  ClusterState state;
  state.clusters = std::move(clusters);
  for (std::size_t c = 0; c < state.clusters.size(); ++c) {
    auto& cluster = state.clusters[c];
    cluster.id = static_cast<int>(c);
    refresh_cluster(cluster, store);
    for (const auto& id : cluster.members) {
      if (!state.assignment.emplace(id, cluster.id).second) {
        throw InvalidArgument("sample '" + id + "' appears in more than one cluster");
      }
    }
  }
  state.next_id = static_cast<int>(state.clusters.size());
  return state;
}

std::size_t default_k_max(std::size_t num_points) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(num_points)))));
}

ClusterState initial_clustering(const PointStore& store, std::span<const SampleId> points, std::size_t k_min,
                                std::size_t k_max, std::uint64_t seed) {
  k_max = std::min(k_max, points.size());
  k_min = std::min(k_min, k_max);
  auto state = make_state(xmeans(store, points, k_min, k_max, seed).clusters, store);

  std::vector<SampleId> labeled;
  for (const auto& id : points) {
    if (store.is_labeled(id)) labeled.push_back(id);
  }
  std::sort(labeled.begin(), labeled.end(),
            [&](const SampleId& a, const SampleId& b) { return store.label_order(a) < store.label_order(b); });
  for (const auto& id : labeled) {
    const int cid = state.assignment.at(id);
    if (!label_share_ok(id, state.cluster(cid), store)) redistribute(state, cid, id, store);
  }
  return state;
}

nlohmann::json cluster_summary(const ClusterState& state, const PointStore& store, const EntropyParams& params) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : state.clusters) {
    std::size_t labeled = 0;
    for (const auto& id : c.members) labeled += store.is_labeled(id) ? 1 : 0;
    nlohmann::json entropy;
    if (labeled >= 2) {
      Cluster fresh = c;
      refresh_cluster(fresh, store);
      entropy = empirical_entropy(fresh, store, params);
    }
    out.push_back({{"cluster_id", c.id},
                   {"size", c.members.size()},
                   {"labeled_count", labeled},
                   {"representative_id", c.representative},
                   {"entropy", entropy}});
  }
  return out;
}

}  // namespace crmactive
