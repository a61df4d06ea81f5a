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
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "crmactive/kernels.hpp"
#include "crmactive/types.hpp"

namespace crmactive {

// Feature vectors of the clustered pool plus the labels revealed so far. The
// order in which labels are revealed is the "labeling order" used by the
// refinement grid search.
class PointStore {
 public:
  void add(const SampleId& id, std::vector<double> features);
  void reveal(const SampleId& id, LabelSet labels);

  bool contains(const SampleId& id) const { return points_.contains(id); }
  FeatureView features(const SampleId& id) const;
  const LabelSet* labels(const SampleId& id) const;
  bool is_labeled(const SampleId& id) const { return labels(id) != nullptr; }
  std::size_t label_order(const SampleId& id) const;

  std::size_t size() const { return points_.size(); }
  std::size_t feature_dim() const { return feature_dim_; }
  const std::vector<SampleId>& ids() const { return order_; }

 private:
  struct Entry {
    std::vector<double> features;
    std::optional<LabelSet> labels;
    std::size_t label_order = 0;
  };
  std::unordered_map<SampleId, Entry> points_;
  std::vector<SampleId> order_;
  std::size_t feature_dim_ = 0;
  std::size_t next_label_order_ = 0;
};

struct Cluster {
  int id = 0;
  std::vector<SampleId> members;          // sorted by id
  SampleId representative;
  std::vector<double> centroid;
  std::vector<SampleId> labeled_members;  // labeling order
};

struct ClusterState {
  std::vector<Cluster> clusters;
  std::optional<double> h_worst;
  std::map<SampleId, int> assignment;
  int next_id = 0;

  Cluster& cluster(int id);
  const Cluster& cluster(int id) const;
  const Cluster& cluster_of(const SampleId& sample) const;
  bool has_cluster(int id) const;
  std::vector<FeatureView> representative_features(const PointStore& store) const;
};

struct KMeansOptions {
  std::size_t max_iterations = 100;
  bool reseed_empty = true;
  std::size_t restarts = 1;  // best-SSE of this many k-means++ seedings
};

// Lloyd iterations until the assignment is a fixpoint or max_iterations.
// Without initial centroids the seeding is k-means++ driven by `seed`.
// Returned clusters carry ids 0..k-1 (empty ones dropped when reseeding is
// disabled).
std::vector<Cluster> kmeans(const PointStore& store, std::span<const SampleId> points, std::size_t k,
                            std::uint64_t seed,
                            std::optional<std::span<const std::vector<double>>> initial_centroids = std::nullopt,
                            const KMeansOptions& options = {});

double within_cluster_sse(const PointStore& store, std::span<const Cluster> clusters);

// Spherical Gaussian, shared variance: logL - p/2 log n with p = K(M+1).
double bic_score(const PointStore& store, std::span<const Cluster> clusters);

struct XMeansResult {
  std::vector<Cluster> clusters;
  std::vector<std::pair<std::size_t, double>> bic_by_k;
};

XMeansResult xmeans(const PointStore& store, std::span<const SampleId> points, std::size_t k_min,
                    std::size_t k_max, std::uint64_t seed);

std::vector<double> centroid_of(const PointStore& store, std::span<const SampleId> members);
// Member closest to the centroid, ties by smaller id.
SampleId representative(const Cluster& cluster, const PointStore& store);
void refresh_cluster(Cluster& cluster, const PointStore& store);

bool label_share_ok(const SampleId& sample, const Cluster& cluster, const PointStore& store);

// Splits `seed_sample` out of the cluster into a new cluster and 2-means the
// cluster's unlabeled members between rep(C) and the seed. Returns the id of
// the new cluster.
int redistribute(ClusterState& state, int cluster_id, const SampleId& seed_sample, const PointStore& store);

struct EntropyParams {
  KernelParams kernel;
  bool normalize_kernel = false;
};

double empirical_entropy(const Cluster& cluster, const PointStore& store, const EntropyParams& params);
double empirical_entropy(std::span<const SampleId> labeled, const PointStore& store, const EntropyParams& params);

std::optional<double> update_h_worst(ClusterState& state, const PointStore& store, const EntropyParams& params);

// Cluster refinement after a labeled batch; labels must already be revealed
// in `store`.
void refine_after_batch(ClusterState& state, std::span<const SampleId> new_labels, const PointStore& store,
                        const EntropyParams& params);

ClusterState make_state(std::vector<Cluster> clusters, const PointStore& store);

// X-Means over `points` then label-share enforcement for every labeled member
// in labeling order.
ClusterState initial_clustering(const PointStore& store, std::span<const SampleId> points, std::size_t k_min,
                                std::size_t k_max, std::uint64_t seed);

std::size_t default_k_max(std::size_t num_points);

// [{cluster_id, size, labeled_count, representative_id, entropy|null}]
nlohmann::json cluster_summary(const ClusterState& state, const PointStore& store, const EntropyParams& params);

}  // namespace crmactive
