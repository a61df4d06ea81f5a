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

#include <doctest.h>

#include <algorithm>
#include <random>

#include "crmactive/clustering.hpp"
#include "crmactive/error.hpp"
#include "fixtures.hpp"

using namespace crmactive;

namespace {

LabelSet bits(std::initializer_list<int> b) { return fixtures::to_labels(naive::Bits(b)); }

// Three tight blobs far apart along the first axis.
PointStore three_blobs(std::mt19937_64& rng, std::size_t per_blob, std::vector<SampleId>& ids) {
  PointStore store;
  std::normal_distribution<double> n(0.0, 0.5);
  for (std::size_t b = 0; b < 3; ++b) {
    for (std::size_t i = 0; i < per_blob; ++i) {
      const auto id = fixtures::id_of(b * per_blob + i);
      store.add(id, {20.0 * static_cast<double>(b) + n(rng), n(rng)});
      ids.push_back(id);
    }
  }
  return store;
}

std::vector<SampleId> all_members(const ClusterState& state) {
  std::vector<SampleId> out;
  for (const auto& c : state.clusters) out.insert(out.end(), c.members.begin(), c.members.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_SUITE("clustering") {
  TEST_CASE("kmeans degenerate k") {
    std::mt19937_64 rng(1);
    std::vector<SampleId> ids;
    const auto store = three_blobs(rng, 4, ids);
    const auto singletons = kmeans(store, ids, ids.size(), 3);
    CHECK(singletons.size() == ids.size());
    for (const auto& c : singletons) CHECK(c.members.size() == 1);

    const auto one = kmeans(store, ids, 1, 3);
    REQUIRE(one.size() == 1);
    const auto mean = centroid_of(store, ids);
    CHECK(one[0].centroid[0] == doctest::Approx(mean[0]));
    CHECK(one[0].centroid[1] == doctest::Approx(mean[1]));
    CHECK_THROWS_AS(kmeans(store, ids, ids.size() + 1, 3), InvalidArgument);
  }

  TEST_CASE("kmeans finds blob-pure clusters with optimal sse") {
    std::mt19937_64 rng(2);
    std::vector<SampleId> ids;
    const auto store = three_blobs(rng, 10, ids);
    KMeansOptions opts;
    opts.restarts = 5;
    const auto clusters = kmeans(store, ids, 3, 7, std::nullopt, opts);
    REQUIRE(clusters.size() == 3);
    for (const auto& c : clusters) {
      CHECK(c.members.size() == 10);
      const auto blob = (std::stoi(c.members.front().substr(1))) / 10;
      for (const auto& m : c.members) CHECK(std::stoi(m.substr(1)) / 10 == blob);
    }
    // the blob partition is optimal for this separation
    std::vector<Cluster> truth(3);
    for (std::size_t i = 0; i < ids.size(); ++i) truth[i / 10].members.push_back(ids[i]);
    for (auto& c : truth) c.centroid = centroid_of(store, c.members);
    CHECK(within_cluster_sse(store, clusters) == doctest::Approx(within_cluster_sse(store, truth)).epsilon(1e-12));

    const auto again = kmeans(store, ids, 3, 7, std::nullopt, opts);
    for (std::size_t c = 0; c < 3; ++c) CHECK(again[c].members == clusters[c].members);
  }

  TEST_CASE("bic matches the closed form") {
    PointStore store;
    store.add("a", {0.0});
    store.add("b", {2.0});
    store.add("c", {10.0});
    Cluster left{0, {"a", "b"}, "a", {1.0}, {}};
    Cluster right{1, {"c"}, "c", {10.0}, {}};
    const std::vector<Cluster> cs{left, right};
    // sse 2, variance 2/(1*(3-2)) = 2
    const double var = 2.0;
    const double logl = 2 * std::log(2.0 / 3) + std::log(1.0 / 3) - 1.5 * std::log(2 * M_PI * var) - 2.0 / (2 * var);
    CHECK(bic_score(store, cs) == doctest::Approx(logl - 0.5 * 2 * 2 * std::log(3.0)));
  }

  TEST_CASE("xmeans with a fixed range returns that k") {
    std::mt19937_64 rng(3);
    std::vector<SampleId> ids;
    const auto store = three_blobs(rng, 10, ids);
    CHECK(xmeans(store, ids, 2, 2, 1).clusters.size() == 2);
    const auto r = xmeans(store, ids, 1, 6, 1);
    CHECK(r.clusters.size() == 3);
    const auto best = std::max_element(r.bic_by_k.begin(), r.bic_by_k.end(),
                                       [](const auto& a, const auto& b) { return a.second < b.second; });
    CHECK(best->first == 3);
    CHECK_THROWS_AS(xmeans(store, ids, 3, 2, 1), InvalidArgument);
  }

  TEST_CASE("representative is the closest member with id ties") {
    PointStore store;
    store.add("b", {1.0});
    store.add("a", {-1.0});
    Cluster pair{0, {"a", "b"}, "", {}, {}};
    refresh_cluster(pair, store);
    CHECK(pair.representative == "a");

    std::mt19937_64 rng(4);
    PointStore big;
    std::vector<SampleId> ids;
    for (int i = 0; i < 10; ++i) {
      ids.push_back(fixtures::id_of(i));
      big.add(ids.back(), fixtures::random_vector(rng, 3));
    }
    Cluster c{0, ids, "", {}, {}};
    refresh_cluster(c, big);
    for (const auto& id : ids) {
      CHECK(squared_distance(big.features(c.representative), c.centroid) <=
            squared_distance(big.features(id), c.centroid));
    }
  }

  TEST_CASE("label sharing") {
    PointStore store;
    for (const auto* id : {"a", "b", "c", "d"}) store.add(id, {0.0});
    store.reveal("a", bits({1, 1, 0}));
    Cluster c{0, {"a", "b", "c", "d"}, "a", {0.0}, {}};
    CHECK(label_share_ok("a", c, store));
    store.reveal("b", bits({0, 1, 1}));
    CHECK(label_share_ok("a", c, store));
    store.reveal("c", bits({0, 0, 1}));
    CHECK(label_share_ok("c", c, store));
    PointStore disjoint;
    disjoint.add("x", {0.0});
    disjoint.add("y", {0.0});
    disjoint.reveal("x", bits({1, 0}));
    disjoint.reveal("y", bits({0, 1}));
    Cluster d{0, {"x", "y"}, "x", {0.0}, {}};
    CHECK_FALSE(label_share_ok("x", d, disjoint));
    CHECK_THROWS_AS(label_share_ok("z", d, disjoint), InvalidArgument);
  }

  TEST_CASE("redistribute splits unlabeled members by proximity") {
    PointStore store;
    store.add("rep", {0.0});
    store.add("u1", {0.2});
    store.add("u2", {-0.2});
    store.add("seed", {10.0});
    store.add("u3", {10.1});
    store.add("u4", {9.8});
    store.add("lab", {9.9});
    store.reveal("lab", bits({1}));
    store.reveal("seed", bits({1}));
    std::vector<Cluster> cs{{0, {"lab", "rep", "seed", "u1", "u2", "u3", "u4"}, "", {}, {}}};
    auto state = make_state(cs, store);
    state.cluster(0).representative = "rep";  // force rep(C) as the first 2-means centre
    const int nid = redistribute(state, 0, "seed", store);
    CHECK(state.cluster(nid).members == std::vector<SampleId>{"seed", "u3", "u4"});
    CHECK(state.cluster(0).members == std::vector<SampleId>{"lab", "rep", "u1", "u2"});
    CHECK(state.assignment.at("u3") == nid);
    CHECK(all_members(state) == std::vector<SampleId>{"lab", "rep", "seed", "u1", "u2", "u3", "u4"});

    // a singleton cluster moves wholesale and the emptied original is removed
    PointStore one;
    one.add("s", {1.0});
    one.reveal("s", bits({1}));
    auto lone = make_state({{0, {"s"}, "", {}, {}}}, one);
    const int moved = redistribute(lone, 0, "s", one);
    CHECK(lone.clusters.size() == 1);
    CHECK_FALSE(lone.has_cluster(0));
    CHECK(lone.cluster_of("s").id == moved);
    CHECK_THROWS_AS(redistribute(lone, moved, "t", one), InvalidArgument);
  }

  TEST_CASE("empirical entropy") {
    EntropyParams params{{0.8, {0.4, 0.7}}, false};
    PointStore store;
    store.add("a", {1.0, 2.0});
    store.add("b", {1.0, 2.0});
    store.reveal("a", bits({1, 0}));
    store.reveal("b", bits({1, 0}));
    const std::vector<SampleId> pair{"a", "b"};
    const double c = std::exp(log_combined_kernel(store.features("a"), *store.labels("a"), store.features("a"),
                                                  *store.labels("a"), params.kernel));
    CHECK(empirical_entropy(pair, store, params) == doctest::Approx(-std::log(c)).epsilon(1e-13));
    const std::vector<SampleId> single{"a"};
    CHECK_THROWS_AS(empirical_entropy(single, store, params), InvalidArgument);

    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 20; ++trial) {
      const auto pts = fixtures::random_points(rng, 3, 2, 2);
      PointStore s;
      std::vector<SampleId> ids;
      for (const auto& p : pts) {
        s.add(p.id, p.features);
        s.reveal(p.id, fixtures::to_labels(p.labels));
        ids.push_back(p.id);
      }
      for (bool norm : {false, true}) {
        EntropyParams ep{{0.8, {0.4, 0.7}}, norm};
        const double h = empirical_entropy(ids, s, ep);
        CHECK(fixtures::relative_error(naive::entropy(pts, 0.8L, {0.4, 0.7}, norm), h) < 1e-10);
        CHECK(h >= 0.0);
      }
    }
  }

  TEST_CASE("h_worst") {
    EntropyParams params{{1.0, {0.5}}, false};
    PointStore store;
    for (int i = 0; i < 4; ++i) store.add(fixtures::id_of(i), {static_cast<double>(i)});
    auto state = make_state({{0, {"p000", "p001"}, "", {}, {}}, {1, {"p002", "p003"}, "", {}, {}}}, store);
    CHECK_FALSE(update_h_worst(state, store, params).has_value());
    for (int i = 0; i < 4; ++i) store.reveal(fixtures::id_of(i), bits({1}));
    const auto worst = update_h_worst(state, store, params);
    REQUIRE(worst.has_value());
    const double h0 = empirical_entropy(state.clusters[0], store, params);
    const double h1 = empirical_entropy(state.clusters[1], store, params);
    CHECK(*worst == std::max(h0, h1));
    CHECK(state.h_worst == worst);
  }

  TEST_CASE("refine with no h_worst enforces label sharing") {
    EntropyParams params{{1.0, {0.5, 0.5}}, false};
    PointStore store;
    for (const auto* id : {"a", "b", "u"}) store.add(id, {0.0});
    store.reveal("a", bits({1, 0}));
    auto state = make_state({{0, {"a", "b", "u"}, "", {}, {}}}, store);
    store.reveal("b", bits({0, 1}));
    const std::vector<SampleId> batch{"b"};
    refine_after_batch(state, batch, store, params);
    CHECK(state.clusters.size() == 2);
    CHECK(state.cluster_of("a").id != state.cluster_of("b").id);
  }

  TEST_CASE("refine grid search picks the first qualifying labeled member") {
    // m1, m3, m4, m5 coincide; m2 sits far away with other labels.
    PointStore store;
    const std::vector<std::pair<SampleId, std::vector<double>>> pts{
        {"m1", {0.0, 0.0}}, {"m2", {3.0, 3.0}}, {"m3", {0.1, 0.0}}, {"m4", {0.0, 0.1}}, {"m5", {0.1, 0.1}}};
    for (const auto& [id, f] : pts) store.add(id, f);
    store.add("u", {0.05, 0.05});
    for (const auto& [id, f] : pts) store.reveal(id, id == "m2" ? bits({0, 1}) : bits({1, 0}));
    EntropyParams params{{1.0, {0.6, 0.3}}, false};

    auto h_without = [&](const SampleId& drop) {
      std::vector<SampleId> rest;
      for (const auto& [id, f] : pts) {
        if (id != drop) rest.push_back(id);
      }
      return empirical_entropy(rest, store, params);
    };
    std::vector<SampleId> all;
    for (const auto& [id, f] : pts) all.push_back(id);
    const double full = empirical_entropy(all, store, params);
    const double threshold = 0.5 * (h_without("m1") + h_without("m2"));
    REQUIRE(h_without("m2") <= threshold);
    REQUIRE(h_without("m1") > threshold);
    REQUIRE(full > threshold);

    auto state = make_state({{0, {"m1", "m2", "m3", "m4", "m5", "u"}, "", {}, {}}}, store);
    state.h_worst = threshold;
    const std::vector<SampleId> batch{"m5"};
    refine_after_batch(state, batch, store, params);
    CHECK(state.clusters.size() == 2);
    CHECK(state.cluster_of("m2").id != 0);
    CHECK(state.cluster_of("m1").id == 0);
    CHECK(all_members(state) == std::vector<SampleId>{"m1", "m2", "m3", "m4", "m5", "u"});
  }

  TEST_CASE("refine leaves clusters under the threshold alone") {
    PointStore store;
    for (const auto* id : {"a", "b", "c"}) store.add(id, {0.0});
    store.reveal("a", bits({1}));
    store.reveal("b", bits({1}));
    EntropyParams params{{1.0, {0.5}}, false};
    auto state = make_state({{0, {"a", "b", "c"}, "", {}, {}}}, store);
    update_h_worst(state, store, params);
    store.reveal("c", bits({1}));
    const std::vector<SampleId> batch{"c"};
    refine_after_batch(state, batch, store, params);
    CHECK(state.clusters.size() == 1);
    CHECK(state.clusters[0].labeled_members == std::vector<SampleId>{"a", "b", "c"});
  }

  TEST_CASE("initial clustering is deterministic and a partition") {
    std::mt19937_64 rng(10);
    std::vector<SampleId> ids;
    auto store = three_blobs(rng, 8, ids);
    store.reveal(ids[0], bits({1, 0}));
    store.reveal(ids[1], bits({0, 1}));
    const auto a = initial_clustering(store, ids, 2, default_k_max(ids.size()), 5);
    const auto b = initial_clustering(store, ids, 2, default_k_max(ids.size()), 5);
    CHECK(all_members(a) == all_members(b));
    CHECK(a.assignment == b.assignment);
    CHECK(a.cluster_of(ids[0]).id != a.cluster_of(ids[1]).id);
    auto sorted = ids;
    std::sort(sorted.begin(), sorted.end());
    CHECK(all_members(a) == sorted);

    const auto summary = cluster_summary(a, store, {{1.0, {0.5, 0.5}}, false});
    REQUIRE(summary.is_array());
    CHECK(summary[0].contains("representative_id"));
    CHECK(summary[0].at("entropy").is_null());
  }
}
