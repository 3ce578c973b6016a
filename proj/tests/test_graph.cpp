/*
 * Copyright 2026 The HTIM Toolkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cmath>
#include <map>
#include <random>

#include "doctest.h"
#include "htim/alias.hpp"
#include "htim/graph.hpp"

using namespace htim;
using namespace htim::graph;
using corpus::RetweetEdge;

namespace {

std::vector<RetweetEdge> path_edges(int n, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> w(1, 5);
    std::vector<RetweetEdge> e;
    for (int i = 0; i + 1 < n; ++i) e.push_back({"n" + std::to_string(i), "n" + std::to_string(i + 1),
                                                 static_cast<std::uint64_t>(w(rng))});
    return e;
}

std::vector<RetweetEdge> star_edges(int leaves, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> w(1, 5);
    std::vector<RetweetEdge> e;
    for (int i = 1; i <= leaves; ++i)
        e.push_back({"n" + std::to_string(i), "n0", static_cast<std::uint64_t>(w(rng))});
    return e;
}

std::vector<RetweetEdge> triangle_edges(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> w(1, 5);
    return {{"a", "b", static_cast<std::uint64_t>(w(rng))},
            {"b", "c", static_cast<std::uint64_t>(w(rng))},
            {"c", "a", static_cast<std::uint64_t>(w(rng))}};
}

// Max deviation between the p = q = 1 law and weight-proportional moves over
// every (previous, current) configuration of g.
double max_unbiased_deviation(const InteractionGraph& g) {
    double worst = 0.0;
    for (std::size_t v = 0; v < g.size(); ++v) {
        const auto& nb = g.undirected[v];
        if (nb.empty()) continue;
        double total = 0;
        for (const auto& x : nb) total += x.weight;
        std::vector<std::size_t> prevs{v};
        for (const auto& x : nb) prevs.push_back(x.node);
        for (auto t : prevs) {
            const auto probs = transition_probabilities(g, t, v, 1.0, 1.0);
            for (std::size_t k = 0; k < nb.size(); ++k)
                worst = std::max(worst, std::abs(probs[k] - nb[k].weight / total));
        }
    }
    return worst;
}

}  // namespace

TEST_CASE("parallel edges merge and the undirected view is symmetric") {
    const auto g = build_graph({{"a", "b", 1}, {"a", "b", 2}});
    REQUIRE(g.size() == 2);
    REQUIRE(g.out[0].size() == 1);
    CHECK(g.out[0][0].weight == 3.0);
    CHECK(g.degree(0) == g.degree(1));
    const auto h = build_graph({{"a", "b", 2}, {"b", "a", 5}, {"b", "c", 1}});
    CHECK(h.undirected_weight(0, 1) == 7.0);
    CHECK(h.undirected_weight(1, 0) == 7.0);
    CHECK(h.undirected_weight(0, 2) == 0.0);
    CHECK(h.ids == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("graphs with fewer than two nodes are rejected") {
    CHECK_THROWS_AS(build_graph({}), DataError);
    CHECK_THROWS_AS(build_graph({}, {"solo"}), DataError);
}

TEST_CASE("p = q = 1 law is weight-proportional on small paths, triangles and stars") {
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 20; ++rep) {
        for (int n = 2; n <= 5; ++n) CHECK(max_unbiased_deviation(build_graph(path_edges(n, rng))) <= 1e-12);
        for (int l = 2; l <= 4; ++l) CHECK(max_unbiased_deviation(build_graph(star_edges(l, rng))) <= 1e-12);
        CHECK(max_unbiased_deviation(build_graph(triangle_edges(rng))) <= 1e-12);
    }
}

TEST_CASE("path middle node splits evenly") {
    const auto g = build_graph({{"a", "b", 1}, {"b", "c", 1}});
    const auto probs = transition_probabilities(g, 1, 1, 1.0, 1.0);
    CHECK(probs == std::vector<double>{0.5, 0.5});
}

TEST_CASE("in-out bias on a triangle with a pendant") {
    // a-b-c triangle, d hangs off b. Walking a -> b: back to a costs 1/p,
    // c is adjacent to a (1), d is two hops from a (1/q).
    const auto g = build_graph({{"a", "b", 1}, {"b", "c", 1}, {"c", "a", 1}, {"b", "d", 1}});
    const std::size_t a = g.find("a"), b = g.find("b");
    const double p = 1.0, q = 0.5;
    const auto probs = transition_probabilities(g, a, b, p, q);
    std::map<std::string, double> expect{{"a", 1 / p}, {"c", 1.0}, {"d", 1 / q}};
    double z = 0;
    for (auto& kv : expect) z += kv.second;
    for (std::size_t k = 0; k < g.undirected[b].size(); ++k)
        CHECK(probs[k] == doctest::Approx(expect[g.ids[g.undirected[b][k].node]] / z).epsilon(1e-14));

    // Sampled second steps follow the exact law within 3 standard errors.
    WalkSampler sampler(g, p, q);
    Rng rng(5);
    const int n = 1'000'000;
    std::map<std::size_t, long> counts;
    for (int i = 0; i < n; ++i) ++counts[sampler.step(a, b, false, rng)];
    for (std::size_t k = 0; k < g.undirected[b].size(); ++k) {
        const double pk = probs[k];
        const double se = std::sqrt(n * pk * (1 - pk));
        CHECK(std::abs(counts[g.undirected[b][k].node] - n * pk) <= 3 * se);
    }
}

TEST_CASE("alias sampler frequencies stay within three standard errors") {
    const std::vector<double> w{0.5, 3.0, 1.0, 0.0, 7.25, 2.0};
    AliasTable t(w);
    double total = 0;
    for (double x : w) total += x;
    Rng rng(2024);
    const int n = 1'000'000;
    std::vector<long> counts(w.size(), 0);
    for (int i = 0; i < n; ++i) ++counts[t.sample(rng)];
    for (std::size_t k = 0; k < w.size(); ++k) {
        const double pk = w[k] / total;
        CHECK(t.probability(k) == doctest::Approx(pk).epsilon(1e-14));
        CHECK(std::abs(counts[k] - n * pk) <= 3 * std::sqrt(n * pk * (1 - pk)) + 1e-9);
    }
    CHECK(counts[3] == 0);
}

TEST_CASE("alias table rejects bad weights") {
    CHECK_THROWS_AS(AliasTable(std::vector<double>{1.0, -1.0}), NumericError);
    CHECK_THROWS_AS(AliasTable(std::vector<double>{0.0, 0.0}), NumericError);
    CHECK_THROWS_AS(AliasTable(std::vector<double>{1.0, NAN}), NumericError);
}

TEST_CASE("walk corpus shape and adjacency") {
    std::mt19937_64 rng(3);
    auto edges = path_edges(5, rng);
    const auto g = build_graph(edges, {"iso"});
    WalkConfig cfg;
    cfg.walks_per_node = 3;
    cfg.walk_length = 12;
    cfg.q = 0.5;
    const auto walks = generate_walks_serial(g, cfg);
    CHECK(walks.size() == 3 * g.size());
    std::map<std::size_t, int> starts;
    for (const auto& w : walks) {
        ++starts[w.front()];
        if (w.front() == static_cast<std::size_t>(g.find("iso"))) {
            CHECK(w.size() == 1);
            continue;
        }
        CHECK(w.size() == 12);
        for (std::size_t i = 1; i < w.size(); ++i) CHECK(g.adjacent(w[i - 1], w[i]));
    }
    for (std::size_t v = 0; v < g.size(); ++v) CHECK(starts[v] == 3);
}

TEST_CASE("walks are seeded and identical across serial and parallel generation") {
    std::mt19937_64 rng(9);
    const auto g = build_graph(star_edges(4, rng));
    WalkConfig cfg;
    cfg.walks_per_node = 4;
    cfg.walk_length = 20;
    cfg.q = 0.5;
    const auto a = generate_walks_serial(g, cfg);
    set_threads(2);
    const auto b = generate_walks(g, cfg);
    set_threads(1);
    CHECK(a == b);
    CHECK(a == generate_walks_serial(g, cfg));
    cfg.seed = 2;
    CHECK(a != generate_walks_serial(g, cfg));
}

TEST_CASE("walk config validation and defaults") {
    WalkConfig c;
    c.p = 0.0;
    CHECK_THROWS_AS(c.validate(), UsageError);
    c = WalkConfig{};
    c.walk_length = 0;
    CHECK_THROWS_AS(c.validate(), UsageError);
    const auto n2v = WalkConfig::node2vec();
    CHECK(n2v.p == 1.0);
    CHECK(n2v.q == 0.5);
    CHECK(n2v.walks_per_node == 10);
    CHECK(n2v.walk_length == 80);
    CHECK(n2v.window == 10);
    CHECK(n2v.epochs == 1);
}
