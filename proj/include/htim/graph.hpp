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

#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "htim/alias.hpp"
#include "htim/common.hpp"
#include "htim/corpus.hpp"

namespace htim::graph {

struct Neighbor {
    std::size_t node;
    double weight;
};

/// Retweet graph. Directed adjacency keeps retweeter -> retweeted; the
/// undirected view sums the weights of both directions and is what random
/// walks run on. Neighbor lists are sorted by node index.
struct InteractionGraph {
    std::vector<std::string> ids;
    std::unordered_map<std::string, std::size_t> index;
    std::vector<std::vector<Neighbor>> out;         // directed
    std::vector<std::vector<Neighbor>> undirected;  // symmetric

    std::size_t size() const { return ids.size(); }
    long find(const std::string& id) const;
    double undirected_weight(std::size_t a, std::size_t b) const;  // 0 when not adjacent
    bool adjacent(std::size_t a, std::size_t b) const { return undirected_weight(a, b) > 0.0; }
    double degree(std::size_t a) const;  // weighted, undirected
};

// Nodes are numbered in first-seen order (source before target). Extra ids
// not touched by any edge become isolated nodes.
InteractionGraph build_graph(const std::vector<corpus::RetweetEdge>& edges,
                             const std::vector<std::string>& extra_nodes = {});

struct WalkConfig {
    int walks_per_node = 10;
    int walk_length = 80;
    int window = 10;
    int epochs = 1;
    double p = 1.0;  // return
    double q = 1.0;  // in-out
    std::uint64_t seed = 1;

    void validate() const;
    static WalkConfig deepwalk() { return {}; }
    static WalkConfig node2vec() {
        WalkConfig c;
        c.q = 0.5;
        return c;
    }
};

using Walk = std::vector<std::size_t>;

// Exact second-order transition law from `current`, having arrived from
// `previous` (pass previous == current for the first step, which yields the
// weight-proportional first-order law). Ordered like graph.undirected[current].
std::vector<double> transition_probabilities(const InteractionGraph& g, std::size_t previous,
                                             std::size_t current, double p, double q);

/// Biased random-walk sampler. First-order moves use per-node alias tables;
/// the p/q bias is applied exactly by rejection against max(1/p, 1, 1/q).
class WalkSampler {
public:
    WalkSampler(const InteractionGraph& g, double p, double q);
    std::size_t step(std::size_t previous, std::size_t current, bool first, Rng& rng) const;
    Walk walk(std::size_t start, int length, Rng& rng) const;

private:
    const InteractionGraph& g_;
    double p_, q_, max_bias_;
    std::vector<AliasTable> alias_;
};

// walks_per_node rounds; each round visits every node in a seeded shuffled
// order. Walk i is generated from its own RNG stream, so the OpenMP and serial
// versions return identical corpora.
std::vector<Walk> generate_walks(const InteractionGraph& g, const WalkConfig& cfg);
std::vector<Walk> generate_walks_serial(const InteractionGraph& g, const WalkConfig& cfg);

}  // namespace htim::graph
