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

#include "htim/graph.hpp"

#include <algorithm>
#include <map>

namespace htim::graph {

long InteractionGraph::find(const std::string& id) const {
    auto it = index.find(id);
    return it == index.end() ? -1 : static_cast<long>(it->second);
}

double InteractionGraph::undirected_weight(std::size_t a, std::size_t b) const {
    const auto& nb = undirected[a];
    auto it = std::lower_bound(nb.begin(), nb.end(), b, [](const Neighbor& n, std::size_t v) { return n.node < v; });
    return (it != nb.end() && it->node == b) ? it->weight : 0.0;
}

double InteractionGraph::degree(std::size_t a) const {
    double d = 0.0;
    for (const auto& n : undirected[a]) d += n.weight;
    return d;
}

InteractionGraph build_graph(const std::vector<corpus::RetweetEdge>& edges, const std::vector<std::string>& extra_nodes) {
    InteractionGraph g;
    auto node = [&](const std::string& id) {
        auto [it, fresh] = g.index.emplace(id, g.ids.size());
        if (fresh) g.ids.push_back(id);
        return it->second;
    };
    std::map<std::pair<std::size_t, std::size_t>, double> directed;
    for (const auto& e : edges) {
        if (e.source == e.target) throw DataError("self-loop retweet '" + e.source + "'");
        if (e.weight == 0) throw DataError("retweet weight must be >= 1");
        const auto s = node(e.source);
        const auto t = node(e.target);
        directed[{s, t}] += static_cast<double>(e.weight);
    }
    for (const auto& id : extra_nodes) node(id);
    if (g.size() < 2) throw DataError("interaction graph needs at least 2 nodes");

    g.out.assign(g.size(), {});
    std::vector<std::map<std::size_t, double>> und(g.size());
    for (const auto& [st, w] : directed) {
        g.out[st.first].push_back({st.second, w});
        und[st.first][st.second] += w;
        und[st.second][st.first] += w;
    }
    g.undirected.assign(g.size(), {});
    for (std::size_t v = 0; v < g.size(); ++v)
        for (const auto& [u, w] : und[v]) g.undirected[v].push_back({u, w});
    return g;
}

void WalkConfig::validate() const {
    if (!(p > 0.0) || !(q > 0.0)) throw UsageError("node2vec p and q must be > 0");
    if (walks_per_node < 1 || walk_length < 1 || window < 1 || epochs < 1)
        throw UsageError("walk lengths, counts and window must be positive");
}

namespace {
double bias(const InteractionGraph& g, std::size_t previous, std::size_t next, double p, double q) {
    if (next == previous) return 1.0 / p;
    if (g.adjacent(previous, next)) return 1.0;
    return 1.0 / q;
}
}  // namespace

std::vector<double> transition_probabilities(const InteractionGraph& g, std::size_t previous, std::size_t current,
                                             double p, double q) {
    const auto& nb = g.undirected[current];
    std::vector<double> probs(nb.size());
    double total = 0.0;
    for (std::size_t i = 0; i < nb.size(); ++i) {
        const double b = previous == current ? 1.0 : bias(g, previous, nb[i].node, p, q);
        probs[i] = nb[i].weight * b;
        total += probs[i];
    }
    for (auto& x : probs) x /= total;
    return probs;
}

WalkSampler::WalkSampler(const InteractionGraph& g, double p, double q)
    : g_(g), p_(p), q_(q), max_bias_(std::max({1.0 / p, 1.0, 1.0 / q})) {
    alias_.resize(g.size());
    for (std::size_t v = 0; v < g.size(); ++v) {
        if (g.undirected[v].empty()) continue;
        std::vector<double> w;
        w.reserve(g.undirected[v].size());
        for (const auto& n : g.undirected[v]) w.push_back(n.weight);
        alias_[v] = AliasTable(w);
    }
}

std::size_t WalkSampler::step(std::size_t previous, std::size_t current, bool first, Rng& rng) const {
    const auto& nb = g_.undirected[current];
    if (first || (p_ == 1.0 && q_ == 1.0)) return nb[alias_[current].sample(rng)].node;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    while (true) {
        const std::size_t next = nb[alias_[current].sample(rng)].node;
        if (unit(rng) * max_bias_ < bias(g_, previous, next, p_, q_)) return next;
    }
}

Walk WalkSampler::walk(std::size_t start, int length, Rng& rng) const {
    Walk w;
    w.reserve(static_cast<std::size_t>(length));
    w.push_back(start);
    if (g_.undirected[start].empty()) return w;
    while (static_cast<int>(w.size()) < length) {
        const std::size_t cur = w.back();
        const std::size_t prev = w.size() > 1 ? w[w.size() - 2] : cur;
        w.push_back(step(prev, cur, w.size() == 1, rng));
    }
    return w;
}

namespace {
std::vector<std::size_t> walk_starts(const InteractionGraph& g, const WalkConfig& cfg) {
    Rng rng(cfg.seed);
    std::vector<std::size_t> order(g.size());
    std::vector<std::size_t> starts;
    starts.reserve(g.size() * static_cast<std::size_t>(cfg.walks_per_node));
    for (int r = 0; r < cfg.walks_per_node; ++r) {
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::shuffle(order.begin(), order.end(), rng);
        starts.insert(starts.end(), order.begin(), order.end());
    }
    return starts;
}
}  // namespace

std::vector<Walk> generate_walks_serial(const InteractionGraph& g, const WalkConfig& cfg) {
    cfg.validate();
    const WalkSampler sampler(g, cfg.p, cfg.q);
    const auto starts = walk_starts(g, cfg);
    std::vector<Walk> walks(starts.size());
    for (std::size_t i = 0; i < starts.size(); ++i) {
        Rng rng(derive_seed(cfg.seed, i));
        walks[i] = sampler.walk(starts[i], cfg.walk_length, rng);
    }
    return walks;
}

std::vector<Walk> generate_walks(const InteractionGraph& g, const WalkConfig& cfg) {
    cfg.validate();
    const WalkSampler sampler(g, cfg.p, cfg.q);
    const auto starts = walk_starts(g, cfg);
    std::vector<Walk> walks(starts.size());
    const long n = static_cast<long>(starts.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (long i = 0; i < n; ++i) {
        Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(i)));
        walks[i] = sampler.walk(starts[i], cfg.walk_length, rng);
    }
    return walks;
}

}  // namespace htim::graph
