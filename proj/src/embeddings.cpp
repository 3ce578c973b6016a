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

#include "htim/embeddings.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace htim::graph {

std::string to_string(Method m) {
    switch (m) {
        case Method::DeepWalk: return "DW";
        case Method::Node2Vec: return "N2V";
        case Method::Relational: return "RE";
    }
    return "";
}

Method parse_method(std::string_view s) {
    std::string l(s);
    for (auto& c : l) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (l == "dw" || l == "deepwalk") return Method::DeepWalk;
    if (l == "n2v" || l == "node2vec") return Method::Node2Vec;
    if (l == "re" || l == "relational") return Method::Relational;
    throw UsageError("unknown graph method '" + std::string(s) + "'");
}

void EmbeddingTable::add(const std::string& id, std::span<const double> v) {
    if (ids.empty() && vectors.cols == 0) vectors.cols = v.size();
    if (v.size() != vectors.cols) throw DataError("embedding dimension mismatch for '" + id + "'");
    if (!index.emplace(id, ids.size()).second) throw DataError("duplicate embedding id '" + id + "'");
    ids.push_back(id);
    vectors.data.insert(vectors.data.end(), v.begin(), v.end());
    ++vectors.rows;
}

Lookup lookup(const EmbeddingTable& table, const std::string& id) {
    Lookup l;
    auto it = table.index.find(id);
    if (it == table.index.end()) {
        l.values.assign(table.dim(), 0.0);
        l.absent = true;
        return l;
    }
    auto r = table.vectors.row(it->second);
    l.values.assign(r.begin(), r.end());
    return l;
}

void write_embeddings(const EmbeddingTable& table, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out << table.size() << ' ' << table.dim() << '\n';
    for (std::size_t i = 0; i < table.size(); ++i) {
        out << table.ids[i];
        for (double x : table.vectors.row(i)) out << ' ' << format_double(x);
        out << '\n';
    }
}

EmbeddingTable read_embeddings(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw DataError(path.string() + ": missing '<count> <dim>' header");
    std::istringstream hdr(line);
    std::size_t count = 0, dim = 0;
    if (!(hdr >> count >> dim)) throw DataError(path.string() + ":1: malformed header");
    EmbeddingTable t;
    t.vectors.cols = dim;
    std::size_t lineno = 1;
    Vector v(dim);
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const char* p = line.data();
        const char* end = p + line.size();
        const char* sp = std::find(p, end, ' ');
        std::string id(p, sp);
        p = sp;
        for (std::size_t k = 0; k < dim; ++k) {
            if (p == end) throw DataError(path.string() + ":" + std::to_string(lineno) + ": too few values");
            ++p;
            auto [q, ec] = std::from_chars(p, end, v[k]);
            if (ec != std::errc()) throw DataError(path.string() + ":" + std::to_string(lineno) + ": bad number");
            p = q;
        }
        if (p != end) throw DataError(path.string() + ":" + std::to_string(lineno) + ": too many values");
        t.add(id, v);
    }
    if (t.size() != count)
        throw DataError(path.string() + ": header declares " + std::to_string(count) + " rows, found " +
                        std::to_string(t.size()));
    return t;
}

double pair_loss(const Matrix& input, const Matrix& output, std::size_t in_row, std::size_t positive,
                 std::span<const std::size_t> negatives) {
    return sgns_loss(input.row(in_row), output, positive, negatives);
}

double pair_step(Matrix& input, Matrix& output, std::size_t in_row, std::size_t positive,
                 std::span<const std::size_t> negatives, double lr) {
    auto h = input.row(in_row);
    Vector grad_h(h.size(), 0.0);
    const double loss = sgns_update_outputs(h, output, positive, negatives, lr, grad_h);
    for (std::size_t k = 0; k < h.size(); ++k) h[k] -= lr * grad_h[k];
    return loss;
}

namespace {

constexpr int kSegments = 10;

struct LossAccum {
    std::vector<double> seg_loss = std::vector<double>(kSegments, 0.0);
    std::vector<double> seg_n = std::vector<double>(kSegments, 0.0);
    double total = 0.0;
    double n = 0.0;

    void add(double loss, double progress) {
        const int s = std::min(kSegments - 1, static_cast<int>(progress * kSegments));
        seg_loss[s] += loss;
        seg_n[s] += 1.0;
        total += loss;
        n += 1.0;
    }
    void merge(const LossAccum& o) {
        for (int s = 0; s < kSegments; ++s) {
            seg_loss[s] += o.seg_loss[s];
            seg_n[s] += o.seg_n[s];
        }
        total += o.total;
        n += o.n;
    }
};

void finish(LossTrace& trace, const LossAccum& acc) {
    trace.segment_mean.clear();
    for (int s = 0; s < kSegments; ++s)
        if (acc.seg_n[s] > 0) trace.segment_mean.push_back(acc.seg_loss[s] / acc.seg_n[s]);
}

TrainedEmbedding init_embedding(std::size_t nodes, std::size_t dim, std::uint64_t seed) {
    if (dim == 0) throw UsageError("embedding dimension must be positive");
    TrainedEmbedding te;
    te.input = Matrix(nodes, dim);
    te.output = Matrix(nodes, dim, 0.0);
    Rng rng(seed);
    init_uniform(te.input, rng);
    return te;
}

void export_table(TrainedEmbedding& te, const InteractionGraph& g, const std::string& method,
                  RelationalOutput which = RelationalOutput::Source) {
    te.table = EmbeddingTable{};
    te.table.method = method;
    te.table.vectors.cols = te.input.cols;
    Vector v(te.input.cols);
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto u = te.input.row(i);
        auto o = te.output.row(i);
        for (std::size_t k = 0; k < v.size(); ++k) {
            switch (which) {
                case RelationalOutput::Source: v[k] = u[k]; break;
                case RelationalOutput::Target: v[k] = o[k]; break;
                case RelationalOutput::Average: v[k] = 0.5 * (u[k] + o[k]); break;
            }
        }
        te.table.add(g.ids[i], v);
    }
    if (!all_finite(te.table.vectors.data)) throw NumericError(method + " training diverged (non-finite values)");
}

void skipgram_range(TrainedEmbedding& te, const std::vector<Walk>& walks, const AliasTable& noise,
                    const SkipGramConfig& cfg, std::size_t begin, std::size_t end, Rng& rng,
                    std::atomic<std::size_t>& done, std::size_t total, LossAccum& acc) {
    std::vector<std::size_t> negs;
    for (std::size_t w = begin; w < end; ++w) {
        const auto& walk = walks[w];
        const long len = static_cast<long>(walk.size());
        for (long i = 0; i < len; ++i) {
            const double progress =
                static_cast<double>(done.fetch_add(1, std::memory_order_relaxed)) / static_cast<double>(total);
            const double lr = decayed_lr(cfg.lr_start, cfg.lr_end, progress);
            for (long j = std::max(0L, i - cfg.window); j <= std::min(len - 1, i + cfg.window); ++j) {
                if (j == i) continue;
                draw_negatives(noise, rng, walk[j], cfg.negatives, negs);
                acc.add(pair_step(te.input, te.output, walk[i], walk[j], negs, lr), progress);
            }
        }
    }
}

AliasTable walk_noise(const std::vector<Walk>& walks, std::size_t nodes, std::size_t& total_tokens) {
    std::vector<double> counts(nodes, 0.0);
    total_tokens = 0;
    for (const auto& w : walks) {
        for (auto v : w) counts[v] += 1.0;
        total_tokens += w.size();
    }
    return unigram_noise(counts);
}

}  // namespace

TrainedEmbedding train_skipgram_walks_serial(const std::vector<Walk>& walks, const InteractionGraph& g,
                                             const SkipGramConfig& cfg) {
    if (walks.empty()) throw DataError("skip-gram needs a nonempty walk corpus");
    std::size_t tokens = 0;
    const AliasTable noise = walk_noise(walks, g.size(), tokens);
    TrainedEmbedding te = init_embedding(g.size(), cfg.dim, cfg.seed);
    Rng rng(derive_seed(cfg.seed, 0));
    const std::size_t total = std::max<std::size_t>(1, tokens * static_cast<std::size_t>(cfg.epochs));
    std::atomic<std::size_t> done{0};
    LossAccum all;
    for (int ep = 0; ep < cfg.epochs; ++ep) {
        LossAccum acc;
        skipgram_range(te, walks, noise, cfg, 0, walks.size(), rng, done, total, acc);
        te.trace.epoch_mean.push_back(acc.n > 0 ? acc.total / acc.n : 0.0);
        all.merge(acc);
    }
    finish(te.trace, all);
    export_table(te, g, "skipgram");
    return te;
}

TrainedEmbedding train_skipgram_walks_parallel(const std::vector<Walk>& walks, const InteractionGraph& g,
                                               const SkipGramConfig& cfg) {
    if (walks.empty()) throw DataError("skip-gram needs a nonempty walk corpus");
    std::size_t tokens = 0;
    const AliasTable noise = walk_noise(walks, g.size(), tokens);
    TrainedEmbedding te = init_embedding(g.size(), cfg.dim, cfg.seed);
    const std::size_t total = std::max<std::size_t>(1, tokens * static_cast<std::size_t>(cfg.epochs));
    std::atomic<std::size_t> done{0};
    LossAccum all;
    const std::size_t n = walks.size();
    for (int ep = 0; ep < cfg.epochs; ++ep) {
        LossAccum epoch;
#pragma omp parallel
        {
            int tid = 0, nt = 1;
#ifdef _OPENMP
            tid = omp_get_thread_num();
            nt = omp_get_num_threads();
#endif
            Rng rng(derive_seed(cfg.seed, 1 + static_cast<std::uint64_t>(ep) * 1024 + tid));
            LossAccum acc;
            skipgram_range(te, walks, noise, cfg, n * tid / nt, n * (tid + 1) / nt, rng, done, total, acc);
#pragma omp critical
            epoch.merge(acc);
        }
        te.trace.epoch_mean.push_back(epoch.n > 0 ? epoch.total / epoch.n : 0.0);
        all.merge(epoch);
    }
    finish(te.trace, all);
    export_table(te, g, "skipgram");
    return te;
}

TrainedEmbedding train_skipgram_walks(const std::vector<Walk>& walks, const InteractionGraph& g,
                                      const SkipGramConfig& cfg) {
    return threads() == 1 ? train_skipgram_walks_serial(walks, g, cfg) : train_skipgram_walks_parallel(walks, g, cfg);
}

namespace {

struct PairCorpus {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;  // one entry per unit of weight
    AliasTable noise;
};

PairCorpus relational_pairs(const InteractionGraph& g) {
    PairCorpus pc;
    std::vector<double> in_weight(g.size(), 0.0);
    for (std::size_t s = 0; s < g.size(); ++s) {
        for (const auto& n : g.out[s]) {
            const auto reps = static_cast<std::size_t>(n.weight);
            for (std::size_t r = 0; r < reps; ++r) pc.pairs.emplace_back(s, n.node);
            in_weight[n.node] += n.weight;
        }
    }
    if (pc.pairs.empty()) throw DataError("relational embeddings need at least one directed edge");
    pc.noise = unigram_noise(in_weight);
    return pc;
}

void relational_range(TrainedEmbedding& te, const PairCorpus& pc, const std::vector<std::size_t>& order,
                      const RelationalConfig& cfg, std::size_t begin, std::size_t end, Rng& rng,
                      std::atomic<std::size_t>& done, std::size_t total, LossAccum& acc) {
    std::vector<std::size_t> negs;
    for (std::size_t k = begin; k < end; ++k) {
        const auto [s, t] = pc.pairs[order[k]];
        const double progress =
            static_cast<double>(done.fetch_add(1, std::memory_order_relaxed)) / static_cast<double>(total);
        draw_negatives(pc.noise, rng, t, cfg.negatives, negs);
        acc.add(pair_step(te.input, te.output, s, t, negs, decayed_lr(cfg.lr_start, cfg.lr_end, progress)),
                progress);
    }
}

}  // namespace

TrainedEmbedding train_relational_serial(const InteractionGraph& g, const RelationalConfig& cfg) {
    if (cfg.epochs < 1 || cfg.negatives < 0) throw UsageError("invalid relational configuration");
    const PairCorpus pc = relational_pairs(g);
    TrainedEmbedding te = init_embedding(g.size(), cfg.dim, cfg.seed);
    Rng rng(derive_seed(cfg.seed, 0));
    std::vector<std::size_t> order(pc.pairs.size());
    const std::size_t total = order.size() * static_cast<std::size_t>(cfg.epochs);
    std::atomic<std::size_t> done{0};
    LossAccum all;
    for (int ep = 0; ep < cfg.epochs; ++ep) {
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::shuffle(order.begin(), order.end(), rng);
        LossAccum acc;
        relational_range(te, pc, order, cfg, 0, order.size(), rng, done, total, acc);
        te.trace.epoch_mean.push_back(acc.n > 0 ? acc.total / acc.n : 0.0);
        all.merge(acc);
    }
    finish(te.trace, all);
    export_table(te, g, "RE", cfg.output);
    return te;
}

TrainedEmbedding train_relational_parallel(const InteractionGraph& g, const RelationalConfig& cfg) {
    if (cfg.epochs < 1 || cfg.negatives < 0) throw UsageError("invalid relational configuration");
    const PairCorpus pc = relational_pairs(g);
    TrainedEmbedding te = init_embedding(g.size(), cfg.dim, cfg.seed);
    Rng shuffle_rng(derive_seed(cfg.seed, 0));
    std::vector<std::size_t> order(pc.pairs.size());
    const std::size_t n = order.size();
    const std::size_t total = n * static_cast<std::size_t>(cfg.epochs);
    std::atomic<std::size_t> done{0};
    LossAccum all;
    for (int ep = 0; ep < cfg.epochs; ++ep) {
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        LossAccum epoch;
#pragma omp parallel
        {
            int tid = 0, nt = 1;
#ifdef _OPENMP
            tid = omp_get_thread_num();
            nt = omp_get_num_threads();
#endif
            Rng rng(derive_seed(cfg.seed, 1 + static_cast<std::uint64_t>(ep) * 1024 + tid));
            LossAccum acc;
            relational_range(te, pc, order, cfg, n * tid / nt, n * (tid + 1) / nt, rng, done, total, acc);
#pragma omp critical
            epoch.merge(acc);
        }
        te.trace.epoch_mean.push_back(epoch.n > 0 ? epoch.total / epoch.n : 0.0);
        all.merge(epoch);
    }
    finish(te.trace, all);
    export_table(te, g, "RE", cfg.output);
    return te;
}

TrainedEmbedding train_relational(const InteractionGraph& g, const RelationalConfig& cfg) {
    return threads() == 1 ? train_relational_serial(g, cfg) : train_relational_parallel(g, cfg);
}

EmbeddingTable train_graph_embeddings(const InteractionGraph& g, const GraphEmbeddingConfig& cfg) {
    if (cfg.method == Method::Relational) {
        auto te = train_relational(g, cfg.relational);
        return std::move(te.table);
    }
    WalkConfig wc = cfg.walks;
    if (cfg.method == Method::DeepWalk) wc.p = wc.q = 1.0;
    const auto walks = generate_walks(g, wc);
    SkipGramConfig sg = cfg.skipgram;
    sg.window = wc.window;
    sg.epochs = wc.epochs;
    auto te = train_skipgram_walks(walks, g, sg);
    te.table.method = to_string(cfg.method);
    return std::move(te.table);
}

}  // namespace htim::graph
