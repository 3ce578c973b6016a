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

#include "htim/word2vec.hpp"

#include <algorithm>
#include <atomic>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace htim::text {

long WordEmbeddingModel::find(const std::string& term) const {
    auto it = index.find(term);
    return it == index.end() ? -1 : static_cast<long>(it->second);
}

double cbow_loss(const Matrix& input, const Matrix& output, const CbowExample& ex) {
    Vector h(input.cols, 0.0);
    for (auto c : ex.context) {
        auto r = input.row(c);
        for (std::size_t k = 0; k < h.size(); ++k) h[k] += r[k];
    }
    for (auto& x : h) x /= static_cast<double>(ex.context.size());
    return sgns_loss(h, output, ex.center, ex.negatives);
}

double cbow_step(Matrix& input, Matrix& output, const CbowExample& ex, double lr) {
    const std::size_t d = input.cols;
    const double inv = 1.0 / static_cast<double>(ex.context.size());
    Vector h(d, 0.0);
    for (auto c : ex.context) {
        auto r = input.row(c);
        for (std::size_t k = 0; k < d; ++k) h[k] += r[k];
    }
    for (auto& x : h) x *= inv;
    Vector grad_h(d, 0.0);
    const double loss = sgns_update_outputs(h, output, ex.center, ex.negatives, lr, grad_h);
    // dh/d(input_c) = 1/|context| for each occurrence of c.
    for (auto c : ex.context) {
        auto r = input.row(c);
        for (std::size_t k = 0; k < d; ++k) r[k] -= lr * inv * grad_h[k];
    }
    return loss;
}

namespace {

struct Encoded {
    std::vector<std::vector<std::size_t>> sentences;
    std::vector<double> counts;
    std::size_t total_tokens = 0;
};

Encoded encode(const std::vector<Document>& sentences, WordEmbeddingModel& m) {
    Vocabulary vocab = build_vocabulary(sentences);
    if (vocab.size() == 0) throw DataError("CBOW training corpus has an empty vocabulary");
    m.terms = vocab.terms;
    m.index = vocab.index;
    Encoded e;
    e.counts.assign(vocab.corpus_freq.begin(), vocab.corpus_freq.end());
    for (const auto& s : sentences) {
        std::vector<std::size_t> ids;
        ids.reserve(s.size());
        for (const auto& t : s) ids.push_back(vocab.index.at(t));
        e.total_tokens += ids.size();
        e.sentences.push_back(std::move(ids));
    }
    return e;
}

void init_model(WordEmbeddingModel& m, const CbowConfig& cfg, Rng& rng) {
    if (cfg.dim == 0 || cfg.window < 1 || cfg.epochs < 1 || cfg.negatives < 0)
        throw UsageError("invalid CBOW configuration");
    m.config = cfg;
    m.input = Matrix(m.terms.size(), cfg.dim);
    m.output = Matrix(m.terms.size(), cfg.dim, 0.0);
    init_uniform(m.input, rng);
}

constexpr int kSegments = 10;

// Trains on sentences [begin, end) of one epoch. `done` counts processed
// tokens across all workers for the learning-rate schedule.
void cbow_range(WordEmbeddingModel& m, const Encoded& e, const AliasTable& noise, std::size_t begin,
                std::size_t end, Rng& rng, std::atomic<std::size_t>& done, std::size_t total,
                std::vector<double>& seg_loss, std::vector<double>& seg_n, double& epoch_loss, double& epoch_n) {
    const auto& cfg = m.config;
    CbowExample ex;
    for (std::size_t s = begin; s < end; ++s) {
        const auto& sent = e.sentences[s];
        const long len = static_cast<long>(sent.size());
        for (long i = 0; i < len; ++i) {
            const double progress = static_cast<double>(done.fetch_add(1, std::memory_order_relaxed)) /
                                    static_cast<double>(total);
            ex.context.clear();
            for (long j = std::max(0L, i - cfg.window); j <= std::min(len - 1, i + cfg.window); ++j)
                if (j != i) ex.context.push_back(sent[j]);
            if (ex.context.empty()) continue;
            ex.center = sent[i];
            draw_negatives(noise, rng, ex.center, cfg.negatives, ex.negatives);
            const double lr = decayed_lr(cfg.lr_start, cfg.lr_end, progress);
            const double loss = cbow_step(m.input, m.output, ex, lr);
            const int seg = std::min(kSegments - 1, static_cast<int>(progress * kSegments));
            seg_loss[seg] += loss;
            seg_n[seg] += 1.0;
            epoch_loss += loss;
            epoch_n += 1.0;
        }
    }
}

void finish_trace(LossTrace& trace, const std::vector<double>& seg_loss, const std::vector<double>& seg_n) {
    trace.segment_mean.clear();
    for (int s = 0; s < kSegments; ++s)
        if (seg_n[s] > 0) trace.segment_mean.push_back(seg_loss[s] / seg_n[s]);
}

}  // namespace

WordEmbeddingModel train_cbow_serial(const std::vector<Document>& sentences, const CbowConfig& cfg) {
    WordEmbeddingModel m;
    Encoded e = encode(sentences, m);
    Rng rng(cfg.seed);
    init_model(m, cfg, rng);
    const AliasTable noise = unigram_noise(e.counts);
    const std::size_t total = std::max<std::size_t>(1, e.total_tokens * static_cast<std::size_t>(cfg.epochs));
    std::atomic<std::size_t> done{0};
    std::vector<double> seg_loss(kSegments, 0.0), seg_n(kSegments, 0.0);
    for (int ep = 0; ep < cfg.epochs; ++ep) {
        double el = 0.0, en = 0.0;
        cbow_range(m, e, noise, 0, e.sentences.size(), rng, done, total, seg_loss, seg_n, el, en);
        m.trace.epoch_mean.push_back(en > 0 ? el / en : 0.0);
    }
    finish_trace(m.trace, seg_loss, seg_n);
    return m;
}

WordEmbeddingModel train_cbow_parallel(const std::vector<Document>& sentences, const CbowConfig& cfg) {
    WordEmbeddingModel m;
    Encoded e = encode(sentences, m);
    Rng init_rng(cfg.seed);
    init_model(m, cfg, init_rng);
    const AliasTable noise = unigram_noise(e.counts);
    const std::size_t total = std::max<std::size_t>(1, e.total_tokens * static_cast<std::size_t>(cfg.epochs));
    std::atomic<std::size_t> done{0};
    std::vector<double> seg_loss(kSegments, 0.0), seg_n(kSegments, 0.0);
    const std::size_t n = e.sentences.size();
    for (int ep = 0; ep < cfg.epochs; ++ep) {
        double el = 0.0, en = 0.0;
#pragma omp parallel
        {
            int tid = 0, nt = 1;
#ifdef _OPENMP
            tid = omp_get_thread_num();
            nt = omp_get_num_threads();
#endif
            Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(ep) * 1024 + tid));
            std::vector<double> sl(kSegments, 0.0), sn(kSegments, 0.0);
            double tl = 0.0, tn = 0.0;
            const std::size_t begin = n * tid / nt, end = n * (tid + 1) / nt;
            cbow_range(m, e, noise, begin, end, rng, done, total, sl, sn, tl, tn);
#pragma omp critical
            {
                for (int s = 0; s < kSegments; ++s) {
                    seg_loss[s] += sl[s];
                    seg_n[s] += sn[s];
                }
                el += tl;
                en += tn;
            }
        }
        m.trace.epoch_mean.push_back(en > 0 ? el / en : 0.0);
    }
    finish_trace(m.trace, seg_loss, seg_n);
    return m;
}

WordEmbeddingModel train_cbow(const std::vector<Document>& sentences, const CbowConfig& cfg) {
    return threads() == 1 ? train_cbow_serial(sentences, cfg) : train_cbow_parallel(sentences, cfg);
}

}  // namespace htim::text
