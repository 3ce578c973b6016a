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

#include "htim/tfidf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace htim::text {

long Vocabulary::find(const std::string& term) const {
    auto it = index.find(term);
    return it == index.end() ? -1 : static_cast<long>(it->second);
}

Vocabulary build_vocabulary(const std::vector<Document>& docs) {
    std::unordered_map<std::string, std::pair<std::size_t, std::size_t>> stats;  // corpus, df
    for (const auto& doc : docs) {
        std::unordered_map<std::string, bool> seen;
        for (const auto& tok : doc) {
            auto& s = stats[tok];
            ++s.first;
            if (seen.emplace(tok, true).second) ++s.second;
        }
    }
    std::vector<std::string> terms;
    terms.reserve(stats.size());
    for (const auto& kv : stats) terms.push_back(kv.first);
    std::sort(terms.begin(), terms.end(), [&](const std::string& a, const std::string& b) {
        const auto fa = stats[a].first, fb = stats[b].first;
        return fa != fb ? fa > fb : a < b;
    });

    Vocabulary v;
    v.n_docs = docs.size();
    v.terms = std::move(terms);
    for (std::size_t i = 0; i < v.terms.size(); ++i) {
        v.index.emplace(v.terms[i], i);
        v.corpus_freq.push_back(stats[v.terms[i]].first);
        v.doc_freq.push_back(stats[v.terms[i]].second);
    }
    return v;
}

TfidfModel fit_tfidf(const std::vector<Document>& docs, std::size_t dim, bool normalize) {
    Vocabulary full = build_vocabulary(docs);
    if (dim == 0) throw UsageError("tf-idf dimension must be positive");
    if (dim > full.size())
        throw UsageError("tf-idf dimension " + std::to_string(dim) + " exceeds vocabulary size " +
                         std::to_string(full.size()));

    TfidfModel m;
    m.normalize = normalize;
    m.vocab.n_docs = full.n_docs;
    const double n = static_cast<double>(full.n_docs);
    for (std::size_t i = 0; i < dim; ++i) {
        m.vocab.terms.push_back(full.terms[i]);
        m.vocab.index.emplace(full.terms[i], i);
        m.vocab.corpus_freq.push_back(full.corpus_freq[i]);
        m.vocab.doc_freq.push_back(full.doc_freq[i]);
        m.idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(full.doc_freq[i]))) + 1.0);
    }
    return m;
}

Vector TfidfModel::transform(const Document& doc) const {
    Vector v(dim(), 0.0);
    for (const auto& tok : doc) {
        const long i = vocab.find(tok);
        if (i >= 0) v[static_cast<std::size_t>(i)] += 1.0;
    }
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= idf[i];
    if (normalize) {
        const double norm = l2_norm(v);
        if (norm > 0.0)
            for (auto& x : v) x /= norm;
    }
    return v;
}

std::vector<Vector> transform_all_serial(const TfidfModel& model, const std::vector<Document>& docs) {
    std::vector<Vector> out;
    out.reserve(docs.size());
    for (const auto& d : docs) out.push_back(model.transform(d));
    return out;
}

std::vector<Vector> transform_all(const TfidfModel& model, const std::vector<Document>& docs) {
    std::vector<Vector> out(docs.size());
    const long n = static_cast<long>(docs.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (long i = 0; i < n; ++i) out[i] = model.transform(docs[i]);
    return out;
}

}  // namespace htim::text
