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

#include <string>
#include <unordered_map>
#include <vector>

#include "htim/common.hpp"

namespace htim::text {

using Document = std::vector<std::string>;

struct Vocabulary {
    std::vector<std::string> terms;
    std::unordered_map<std::string, std::size_t> index;
    std::vector<std::size_t> doc_freq;
    std::vector<std::size_t> corpus_freq;
    std::size_t n_docs = 0;

    std::size_t size() const { return terms.size(); }
    // -1 when absent.
    long find(const std::string& term) const;
};

// Terms ordered by descending corpus frequency, ties broken lexicographically.
Vocabulary build_vocabulary(const std::vector<Document>& docs);

struct TfidfModel {
    Vocabulary vocab;  // restricted to the D selected terms
    std::vector<double> idf;
    bool normalize = true;

    std::size_t dim() const { return vocab.size(); }
    Vector transform(const Document& doc) const;
};

/// Fits a user-level TF-IDF model: one document per user, top-D terms by
/// corpus frequency, smoothed idf ln((1+N)/(1+df))+1, raw-count tf, optional
/// per-document L2 normalization. Throws UsageError when D exceeds the
/// vocabulary size.
TfidfModel fit_tfidf(const std::vector<Document>& docs, std::size_t dim, bool normalize = true);

// OpenMP over documents; output identical to the serial version.
std::vector<Vector> transform_all(const TfidfModel& model, const std::vector<Document>& docs);
std::vector<Vector> transform_all_serial(const TfidfModel& model, const std::vector<Document>& docs);

}  // namespace htim::text
