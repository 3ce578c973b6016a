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

#include "htim/common.hpp"
#include "htim/sgns.hpp"
#include "htim/tfidf.hpp"

namespace htim::text {

struct CbowConfig {
    std::size_t dim = 300;
    int window = 5;
    int epochs = 5;
    int negatives = 5;
    double lr_start = 0.025;
    double lr_end = 1e-4;
    std::uint64_t seed = 1;
};

struct WordEmbeddingModel {
    std::vector<std::string> terms;
    std::unordered_map<std::string, std::size_t> index;
    Matrix input;   // V x d, the exported word vectors
    Matrix output;  // V x d, negative-sampling context vectors
    CbowConfig config;
    LossTrace trace;

    long find(const std::string& term) const;
    std::size_t dim() const { return input.cols; }
};

// One CBOW training example: predict `center` from the mean of the
// `context` input vectors against explicit negatives.
struct CbowExample {
    std::vector<std::size_t> context;
    std::size_t center = 0;
    std::vector<std::size_t> negatives;
};

double cbow_loss(const Matrix& input, const Matrix& output, const CbowExample& ex);

// Plain SGD step on every parameter the example touches. Returns the loss
// evaluated before the update.
double cbow_step(Matrix& input, Matrix& output, const CbowExample& ex, double lr);

/// Trains CBOW with negative sampling (unigram^0.75 noise, symmetric fixed
/// window, linear learning-rate decay). Uses the serial kernel when
/// threads() == 1, otherwise the lock-free OpenMP kernel.
WordEmbeddingModel train_cbow(const std::vector<Document>& sentences, const CbowConfig& cfg);
WordEmbeddingModel train_cbow_serial(const std::vector<Document>& sentences, const CbowConfig& cfg);
WordEmbeddingModel train_cbow_parallel(const std::vector<Document>& sentences, const CbowConfig& cfg);

}  // namespace htim::text
