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
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "htim/common.hpp"
#include "htim/graph.hpp"
#include "htim/sgns.hpp"

namespace htim::graph {

enum class Method { DeepWalk, Node2Vec, Relational };

std::string to_string(Method m);  // "DW" | "N2V" | "RE"
Method parse_method(std::string_view s);  // accepts dw / n2v / re (any case)

/// Dense id -> vector map shared by every trainer and by the word-embedding
/// exporter.
struct EmbeddingTable {
    std::vector<std::string> ids;
    std::unordered_map<std::string, std::size_t> index;
    Matrix vectors;
    std::string method;

    std::size_t dim() const { return vectors.cols; }
    std::size_t size() const { return ids.size(); }
    void add(const std::string& id, std::span<const double> v);
};

struct Lookup {
    Vector values;
    bool absent = false;
};

// Unknown ids give a zero vector with `absent` set.
Lookup lookup(const EmbeddingTable& table, const std::string& id);

// Text format: "<count> <dim>" header, then "<id> <f1> ... <fd>" per row.
void write_embeddings(const EmbeddingTable& table, const std::filesystem::path& path);
EmbeddingTable read_embeddings(const std::filesystem::path& path);

struct SkipGramConfig {
    std::size_t dim = 20;
    int window = 10;
    int negatives = 5;
    int epochs = 1;
    double lr_start = 0.025;
    double lr_end = 1e-4;
    std::uint64_t seed = 1;
};

// Which relational parameter table becomes the user vector.
enum class RelationalOutput { Source, Target, Average };

struct RelationalConfig {
    std::size_t dim = 20;
    int negatives = 5;
    int epochs = 5;
    double lr_start = 0.25;
    double lr_end = 1e-4;
    RelationalOutput output = RelationalOutput::Source;
    std::uint64_t seed = 1;
};

struct TrainedEmbedding {
    EmbeddingTable table;
    Matrix input;   // node x d (u)
    Matrix output;  // node x d (v)
    LossTrace trace;
};

// One skip-gram / relational SGD step: input row `in_row` is h, output row
// `positive` the observed context, plus explicit negatives. Returns the
// pre-update loss.
double pair_step(Matrix& input, Matrix& output, std::size_t in_row, std::size_t positive,
                 std::span<const std::size_t> negatives, double lr);
double pair_loss(const Matrix& input, const Matrix& output, std::size_t in_row, std::size_t positive,
                 std::span<const std::size_t> negatives);

/// Skip-gram with negative sampling over walk co-occurrences (fixed
/// symmetric window, node-frequency^0.75 noise). Dispatches on threads().
TrainedEmbedding train_skipgram_walks(const std::vector<Walk>& walks, const InteractionGraph& g,
                                      const SkipGramConfig& cfg);
TrainedEmbedding train_skipgram_walks_serial(const std::vector<Walk>& walks, const InteractionGraph& g,
                                             const SkipGramConfig& cfg);
TrainedEmbedding train_skipgram_walks_parallel(const std::vector<Walk>& walks, const InteractionGraph& g,
                                               const SkipGramConfig& cfg);

/// Relational embeddings: each directed (retweeter, retweeted) pair,
/// repeated by weight, is a positive for s(u_src . v_tgt) against noise
/// targets drawn from target in-weight^0.75. No walks involved.
TrainedEmbedding train_relational(const InteractionGraph& g, const RelationalConfig& cfg);
TrainedEmbedding train_relational_serial(const InteractionGraph& g, const RelationalConfig& cfg);
TrainedEmbedding train_relational_parallel(const InteractionGraph& g, const RelationalConfig& cfg);

struct GraphEmbeddingConfig {
    Method method = Method::Relational;
    WalkConfig walks;
    SkipGramConfig skipgram;
    RelationalConfig relational;
};

// Full trainer for any method; walk configs get node2vec's q when requested.
EmbeddingTable train_graph_embeddings(const InteractionGraph& g, const GraphEmbeddingConfig& cfg);

}  // namespace htim::graph
