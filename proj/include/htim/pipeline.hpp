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
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "htim/corpus.hpp"
#include "htim/embeddings.hpp"
#include "htim/fusion.hpp"
#include "htim/metrics.hpp"
#include "htim/svm.hpp"
#include "htim/text_vectors.hpp"
#include "htim/tsne.hpp"

namespace htim::pipeline {

enum class TextFeaturizer { None, Tfidf, W2v, ContextualSos, ContextualAvg, ContextualMax };
enum class FusionLevel { User, Tweet };
enum class Baseline { None, Majority, Random };

std::string to_string(TextFeaturizer t);
TextFeaturizer parse_text_featurizer(std::string_view s);  // none|tfidf|w2v|ctx-sos|ctx-avg|ctx-max
bool is_tweet_level(TextFeaturizer t);

struct RunConfig {
    std::string region;
    std::filesystem::path contextual_tokens;  // exporter JSONL, for ctx-* featurizers
    TextFeaturizer text = TextFeaturizer::None;
    std::size_t text_dim = 300;
    std::optional<graph::Method> graph;
    std::size_t graph_dim = 20;
    graph::WalkConfig walks = graph::WalkConfig::node2vec();
    int relational_epochs = 5;
    graph::RelationalOutput relational_output = graph::RelationalOutput::Source;
    std::optional<FusionLevel> level;  // derived from the text featurizer when unset
    bool normalize_segments = false;
    model::KernelConfig kernel;
    Baseline baseline = Baseline::None;
    corpus::EngagementTier tier = corpus::EngagementTier::Member;  // Member: CV, otherwise transfer
    int folds = 10;
    bool pooled = true;  // pooled-predictions macro-F1; false averages fold scores
    std::uint64_t seed = 42;

    // Parses "re", "re+tfidf", "n2v+ctx-max", "tfidf", "majority", "random", ...
    void set_method(std::string_view method);
    std::string method() const;
    FusionLevel effective_level() const;
    void validate() const;
    nlohmann::ordered_json to_json() const;
};

/// Classification instances for every labeled user: one per user at user
/// level, one per retained tweet at tweet level (users without tweets get a
/// single text-absent instance).
struct FeatureSet {
    std::vector<fusion::HybridFeature> instances;
    bool tweet_level = false;
    std::size_t text_dim = 0;
    std::size_t user_text_dim = 0;
    std::size_t inter_dim = 0;
    std::optional<graph::EmbeddingTable> graph_table;
    std::optional<text::TfidfModel> tfidf;
    std::optional<text::WordEmbeddingModel> word_model;
};

FeatureSet build_features(const corpus::RegionDataset& ds, const RunConfig& cfg);

// Trains on (X, y) and predicts each row of the test matrix.
using FitPredict = std::function<std::vector<model::Prediction>(
    const std::vector<Vector>& train_x, const std::vector<std::string>& train_y, const std::vector<Vector>& test_x,
    std::uint64_t seed)>;

FitPredict svm_fit_predict(const model::KernelConfig& cfg);
FitPredict baseline_fit_predict(Baseline b);

struct FoldResult {
    int fold = 0;
    std::size_t train_users = 0;
    std::size_t test_users = 0;
    double macro_f1 = 0.0;
};

struct EvalReport {
    nlohmann::ordered_json config;
    std::string tier;
    std::string mode;  // "cv" | "transfer"
    std::vector<FoldResult> folds;
    double macro_f1 = 0.0;
    eval::ConfusionMatrix confusion;
    std::vector<eval::ClassScores> per_class;
    std::map<std::string, std::string> predictions;  // user -> predicted party
    std::vector<std::string> warnings;
    std::uint64_t seed = 0;
    double runtime_s = 0.0;
};

struct CvOptions {
    int k = 10;
    std::uint64_t seed = 42;
    bool pooled = true;
};

// truth: user -> party, for the users to split.
EvalReport cross_validate(const FeatureSet& fs, const std::map<std::string, std::string>& truth,
                          const FitPredict& fit, const CvOptions& opt);

EvalReport transfer_evaluate(const FeatureSet& fs, const std::map<std::string, std::string>& train_truth,
                             const std::map<std::string, std::string>& test_truth, const FitPredict& fit,
                             std::uint64_t seed);

std::map<std::string, std::string> tier_truth(const corpus::RegionDataset& ds, corpus::EngagementTier tier);

/// 10-fold CV on Members.
EvalReport run_cv(const corpus::RegionDataset& ds, const RunConfig& cfg);
/// Train on all Members, evaluate on cfg.tier (Supporter or Sympathizer).
EvalReport run_transfer(const corpus::RegionDataset& ds, const RunConfig& cfg);
/// Dispatches on cfg.tier.
EvalReport run_eval(const corpus::RegionDataset& ds, const RunConfig& cfg);

struct ReportPaths {
    std::filesystem::path json;
    std::filesystem::path confusion_csv;  // optional
};

nlohmann::ordered_json report_to_json(const EvalReport& r, bool zero_runtime = false);
// zero_runtime writes runtime_s = 0 so deterministic runs produce identical bytes.
void emit_report(const EvalReport& r, const ReportPaths& paths, bool zero_runtime = false);
void write_confusion_csv(const eval::ConfusionMatrix& cm, const std::filesystem::path& path);

// Scatter plot: one <circle> per user, filled by party, with a legend.
void write_projection_svg(const eval::Projection2D& proj, const std::map<std::string, std::string>& party_of,
                          const std::filesystem::path& path);
void write_projection_csv(const eval::Projection2D& proj, const std::filesystem::path& path);

}  // namespace htim::pipeline
