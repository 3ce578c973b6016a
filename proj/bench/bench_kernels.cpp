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

// Serial reference kernels against their OpenMP counterparts. The parallel
// variants use every OpenMP worker (set OMP_NUM_THREADS to change the count).

#include <benchmark/benchmark.h>
#include <omp.h>

#include <random>

#include "htim/corpus.hpp"
#include "htim/embeddings.hpp"
#include "htim/graph.hpp"
#include "htim/svm.hpp"
#include "htim/tfidf.hpp"
#include "htim/tokenizer.hpp"
#include "htim/tsne.hpp"
#include "htim/word2vec.hpp"

using namespace htim;

namespace {

const corpus::RegionDataset& region() {
    static const auto ds = [] {
        corpus::SynthConfig sc;
        sc.members_per_party = 100;
        sc.interacting_per_party = 200;
        return corpus::synth_region(sc);
    }();
    return ds;
}

const graph::InteractionGraph& interaction_graph() {
    static const auto g = graph::build_graph(region().retweets);
    return g;
}

const std::vector<text::Document>& sentences() {
    static const auto docs = [] {
        std::vector<text::Document> out;
        for (const auto& t : region().tweets) out.push_back(text::tokenize(t.text));
        return out;
    }();
    return docs;
}

std::vector<Vector> points(std::size_t n, std::size_t d) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd(0, 1);
    std::vector<Vector> X(n, Vector(d));
    for (auto& x : X)
        for (auto& v : x) v = nd(rng);
    return X;
}

void use_all_threads() { set_threads(omp_get_max_threads()); }

void BM_WalksSerial(benchmark::State& st) {
    auto cfg = graph::WalkConfig::node2vec();
    cfg.walks_per_node = 5;
    for (auto _ : st) benchmark::DoNotOptimize(graph::generate_walks_serial(interaction_graph(), cfg));
}
void BM_WalksParallel(benchmark::State& st) {
    use_all_threads();
    auto cfg = graph::WalkConfig::node2vec();
    cfg.walks_per_node = 5;
    for (auto _ : st) benchmark::DoNotOptimize(graph::generate_walks(interaction_graph(), cfg));
}

void BM_KernelMatrixSerial(benchmark::State& st) {
    const auto X = points(static_cast<std::size_t>(st.range(0)), 320);
    for (auto _ : st) benchmark::DoNotOptimize(model::kernel_matrix_serial(X, 0.01));
}
void BM_KernelMatrixParallel(benchmark::State& st) {
    use_all_threads();
    const auto X = points(static_cast<std::size_t>(st.range(0)), 320);
    for (auto _ : st) benchmark::DoNotOptimize(model::kernel_matrix(X, 0.01));
}

void BM_TsneGradientSerial(benchmark::State& st) {
    const auto X = points(static_cast<std::size_t>(st.range(0)), 20);
    const auto P = eval::tsne_affinities(X, 30);
    Matrix Y(X.size(), 2), grad;
    for (std::size_t i = 0; i < X.size(); ++i) Y(i, 0) = X[i][0], Y(i, 1) = X[i][1];
    for (auto _ : st) eval::tsne_gradient_serial(P, Y, 1.0, grad);
}
void BM_TsneGradientParallel(benchmark::State& st) {
    use_all_threads();
    const auto X = points(static_cast<std::size_t>(st.range(0)), 20);
    const auto P = eval::tsne_affinities(X, 30);
    Matrix Y(X.size(), 2), grad;
    for (std::size_t i = 0; i < X.size(); ++i) Y(i, 0) = X[i][0], Y(i, 1) = X[i][1];
    for (auto _ : st) eval::tsne_gradient(P, Y, 1.0, grad);
}

void BM_TfidfSerial(benchmark::State& st) {
    const auto model = text::fit_tfidf(sentences(), 300);
    for (auto _ : st) benchmark::DoNotOptimize(text::transform_all_serial(model, sentences()));
}
void BM_TfidfParallel(benchmark::State& st) {
    use_all_threads();
    const auto model = text::fit_tfidf(sentences(), 300);
    for (auto _ : st) benchmark::DoNotOptimize(text::transform_all(model, sentences()));
}

text::CbowConfig cbow_config() {
    text::CbowConfig cfg;
    cfg.dim = 100;
    cfg.epochs = 1;
    return cfg;
}
void BM_CbowSerial(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(text::train_cbow_serial(sentences(), cbow_config()));
}
void BM_CbowParallel(benchmark::State& st) {
    use_all_threads();
    for (auto _ : st) benchmark::DoNotOptimize(text::train_cbow_parallel(sentences(), cbow_config()));
}

std::vector<graph::Walk> short_walks() {
    auto cfg = graph::WalkConfig::deepwalk();
    cfg.walks_per_node = 1;
    cfg.walk_length = 40;
    return graph::generate_walks_serial(interaction_graph(), cfg);
}

void BM_SkipGramSerial(benchmark::State& st) {
    const auto walks = short_walks();
    for (auto _ : st)
        benchmark::DoNotOptimize(graph::train_skipgram_walks_serial(walks, interaction_graph(), graph::SkipGramConfig{}));
}
void BM_SkipGramParallel(benchmark::State& st) {
    use_all_threads();
    const auto walks = short_walks();
    for (auto _ : st)
        benchmark::DoNotOptimize(
            graph::train_skipgram_walks_parallel(walks, interaction_graph(), graph::SkipGramConfig{}));
}

void BM_RelationalSerial(benchmark::State& st) {
    for (auto _ : st)
        benchmark::DoNotOptimize(graph::train_relational_serial(interaction_graph(), graph::RelationalConfig{}));
}
void BM_RelationalParallel(benchmark::State& st) {
    use_all_threads();
    for (auto _ : st)
        benchmark::DoNotOptimize(graph::train_relational_parallel(interaction_graph(), graph::RelationalConfig{}));
}

}  // namespace

BENCHMARK(BM_WalksSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WalksParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_KernelMatrixSerial)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KernelMatrixParallel)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_TsneGradientSerial)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TsneGradientParallel)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_TfidfSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TfidfParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CbowSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CbowParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SkipGramSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SkipGramParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RelationalSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RelationalParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
