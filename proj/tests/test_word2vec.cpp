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

#include <cmath>
#include <random>

#include "doctest.h"
#include "htim/sgns.hpp"
#include "htim/word2vec.hpp"
#include "oracles.hpp"

using namespace htim;
using namespace htim::text;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 0.5);
    Matrix m(r, c);
    for (auto& x : m.data) x = n(rng);
    return m;
}

// Gradient implied by one SGD step: (theta_before - theta_after) / lr.
std::vector<double> implied_gradient(const Matrix& in0, const Matrix& out0, const Matrix& in1, const Matrix& out1,
                                     double lr) {
    std::vector<double> g;
    for (std::size_t i = 0; i < in0.data.size(); ++i) g.push_back((in0.data[i] - in1.data[i]) / lr);
    for (std::size_t i = 0; i < out0.data.size(); ++i) g.push_back((out0.data[i] - out1.data[i]) / lr);
    return g;
}

}  // namespace

TEST_CASE("sigmoid and loss basics") {
    CHECK(sigmoid(0.0) == 0.5);
    CHECK(sigmoid(40.0) <= 1.0);
    CHECK(sigmoid(-40.0) >= 0.0);
    Matrix out(3, 2);
    const std::vector<double> h{0.0, 0.0};
    const std::vector<std::size_t> negs{1, 2};
    CHECK(sgns_loss(h, out, 0, negs) == doctest::Approx(3.0 * std::log(2.0)));
}

TEST_CASE("cbow step matches central finite differences") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t V = 10, d = 6;
        Matrix in = random_matrix(V, d, rng), out = random_matrix(V, d, rng);
        CbowExample ex{{1, 2, 2, 7}, 3, {0, 5, 9}};
        const double lr = 1e-3;
        Matrix in1 = in, out1 = out;
        const double loss_before = cbow_step(in1, out1, ex, lr);
        CHECK(loss_before == doctest::Approx(cbow_loss(in, out, ex)).epsilon(1e-14));
        const auto analytic = implied_gradient(in, out, in1, out1, lr);

        std::vector<double> params(in.data);
        params.insert(params.end(), out.data.begin(), out.data.end());
        auto f = [&] {
            Matrix a(V, d), b(V, d);
            std::copy(params.begin(), params.begin() + V * d, a.data.begin());
            std::copy(params.begin() + V * d, params.end(), b.data.begin());
            return cbow_loss(a, b, ex);
        };
        const auto numeric = oracle::numeric_gradient(params, f);
        CHECK(oracle::relative_error(analytic, numeric) <= 1e-4);
    }
}

TEST_CASE("negatives skip the positive and follow the noise law") {
    const std::vector<double> counts{1, 16, 81};
    const auto noise = unigram_noise(counts);
    const double z = 1 + 8 + 27;
    CHECK(noise.probability(0) == doctest::Approx(1 / z));
    CHECK(noise.probability(2) == doctest::Approx(27 / z));
    Rng rng(1);
    std::vector<std::size_t> negs;
    for (int i = 0; i < 1000; ++i) {
        draw_negatives(noise, rng, 2, 5, negs);
        CHECK(negs.size() <= 5);
        for (auto n : negs) CHECK(n != 2);
    }
}

TEST_CASE("learning rate decays linearly") {
    CHECK(decayed_lr(0.025, 1e-4, 0.0) == 0.025);
    CHECK(decayed_lr(0.025, 1e-4, 1.0) == doctest::Approx(1e-4));
    CHECK(decayed_lr(0.025, 1e-4, 0.5) == doctest::Approx(0.01255));
}

TEST_CASE("cbow loss decreases over training") {
    std::vector<Document> sents{{"the", "cat", "sat", "on", "the", "mat"}, {"a", "dog", "ran", "to", "a", "park"}};
    std::vector<Document> corpus;
    for (int i = 0; i < 50; ++i) corpus.insert(corpus.end(), sents.begin(), sents.end());
    CbowConfig cfg;
    cfg.dim = 10;
    cfg.epochs = 5;
    const auto m = train_cbow_serial(corpus, cfg);
    REQUIRE(m.trace.epoch_mean.size() == 5);
    CHECK(m.trace.epoch_mean.back() < m.trace.epoch_mean.front());
    CHECK(all_finite(m.input.data));
    CHECK(all_finite(m.output.data));
}

TEST_CASE("tokens sharing contexts end up closer than tokens from other contexts") {
    int wins = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        std::vector<Document> corpus;
        for (int i = 0; i < 100; ++i) {
            corpus.push_back({"c", "a", "d"});
            corpus.push_back({"c", "b", "d"});
            corpus.push_back({"e", "x", "f"});
            corpus.push_back({"e", "y", "f"});
        }
        CbowConfig cfg;
        cfg.dim = 10;
        cfg.seed = seed;
        const auto m = train_cbow_serial(corpus, cfg);
        const auto a = m.input.row(m.find("a")), b = m.input.row(m.find("b")), x = m.input.row(m.find("x"));
        wins += cosine(a, b) > cosine(a, x);
    }
    CHECK(wins == 5);
}

TEST_CASE("single-thread cbow is reproducible") {
    std::vector<Document> corpus{{"a", "b", "c", "d"}, {"b", "c", "e"}};
    CbowConfig cfg;
    cfg.dim = 8;
    const auto m1 = train_cbow_serial(corpus, cfg);
    const auto m2 = train_cbow_serial(corpus, cfg);
    CHECK(m1.input.data == m2.input.data);
    CHECK(m1.terms == m2.terms);
}

TEST_CASE("empty vocabulary is an error") {
    CHECK_THROWS_AS(train_cbow({}, CbowConfig{}), DataError);
    CHECK_THROWS_AS(train_cbow({{}, {}}, CbowConfig{}), DataError);
}
