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

#include <array>
#include <cmath>
#include <random>

#include "doctest.h"
#include "htim/tsne.hpp"
#include "oracles.hpp"

using namespace htim;
using namespace htim::eval;

namespace {

struct Cloud {
    std::vector<std::string> ids;
    std::vector<Vector> X;
    std::vector<int> label;
};

Cloud clusters(int per, int k, std::size_t dim, double sep, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0, 1);
    Cloud c;
    for (int g = 0; g < k; ++g)
        for (int i = 0; i < per; ++i) {
            Vector v(dim);
            for (auto& x : v) x = n(rng);
            v[g % dim] += sep;
            c.ids.push_back("u" + std::to_string(c.ids.size()));
            c.X.push_back(v);
            c.label.push_back(g);
        }
    return c;
}

std::vector<std::array<double, 2>> points(const Projection2D& p) {
    std::vector<std::array<double, 2>> out;
    for (std::size_t i = 0; i < p.coords.rows; ++i) out.push_back({p.coords(i, 0), p.coords(i, 1)});
    return out;
}

}  // namespace

TEST_CASE("affinities are symmetric, nonnegative and sum to one") {
    const auto c = clusters(15, 2, 5, 4.0, 1);
    const auto P = tsne_affinities(c.X, 10.0);
    double sum = 0;
    for (std::size_t i = 0; i < P.rows; ++i) {
        CHECK(P(i, i) == 0.0);
        for (std::size_t j = 0; j < P.cols; ++j) {
            CHECK(P(i, j) >= 0.0);
            CHECK(P(i, j) == doctest::Approx(P(j, i)).epsilon(1e-12));
            sum += P(i, j);
        }
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("gradient matches finite differences of the KL objective") {
    const auto c = clusters(8, 2, 4, 3.0, 2);
    const auto P = tsne_affinities(c.X, 4.0);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(0, 1);
    Matrix Y(P.rows, 2);
    for (auto& v : Y.data) v = n(rng);
    Matrix grad;
    tsne_gradient_serial(P, Y, 1.0, grad);
    const auto numeric = oracle::numeric_gradient(Y.data, [&] { return tsne_kl(P, Y); });
    CHECK(oracle::relative_error(grad.data, numeric) < 1e-5);
}

TEST_CASE("OpenMP and serial gradients agree exactly") {
    const auto c = clusters(40, 3, 6, 3.0, 4);
    const auto P = tsne_affinities(c.X, 15.0);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0, 1);
    Matrix Y(P.rows, 2);
    for (auto& v : Y.data) v = n(rng);
    Matrix a, b;
    set_threads(2);
    tsne_gradient(P, Y, 12.0, a);
    set_threads(1);
    tsne_gradient_serial(P, Y, 12.0, b);
    CHECK(a.data == b.data);
}

TEST_CASE("two well-separated clusters stay separated in 2-D") {
    const auto c = clusters(40, 2, 10, 8.0, 6);
    TsneConfig cfg;
    cfg.perplexity = 15;
    cfg.iterations = 500;
    cfg.seed = 1;
    const auto p = tsne_project(c.ids, c.X, cfg);
    CHECK(p.coords.rows == 80);
    CHECK(p.coords.cols == 2);
    CHECK(p.ids == c.ids);
    CHECK(p.kl_final < p.kl_initial);
    CHECK(oracle::silhouette(points(p), c.label) > 0.5);
    CHECK(p.warnings.empty());
}

TEST_CASE("projection is reproducible for a seed") {
    const auto c = clusters(20, 3, 5, 5.0, 7);
    TsneConfig cfg;
    cfg.perplexity = 10;
    cfg.iterations = 200;
    cfg.seed = 4;
    CHECK(tsne_project(c.ids, c.X, cfg).coords.data == tsne_project(c.ids, c.X, cfg).coords.data);
}

TEST_CASE("duplicate inputs land next to each other") {
    auto c = clusters(30, 2, 5, 6.0, 8);
    c.ids.push_back("dup");
    c.X.push_back(c.X[0]);
    TsneConfig cfg;
    cfg.perplexity = 10;
    cfg.iterations = 400;
    const auto p = tsne_project(c.ids, c.X, cfg);
    const std::size_t d = c.X.size() - 1;
    auto dist = [&](std::size_t i, std::size_t j) {
        return std::hypot(p.coords(i, 0) - p.coords(j, 0), p.coords(i, 1) - p.coords(j, 1));
    };
    double mean = 0;
    for (std::size_t j = 1; j < d; ++j) mean += dist(0, j);
    mean /= static_cast<double>(d - 1);
    CHECK(dist(0, d) < 0.1 * mean);
}

TEST_CASE("small inputs clamp perplexity with a warning") {
    const auto c = clusters(5, 2, 3, 3.0, 9);
    TsneConfig cfg;
    cfg.iterations = 50;
    const auto p = tsne_project(c.ids, c.X, cfg);
    CHECK_FALSE(p.warnings.empty());
    CHECK(p.perplexity < cfg.perplexity);
    CHECK(all_finite(p.coords.data));
}

TEST_CASE("invalid input is rejected") {
    TsneConfig cfg;
    CHECK_THROWS_AS(tsne_project({"a", "b"}, {{1.0}, {NAN}}, cfg), NumericError);
    CHECK_THROWS_AS(tsne_project({"a"}, {{1.0}, {2.0}}, cfg), DataError);
    cfg.perplexity = 0;
    CHECK_THROWS_AS(tsne_project({"a", "b"}, {{1.0}, {2.0}}, cfg), UsageError);
}
