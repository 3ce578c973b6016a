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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "doctest.h"
#include "htim/svm.hpp"

using namespace htim;
using namespace htim::model;

namespace {

struct Data {
    std::vector<Vector> X;
    std::vector<std::string> y;
};

Data blobs(int per_class, int classes, double spread, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0, spread);
    Data d;
    for (int c = 0; c < classes; ++c)
        for (int i = 0; i < per_class; ++i) {
            const double a = 2 * M_PI * c / classes;
            d.X.push_back({5 * std::cos(a) + n(rng), 5 * std::sin(a) + n(rng)});
            d.y.push_back("c" + std::to_string(c));
        }
    return d;
}

Data xor_data(int per_quadrant, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    Data d;
    for (int q = 0; q < 4; ++q)
        for (int i = 0; i < per_quadrant; ++i) {
            const double sx = q & 1 ? 1 : -1, sy = q & 2 ? 1 : -1;
            d.X.push_back({sx * u(rng), sy * u(rng)});
            d.y.push_back(sx * sy > 0 ? "a" : "b");
        }
    return d;
}

double accuracy(const SvmModel& m, const Data& d) {
    std::size_t ok = 0;
    for (std::size_t i = 0; i < d.X.size(); ++i) ok += predict(m, d.X[i]).label == d.y[i];
    return static_cast<double>(ok) / static_cast<double>(d.X.size());
}

}  // namespace

TEST_CASE("separable blobs and XOR are fit perfectly") {
    const auto b = blobs(30, 2, 0.5, 1);
    CHECK(accuracy(train_svm(b.X, b.y, KernelConfig{}), b) == 1.0);
    const auto x = xor_data(25, 2);
    KernelConfig cfg;
    cfg.C = 10;
    CHECK(accuracy(train_svm(x.X, x.y, cfg), x) == 1.0);
}

TEST_CASE("one-vs-one builds k(k-1)/2 machines, one-vs-rest builds k") {
    for (int k : {2, 3, 5}) {
        const auto d = blobs(15, k, 0.5, 3);
        CHECK(train_svm(d.X, d.y, KernelConfig{}).machines.size() == static_cast<std::size_t>(k * (k - 1) / 2));
        KernelConfig ovr;
        ovr.scheme = MultiClass::OneVsRest;
        const auto m = train_svm(d.X, d.y, ovr);
        CHECK(m.machines.size() == static_cast<std::size_t>(k == 2 ? 2 : k));
        CHECK(accuracy(m, d) == 1.0);
    }
}

TEST_CASE("dual variables stay in the box and free support vectors sit on the margin") {
    const auto d = blobs(40, 3, 1.6, 4);  // overlapping: some alphas hit C
    KernelConfig cfg;
    cfg.C = 2.0;
    cfg.tolerance = 1e-5;
    const auto m = train_svm(d.X, d.y, cfg);
    std::size_t free_count = 0;
    for (const auto& bm : m.machines) {
        CHECK(bm.converged);
        double sum = 0;
        for (std::size_t s = 0; s < bm.coef.size(); ++s) {
            const double a = std::abs(bm.coef[s]);
            CHECK(a > 0.0);
            CHECK(a <= cfg.C + 1e-12);
            sum += bm.coef[s];
            if (a < cfg.C - 1e-6) {
                ++free_count;
                const double f = decision_value(m, bm, bm.support.row(s));
                CHECK(std::abs(std::abs(f) - 1.0) < 1e-2);
                CHECK(f * bm.coef[s] > 0);  // sign matches the label
            }
        }
        CHECK(std::abs(sum) < 1e-8);  // sum_i y_i alpha_i = 0
    }
    CHECK(free_count > 0);
}

TEST_CASE("solve_smo satisfies the KKT conditions on a small problem") {
    const auto d = blobs(20, 2, 1.5, 5);
    std::vector<int> y;
    for (const auto& l : d.y) y.push_back(l == "c0" ? 1 : -1);
    const double C = 1.0, gamma = 0.5;
    const auto K = kernel_matrix_serial(d.X, gamma);
    const auto r = solve_smo(K, y, C, 1e-6, 1'000'000);
    REQUIRE(r.converged);
    for (std::size_t i = 0; i < y.size(); ++i) {
        double f = r.bias;
        for (std::size_t j = 0; j < y.size(); ++j) f += r.alpha[j] * y[j] * K(i, j);
        const double yf = y[i] * f;
        CHECK(r.alpha[i] >= 0.0);
        CHECK(r.alpha[i] <= C);
        if (r.alpha[i] < 1e-8) CHECK(yf >= 1 - 1e-3);
        else if (r.alpha[i] > C - 1e-8) CHECK(yf <= 1 + 1e-3);
        else CHECK(std::abs(yf - 1) < 1e-3);
    }
}

TEST_CASE("training is invariant to row order") {
    const auto d = blobs(20, 3, 1.2, 6);
    const auto base = train_svm(d.X, d.y, KernelConfig{});
    std::vector<std::size_t> perm(d.X.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 3; ++trial) {
        std::shuffle(perm.begin(), perm.end(), rng);
        Data p;
        for (auto i : perm) {
            p.X.push_back(d.X[i]);
            p.y.push_back(d.y[i]);
        }
        const auto m = train_svm(p.X, p.y, KernelConfig{});
        REQUIRE(m.machines.size() == base.machines.size());
        for (std::size_t k = 0; k < m.machines.size(); ++k) {
            CHECK(m.machines[k].coef == base.machines[k].coef);
            CHECK(m.machines[k].bias == base.machines[k].bias);
            CHECK(m.machines[k].support.data == base.machines[k].support.data);
        }
    }
}

TEST_CASE("save and load reproduce decision values bit-exactly") {
    const auto d = blobs(20, 3, 1.0, 7);
    KernelConfig cfg;
    cfg.standardize = true;
    const auto m = train_svm(d.X, d.y, cfg);
    const auto path = std::filesystem::temp_directory_path() / "htim_model.json";
    save_model(m, path);
    const auto back = load_model(path);
    CHECK(back.classes == m.classes);
    CHECK(back.gamma == m.gamma);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n(0, 3);
    for (int i = 0; i < 50; ++i) {
        const Vector x{n(rng), n(rng)};
        const auto a = predict(m, x), b = predict(back, x);
        CHECK(a.label == b.label);
        CHECK(a.scores == b.scores);
    }
    std::filesystem::remove(path);
}

TEST_CASE("load_model rejects foreign files") {
    const auto path = std::filesystem::temp_directory_path() / "htim_bad_model.json";
    {
        std::ofstream(path) << R"({"format":"something-else","version":1})";
    }
    CHECK_THROWS_AS(load_model(path), DataError);
    std::filesystem::remove(path);
}

TEST_CASE("invalid training inputs are rejected") {
    CHECK_THROWS_AS(train_svm({{1.0}, {2.0}}, {"a", "a"}, KernelConfig{}), DataError);
    CHECK_THROWS_AS(train_svm({{1.0}, {NAN}}, {"a", "b"}, KernelConfig{}), NumericError);
    CHECK_THROWS_AS(train_svm({{1.0}, {2.0, 3.0}}, {"a", "b"}, KernelConfig{}), DataError);
    const auto m = train_svm({{0.0}, {1.0}}, {"a", "b"}, KernelConfig{});
    const Vector wrong{1.0, 2.0};
    CHECK_THROWS_AS(predict(m, wrong), DataError);
    KernelConfig bad;
    bad.C = 0;
    CHECK_THROWS_AS(bad.validate(), UsageError);
    bad = KernelConfig{};
    bad.gamma = -1.0;
    CHECK_THROWS_AS(bad.validate(), UsageError);
}

TEST_CASE("OpenMP and serial kernel matrices agree exactly") {
    const auto d = blobs(50, 3, 1.0, 8);
    set_threads(2);
    const auto a = kernel_matrix(d.X, 0.3);
    set_threads(1);
    const auto b = kernel_matrix_serial(d.X, 0.3);
    CHECK(a.data == b.data);
    for (std::size_t i = 0; i < a.rows; ++i) {
        CHECK(a(i, i) == 1.0);
        for (std::size_t j = 0; j < a.cols; ++j) CHECK(a(i, j) == a(j, i));
    }
}

TEST_CASE("scale gamma is 1 / (d var X)") {
    const std::vector<Vector> X{{0.0, 2.0}, {4.0, 6.0}};
    // entries 0 2 4 6: mean 3, population variance 5
    CHECK(scale_gamma(X) == doctest::Approx(1.0 / (2 * 5.0)));
    CHECK(scale_gamma({{1.0, 1.0}, {1.0, 1.0}}) == 1.0);
    CHECK(rbf(Vector{0.0, 0.0}, Vector{1.0, 1.0}, 0.5) == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("one-vs-one vote ties break on summed margins") {
    // Three collinear classes; the middle of a gap sits between two classes.
    const Data d{{{0.0}, {0.1}, {5.0}, {5.1}, {10.0}, {10.1}}, {"a", "a", "b", "b", "c", "c"}};
    KernelConfig cfg;
    cfg.gamma = 0.05;
    const auto m = train_svm(d.X, d.y, cfg);
    for (double x : {0.0, 2.0, 4.0, 5.0, 7.0, 9.0, 10.0}) {
        const Vector v{x};
        const auto p = predict(m, v);
        const int top = *std::max_element(p.votes.begin(), p.votes.end());
        const auto chosen = m.class_index(p.label);
        CHECK(p.votes[chosen] == top);
        for (std::size_t c = 0; c < p.votes.size(); ++c)
            if (p.votes[c] == top) CHECK(p.scores[chosen] >= p.scores[c]);
        CHECK(p.margin == p.scores[chosen]);
    }
    CHECK(predict(m, Vector{0.0}).label == "a");
    CHECK(predict(m, Vector{10.0}).label == "c");
}
