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

#include "htim/sgns.hpp"

#include <cmath>

namespace htim {

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

namespace {
// -log s(x), stable for large |x|.
double neg_log_sigmoid(double x) { return x >= 0.0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x)); }
}  // namespace

double sgns_loss(std::span<const double> h, const Matrix& out, std::size_t positive,
                 std::span<const std::size_t> negatives) {
    double loss = neg_log_sigmoid(dot(h, out.row(positive)));
    for (auto n : negatives) loss += neg_log_sigmoid(-dot(h, out.row(n)));
    return loss;
}

double sgns_update_outputs(std::span<const double> h, Matrix& out, std::size_t positive,
                           std::span<const std::size_t> negatives, double lr, std::span<double> grad_h) {
    const std::size_t d = h.size();
    double loss = 0.0;
    auto apply = [&](std::size_t row, double label) {
        auto v = out.row(row);
        const double s = dot(h, v);
        const double f = sigmoid(s);
        loss += label > 0.5 ? neg_log_sigmoid(s) : neg_log_sigmoid(-s);
        // dL/ds = f - label
        const double g = f - label;
        for (std::size_t k = 0; k < d; ++k) {
            grad_h[k] += g * v[k];
            v[k] -= lr * g * h[k];
        }
    };
    apply(positive, 1.0);
    for (auto n : negatives) apply(n, 0.0);
    return loss;
}

AliasTable unigram_noise(std::span<const double> counts, double power) {
    std::vector<double> w(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) w[i] = std::pow(counts[i], power);
    return AliasTable(w);
}

void draw_negatives(const AliasTable& noise, Rng& rng, std::size_t positive, int k,
                    std::vector<std::size_t>& out) {
    out.clear();
    for (int i = 0; i < k; ++i) {
        const std::size_t n = noise.sample(rng);
        if (n != positive) out.push_back(n);
    }
}

void init_uniform(Matrix& m, Rng& rng) {
    const double scale = 0.5 / static_cast<double>(m.cols);
    std::uniform_real_distribution<double> u(-scale, scale);
    for (auto& x : m.data) x = u(rng);
}

}  // namespace htim
