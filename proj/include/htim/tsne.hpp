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
#include <optional>
#include <string>
#include <vector>

#include "htim/common.hpp"

namespace htim::eval {

struct TsneConfig {
    double perplexity = 30.0;
    int iterations = 1000;
    std::optional<double> learning_rate;  // nullopt: max(n / exaggeration / 4, 50)
    double early_exaggeration = 12.0;
    int exaggeration_iters = 250;
    double momentum_initial = 0.5;
    double momentum_final = 0.8;
    std::uint64_t seed = 0;
};

struct Projection2D {
    std::vector<std::string> ids;
    Matrix coords;  // n x 2
    double kl_initial = 0.0;
    double kl_final = 0.0;
    double perplexity = 0.0;  // effective value after clamping
    int iterations = 0;
    std::vector<std::string> warnings;
};

// Symmetrized joint affinities P (rows sum to 1/n before symmetrization),
// each conditional row calibrated by bisection to the requested perplexity.
Matrix tsne_affinities(const std::vector<Vector>& X, double perplexity);

// KL(P || Q) for the Student-t similarities of embedding Y (n x 2).
double tsne_kl(const Matrix& P, const Matrix& Y);

// Gradient of KL(exaggeration * P || Q) w.r.t. Y. OpenMP and serial variants
// agree exactly (the normalizer is reduced in a fixed order).
void tsne_gradient(const Matrix& P, const Matrix& Y, double exaggeration, Matrix& grad);
void tsne_gradient_serial(const Matrix& P, const Matrix& Y, double exaggeration, Matrix& grad);

/// Exact O(n^2) t-SNE into two dimensions with early exaggeration, momentum
/// and per-coordinate gains. Random N(0, 1e-4^2) initialization from the seed.
Projection2D tsne_project(const std::vector<std::string>& ids, const std::vector<Vector>& X, const TsneConfig& cfg);

}  // namespace htim::eval
