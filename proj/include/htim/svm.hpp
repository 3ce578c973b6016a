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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "htim/common.hpp"

namespace htim::model {

enum class MultiClass { OneVsOne, OneVsRest };

struct KernelConfig {
    double C = 1.0;
    std::optional<double> gamma;  // nullopt: "scale" = 1 / (d * var(X))
    double tolerance = 1e-3;
    long max_iter = 10'000'000;
    MultiClass scheme = MultiClass::OneVsOne;
    bool standardize = false;  // z-score features before training
    std::uint64_t seed = 0;    // echoed into metadata; the solver is deterministic

    void validate() const;
};

struct BinaryMachine {
    std::size_t positive = 0;  // class index scored +1
    std::size_t negative = 0;  // class index scored -1 (== classes.size() for one-vs-rest)
    Matrix support;            // support vectors, one per row
    Vector coef;               // y_i * alpha_i per support vector
    double bias = 0.0;         // decision = sum coef_i K(sv_i, x) + bias
    long iterations = 0;
    bool converged = true;
};

struct SvmModel {
    std::vector<std::string> classes;  // sorted
    KernelConfig config;
    double gamma = 0.0;  // resolved
    std::size_t dim = 0;
    std::vector<BinaryMachine> machines;
    Vector feature_mean, feature_scale;  // populated when standardizing

    std::size_t class_index(const std::string& label) const;  // throws if unknown
};

struct Prediction {
    std::string id;
    std::string label;
    std::vector<int> votes;  // per class
    Vector scores;           // summed signed pairwise margins per class
    double margin = 0.0;     // scores[label]
};

double rbf(std::span<const double> a, std::span<const double> b, double gamma);

// Gram matrix rows [0, n) of X against X. OpenMP and serial variants agree exactly.
Matrix kernel_matrix(const std::vector<Vector>& X, double gamma);
Matrix kernel_matrix_serial(const std::vector<Vector>& X, double gamma);

// "scale" bandwidth: 1 / (d * variance of all feature entries); 1 when the variance is zero.
double scale_gamma(const std::vector<Vector>& X);

struct SmoResult {
    Vector alpha;
    double bias = 0.0;
    long iterations = 0;
    bool converged = true;
};

/// Binary C-SVC dual solved by SMO with maximal-violating-pair working-set
/// selection. `y` holds +1/-1; `K` is the full kernel matrix.
SmoResult solve_smo(const Matrix& K, std::span<const int> y, double C, double tolerance, long max_iter);

/// Trains an RBF SVM. Samples are canonically reordered (label, then
/// lexicographic feature order) before solving, so the model does not depend
/// on the order of the input rows.
SvmModel train_svm(const std::vector<Vector>& X, const std::vector<std::string>& y, const KernelConfig& cfg);

double decision_value(const SvmModel& model, const BinaryMachine& m, std::span<const double> x);

Prediction predict(const SvmModel& model, std::span<const double> x);
std::vector<Prediction> predict_all(const SvmModel& model, const std::vector<Vector>& X);

// JSON container: {format, version, config, gamma, dim, classes, machines, ...}.
void save_model(const SvmModel& model, const std::filesystem::path& path);
SvmModel load_model(const std::filesystem::path& path);

}  // namespace htim::model
