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

#include "htim/tsne.hpp"

#include <algorithm>
#include <cmath>

namespace htim::eval {

namespace {

Matrix squared_distances(const std::vector<Vector>& X) {
    const long n = static_cast<long>(X.size());
    Matrix D(X.size(), X.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < X[i].size(); ++k) {
                const double d = X[i][k] - X[j][k];
                s += d * d;
            }
            D(i, j) = s;
        }
    return D;
}

// Conditional row p_{j|i} at precision beta; returns the Shannon entropy (nats).
double conditional_row(const Matrix& D, std::size_t i, double beta, std::span<double> row) {
    const std::size_t n = D.rows;
    double min_d = INFINITY;
    for (std::size_t j = 0; j < n; ++j)
        if (j != i) min_d = std::min(min_d, D(i, j));
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        row[j] = j == i ? 0.0 : std::exp(-beta * (D(i, j) - min_d));
        sum += row[j];
    }
    double h = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        row[j] /= sum;
        if (row[j] > 0.0) h -= row[j] * std::log(row[j]);
    }
    return h;
}

}  // namespace

Matrix tsne_affinities(const std::vector<Vector>& X, double perplexity) {
    const std::size_t n = X.size();
    const Matrix D = squared_distances(X);
    Matrix cond(n, n);
    const double target = std::log(perplexity);
    const long ln = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 16)
    for (long i = 0; i < ln; ++i) {
        double beta = 1.0, lo = 0.0, hi = INFINITY;
        auto row = cond.row(static_cast<std::size_t>(i));
        for (int it = 0; it < 200; ++it) {
            const double h = conditional_row(D, static_cast<std::size_t>(i), beta, row);
            if (std::abs(h - target) < 1e-5) break;
            if (h > target) {
                lo = beta;
                beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
            } else {
                hi = beta;
                beta = 0.5 * (beta + lo);
            }
        }
    }
    Matrix P(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            P(i, j) = std::max((cond(i, j) + cond(j, i)) / (2.0 * static_cast<double>(n)), 1e-300);
    for (std::size_t i = 0; i < n; ++i) P(i, i) = 0.0;
    return P;
}

double tsne_kl(const Matrix& P, const Matrix& Y) {
    const std::size_t n = P.rows;
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double dx = Y(i, 0) - Y(j, 0), dy = Y(i, 1) - Y(j, 1);
            z += 1.0 / (1.0 + dx * dx + dy * dy);
        }
    double kl = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j || P(i, j) <= 0.0) continue;
            const double dx = Y(i, 0) - Y(j, 0), dy = Y(i, 1) - Y(j, 1);
            const double q = std::max(1.0 / (1.0 + dx * dx + dy * dy) / z, 1e-300);
            kl += P(i, j) * std::log(P(i, j) / q);
        }
    return kl;
}

void tsne_gradient_serial(const Matrix& P, const Matrix& Y, double exaggeration, Matrix& grad) {
    const std::size_t n = P.rows;
    Matrix num(n, n);
    std::vector<double> row_z(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double dx = Y(i, 0) - Y(j, 0), dy = Y(i, 1) - Y(j, 1);
            num(i, j) = 1.0 / (1.0 + dx * dx + dy * dy);
            row_z[i] += num(i, j);
        }
    double z = 0.0;
    for (double r : row_z) z += r;
    grad = Matrix(n, 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double m = 4.0 * (exaggeration * P(i, j) - num(i, j) / z) * num(i, j);
            grad(i, 0) += m * (Y(i, 0) - Y(j, 0));
            grad(i, 1) += m * (Y(i, 1) - Y(j, 1));
        }
}

void tsne_gradient(const Matrix& P, const Matrix& Y, double exaggeration, Matrix& grad) {
    const std::size_t n = P.rows;
    const long ln = static_cast<long>(n);
    Matrix num(n, n);
    std::vector<double> row_z(n, 0.0);
#pragma omp parallel for schedule(static)
    for (long i = 0; i < ln; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (static_cast<std::size_t>(i) == j) continue;
            const double dx = Y(i, 0) - Y(j, 0), dy = Y(i, 1) - Y(j, 1);
            num(i, j) = 1.0 / (1.0 + dx * dx + dy * dy);
            row_z[i] += num(i, j);
        }
    double z = 0.0;
    for (double r : row_z) z += r;
    grad = Matrix(n, 2);
#pragma omp parallel for schedule(static)
    for (long i = 0; i < ln; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (static_cast<std::size_t>(i) == j) continue;
            const double m = 4.0 * (exaggeration * P(i, j) - num(i, j) / z) * num(i, j);
            grad(i, 0) += m * (Y(i, 0) - Y(j, 0));
            grad(i, 1) += m * (Y(i, 1) - Y(j, 1));
        }
}

Projection2D tsne_project(const std::vector<std::string>& ids, const std::vector<Vector>& X, const TsneConfig& cfg) {
    if (ids.size() != X.size()) throw DataError("t-SNE id and vector counts differ");
    for (const auto& x : X)
        if (!all_finite(x)) throw NumericError("t-SNE input contains non-finite values");
    if (!(cfg.perplexity > 0.0) || cfg.iterations < 1 || (cfg.learning_rate && !(*cfg.learning_rate > 0.0))) throw UsageError("invalid t-SNE configuration");

    Projection2D out;
    out.ids = ids;
    out.iterations = cfg.iterations;
    const std::size_t n = X.size();
    out.coords = Matrix(n, 2);
    out.perplexity = cfg.perplexity;
    if (n < 2) return out;
    if (static_cast<double>(n) < 3.0 * cfg.perplexity) {
        out.warnings.push_back("t-SNE on " + std::to_string(n) + " points with perplexity " +
                               format_double(cfg.perplexity) + " (fewer than 3x perplexity points)");
        out.perplexity = std::max(1.0, static_cast<double>(n - 1) / 3.0);
    }

    const Matrix P = tsne_affinities(X, out.perplexity);
    Rng rng(cfg.seed);
    std::normal_distribution<double> init(0.0, 1e-4);
    Matrix& Y = out.coords;
    for (auto& v : Y.data) v = init(rng);
    out.kl_initial = tsne_kl(P, Y);

    const double lr = cfg.learning_rate.value_or(
        std::max(static_cast<double>(n) / cfg.early_exaggeration / 4.0, 50.0));
    Matrix grad, update(n, 2), gains(n, 2, 1.0);
    for (int it = 0; it < cfg.iterations; ++it) {
        const bool early = it < cfg.exaggeration_iters;
        if (threads() == 1)
            tsne_gradient_serial(P, Y, early ? cfg.early_exaggeration : 1.0, grad);
        else
            tsne_gradient(P, Y, early ? cfg.early_exaggeration : 1.0, grad);
        const double momentum = early ? cfg.momentum_initial : cfg.momentum_final;
        for (std::size_t k = 0; k < Y.data.size(); ++k) {
            const bool same_sign = (grad.data[k] > 0.0) == (update.data[k] > 0.0);
            gains.data[k] = std::max(0.01, same_sign ? gains.data[k] * 0.8 : gains.data[k] + 0.2);
            update.data[k] = momentum * update.data[k] - lr * gains.data[k] * grad.data[k];
            Y.data[k] += update.data[k];
        }
        for (int c = 0; c < 2; ++c) {
            double mean = 0.0;
            for (std::size_t i = 0; i < n; ++i) mean += Y(i, c);
            mean /= static_cast<double>(n);
            for (std::size_t i = 0; i < n; ++i) Y(i, c) -= mean;
        }
    }
    if (!all_finite(Y.data)) throw NumericError("t-SNE diverged");
    out.kl_final = tsne_kl(P, Y);
    return out;
}

}  // namespace htim::eval
