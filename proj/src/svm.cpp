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

#include "htim/svm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "json.hpp"

namespace htim::model {

void KernelConfig::validate() const {
    if (!(C > 0.0)) throw UsageError("SVM penalty C must be > 0");
    if (gamma && !(*gamma > 0.0)) throw UsageError("SVM gamma must be > 0");
    if (!(tolerance > 0.0)) throw UsageError("SVM tolerance must be > 0");
    if (max_iter < 1) throw UsageError("SVM max_iter must be >= 1");
}

std::size_t SvmModel::class_index(const std::string& label) const {
    auto it = std::lower_bound(classes.begin(), classes.end(), label);
    if (it == classes.end() || *it != label) throw DataError("unknown class '" + label + "'");
    return static_cast<std::size_t>(it - classes.begin());
}

double rbf(std::span<const double> a, std::span<const double> b, double gamma) {
    double d2 = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        d2 += d * d;
    }
    return std::exp(-gamma * d2);
}

Matrix kernel_matrix_serial(const std::vector<Vector>& X, double gamma) {
    const std::size_t n = X.size();
    Matrix K(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) K(i, j) = rbf(X[i], X[j], gamma);
    return K;
}

Matrix kernel_matrix(const std::vector<Vector>& X, double gamma) {
    const long n = static_cast<long>(X.size());
    Matrix K(X.size(), X.size());
#pragma omp parallel for schedule(dynamic, 8)
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) K(i, j) = rbf(X[i], X[j], gamma);
    return K;
}

double scale_gamma(const std::vector<Vector>& X) {
    if (X.empty() || X.front().empty()) return 1.0;
    const double d = static_cast<double>(X.front().size());
    double count = 0.0, mean = 0.0;
    for (const auto& x : X)
        for (double v : x) {
            count += 1.0;
            mean += v;
        }
    mean /= count;
    double var = 0.0;
    for (const auto& x : X)
        for (double v : x) var += (v - mean) * (v - mean);
    var /= count;
    return var > 0.0 ? 1.0 / (d * var) : 1.0;
}

SmoResult solve_smo(const Matrix& K, std::span<const int> y, double C, double tolerance, long max_iter) {
    constexpr double kTau = 1e-12;
    const std::size_t n = y.size();
    SmoResult r;
    r.alpha.assign(n, 0.0);
    Vector& a = r.alpha;
    Vector G(n, -1.0);  // gradient of 1/2 a'Qa - e'a
    auto Q = [&](std::size_t i, std::size_t j) { return y[i] * y[j] * K(i, j); };
    auto in_up = [&](std::size_t t) { return (y[t] > 0 && a[t] < C) || (y[t] < 0 && a[t] > 0.0); };
    auto in_low = [&](std::size_t t) { return (y[t] < 0 && a[t] < C) || (y[t] > 0 && a[t] > 0.0); };

    while (true) {
        double gmax = -INFINITY, gmin = INFINITY;
        long i = -1, j = -1;
        for (std::size_t t = 0; t < n; ++t) {
            const double v = -y[t] * G[t];
            if (in_up(t) && v > gmax) {
                gmax = v;
                i = static_cast<long>(t);
            }
            if (in_low(t) && v < gmin) {
                gmin = v;
                j = static_cast<long>(t);
            }
        }
        if (i < 0 || j < 0 || gmax - gmin < tolerance) break;
        if (r.iterations >= max_iter) {
            r.converged = false;
            break;
        }
        ++r.iterations;

        const double old_i = a[i], old_j = a[j];
        if (y[i] != y[j]) {
            double quad = K(i, i) + K(j, j) + 2.0 * Q(i, j);
            if (quad <= 0.0) quad = kTau;
            const double delta = (-G[i] - G[j]) / quad;
            const double diff = a[i] - a[j];
            a[i] += delta;
            a[j] += delta;
            if (diff > 0.0) {
                if (a[j] < 0.0) {
                    a[j] = 0.0;
                    a[i] = diff;
                }
            } else if (a[i] < 0.0) {
                a[i] = 0.0;
                a[j] = -diff;
            }
            if (diff > 0.0) {
                if (a[i] > C) {
                    a[i] = C;
                    a[j] = C - diff;
                }
            } else if (a[j] > C) {
                a[j] = C;
                a[i] = C + diff;
            }
        } else {
            double quad = K(i, i) + K(j, j) - 2.0 * Q(i, j);
            if (quad <= 0.0) quad = kTau;
            const double delta = (G[i] - G[j]) / quad;
            const double sum = a[i] + a[j];
            a[i] -= delta;
            a[j] += delta;
            if (sum > C) {
                if (a[i] > C) {
                    a[i] = C;
                    a[j] = sum - C;
                }
            } else if (a[j] < 0.0) {
                a[j] = 0.0;
                a[i] = sum;
            }
            if (sum > C) {
                if (a[j] > C) {
                    a[j] = C;
                    a[i] = sum - C;
                }
            } else if (a[i] < 0.0) {
                a[i] = 0.0;
                a[j] = sum;
            }
        }
        const double di = a[i] - old_i, dj = a[j] - old_j;
        for (std::size_t t = 0; t < n; ++t) G[t] += Q(i, t) * di + Q(j, t) * dj;
    }

    // Bias: average over free vectors, midpoint of the feasible interval otherwise.
    double ub = INFINITY, lb = -INFINITY, sum_free = 0.0;
    long n_free = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double yG = y[t] * G[t];
        if (a[t] >= C) {
            if (y[t] < 0) ub = std::min(ub, yG);
            else lb = std::max(lb, yG);
        } else if (a[t] <= 0.0) {
            if (y[t] > 0) ub = std::min(ub, yG);
            else lb = std::max(lb, yG);
        } else {
            ++n_free;
            sum_free += yG;
        }
    }
    const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : 0.5 * (ub + lb);
    r.bias = -rho;
    return r;
}

namespace {

BinaryMachine fit_machine(const Matrix& K_all, const std::vector<Vector>& X, const std::vector<std::size_t>& rows,
                          const std::vector<int>& y, const KernelConfig& cfg) {
    const std::size_t n = rows.size();
    Matrix K(n, n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) K(a, b) = K_all(rows[a], rows[b]);
    const SmoResult r = solve_smo(K, y, cfg.C, cfg.tolerance, cfg.max_iter);
    BinaryMachine m;
    m.bias = r.bias;
    m.iterations = r.iterations;
    m.converged = r.converged;
    const std::size_t d = X.empty() ? 0 : X.front().size();
    m.support.cols = d;
    for (std::size_t a = 0; a < n; ++a) {
        if (r.alpha[a] <= 0.0) continue;
        m.coef.push_back(y[a] * r.alpha[a]);
        const auto& x = X[rows[a]];
        m.support.data.insert(m.support.data.end(), x.begin(), x.end());
        ++m.support.rows;
    }
    return m;
}

}  // namespace

SvmModel train_svm(const std::vector<Vector>& X_in, const std::vector<std::string>& y_in, const KernelConfig& cfg) {
    cfg.validate();
    if (X_in.size() != y_in.size()) throw DataError("feature and label counts differ");
    if (X_in.empty()) throw DataError("no training samples");
    const std::size_t d = X_in.front().size();
    for (const auto& x : X_in) {
        if (x.size() != d) throw DataError("training features have mixed dimensions");
        if (!all_finite(x)) throw NumericError("non-finite training feature");
    }

    SvmModel model;
    model.config = cfg;
    model.dim = d;
    model.classes = y_in;
    std::sort(model.classes.begin(), model.classes.end());
    model.classes.erase(std::unique(model.classes.begin(), model.classes.end()), model.classes.end());
    if (model.classes.size() < 2) throw DataError("SVM training needs at least two classes");

    // Canonical order: label, then lexicographic feature values.
    std::vector<std::size_t> perm(X_in.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
        if (y_in[a] != y_in[b]) return y_in[a] < y_in[b];
        return std::lexicographical_compare(X_in[a].begin(), X_in[a].end(), X_in[b].begin(), X_in[b].end());
    });
    std::vector<Vector> X;
    std::vector<std::size_t> label;
    X.reserve(perm.size());
    for (auto p : perm) {
        X.push_back(X_in[p]);
        label.push_back(model.class_index(y_in[p]));
    }

    if (cfg.standardize) {
        model.feature_mean.assign(d, 0.0);
        model.feature_scale.assign(d, 0.0);
        for (const auto& x : X)
            for (std::size_t k = 0; k < d; ++k) model.feature_mean[k] += x[k];
        for (auto& m : model.feature_mean) m /= static_cast<double>(X.size());
        for (const auto& x : X)
            for (std::size_t k = 0; k < d; ++k)
                model.feature_scale[k] += (x[k] - model.feature_mean[k]) * (x[k] - model.feature_mean[k]);
        for (auto& s : model.feature_scale) {
            s = std::sqrt(s / static_cast<double>(X.size()));
            if (s == 0.0) s = 1.0;
        }
        for (auto& x : X)
            for (std::size_t k = 0; k < d; ++k) x[k] = (x[k] - model.feature_mean[k]) / model.feature_scale[k];
    }

    model.gamma = cfg.gamma ? *cfg.gamma : scale_gamma(X);
    const Matrix K_all = kernel_matrix(X, model.gamma);
    const std::size_t k = model.classes.size();

    struct Task {
        std::size_t pos, neg;
    };
    std::vector<Task> tasks;
    if (cfg.scheme == MultiClass::OneVsOne) {
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = a + 1; b < k; ++b) tasks.push_back({a, b});
    } else {
        for (std::size_t a = 0; a < k; ++a) tasks.push_back({a, k});
    }
    model.machines.resize(tasks.size());
    const long nt = static_cast<long>(tasks.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (long t = 0; t < nt; ++t) {
        const auto [pos, neg] = tasks[t];
        std::vector<std::size_t> rows;
        std::vector<int> y;
        for (std::size_t i = 0; i < X.size(); ++i) {
            if (label[i] == pos) {
                rows.push_back(i);
                y.push_back(+1);
            } else if (neg == k || label[i] == neg) {
                rows.push_back(i);
                y.push_back(-1);
            }
        }
        BinaryMachine m = fit_machine(K_all, X, rows, y, cfg);
        m.positive = pos;
        m.negative = neg;
        model.machines[t] = std::move(m);
    }
    return model;
}

double decision_value(const SvmModel& model, const BinaryMachine& m, std::span<const double> x) {
    double f = m.bias;
    for (std::size_t i = 0; i < m.coef.size(); ++i) f += m.coef[i] * rbf(m.support.row(i), x, model.gamma);
    return f;
}

Prediction predict(const SvmModel& model, std::span<const double> x_in) {
    if (x_in.size() != model.dim)
        throw DataError("feature dimension " + std::to_string(x_in.size()) + " does not match model dimension " +
                        std::to_string(model.dim));
    Vector scaled;
    std::span<const double> x = x_in;
    if (!model.feature_mean.empty()) {
        scaled.resize(x_in.size());
        for (std::size_t k = 0; k < scaled.size(); ++k)
            scaled[k] = (x_in[k] - model.feature_mean[k]) / model.feature_scale[k];
        x = scaled;
    }
    const std::size_t k = model.classes.size();
    Prediction p;
    p.votes.assign(k, 0);
    p.scores.assign(k, 0.0);
    for (const auto& m : model.machines) {
        const double f = decision_value(model, m, x);
        if (m.negative == k) {
            p.scores[m.positive] = f;
            if (f > 0.0) ++p.votes[m.positive];
            continue;
        }
        if (f > 0.0) ++p.votes[m.positive];
        else if (f < 0.0) ++p.votes[m.negative];
        p.scores[m.positive] += f;
        p.scores[m.negative] -= f;
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < k; ++c) {
        const bool better = model.config.scheme == MultiClass::OneVsRest
                                ? p.scores[c] > p.scores[best]
                                : (p.votes[c] > p.votes[best] ||
                                   (p.votes[c] == p.votes[best] && p.scores[c] > p.scores[best]));
        if (better) best = c;
    }
    p.label = model.classes[best];
    p.margin = p.scores[best];
    return p;
}

std::vector<Prediction> predict_all(const SvmModel& model, const std::vector<Vector>& X) {
    std::vector<Prediction> out(X.size());
    const long n = static_cast<long>(X.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (long i = 0; i < n; ++i) out[i] = predict(model, X[i]);
    return out;
}

void save_model(const SvmModel& model, const std::filesystem::path& path) {
    nlohmann::ordered_json j;
    j["format"] = "htim-svm";
    j["version"] = 1;
    j["config"] = {{"kernel", "rbf"},
                   {"C", model.config.C},
                   {"gamma", model.config.gamma ? nlohmann::json(*model.config.gamma) : nlohmann::json("scale")},
                   {"tolerance", model.config.tolerance},
                   {"max_iter", model.config.max_iter},
                   {"scheme", model.config.scheme == MultiClass::OneVsOne ? "ovo" : "ovr"},
                   {"standardize", model.config.standardize},
                   {"seed", model.config.seed}};
    j["gamma"] = model.gamma;
    j["dim"] = model.dim;
    j["classes"] = model.classes;
    j["feature_mean"] = model.feature_mean;
    j["feature_scale"] = model.feature_scale;
    auto machines = nlohmann::ordered_json::array();
    for (const auto& m : model.machines) {
        nlohmann::ordered_json jm;
        jm["positive"] = m.positive;
        jm["negative"] = m.negative;
        jm["bias"] = m.bias;
        jm["iterations"] = m.iterations;
        jm["converged"] = m.converged;
        jm["coef"] = m.coef;
        jm["support"] = m.support.data;
        machines.push_back(std::move(jm));
    }
    j["machines"] = std::move(machines);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out << j.dump(1) << '\n';
}

SvmModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    SvmModel model;
    try {
        auto j = nlohmann::json::parse(in);
        if (j.at("format") != "htim-svm" || j.at("version") != 1)
            throw DataError(path.string() + ": not an htim-svm v1 model");
        const auto& c = j.at("config");
        model.config.C = c.at("C").get<double>();
        if (c.at("gamma").is_number()) model.config.gamma = c.at("gamma").get<double>();
        model.config.tolerance = c.at("tolerance").get<double>();
        model.config.max_iter = c.at("max_iter").get<long>();
        model.config.scheme = c.at("scheme") == "ovr" ? MultiClass::OneVsRest : MultiClass::OneVsOne;
        model.config.standardize = c.at("standardize").get<bool>();
        model.config.seed = c.at("seed").get<std::uint64_t>();
        model.gamma = j.at("gamma").get<double>();
        model.dim = j.at("dim").get<std::size_t>();
        model.classes = j.at("classes").get<std::vector<std::string>>();
        model.feature_mean = j.at("feature_mean").get<Vector>();
        model.feature_scale = j.at("feature_scale").get<Vector>();
        for (const auto& jm : j.at("machines")) {
            BinaryMachine m;
            m.positive = jm.at("positive").get<std::size_t>();
            m.negative = jm.at("negative").get<std::size_t>();
            m.bias = jm.at("bias").get<double>();
            m.iterations = jm.at("iterations").get<long>();
            m.converged = jm.at("converged").get<bool>();
            m.coef = jm.at("coef").get<Vector>();
            m.support.data = jm.at("support").get<Vector>();
            m.support.cols = model.dim;
            m.support.rows = m.coef.size();
            if (m.support.data.size() != m.support.rows * model.dim)
                throw DataError(path.string() + ": support vector block has the wrong size");
            model.machines.push_back(std::move(m));
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
    return model;
}

}  // namespace htim::model
