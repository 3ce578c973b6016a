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

#include "htim/metrics.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace htim::eval {

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> cls) : classes(std::move(cls)) {
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    counts.assign(classes.size(), std::vector<long>(classes.size(), 0));
}

std::size_t ConfusionMatrix::index(const std::string& label) const {
    auto it = std::lower_bound(classes.begin(), classes.end(), label);
    if (it == classes.end() || *it != label) throw DataError("label '" + label + "' not in confusion matrix");
    return static_cast<std::size_t>(it - classes.begin());
}

void ConfusionMatrix::add(const std::string& truth, const std::string& predicted, long n) {
    counts[index(truth)][index(predicted)] += n;
}

long ConfusionMatrix::row_sum(std::size_t i) const {
    long s = 0;
    for (long v : counts[i]) s += v;
    return s;
}

long ConfusionMatrix::col_sum(std::size_t j) const {
    long s = 0;
    for (const auto& r : counts) s += r[j];
    return s;
}

long ConfusionMatrix::total() const {
    long s = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) s += row_sum(i);
    return s;
}

std::vector<ClassScores> per_class_scores(const ConfusionMatrix& cm) {
    std::vector<ClassScores> out(cm.classes.size());
    for (std::size_t c = 0; c < out.size(); ++c) {
        const long tp = cm.counts[c][c];
        const long fn = cm.row_sum(c) - tp;
        const long fp = cm.col_sum(c) - tp;
        auto& s = out[c];
        s.support = tp + fn;
        s.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
        s.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
        s.f1 = tp > 0 ? 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn) : 0.0;
    }
    return out;
}

double macro_f1(const ConfusionMatrix& cm) {
    if (cm.classes.empty()) throw DataError("macro-F1 of an empty confusion matrix");
    double sum = 0.0;
    for (const auto& s : per_class_scores(cm)) sum += s.f1;
    return 100.0 * sum / static_cast<double>(cm.classes.size());
}

FoldSplit kfold_split(std::span<const std::string> user_ids, std::span<const std::string> labels, int k,
                      std::uint64_t seed) {
    if (user_ids.size() != labels.size()) throw DataError("user and label counts differ");
    if (k < 2) throw UsageError("k-fold split needs k >= 2");
    if (static_cast<std::size_t>(k) > user_ids.size())
        throw DataError("k = " + std::to_string(k) + " exceeds user count " + std::to_string(user_ids.size()));

    FoldSplit split;
    split.k = k;
    split.seed = seed;
    split.test.assign(k, {});
    split.train.assign(k, {});

    std::map<std::string, std::vector<std::string>> by_class;
    for (std::size_t i = 0; i < user_ids.size(); ++i) by_class[labels[i]].push_back(user_ids[i]);

    Rng rng(seed);
    std::size_t cursor = 0;
    std::map<std::string, int> fold_of;
    for (auto& [label, ids] : by_class) {
        if (ids.size() < static_cast<std::size_t>(k))
            split.warnings.push_back("class '" + label + "' has " + std::to_string(ids.size()) +
                                     " users, fewer than k = " + std::to_string(k));
        std::sort(ids.begin(), ids.end());
        std::shuffle(ids.begin(), ids.end(), rng);
        for (const auto& id : ids) {
            fold_of[id] = static_cast<int>(cursor % static_cast<std::size_t>(k));
            ++cursor;
        }
    }
    for (const auto& id : user_ids) {
        const int f = fold_of.at(id);
        for (int g = 0; g < k; ++g) (g == f ? split.test[g] : split.train[g]).push_back(id);
    }
    return split;
}

}  // namespace htim::eval
