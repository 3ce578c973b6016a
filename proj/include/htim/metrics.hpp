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
#include <map>
#include <span>
#include <string>
#include <vector>

#include "htim/common.hpp"

namespace htim::eval {

/// Rows are true classes, columns predicted classes.
struct ConfusionMatrix {
    std::vector<std::string> classes;
    std::vector<std::vector<long>> counts;

    explicit ConfusionMatrix(std::vector<std::string> classes = {});
    std::size_t index(const std::string& label) const;  // throws for unknown labels
    void add(const std::string& truth, const std::string& predicted, long n = 1);
    long row_sum(std::size_t i) const;
    long col_sum(std::size_t j) const;
    long total() const;
};

struct ClassScores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    long support = 0;
};

// F1 = 2TP / (2TP + FP + FN); a class with TP = 0 scores 0.
std::vector<ClassScores> per_class_scores(const ConfusionMatrix& cm);

// Unweighted mean of per-class F1, as a percentage in [0, 100].
double macro_f1(const ConfusionMatrix& cm);

struct FoldSplit {
    int k = 10;
    std::uint64_t seed = 0;
    std::vector<std::vector<std::string>> test;   // per fold
    std::vector<std::vector<std::string>> train;  // complement of test
    std::vector<std::string> warnings;
};

/// Stratified k-fold split. Each class is shuffled with the seed and dealt
/// round-robin, continuing the fold cursor across classes, so every fold's
/// class histogram is within one user of proportional allocation and fold
/// sizes differ by at most one.
FoldSplit kfold_split(std::span<const std::string> user_ids, std::span<const std::string> labels, int k,
                      std::uint64_t seed);

}  // namespace htim::eval
