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
#include <span>
#include <string>
#include <vector>

#include "htim/common.hpp"
#include "htim/svm.hpp"

namespace htim::model {

/// Modal label over one user's tweet predictions. Ties go to the label with
/// the highest mean decision margin, then to the lexicographically smallest
/// label. Throws DataError on an empty list.
std::string majority_vote(std::span<const Prediction> tweet_predictions);

class MajorityBaseline {
public:
    // Most frequent training label; ties resolved lexicographically.
    explicit MajorityBaseline(std::span<const std::string> train_labels);
    const std::string& predict() const { return label_; }

private:
    std::string label_;
};

class RandomBaseline {
public:
    RandomBaseline(std::vector<std::string> classes, std::uint64_t seed);
    std::string predict();

private:
    std::vector<std::string> classes_;
    Rng rng_;
};

}  // namespace htim::model
