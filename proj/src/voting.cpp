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

#include "htim/voting.hpp"

#include <algorithm>
#include <map>

namespace htim::model {

std::string majority_vote(std::span<const Prediction> tweet_predictions) {
    if (tweet_predictions.empty()) throw DataError("majority vote over an empty prediction list");
    struct Tally {
        long votes = 0;
        double margin_sum = 0.0;
    };
    std::map<std::string, Tally> tally;  // ordered: lexicographic tie-break falls out of iteration
    for (const auto& p : tweet_predictions) {
        auto& t = tally[p.label];
        ++t.votes;
        t.margin_sum += p.margin;
    }
    const std::string* best = nullptr;
    const Tally* bt = nullptr;
    for (const auto& [label, t] : tally) {
        if (!best || t.votes > bt->votes ||
            (t.votes == bt->votes && t.margin_sum / t.votes > bt->margin_sum / bt->votes)) {
            best = &label;
            bt = &t;
        }
    }
    return *best;
}

MajorityBaseline::MajorityBaseline(std::span<const std::string> train_labels) {
    if (train_labels.empty()) throw DataError("majority baseline needs training labels");
    std::map<std::string, long> counts;
    for (const auto& l : train_labels) ++counts[l];
    long best = -1;
    for (const auto& [l, c] : counts)
        if (c > best) {
            best = c;
            label_ = l;
        }
}

RandomBaseline::RandomBaseline(std::vector<std::string> classes, std::uint64_t seed)
    : classes_(std::move(classes)), rng_(seed) {
    if (classes_.empty()) throw DataError("random baseline needs at least one class");
    std::sort(classes_.begin(), classes_.end());
    classes_.erase(std::unique(classes_.begin(), classes_.end()), classes_.end());
}

std::string RandomBaseline::predict() {
    return classes_[std::uniform_int_distribution<std::size_t>(0, classes_.size() - 1)(rng_)];
}

}  // namespace htim::model
