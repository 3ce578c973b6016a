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

#include <span>
#include <vector>

#include "htim/common.hpp"

namespace htim {

/// Walker/Vose alias table: O(n) construction, O(1) draws from a discrete
/// distribution proportional to nonnegative weights.
class AliasTable {
public:
    AliasTable() = default;
    explicit AliasTable(std::span<const double> weights);

    std::size_t sample(Rng& rng) const;
    // Normalized target probability of outcome i.
    double probability(std::size_t i) const { return prob_target_[i]; }
    std::size_t size() const { return prob_.size(); }
    bool empty() const { return prob_.empty(); }

private:
    std::vector<double> prob_;
    std::vector<std::size_t> alias_;
    std::vector<double> prob_target_;
};

}  // namespace htim
