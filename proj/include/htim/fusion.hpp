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

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "htim/common.hpp"

namespace htim::fusion {

// A modality input; nullopt / absent means "contributes zeros".
struct Segment {
    Vector values;
    bool absent = false;
};

struct ModalityFlags {
    bool text_absent = false;
    bool interaction_absent = false;
};

struct HybridFeature {
    std::string id;        // tweet_id (tweet level) or user_id (user level)
    std::string owner;     // user the feature votes for
    Vector values;
    std::vector<std::size_t> boundaries;  // start offset of each segment, plus total
    ModalityFlags flags;

    std::span<const double> segment(std::size_t i) const {
        return {values.data() + boundaries[i], boundaries[i + 1] - boundaries[i]};
    }
};

struct FusionOptions {
    // Scale each present segment to unit L2 norm before concatenation.
    bool normalize_segments = false;
};

/// [tweet text | user-text mean | interaction]. A segment flagged absent is
/// written as zeros of its declared dimension; all three absent is an error.
HybridFeature fuse_tweet_level(std::string tweet_id, std::string owner, const Segment& tweet_text,
                               const Segment& user_text, const Segment& interaction, std::size_t tweet_dim,
                               std::size_t user_dim, std::size_t inter_dim, const FusionOptions& opt = {});

/// [user text | interaction], same zero-fill rules.
HybridFeature fuse_user_level(std::string user_id, const Segment& user_text, const Segment& interaction,
                              std::size_t text_dim, std::size_t inter_dim, const FusionOptions& opt = {});

// Audit dump: header "id,flag_text,flag_inter,f1,...,fd" then one row per feature.
void write_hybrid_csv(const std::vector<HybridFeature>& feats, const std::filesystem::path& path);
std::vector<HybridFeature> read_hybrid_csv(const std::filesystem::path& path);

}  // namespace htim::fusion
