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
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "htim/common.hpp"

namespace htim::corpus {

using PartyLabel = std::string;

// Ordered by engagement: Member > Supporter > Sympathizer.
enum class EngagementTier { Sympathizer = 0, Supporter = 1, Member = 2 };

std::string to_string(EngagementTier tier);
std::optional<EngagementTier> parse_tier(std::string_view s);  // "" -> nullopt

struct UserRecord {
    std::string user_id;
    std::string region;
    std::optional<PartyLabel> party;
    std::optional<EngagementTier> tier;
    std::vector<std::string> tweet_ids;  // file order, oldest first
    bool text_absent() const { return tweet_ids.empty(); }
};

struct Tweet {
    std::string tweet_id;
    std::string user_id;
    std::string text;
    std::size_t token_count = 0;
};

struct RetweetEdge {
    std::string source;  // retweeter
    std::string target;  // retweeted
    std::uint64_t weight = 1;
};

struct FollowEdge {
    std::string follower;
    std::string followee;
};

struct RegionDataset {
    std::string region;
    std::vector<UserRecord> users;
    std::vector<Tweet> tweets;
    std::vector<RetweetEdge> retweets;
    std::vector<FollowEdge> follows;
    std::vector<PartyLabel> parties;  // sorted, unique

    const UserRecord* find_user(const std::string& id) const;
    const Tweet* find_tweet(const std::string& id) const;
    std::vector<const UserRecord*> users_in_tier(EngagementTier tier) const;

    // Rebuilds lookup indices and the party list; validates invariants.
    void reindex();

private:
    std::unordered_map<std::string, std::size_t> user_index_;
    std::unordered_map<std::string, std::size_t> tweet_index_;
};

struct RegionPaths {
    std::filesystem::path labels;
    std::filesystem::path tweets;
    std::filesystem::path retweets;
    std::filesystem::path follows;

    // labels.csv, tweets.jsonl, retweets.tsv, follows.tsv inside dir.
    static RegionPaths in_dir(const std::filesystem::path& dir);
};

RegionDataset load_region(const RegionPaths& paths);
void write_region(const RegionDataset& ds, const RegionPaths& paths);

// Members' party labels, keyed by user id.
std::map<std::string, PartyLabel> member_parties(const RegionDataset& ds);

std::map<std::string, PartyLabel> derive_supporters(const std::vector<FollowEdge>& follows,
                                                    const std::map<std::string, PartyLabel>& members,
                                                    int threshold = 5);

std::map<std::string, PartyLabel> derive_sympathizers(
    const std::vector<FollowEdge>& follows, const std::map<std::string, PartyLabel>& members,
    const std::map<std::string, PartyLabel>& supporters, int max_per_party = 2);

// Writes derived tiers into the dataset. Existing labels on derived users
// are overwritten; users not yet present are appended.
void apply_derived_tiers(RegionDataset& ds, const std::map<std::string, PartyLabel>& supporters,
                         const std::map<std::string, PartyLabel>& sympathizers);

using QuotaMap = std::map<EngagementTier, std::size_t>;

// 120 tweets per Member, 60 per Supporter / Sympathizer.
QuotaMap default_quotas();

inline constexpr std::size_t kMinTweetTokens = 10;

RegionDataset filter_and_quota(const RegionDataset& ds, const QuotaMap& quotas);

struct TierActivity {
    int retweets_min = 0;
    int retweets_max = 0;
    int tweets = 0;
    // Multiplies SynthConfig::vocab_specificity for this tier's text.
    double specificity_scale = 1.0;
};

struct SynthConfig {
    int n_parties = 3;
    int members_per_party = 60;
    int supporters_per_party = 60;
    int sympathizers_per_party = 60;
    int interacting_per_party = 120;
    double homophily = 0.95;
    std::map<EngagementTier, TierActivity> tier_activity = {
        {EngagementTier::Member, {30, 60, 20, 1.0}},
        {EngagementTier::Supporter, {4, 10, 10, 0.6}},
        {EngagementTier::Sympathizer, {0, 2, 3, 0.15}},
    };
    TierActivity interacting_activity{5, 20, 0, 0.0};
    double vocab_specificity = 0.35;
    int shared_vocab = 400;
    int party_vocab = 60;
    // Fraction of generated tweets that are too short to survive filtering.
    double short_tweet_rate = 0.05;
    std::string region = "SYN";
    std::uint64_t seed = 42;

    void validate() const;
};

RegionDataset synth_region(const SynthConfig& cfg);

}  // namespace htim::corpus
