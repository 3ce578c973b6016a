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

#include "htim/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "htim/tokenizer.hpp"

namespace htim::corpus {

namespace {

[[noreturn]] void fail_at(const std::filesystem::path& file, std::size_t line, const std::string& what) {
    throw DataError(file.string() + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::ifstream open_in(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw DataError("cannot open " + p.string());
    return in;
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + p.string());
    return out;
}

}  // namespace

std::string to_string(EngagementTier tier) {
    switch (tier) {
        case EngagementTier::Member: return "member";
        case EngagementTier::Supporter: return "supporter";
        case EngagementTier::Sympathizer: return "sympathizer";
    }
    return "";
}

std::optional<EngagementTier> parse_tier(std::string_view s) {
    if (s.empty()) return std::nullopt;
    if (s == "member") return EngagementTier::Member;
    if (s == "supporter") return EngagementTier::Supporter;
    if (s == "sympathizer") return EngagementTier::Sympathizer;
    throw DataError("unknown tier '" + std::string(s) + "'");
}

const UserRecord* RegionDataset::find_user(const std::string& id) const {
    auto it = user_index_.find(id);
    return it == user_index_.end() ? nullptr : &users[it->second];
}

const Tweet* RegionDataset::find_tweet(const std::string& id) const {
    auto it = tweet_index_.find(id);
    return it == tweet_index_.end() ? nullptr : &tweets[it->second];
}

std::vector<const UserRecord*> RegionDataset::users_in_tier(EngagementTier tier) const {
    std::vector<const UserRecord*> out;
    for (const auto& u : users)
        if (u.tier == tier && u.party) out.push_back(&u);
    return out;
}

void RegionDataset::reindex() {
    user_index_.clear();
    tweet_index_.clear();
    std::set<PartyLabel> party_set;
    for (std::size_t i = 0; i < users.size(); ++i) {
        if (!user_index_.emplace(users[i].user_id, i).second)
            throw DataError("duplicate user_id '" + users[i].user_id + "'");
        if (users[i].party) party_set.insert(*users[i].party);
    }
    for (std::size_t i = 0; i < tweets.size(); ++i)
        if (!tweet_index_.emplace(tweets[i].tweet_id, i).second)
            throw DataError("duplicate tweet_id '" + tweets[i].tweet_id + "'");
    parties.assign(party_set.begin(), party_set.end());
}

RegionPaths RegionPaths::in_dir(const std::filesystem::path& dir) {
    return {dir / "labels.csv", dir / "tweets.jsonl", dir / "retweets.tsv", dir / "follows.tsv"};
}

RegionDataset load_region(const RegionPaths& paths) {
    RegionDataset ds;
    std::string line;
    std::unordered_map<std::string, std::size_t> user_pos;

    {
        auto in = open_in(paths.labels);
        std::size_t lineno = 0;
        if (!std::getline(in, line) || line != "user_id,region,party,tier")
            fail_at(paths.labels, 1, "expected header 'user_id,region,party,tier'");
        ++lineno;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            auto f = split(line, ',');
            if (f.size() != 4) fail_at(paths.labels, lineno, "expected 4 fields");
            if (f[0].empty()) fail_at(paths.labels, lineno, "empty user_id");
            UserRecord u;
            u.user_id = f[0];
            u.region = f[1];
            if (!f[2].empty()) u.party = f[2];
            try {
                u.tier = parse_tier(f[3]);
            } catch (const DataError& e) {
                fail_at(paths.labels, lineno, e.what());
            }
            if (u.tier && !u.party) fail_at(paths.labels, lineno, "tiered user without party");
            if (!user_pos.emplace(u.user_id, ds.users.size()).second)
                fail_at(paths.labels, lineno, "duplicate user_id '" + u.user_id + "'");
            if (ds.region.empty()) ds.region = u.region;
            ds.users.push_back(std::move(u));
        }
    }

    {
        auto in = open_in(paths.tweets);
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            Tweet t;
            try {
                auto j = nlohmann::json::parse(line);
                t.tweet_id = j.at("tweet_id").get<std::string>();
                t.user_id = j.at("user_id").get<std::string>();
                t.text = j.at("text").get<std::string>();
            } catch (const nlohmann::json::exception& e) {
                fail_at(paths.tweets, lineno, std::string("malformed tweet: ") + e.what());
            }
            auto it = user_pos.find(t.user_id);
            if (it == user_pos.end()) fail_at(paths.tweets, lineno, "tweet by unknown user '" + t.user_id + "'");
            t.token_count = text::tokenize(t.text).size();
            ds.users[it->second].tweet_ids.push_back(t.tweet_id);
            ds.tweets.push_back(std::move(t));
        }
    }

    auto parse_count = [&](const std::string& s, std::size_t lineno) {
        std::uint64_t v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size() || v == 0)
            fail_at(paths.retweets, lineno, "count must be a positive integer, got '" + s + "'");
        return v;
    };

    {
        auto in = open_in(paths.retweets);
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            auto f = split(line, '\t');
            if (f.size() != 3) fail_at(paths.retweets, lineno, "expected source<TAB>target<TAB>count");
            if (f[0].empty() || f[1].empty()) fail_at(paths.retweets, lineno, "empty user id");
            if (f[0] == f[1]) fail_at(paths.retweets, lineno, "self-loop retweet '" + f[0] + "'");
            ds.retweets.push_back({f[0], f[1], parse_count(f[2], lineno)});
        }
    }

    {
        auto in = open_in(paths.follows);
        std::size_t lineno = 0;
        std::set<std::pair<std::string, std::string>> seen;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            auto f = split(line, '\t');
            if (f.size() != 2) fail_at(paths.follows, lineno, "expected follower<TAB>followee");
            if (f[0].empty() || f[1].empty()) fail_at(paths.follows, lineno, "empty user id");
            if (f[0] == f[1]) fail_at(paths.follows, lineno, "self-follow '" + f[0] + "'");
            if (!seen.emplace(f[0], f[1]).second) fail_at(paths.follows, lineno, "duplicate follow pair");
            ds.follows.push_back({f[0], f[1]});
        }
    }

    ds.reindex();
    return ds;
}

void write_region(const RegionDataset& ds, const RegionPaths& paths) {
    {
        auto out = open_out(paths.labels);
        out << "user_id,region,party,tier\n";
        for (const auto& u : ds.users)
            out << u.user_id << ',' << u.region << ',' << u.party.value_or("") << ','
                << (u.tier ? to_string(*u.tier) : "") << '\n';
    }
    {
        auto out = open_out(paths.tweets);
        for (const auto& t : ds.tweets) {
            nlohmann::ordered_json j;
            j["tweet_id"] = t.tweet_id;
            j["user_id"] = t.user_id;
            j["text"] = t.text;
            out << j.dump() << '\n';
        }
    }
    {
        auto out = open_out(paths.retweets);
        for (const auto& e : ds.retweets) out << e.source << '\t' << e.target << '\t' << e.weight << '\n';
    }
    {
        auto out = open_out(paths.follows);
        for (const auto& e : ds.follows) out << e.follower << '\t' << e.followee << '\n';
    }
}

std::map<std::string, PartyLabel> member_parties(const RegionDataset& ds) {
    std::map<std::string, PartyLabel> out;
    for (const auto* u : ds.users_in_tier(EngagementTier::Member)) out.emplace(u->user_id, *u->party);
    return out;
}

namespace {

// follower -> party -> number of distinct Members followed.
std::map<std::string, std::map<PartyLabel, int>> follow_counts(const std::vector<FollowEdge>& follows,
                                                               const std::map<std::string, PartyLabel>& members) {
    std::set<std::pair<std::string, std::string>> seen;
    std::map<std::string, std::map<PartyLabel, int>> counts;
    for (const auto& f : follows) {
        auto m = members.find(f.followee);
        if (m == members.end()) continue;
        if (!seen.emplace(f.follower, f.followee).second) continue;
        ++counts[f.follower][m->second];
    }
    return counts;
}

}  // namespace

std::map<std::string, PartyLabel> derive_supporters(const std::vector<FollowEdge>& follows,
                                                    const std::map<std::string, PartyLabel>& members,
                                                    int threshold) {
    std::map<std::string, PartyLabel> out;
    for (const auto& [user, per_party] : follow_counts(follows, members)) {
        if (members.count(user)) continue;
        const PartyLabel* chosen = nullptr;
        int qualifying = 0;
        for (const auto& [party, n] : per_party) {
            if (n >= threshold) {
                ++qualifying;
                chosen = &party;
            }
        }
        if (qualifying == 1) out.emplace(user, *chosen);
    }
    return out;
}

std::map<std::string, PartyLabel> derive_sympathizers(const std::vector<FollowEdge>& follows,
                                                      const std::map<std::string, PartyLabel>& members,
                                                      const std::map<std::string, PartyLabel>& supporters,
                                                      int max_per_party) {
    std::map<std::string, PartyLabel> out;
    for (const auto& [user, per_party] : follow_counts(follows, members)) {
        if (members.count(user) || supporters.count(user)) continue;
        int best = 0;
        int n_best = 0;
        const PartyLabel* chosen = nullptr;
        bool within_cap = true;
        for (const auto& [party, n] : per_party) {
            if (n > max_per_party) within_cap = false;
            if (n > best) {
                best = n;
                n_best = 1;
                chosen = &party;
            } else if (n == best) {
                ++n_best;
            }
        }
        if (within_cap && best >= 1 && n_best == 1) out.emplace(user, *chosen);
    }
    return out;
}

void apply_derived_tiers(RegionDataset& ds, const std::map<std::string, PartyLabel>& supporters,
                         const std::map<std::string, PartyLabel>& sympathizers) {
    std::unordered_map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < ds.users.size(); ++i) pos.emplace(ds.users[i].user_id, i);
    auto apply = [&](const std::map<std::string, PartyLabel>& derived, EngagementTier tier) {
        for (const auto& [id, party] : derived) {
            auto [it, inserted] = pos.emplace(id, ds.users.size());
            if (inserted) {
                UserRecord u;
                u.user_id = id;
                u.region = ds.region;
                ds.users.push_back(std::move(u));
            }
            auto& user = ds.users[it->second];
            if (user.tier == EngagementTier::Member) continue;
            user.party = party;
            user.tier = tier;
        }
    };
    apply(supporters, EngagementTier::Supporter);
    apply(sympathizers, EngagementTier::Sympathizer);
    ds.reindex();
}

QuotaMap default_quotas() {
    return {{EngagementTier::Member, 120}, {EngagementTier::Supporter, 60}, {EngagementTier::Sympathizer, 60}};
}

RegionDataset filter_and_quota(const RegionDataset& ds, const QuotaMap& quotas) {
    RegionDataset out;
    out.region = ds.region;
    out.retweets = ds.retweets;
    out.follows = ds.follows;
    out.users = ds.users;

    std::set<std::string> keep;
    for (auto& u : out.users) {
        std::vector<std::string> valid;
        for (const auto& id : u.tweet_ids) {
            const Tweet* t = ds.find_tweet(id);
            if (t && t->token_count >= kMinTweetTokens) valid.push_back(id);
        }
        if (u.tier) {
            auto q = quotas.find(*u.tier);
            if (q != quotas.end() && valid.size() > q->second)
                valid.erase(valid.begin(), valid.end() - static_cast<std::ptrdiff_t>(q->second));
        }
        keep.insert(valid.begin(), valid.end());
        u.tweet_ids = std::move(valid);
    }
    for (const auto& t : ds.tweets)
        if (keep.count(t.tweet_id)) out.tweets.push_back(t);
    out.reindex();
    return out;
}

}  // namespace htim::corpus
