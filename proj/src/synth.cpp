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

#include <algorithm>
#include <map>
#include <sstream>

#include "htim/corpus.hpp"
#include "htim/tokenizer.hpp"

namespace htim::corpus {

void SynthConfig::validate() const {
    auto prob = [](double p, const char* name) {
        if (!(p >= 0.0 && p <= 1.0)) throw UsageError(std::string(name) + " must lie in [0,1]");
    };
    prob(homophily, "homophily");
    prob(vocab_specificity, "vocab_specificity");
    prob(short_tweet_rate, "short_tweet_rate");
    if (n_parties < 2) throw UsageError("n_parties must be >= 2");
    if (members_per_party < 1 || supporters_per_party < 0 || sympathizers_per_party < 0 ||
        interacting_per_party < 0)
        throw UsageError("per-party user counts must be positive");
    if (shared_vocab < 1 || party_vocab < 1) throw UsageError("vocabulary sizes must be positive");
    for (const auto& [tier, act] : tier_activity) {
        if (act.retweets_min < 0 || act.retweets_max < act.retweets_min || act.tweets < 0)
            throw UsageError("invalid activity for tier " + to_string(tier));
        prob(std::min(1.0, act.specificity_scale * vocab_specificity), "tier specificity");
    }
}

namespace {

std::string party_name(int p, int n) {
    std::string idx = std::to_string(p + 1);
    const std::size_t width = std::to_string(n).size();
    return "P" + std::string(width - idx.size(), '0') + idx;
}

struct SynthUser {
    std::string id;
    int party;
    std::optional<EngagementTier> tier;  // nullopt: interacting user
};

}  // namespace

RegionDataset synth_region(const SynthConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    const int P = cfg.n_parties;

    std::vector<SynthUser> people;
    auto add_group = [&](const char* prefix, int per_party, std::optional<EngagementTier> tier) {
        for (int p = 0; p < P; ++p)
            for (int i = 0; i < per_party; ++i)
                people.push_back({std::string(prefix) + std::to_string(p + 1) + "_" + std::to_string(i), p, tier});
    };
    add_group("m", cfg.members_per_party, EngagementTier::Member);
    add_group("s", cfg.supporters_per_party, EngagementTier::Supporter);
    add_group("y", cfg.sympathizers_per_party, EngagementTier::Sympathizer);
    add_group("i", cfg.interacting_per_party, std::nullopt);

    // Retweet targets: Members and interacting users of each party.
    std::vector<std::vector<std::size_t>> targets(P);
    std::vector<std::vector<std::size_t>> members(P);
    for (std::size_t i = 0; i < people.size(); ++i) {
        if (people[i].tier == EngagementTier::Member) members[people[i].party].push_back(i);
        if (people[i].tier == EngagementTier::Member || !people[i].tier) targets[people[i].party].push_back(i);
    }

    RegionDataset ds;
    ds.region = cfg.region;

    // Text vocabulary: Zipf-distributed shared words plus per-party words.
    std::vector<double> zipf(cfg.shared_vocab);
    for (int r = 0; r < cfg.shared_vocab; ++r) zipf[r] = 1.0 / (r + 1.0);
    std::discrete_distribution<int> shared_word(zipf.begin(), zipf.end());
    std::uniform_int_distribution<int> party_word(0, cfg.party_vocab - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> long_len(12, 20);
    std::uniform_int_distribution<int> short_len(3, 9);

    std::size_t tweet_counter = 0;
    for (const auto& person : people) {
        if (!person.tier) continue;
        UserRecord u;
        u.user_id = person.id;
        u.region = cfg.region;
        u.party = party_name(person.party, P);
        u.tier = person.tier;
        const TierActivity& act = cfg.tier_activity.at(*person.tier);
        const double spec = std::min(1.0, cfg.vocab_specificity * act.specificity_scale);
        for (int k = 0; k < act.tweets; ++k) {
            const int len = unit(rng) < cfg.short_tweet_rate ? short_len(rng) : long_len(rng);
            std::ostringstream text;
            for (int w = 0; w < len; ++w) {
                if (w) text << ' ';
                if (unit(rng) < spec)
                    text << 'p' << (person.party + 1) << 'k' << party_word(rng);
                else
                    text << 'w' << shared_word(rng);
            }
            if (unit(rng) < 0.1) text << " https://t.co/" << tweet_counter;
            Tweet t;
            t.tweet_id = "t" + std::to_string(tweet_counter++);
            t.user_id = u.user_id;
            t.text = text.str();
            u.tweet_ids.push_back(t.tweet_id);
            ds.tweets.push_back(std::move(t));
        }
        ds.users.push_back(std::move(u));
    }

    // Retweets, merged per ordered pair in first-seen order.
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_pos;
    std::uniform_int_distribution<int> other_party(0, std::max(0, P - 2));
    for (std::size_t i = 0; i < people.size(); ++i) {
        const auto& person = people[i];
        const TierActivity& act = person.tier ? cfg.tier_activity.at(*person.tier) : cfg.interacting_activity;
        const int n = std::uniform_int_distribution<int>(act.retweets_min, act.retweets_max)(rng);
        for (int e = 0; e < n; ++e) {
            int p = person.party;
            if (unit(rng) >= cfg.homophily) {
                p = other_party(rng);
                if (p >= person.party) ++p;
            }
            const auto& pool = targets[p];
            if (pool.empty() || (pool.size() == 1 && pool[0] == i)) continue;
            std::size_t t;
            do {
                t = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
            } while (t == i);
            auto [it, fresh] = edge_pos.emplace(std::make_pair(i, t), ds.retweets.size());
            if (fresh)
                ds.retweets.push_back({person.id, people[t].id, 1});
            else
                ++ds.retweets[it->second].weight;
        }
    }

    // Follows consistent with the tier derivation rules.
    auto follow_some = [&](std::size_t who, int party, int count) {
        auto pool = members[party];
        std::shuffle(pool.begin(), pool.end(), rng);
        count = std::min<int>(count, static_cast<int>(pool.size()));
        for (int k = 0; k < count; ++k)
            if (pool[k] != who) ds.follows.push_back({people[who].id, people[pool[k]].id});
    };
    for (std::size_t i = 0; i < people.size(); ++i) {
        const auto& person = people[i];
        if (person.tier == EngagementTier::Member) {
            follow_some(i, person.party, 3);
        } else if (person.tier == EngagementTier::Supporter) {
            follow_some(i, person.party, std::uniform_int_distribution<int>(5, 8)(rng));
            for (int p = 0; p < P; ++p)
                if (p != person.party) follow_some(i, p, std::uniform_int_distribution<int>(0, 2)(rng));
        } else if (person.tier == EngagementTier::Sympathizer) {
            const int own = std::uniform_int_distribution<int>(1, 2)(rng);
            follow_some(i, person.party, own);
            for (int p = 0; p < P; ++p)
                if (p != person.party) follow_some(i, p, std::uniform_int_distribution<int>(0, own - 1)(rng));
        }
    }

    for (auto& t : ds.tweets) t.token_count = text::tokenize(t.text).size();
    ds.reindex();
    return ds;
}

}  // namespace htim::corpus
