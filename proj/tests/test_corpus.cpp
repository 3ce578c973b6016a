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

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "htim/corpus.hpp"
#include "htim/tokenizer.hpp"

using namespace htim;
using namespace htim::corpus;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("htim_corpus_" + name)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RegionPaths write_region_files(const fs::path& dir, const std::string& labels, const std::string& tweets,
                               const std::string& retweets, const std::string& follows) {
    auto p = RegionPaths::in_dir(dir);
    write_file(p.labels, labels);
    write_file(p.tweets, tweets);
    write_file(p.retweets, retweets);
    write_file(p.follows, follows);
    return p;
}

std::string words(int n) {
    std::string s;
    for (int i = 0; i < n; ++i) s += (i ? " w" : "w") + std::to_string(i);
    return s;
}

// Party of a synthetic id such as "m2_17" or "i3_4".
std::string synth_party(const std::string& id, int n_parties) {
    const auto digits = id.substr(1, id.find('_') - 1);
    const std::string idx = digits;
    const std::size_t width = std::to_string(n_parties).size();
    return "P" + std::string(width - idx.size(), '0') + idx;
}

RegionDataset member_dataset(const std::map<std::string, std::string>& members) {
    RegionDataset ds;
    for (const auto& [id, party] : members) ds.users.push_back({id, "R", party, EngagementTier::Member, {}});
    ds.reindex();
    return ds;
}

}  // namespace

TEST_CASE("labels without edges load as users only") {
    TempDir d("labels_only");
    const auto p = write_region_files(d.path, "user_id,region,party,tier\na,R,,\nb,R,,\nc,R,,\n", "", "", "");
    const auto ds = load_region(p);
    CHECK(ds.users.size() == 3);
    CHECK(ds.retweets.empty());
    for (const auto& u : ds.users) CHECK_FALSE(u.tier.has_value());
}

TEST_CASE("self-loop retweet is rejected with its line number") {
    TempDir d("selfloop");
    const auto p = write_region_files(d.path, "user_id,region,party,tier\nu1,R,A,member\n", "", "u1\tu1\t2\n", "");
    try {
        load_region(p);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("retweets.tsv:1") != std::string::npos);
    }
}

TEST_CASE("malformed rows report file and line") {
    TempDir d("malformed");
    auto p = write_region_files(d.path, "user_id,region,party,tier\nu1,R,A,member\nu2,R\n", "", "", "");
    CHECK_THROWS_WITH_AS(load_region(p), doctest::Contains("labels.csv:3"), DataError);
    p = write_region_files(d.path, "user_id,region,party,tier\nu1,R,A,member\n", "", "u1\tx\t0\n", "");
    CHECK_THROWS_WITH_AS(load_region(p), doctest::Contains("retweets.tsv:1"), DataError);
    p = write_region_files(d.path, "user_id,region,party,tier\nu1,R,A,member\nu1,R,B,member\n", "", "", "");
    CHECK_THROWS_AS(load_region(p), DataError);
    p = write_region_files(d.path, "user_id,region,party,tier\nu1,R,A,member\n", "", "", "u1\tu1\n");
    CHECK_THROWS_WITH_AS(load_region(p), doctest::Contains("follows.tsv:1"), DataError);
    p = write_region_files(d.path, "id,region,party,tier\n", "", "", "");
    CHECK_THROWS_AS(load_region(p), DataError);
}

TEST_CASE("edges referencing unknown users are kept") {
    TempDir d("unknown");
    const auto p = write_region_files(d.path, "user_id,region,party,tier\nu1,R,A,member\n", "",
                                      "u1\tx9\t3\nx8\tu1\t1\n", "");
    const auto ds = load_region(p);
    REQUIRE(ds.retweets.size() == 2);
    CHECK(ds.retweets[0].weight == 3);
}

TEST_CASE("358 members with 120 tweets each give 42960 tweets") {
    TempDir d("sct");
    RegionDataset ds;
    ds.region = "SCT";
    std::size_t tid = 0;
    for (int u = 0; u < 358; ++u) {
        UserRecord r{"m" + std::to_string(u), "SCT", "P" + std::to_string(u % 5), EngagementTier::Member, {}};
        for (int k = 0; k < 120; ++k) {
            Tweet t{"t" + std::to_string(tid++), r.user_id, words(12), 0};
            r.tweet_ids.push_back(t.tweet_id);
            ds.tweets.push_back(std::move(t));
        }
        ds.users.push_back(std::move(r));
    }
    ds.reindex();
    write_region(ds, RegionPaths::in_dir(d.path));
    const auto loaded = load_region(RegionPaths::in_dir(d.path));
    CHECK(loaded.tweets.size() == 42960);
    CHECK(loaded.users_in_tier(EngagementTier::Member).size() == 358);
}

TEST_CASE("supporter derivation") {
    const std::map<std::string, std::string> members{{"a1", "A"}, {"a2", "A"}, {"a3", "A"}, {"a4", "A"},
                                                     {"a5", "A"}, {"a6", "A"}, {"b1", "B"}, {"b2", "B"},
                                                     {"b3", "B"}, {"b4", "B"}, {"b5", "B"}, {"b6", "B"}};
    auto follows_of = [](const std::string& u, int na, int nb) {
        std::vector<FollowEdge> f;
        for (int i = 1; i <= na; ++i) f.push_back({u, "a" + std::to_string(i)});
        for (int i = 1; i <= nb; ++i) f.push_back({u, "b" + std::to_string(i)});
        return f;
    };
    CHECK(derive_supporters(follows_of("u", 5, 0), members) == std::map<std::string, std::string>{{"u", "A"}});
    CHECK(derive_supporters(follows_of("u", 4, 0), members).empty());
    CHECK(derive_supporters(follows_of("u", 5, 6), members).empty());
    CHECK(derive_supporters(follows_of("a1", 0, 6), members).empty());
    // Brute force over all follow-count pairs.
    for (int na = 0; na <= 6; ++na)
        for (int nb = 0; nb <= 6; ++nb) {
            const auto got = derive_supporters(follows_of("u", na, nb), members);
            const bool qa = na >= 5, qb = nb >= 5;
            if (qa != qb)
                CHECK(got == std::map<std::string, std::string>{{"u", qa ? "A" : "B"}});
            else
                CHECK(got.empty());
        }
}

TEST_CASE("sympathizer derivation matches the rule on all follow-count vectors") {
    std::map<std::string, std::string> members;
    for (const char* p : {"A", "B", "C"})
        for (int i = 1; i <= 3; ++i) members[std::string(1, static_cast<char>(std::tolower(p[0]))) + std::to_string(i)] = p;
    const std::vector<std::string> parties{"A", "B", "C"};
    for (int a = 0; a <= 3; ++a)
        for (int b = 0; b <= 3; ++b)
            for (int c = 0; c <= 3; ++c) {
                const int counts[3] = {a, b, c};
                std::vector<FollowEdge> f;
                for (int p = 0; p < 3; ++p)
                    for (int i = 1; i <= counts[p]; ++i)
                        f.push_back({"u", std::string(1, static_cast<char>('a' + p)) + std::to_string(i)});
                const auto got = derive_sympathizers(f, members, {});
                // Rule: every followed party within [1, 2], a unique maximum.
                const int mx = std::max({a, b, c});
                int n_max = 0, arg = -1;
                bool within = true;
                for (int p = 0; p < 3; ++p) {
                    if (counts[p] > 2) within = false;
                    if (counts[p] == mx) {
                        ++n_max;
                        arg = p;
                    }
                }
                const bool expect = within && mx >= 1 && n_max == 1;
                CAPTURE(a);
                CAPTURE(b);
                CAPTURE(c);
                if (expect)
                    CHECK(got == std::map<std::string, std::string>{{"u", parties[arg]}});
                else
                    CHECK(got.empty());
            }
}

TEST_CASE("sympathizer examples and exclusions") {
    const std::map<std::string, std::string> members{{"a1", "A"}, {"a2", "A"}, {"a3", "A"}, {"b1", "B"}, {"b2", "B"}};
    CHECK(derive_sympathizers({{"u", "a1"}, {"u", "a2"}}, members, {}) ==
          std::map<std::string, std::string>{{"u", "A"}});
    CHECK(derive_sympathizers({{"u", "a1"}, {"u", "a2"}, {"u", "b1"}, {"u", "b2"}}, members, {}).empty());
    CHECK(derive_sympathizers({{"u", "a1"}, {"u", "a2"}, {"u", "a3"}}, members, {}).empty());
    CHECK(derive_sympathizers({{"u", "a1"}}, members, {{"u", "A"}}).empty());
    CHECK(derive_sympathizers({{"b1", "a1"}}, members, {}).empty());
}

TEST_CASE("derived tiers are disjoint from each other and from members") {
    const auto ds = synth_region(SynthConfig{});
    const auto members = member_parties(ds);
    const auto sup = derive_supporters(ds.follows, members);
    const auto sym = derive_sympathizers(ds.follows, members, sup);
    CHECK(!sup.empty());
    CHECK(!sym.empty());
    for (const auto& [u, p] : sup) {
        CHECK(members.count(u) == 0);
        CHECK(sym.count(u) == 0);
    }
    for (const auto& [u, p] : sym) CHECK(members.count(u) == 0);
    // Synthetic follows agree with the generated tiers.
    for (const auto& [u, p] : sup) CHECK(ds.find_user(u)->tier == EngagementTier::Supporter);
    for (const auto& [u, p] : sym) CHECK(ds.find_user(u)->tier == EngagementTier::Sympathizer);
}

TEST_CASE("apply_derived_tiers labels new and existing users") {
    auto ds = member_dataset({{"m1", "A"}});
    ds.users.push_back({"x", "R", std::nullopt, std::nullopt, {}});
    ds.reindex();
    apply_derived_tiers(ds, {{"x", "A"}}, {{"y", "A"}});
    CHECK(ds.find_user("x")->tier == EngagementTier::Supporter);
    REQUIRE(ds.find_user("y") != nullptr);
    CHECK(ds.find_user("y")->tier == EngagementTier::Sympathizer);
    CHECK(ds.find_user("m1")->tier == EngagementTier::Member);
}

TEST_CASE("filter and quota") {
    RegionDataset ds;
    UserRecord m{"m", "R", "A", EngagementTier::Member, {}};
    UserRecord s{"s", "R", "A", EngagementTier::Supporter, {}};
    UserRecord y{"y", "R", "A", EngagementTier::Sympathizer, {}};
    std::size_t tid = 0;
    auto add = [&](UserRecord& u, int n, int len) {
        for (int k = 0; k < n; ++k) {
            Tweet t{"t" + std::to_string(tid++), u.user_id, words(len), 0};
            t.token_count = text::tokenize(t.text).size();
            u.tweet_ids.push_back(t.tweet_id);
            ds.tweets.push_back(std::move(t));
        }
    };
    add(m, 200, 10);
    add(m, 1, 9);
    add(s, 60, 12);
    add(y, 1, 9);
    ds.users = {m, s, y};
    ds.reindex();
    const auto out = filter_and_quota(ds, default_quotas());
    const auto* fm = out.find_user("m");
    REQUIRE(fm->tweet_ids.size() == 120);
    // Most recent = last in file order.
    CHECK(fm->tweet_ids.front() == "t80");
    CHECK(fm->tweet_ids.back() == "t199");
    CHECK(out.find_tweet("t200") == nullptr);
    CHECK(out.find_user("s")->tweet_ids.size() == 60);
    CHECK(out.find_user("y")->text_absent());
    for (const auto& t : out.tweets) CHECK(t.token_count >= kMinTweetTokens);

    const auto twice = filter_and_quota(out, default_quotas());
    CHECK(twice.tweets.size() == out.tweets.size());
    for (std::size_t i = 0; i < out.users.size(); ++i) CHECK(twice.users[i].tweet_ids == out.users[i].tweet_ids);
}

TEST_CASE("synthetic counts and labels") {
    SynthConfig cfg;
    cfg.members_per_party = 10;
    const auto ds = synth_region(cfg);
    const auto members = ds.users_in_tier(EngagementTier::Member);
    CHECK(members.size() == 30);
    for (const auto* u : members) CHECK(u->party.has_value());
    CHECK(ds.parties.size() == 3);
    for (const auto* u : ds.users_in_tier(EngagementTier::Sympathizer)) {
        std::uint64_t n = 0;
        for (const auto& e : ds.retweets)
            if (e.source == u->user_id) n += e.weight;
        CHECK(n <= 2);
    }
    for (const auto& e : ds.retweets) {
        CHECK(e.source != e.target);
        CHECK(e.weight >= 1);
    }
}

TEST_CASE("homophily 1.0 keeps every retweet inside its party") {
    SynthConfig cfg;
    cfg.homophily = 1.0;
    const auto ds = synth_region(cfg);
    for (const auto& e : ds.retweets) CHECK(synth_party(e.source, 3) == synth_party(e.target, 3));
}

TEST_CASE("homophily 0.9 within-party fraction concentrates") {
    SynthConfig cfg;
    cfg.homophily = 0.9;
    cfg.seed = 11;
    const auto ds = synth_region(cfg);
    double within = 0, total = 0;
    for (const auto& e : ds.retweets) {
        total += static_cast<double>(e.weight);
        if (synth_party(e.source, 3) == synth_party(e.target, 3)) within += static_cast<double>(e.weight);
    }
    REQUIRE(total >= 10000);
    CHECK(within / total >= 0.88);
    CHECK(within / total <= 0.92);
}

TEST_CASE("synthetic generation is deterministic and round-trips byte-exactly") {
    TempDir a("synth_a"), b("synth_b"), c("synth_c");
    SynthConfig cfg;
    cfg.seed = 5;
    write_region(synth_region(cfg), RegionPaths::in_dir(a.path));
    write_region(synth_region(cfg), RegionPaths::in_dir(b.path));
    write_region(load_region(RegionPaths::in_dir(a.path)), RegionPaths::in_dir(c.path));
    for (const char* f : {"labels.csv", "tweets.jsonl", "retweets.tsv", "follows.tsv"}) {
        CHECK(slurp(a.path / f) == slurp(b.path / f));
        CHECK(slurp(a.path / f) == slurp(c.path / f));
    }
    cfg.seed = 6;
    TempDir e("synth_e");
    write_region(synth_region(cfg), RegionPaths::in_dir(e.path));
    CHECK(slurp(a.path / "retweets.tsv") != slurp(e.path / "retweets.tsv"));
}

TEST_CASE("tweet text with escapes round-trips") {
    TempDir d("escape");
    RegionDataset ds;
    ds.users.push_back({"u", "R", "A", EngagementTier::Member, {"t1"}});
    ds.tweets.push_back({"t1", "u", "quote \" backslash \\ tab\t caf\xc3\xa9 \xf0\x9f\x97\xb3", 0});
    ds.reindex();
    write_region(ds, RegionPaths::in_dir(d.path));
    const auto back = load_region(RegionPaths::in_dir(d.path));
    CHECK(back.tweets.at(0).text == ds.tweets[0].text);
}

TEST_CASE("synth config validation") {
    SynthConfig cfg;
    cfg.homophily = 1.5;
    CHECK_THROWS_AS(cfg.validate(), UsageError);
    cfg = SynthConfig{};
    cfg.n_parties = 0;
    CHECK_THROWS_AS(cfg.validate(), UsageError);
}
