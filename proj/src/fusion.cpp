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

#include "htim/fusion.hpp"

#include <charconv>
#include <algorithm>
#include <fstream>

namespace htim::fusion {

namespace {

void append(HybridFeature& f, const Segment& s, std::size_t dim, const FusionOptions& opt) {
    f.boundaries.push_back(f.values.size());
    if (s.absent) {
        f.values.insert(f.values.end(), dim, 0.0);
        return;
    }
    if (s.values.size() != dim)
        throw DataError("segment of dimension " + std::to_string(s.values.size()) + " where " +
                        std::to_string(dim) + " was declared");
    if (!all_finite(s.values)) throw NumericError("non-finite value in fused segment");
    const double norm = opt.normalize_segments ? l2_norm(s.values) : 0.0;
    for (double x : s.values) f.values.push_back(norm > 0.0 ? x / norm : x);
}

}  // namespace

HybridFeature fuse_tweet_level(std::string tweet_id, std::string owner, const Segment& tweet_text,
                               const Segment& user_text, const Segment& interaction, std::size_t tweet_dim,
                               std::size_t user_dim, std::size_t inter_dim, const FusionOptions& opt) {
    if (tweet_text.absent && user_text.absent && interaction.absent)
        throw DataError("all modalities absent for tweet '" + tweet_id + "'");
    HybridFeature f;
    f.id = std::move(tweet_id);
    f.owner = std::move(owner);
    f.values.reserve(tweet_dim + user_dim + inter_dim);
    append(f, tweet_text, tweet_dim, opt);
    append(f, user_text, user_dim, opt);
    append(f, interaction, inter_dim, opt);
    f.boundaries.push_back(f.values.size());
    f.flags.text_absent = tweet_text.absent && user_text.absent;
    f.flags.interaction_absent = interaction.absent;
    return f;
}

HybridFeature fuse_user_level(std::string user_id, const Segment& user_text, const Segment& interaction,
                              std::size_t text_dim, std::size_t inter_dim, const FusionOptions& opt) {
    if (user_text.absent && interaction.absent)
        throw DataError("all modalities absent for user '" + user_id + "'");
    HybridFeature f;
    f.id = user_id;
    f.owner = std::move(user_id);
    f.values.reserve(text_dim + inter_dim);
    append(f, user_text, text_dim, opt);
    append(f, interaction, inter_dim, opt);
    f.boundaries.push_back(f.values.size());
    f.flags.text_absent = user_text.absent;
    f.flags.interaction_absent = interaction.absent;
    return f;
}

void write_hybrid_csv(const std::vector<HybridFeature>& feats, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    const std::size_t d = feats.empty() ? 0 : feats.front().values.size();
    out << "id,flag_text,flag_inter";
    for (std::size_t k = 1; k <= d; ++k) out << ",f" << k;
    out << '\n';
    for (const auto& f : feats) {
        if (f.values.size() != d) throw DataError("hybrid features have mixed dimensions");
        out << f.id << ',' << (f.flags.text_absent ? 1 : 0) << ',' << (f.flags.interaction_absent ? 1 : 0);
        for (double x : f.values) out << ',' << format_double(x);
        out << '\n';
    }
}

std::vector<HybridFeature> read_hybrid_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("id,flag_text,flag_inter", 0) != 0)
        throw DataError(path.string() + ":1: expected hybrid CSV header");
    std::size_t d = 0;
    for (char c : line)
        if (c == ',') ++d;
    d -= 2;
    std::vector<HybridFeature> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto bad = [&](const char* what) {
            return DataError(path.string() + ":" + std::to_string(lineno) + ": " + what);
        };
        HybridFeature f;
        const char* p = line.data();
        const char* end = p + line.size();
        const char* c = std::find(p, end, ',');
        f.id.assign(p, c);
        f.owner = f.id;
        if (end - c < 4) throw bad("missing flags");
        f.flags.text_absent = c[1] == '1';
        f.flags.interaction_absent = c[3] == '1';
        p = c + 4;
        f.values.resize(d);
        for (std::size_t k = 0; k < d; ++k) {
            if (p == end || *p != ',') throw bad("too few values");
            ++p;
            auto [q, ec] = std::from_chars(p, end, f.values[k]);
            if (ec != std::errc()) throw bad("bad number");
            p = q;
        }
        if (p != end) throw bad("too many values");
        f.boundaries = {0, d};
        out.push_back(std::move(f));
    }
    return out;
}

}  // namespace htim::fusion
