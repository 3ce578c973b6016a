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

#include "htim/text_vectors.hpp"

#include <algorithm>
#include <fstream>

#include "json.hpp"

namespace htim::text {

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::Tfidf: return "tfidf";
        case Provenance::Static: return "static";
        case Provenance::ContextualSos: return "contextual-sos";
        case Provenance::ContextualAvg: return "contextual-avg";
        case Provenance::ContextualMax: return "contextual-max";
    }
    return "";
}

TextVector embed_tweet_static(const WordEmbeddingModel& model, std::string_view tweet_id,
                              const std::vector<std::string>& tokens) {
    TextVector tv;
    tv.owner = tweet_id;
    tv.provenance = Provenance::Static;
    tv.values.assign(model.dim(), 0.0);
    std::size_t known = 0;
    for (const auto& t : tokens) {
        const long i = model.find(t);
        if (i < 0) continue;
        auto r = model.input.row(static_cast<std::size_t>(i));
        for (std::size_t k = 0; k < r.size(); ++k) tv.values[k] += r[k];
        ++known;
    }
    if (known == 0) {
        tv.absent = true;
        return tv;
    }
    for (auto& x : tv.values) x /= static_cast<double>(known);
    return tv;
}

Pooling parse_pooling(std::string_view s) {
    if (s == "sos") return Pooling::Sos;
    if (s == "avg" || s == "average") return Pooling::Average;
    if (s == "max" || s == "maxpool") return Pooling::MaxPool;
    throw UsageError("unknown pooling strategy '" + std::string(s) + "'");
}

TextVector pool_contextual(const ContextualTweetTokens& ctk, Pooling strategy) {
    const Matrix& m = ctk.tokens;
    if (m.rows == 0) throw DataError("tweet '" + ctk.tweet_id + "' has no token vectors");
    TextVector tv;
    tv.owner = ctk.tweet_id;
    switch (strategy) {
        case Pooling::Sos: {
            auto r = m.row(0);
            tv.values.assign(r.begin(), r.end());
            tv.provenance = Provenance::ContextualSos;
            break;
        }
        case Pooling::Average: {
            tv.values.assign(m.cols, 0.0);
            for (std::size_t i = 0; i < m.rows; ++i)
                for (std::size_t k = 0; k < m.cols; ++k) tv.values[k] += m(i, k);
            for (auto& x : tv.values) x /= static_cast<double>(m.rows);
            tv.provenance = Provenance::ContextualAvg;
            break;
        }
        case Pooling::MaxPool: {
            auto r = m.row(0);
            tv.values.assign(r.begin(), r.end());
            for (std::size_t i = 1; i < m.rows; ++i)
                for (std::size_t k = 0; k < m.cols; ++k) tv.values[k] = std::max(tv.values[k], m(i, k));
            tv.provenance = Provenance::ContextualMax;
            break;
        }
    }
    return tv;
}

std::vector<ContextualTweetTokens> read_contextual_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::vector<ContextualTweetTokens> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto where = [&] { return path.string() + ":" + std::to_string(lineno) + ": "; };
        ContextualTweetTokens ctk;
        try {
            auto j = nlohmann::json::parse(line);
            ctk.tweet_id = j.at("tweet_id").get<std::string>();
            ctk.dim = j.at("dim").get<std::size_t>();
            const auto& toks = j.at("tokens");
            if (!toks.is_array() || toks.empty()) throw DataError(where() + "tokens must be a nonempty array");
            ctk.tokens = Matrix(toks.size(), ctk.dim);
            for (std::size_t i = 0; i < toks.size(); ++i) {
                if (toks[i].size() != ctk.dim) throw DataError(where() + "token row width differs from dim");
                for (std::size_t k = 0; k < ctk.dim; ++k) ctk.tokens(i, k) = toks[i][k].get<double>();
            }
        } catch (const nlohmann::json::exception& e) {
            throw DataError(where() + e.what());
        }
        if (!all_finite(ctk.tokens.data)) throw DataError(where() + "non-finite token vector");
        rows.push_back(std::move(ctk));
    }
    return rows;
}

void write_contextual_jsonl(const std::vector<ContextualTweetTokens>& rows, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    for (const auto& r : rows) {
        nlohmann::ordered_json j;
        j["tweet_id"] = r.tweet_id;
        j["dim"] = r.dim;
        auto toks = nlohmann::json::array();
        for (std::size_t i = 0; i < r.tokens.rows; ++i) {
            auto row = r.tokens.row(i);
            toks.push_back(std::vector<double>(row.begin(), row.end()));
        }
        j["tokens"] = std::move(toks);
        out << j.dump() << '\n';
    }
}

TextVector user_text_vector(std::string_view user_id, std::span<const TextVector> tweets, std::size_t dim) {
    TextVector tv;
    tv.owner = user_id;
    tv.values.assign(dim, 0.0);
    if (tweets.empty()) {
        tv.absent = true;
        return tv;
    }
    tv.provenance = tweets.front().provenance;
    for (const auto& t : tweets) {
        if (t.values.size() != dim) throw DataError("tweet vector dimension mismatch for user " + tv.owner);
        for (std::size_t k = 0; k < dim; ++k) tv.values[k] += t.values[k];
    }
    for (auto& x : tv.values) x /= static_cast<double>(tweets.size());
    return tv;
}

TweetUserPair concat_tweet_user(const TextVector& tweet, const TextVector& user, std::size_t tweet_dim,
                                std::size_t user_dim) {
    if (tweet.values.size() != tweet_dim || user.values.size() != user_dim)
        throw DataError("tweet/user vector dimensions do not match the declared model dimensions");
    TweetUserPair p;
    p.values.reserve(tweet_dim + user_dim);
    p.values.insert(p.values.end(), tweet.values.begin(), tweet.values.end());
    p.values.insert(p.values.end(), user.values.begin(), user.values.end());
    p.tweet_provenance = tweet.provenance;
    p.user_provenance = user.provenance;
    p.split = tweet_dim;
    return p;
}

}  // namespace htim::text
