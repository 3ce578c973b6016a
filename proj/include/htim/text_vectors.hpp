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
#include <span>
#include <string>
#include <vector>

#include "htim/common.hpp"
#include "htim/word2vec.hpp"

namespace htim::text {

enum class Provenance { Tfidf, Static, ContextualSos, ContextualAvg, ContextualMax };

std::string to_string(Provenance p);

struct TextVector {
    std::string owner;  // tweet_id or user_id
    Vector values;
    Provenance provenance = Provenance::Static;
    bool absent = false;  // no usable text behind this vector
};

// Mean of the input vectors of in-vocabulary tokens; all-OOV gives a zero
// vector flagged absent.
TextVector embed_tweet_static(const WordEmbeddingModel& model, std::string_view tweet_id,
                              const std::vector<std::string>& tokens);

struct ContextualTweetTokens {
    std::string tweet_id;
    std::size_t dim = 0;
    Matrix tokens;  // row 0 is the start-of-sequence token
};

enum class Pooling { Sos, Average, MaxPool };

Pooling parse_pooling(std::string_view s);  // "sos" | "avg" | "average" | "max" | "maxpool"

TextVector pool_contextual(const ContextualTweetTokens& ctk, Pooling strategy);

// Reads the exporter's JSONL: {"tweet_id": s, "dim": D, "tokens": [[...], ...]}.
std::vector<ContextualTweetTokens> read_contextual_jsonl(const std::filesystem::path& path);
void write_contextual_jsonl(const std::vector<ContextualTweetTokens>& rows, const std::filesystem::path& path);

// Arithmetic mean of a user's tweet vectors; empty input yields a zero
// vector of `dim` flagged absent.
TextVector user_text_vector(std::string_view user_id, std::span<const TextVector> tweets, std::size_t dim);

struct TweetUserPair {
    Vector values;  // [tweet | user]
    Provenance tweet_provenance;
    Provenance user_provenance;
    std::size_t split = 0;  // index of the first user coordinate
};

// Concatenates [tweet | user]; dimensions must equal the declared model dims.
TweetUserPair concat_tweet_user(const TextVector& tweet, const TextVector& user, std::size_t tweet_dim,
                                std::size_t user_dim);

}  // namespace htim::text
