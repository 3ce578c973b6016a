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

#include "htim/tokenizer.hpp"

namespace htim::text {

namespace {

bool is_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_word(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_' || c >= 0x80;
}

char lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

bool starts_url(std::string_view s, std::size_t i) {
    auto rest = s.substr(i);
    auto prefixed = [&](std::string_view p) {
        if (rest.size() < p.size()) return false;
        for (std::size_t k = 0; k < p.size(); ++k)
            if (lower(rest[k]) != p[k]) return false;
        return true;
    };
    return prefixed("http://") || prefixed("https://") || prefixed("www.");
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        const auto c = static_cast<unsigned char>(text[i]);
        if (is_space(c)) {
            ++i;
            continue;
        }
        if (starts_url(text, i)) {
            while (i < n && !is_space(static_cast<unsigned char>(text[i]))) ++i;
            out.emplace_back("<url>");
            continue;
        }
        const bool marker = (c == '@' || c == '#');
        if (marker && i + 1 < n && is_word(static_cast<unsigned char>(text[i + 1]))) {
            std::size_t j = i + 1;
            while (j < n && is_word(static_cast<unsigned char>(text[j]))) ++j;
            if (c == '@') {
                out.emplace_back("<user>");
            } else {
                std::string tag(1, '#');
                for (std::size_t k = i + 1; k < j; ++k) tag.push_back(lower(text[k]));
                out.push_back(std::move(tag));
            }
            i = j;
            continue;
        }
        if (is_word(c)) {
            std::string word;
            while (i < n && is_word(static_cast<unsigned char>(text[i]))) word.push_back(lower(text[i++]));
            out.push_back(std::move(word));
            continue;
        }
        out.emplace_back(1, text[i]);
        ++i;
    }
    return out;
}

}  // namespace htim::text
