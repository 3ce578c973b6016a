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

#include <string>
#include <string_view>
#include <vector>

namespace htim::text {

/// Tweet tokenizer.
///
/// Lowercases ASCII letters, replaces URLs with `<url>` and @-mentions with
/// `<user>`, keeps `#hashtag` as a single token, and otherwise splits on
/// whitespace and punctuation (each punctuation byte becomes its own token).
/// Bytes >= 0x80 are treated as word characters so UTF-8 words stay whole.
std::vector<std::string> tokenize(std::string_view text);

}  // namespace htim::text
