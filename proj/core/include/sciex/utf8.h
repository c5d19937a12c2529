// Copyright 2026 The sciex Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SCIEX_UTF8_H_
#define SCIEX_UTF8_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace sciex {

// Decodes UTF-8 into code points. Invalid bytes decode to U+FFFD one byte
// at a time, so the result is total.
std::u32string DecodeUtf8(std::string_view text);
std::string EncodeUtf8(std::u32string_view text);

// Maps code point index -> byte offset for a UTF-8 string. Has
// (code point count + 1) entries; the last equals text.size().
std::vector<std::size_t> CodepointByteOffsets(std::string_view text);

// Collapses runs of Unicode whitespace to a single ASCII space and trims
// both ends.
std::string CollapseWhitespace(std::string_view text);

bool IsSpace(char32_t c);
bool IsAlnum(char32_t c);
bool IsDigit(char32_t c);
bool IsUpper(char32_t c);
bool IsLower(char32_t c);
char32_t ToLower(char32_t c);

}  // namespace sciex

#endif  // SCIEX_UTF8_H_
