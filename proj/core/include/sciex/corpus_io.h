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

#ifndef SCIEX_CORPUS_IO_H_
#define SCIEX_CORPUS_IO_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sciex/corpus.h"

namespace sciex {

inline constexpr const char *kToolVersion = "sciex 0.3.0";

// Interchange format: JSON Lines, one sentence per line,
//   {"doc_id", "sent_index", "tokens":[{"t","s","e"}],
//    "entities":[{"id","type","start","end"}],
//    "relations":[{"id","type","head","tail"}]}
// An optional first line {"meta": {...}} carries provenance and is skipped
// by readers.
nlohmann::ordered_json SentenceToJson(const AnnotatedSentence &sentence);
AnnotatedSentence SentenceFromJson(const nlohmann::json &j);

// Throws FormatError (byte offset, message naming the line) on malformed
// lines.
std::vector<AnnotatedSentence> ReadCorpusJsonl(std::istream &in);
std::vector<AnnotatedSentence> ReadCorpusJsonl(const std::filesystem::path &path);

// Writes the meta line when `meta` is non-null, then one line per sentence.
void WriteCorpusJsonl(std::ostream &out,
                      const std::vector<AnnotatedSentence> &sentences,
                      const nlohmann::ordered_json &meta = nullptr);
void WriteCorpusJsonl(const std::filesystem::path &path,
                      const std::vector<AnnotatedSentence> &sentences,
                      const nlohmann::ordered_json &meta = nullptr);

// Two-column token<TAB>tag export with a blank line between sentences.
void WriteConll(std::ostream &out,
                const std::vector<AnnotatedSentence> &sentences);

// Reads every <id>.ann / <id>.txt pair in a directory, sorted by id. A .txt
// without an .ann is treated as unannotated.
std::vector<StandoffDocument> ReadBratDirectory(
    const std::filesystem::path &dir, const ParseOptions &options = {},
    Diagnostics *diagnostics = nullptr);

std::string ReadFile(const std::filesystem::path &path);
void WriteFile(const std::filesystem::path &path, std::string_view content);

}  // namespace sciex

#endif  // SCIEX_CORPUS_IO_H_
