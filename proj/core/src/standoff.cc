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

// BRAT standoff (.ann) parsing.

#include <charconv>
#include <set>
#include <unordered_map>

#include "sciex/corpus.h"
#include "sciex/errors.h"
#include "sciex/utf8.h"

namespace sciex {
namespace {

std::vector<std::string_view> SplitOn(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = s.find(sep, pos);
    if (next == std::string_view::npos) {
      parts.push_back(s.substr(pos));
      break;
    }
    parts.push_back(s.substr(pos, next - pos));
    pos = next + 1;
  }
  return parts;
}

// Space-separated fields with empty runs removed.
std::vector<std::string_view> Words(std::string_view s) {
  std::vector<std::string_view> words;
  for (auto part : SplitOn(s, ' ')) {
    if (!part.empty()) words.push_back(part);
  }
  return words;
}

std::string JoinWords(const std::vector<std::string_view> &words,
                      std::size_t count) {
  std::string out;
  for (std::size_t i = 0; i < count; ++i) {
    if (i > 0) out.push_back(' ');
    out.append(words[i]);
  }
  return out;
}

bool IsBlank(std::string_view s) {
  return s.find_first_not_of(" \t\r") == std::string_view::npos;
}

int ParseOffset(std::string_view field, int line) {
  int value = 0;
  const auto result =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (result.ec != std::errc() || result.ptr != field.data() + field.size() ||
      value < 0) {
    throw ParseError(line, "invalid offset '" + std::string(field) + "'");
  }
  return value;
}

// Text indexing shared by all T-lines of one document.
class TextIndex {
 public:
  explicit TextIndex(std::string_view text)
      : text_(text), byte_offsets_(CodepointByteOffsets(text)) {
    for (std::size_t i = 0; i < byte_offsets_.size(); ++i) {
      byte_to_cp_.emplace(byte_offsets_[i], static_cast<int>(i));
    }
  }

  int length() const { return static_cast<int>(byte_offsets_.size()) - 1; }

  // Converts a byte offset to a code point offset; -1 if the byte offset
  // does not sit on a character boundary.
  int FromByte(int byte) const {
    auto it = byte_to_cp_.find(static_cast<std::size_t>(byte));
    return it == byte_to_cp_.end() ? -1 : it->second;
  }

  std::string Slice(int start, int end) const {
    const std::size_t b = byte_offsets_[start];
    return std::string(text_.substr(b, byte_offsets_[end] - b));
  }

 private:
  std::string_view text_;
  std::vector<std::size_t> byte_offsets_;
  std::unordered_map<std::size_t, int> byte_to_cp_;
};

StandoffEntity ParseTextBound(const std::vector<std::string_view> &fields,
                              int line, const TextIndex &index,
                              const ParseOptions &options,
                              Diagnostics *diagnostics) {
  if (fields.size() != 3) {
    throw ParseError(line, "text-bound annotation needs 3 tab-separated "
                           "fields, found " + std::to_string(fields.size()));
  }
  StandoffEntity entity;
  entity.id = std::string(fields[0]);
  entity.line = line;
  if (fields[1].find(';') != std::string_view::npos) {
    throw DiscontinuousSpanError(line, entity.id);
  }
  const auto words = Words(fields[1]);
  if (words.size() < 3) {
    throw ParseError(line, "expected '<label> <start> <end>' in annotation " +
                               entity.id);
  }
  entity.label = JoinWords(words, words.size() - 2);
  int start = ParseOffset(words[words.size() - 2], line);
  int end = ParseOffset(words[words.size() - 1], line);
  if (options.offsets == OffsetUnit::kByte) {
    const int cp_start = index.FromByte(start);
    const int cp_end = index.FromByte(end);
    if (cp_start < 0 || cp_end < 0) {
      throw ParseError(line, "byte offsets " + std::to_string(start) + "-" +
                                 std::to_string(end) +
                                 " do not fall on character boundaries");
    }
    start = cp_start;
    end = cp_end;
  }
  if (end > index.length() || start >= end) {
    throw ParseError(line, "offsets " + std::to_string(start) + "-" +
                               std::to_string(end) +
                               " out of range for text of length " +
                               std::to_string(index.length()));
  }
  entity.start = start;
  entity.end = end;
  entity.surface = index.Slice(start, end);
  if (CollapseWhitespace(entity.surface) != CollapseWhitespace(fields[2])) {
    if (diagnostics != nullptr) {
      ++diagnostics->surface_mismatches;
      diagnostics->Warn("line " + std::to_string(line) + ": annotation " +
                        entity.id + " records '" + std::string(fields[2]) +
                        "' but offsets select '" + entity.surface + "'");
    }
  }
  return entity;
}

StandoffRelation ParseRelation(const std::vector<std::string_view> &fields,
                               int line) {
  if (fields.size() < 2 || fields.size() > 3 ||
      (fields.size() == 3 && !IsBlank(fields[2]))) {
    throw ParseError(line, "relation annotation needs 2 tab-separated "
                           "fields, found " + std::to_string(fields.size()));
  }
  StandoffRelation relation;
  relation.id = std::string(fields[0]);
  relation.line = line;
  const auto words = Words(fields[1]);
  if (words.size() < 3) {
    throw ParseError(line, "expected '<label> Arg1:<id> Arg2:<id>' in " +
                               relation.id);
  }
  relation.label = JoinWords(words, words.size() - 2);
  for (std::size_t i = words.size() - 2; i < words.size(); ++i) {
    const auto colon = words[i].find(':');
    if (colon == std::string_view::npos) {
      throw ParseError(line, "malformed argument '" + std::string(words[i]) +
                                 "' in " + relation.id);
    }
    const auto role = words[i].substr(0, colon);
    const auto value = std::string(words[i].substr(colon + 1));
    if (role == "Arg1") {
      relation.head = value;
    } else if (role == "Arg2") {
      relation.tail = value;
    } else {
      throw ParseError(line, "unexpected argument role '" + std::string(role) +
                                 "' in " + relation.id);
    }
  }
  if (relation.head.empty() || relation.tail.empty()) {
    throw ParseError(line, "relation " + relation.id +
                               " needs both Arg1 and Arg2");
  }
  return relation;
}

}  // namespace

void Diagnostics::Merge(const Diagnostics &other) {
  warnings.insert(warnings.end(), other.warnings.begin(), other.warnings.end());
  ignored_lines += other.ignored_lines;
  surface_mismatches += other.surface_mismatches;
  cross_sentence_relations += other.cross_sentence_relations;
  clipped_entities += other.clipped_entities;
  empty_entities += other.empty_entities;
  overlapping_entities += other.overlapping_entities;
  orphaned_relations += other.orphaned_relations;
}

StandoffDocument ParseStandoffRaw(std::string_view ann_text,
                                  std::string_view doc_text,
                                  std::string_view doc_id,
                                  const ParseOptions &options,
                                  Diagnostics *diagnostics) {
  StandoffDocument doc;
  doc.id = std::string(doc_id);
  doc.text = std::string(doc_text);
  const TextIndex index(doc.text);
  std::set<std::string> entity_ids;

  int line_no = 0;
  for (auto line : SplitOn(ann_text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (IsBlank(line)) continue;
    const auto fields = SplitOn(line, '\t');
    switch (line.front()) {
      case 'T': {
        auto entity =
            ParseTextBound(fields, line_no, index, options, diagnostics);
        if (!entity_ids.insert(entity.id).second) {
          throw ParseError(line_no, "duplicate annotation id " + entity.id);
        }
        doc.entities.push_back(std::move(entity));
        break;
      }
      case 'R':
        doc.relations.push_back(ParseRelation(fields, line_no));
        break;
      case 'E':
      case 'A':
      case 'N':
      case 'M':
      case '*':
      case '#':
        if (diagnostics != nullptr) {
          ++diagnostics->ignored_lines;
          diagnostics->Warn("line " + std::to_string(line_no) +
                            ": ignoring annotation " +
                            std::string(fields[0]));
        }
        break;
      default:
        throw ParseError(line_no, "unrecognized annotation '" +
                                      std::string(fields[0]) + "'");
    }
  }

  std::set<std::string> relation_ids;
  for (const auto &relation : doc.relations) {
    if (!relation_ids.insert(relation.id).second) {
      throw ParseError(relation.line, "duplicate annotation id " + relation.id);
    }
    for (const auto &arg : {relation.head, relation.tail}) {
      if (!entity_ids.contains(arg)) {
        throw ParseError(relation.line, "relation " + relation.id +
                                            " references unknown entity " +
                                            arg);
      }
    }
  }
  return doc;
}

Document Canonicalize(const StandoffDocument &raw) {
  Document doc;
  doc.id = raw.id;
  doc.text = raw.text;
  for (const auto &e : raw.entities) {
    const auto type = ParseEntityType(e.label);
    if (!type) {
      throw ParseError(e.line, "unknown entity label '" + e.label +
                                   "'; known labels: " + KnownEntityLabels());
    }
    doc.entities.push_back({e.id, *type, e.start, e.end, e.surface});
  }
  for (const auto &r : raw.relations) {
    const auto type = ParseRelationType(r.label);
    if (!type) {
      throw ParseError(r.line, "unknown relation label '" + r.label +
                                   "'; known labels: " + KnownRelationLabels());
    }
    doc.relations.push_back({r.id, *type, r.head, r.tail});
  }
  return doc;
}

Document ParseStandoff(std::string_view ann_text, std::string_view doc_text,
                       std::string_view doc_id, const ParseOptions &options,
                       Diagnostics *diagnostics) {
  return Canonicalize(
      ParseStandoffRaw(ann_text, doc_text, doc_id, options, diagnostics));
}

}  // namespace sciex
