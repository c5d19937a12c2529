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

#ifndef SCIEX_CORPUS_H_
#define SCIEX_CORPUS_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sciex/labels.h"

namespace sciex {

// Offsets everywhere are Unicode code point indices into the document text,
// half-open [start, end).
struct Entity {
  std::string id;
  EntityType type = EntityType::kMaterial;
  int start = 0;
  int end = 0;
  std::string surface;

  bool operator==(const Entity &) const = default;
};

// Directed: (head, tail, type) is the identity.
struct Relation {
  std::string id;
  RelationType type = RelationType::kFormOf;
  std::string head;
  std::string tail;

  bool operator==(const Relation &) const = default;
};

struct Document {
  std::string id;
  std::string text;  // UTF-8
  std::vector<Entity> entities;
  std::vector<Relation> relations;
};

// Standoff content before label canonicalization. Schema mapping works at
// this level because foreign corpora use labels outside the schema.
struct StandoffEntity {
  std::string id;
  std::string label;
  int start = 0;
  int end = 0;
  std::string surface;
  int line = 0;
};

struct StandoffRelation {
  std::string id;
  std::string label;
  std::string head;
  std::string tail;
  int line = 0;
};

struct StandoffDocument {
  std::string id;
  std::string text;
  std::vector<StandoffEntity> entities;
  std::vector<StandoffRelation> relations;
};

// Non-fatal findings collected while parsing and aligning. Every item the
// pipeline drops is counted here.
struct Diagnostics {
  std::vector<std::string> warnings;
  int ignored_lines = 0;            // E, A, N, M, *, # lines
  int surface_mismatches = 0;       // T-line text differs from the offsets
  int cross_sentence_relations = 0; // dropped by sentence alignment
  int clipped_entities = 0;         // crossed a sentence boundary
  int empty_entities = 0;           // covered no token
  int overlapping_entities = 0;     // collided after token snapping
  int orphaned_relations = 0;       // endpoint dropped by one of the above

  void Warn(std::string message) { warnings.push_back(std::move(message)); }
  void Merge(const Diagnostics &other);
};

enum class OffsetUnit { kCodepoint, kByte };

struct ParseOptions {
  // BRAT writes code point offsets; kByte reinterprets them as UTF-8 byte
  // offsets for corpora produced by byte-oriented tools.
  OffsetUnit offsets = OffsetUnit::kCodepoint;
};

// Parses a .ann file against its .txt. T and R lines are kept; E, A, N, M,
// * and # lines are skipped with a warning. Throws ParseError (with line
// number) for malformed lines and out-of-range offsets, and
// DiscontinuousSpanError for fragmented spans.
StandoffDocument ParseStandoffRaw(std::string_view ann_text,
                                  std::string_view doc_text,
                                  std::string_view doc_id,
                                  const ParseOptions &options = {},
                                  Diagnostics *diagnostics = nullptr);

// Resolves every label to the canonical schema. Unknown labels throw
// ParseError listing the known labels.
Document Canonicalize(const StandoffDocument &raw);

Document ParseStandoff(std::string_view ann_text, std::string_view doc_text,
                       std::string_view doc_id, const ParseOptions &options = {},
                       Diagnostics *diagnostics = nullptr);

struct Token {
  std::string text;
  int start = 0;
  int end = 0;

  bool operator==(const Token &) const = default;
};

struct TextSpan {
  int start = 0;
  int end = 0;
};

// Sentence boundaries over code points: a line break, or . ? ! followed by
// whitespace and an uppercase letter unless the preceding word is a known
// abbreviation. Spans are trimmed and never empty.
std::vector<TextSpan> SplitSentences(std::u32string_view text);

// Whitespace split, then the characters . , ; : ( ) [ ] / " ' % and curly
// quotes become single-character tokens. Hyphens between alphanumerics stay
// inside the token, as do '.' and ',' between digits ("0.5", "1,000").
std::vector<Token> Tokenize(std::u32string_view text, TextSpan span);

struct AnnotatedSentence {
  std::string doc_id;
  int sent_index = 0;
  std::vector<Token> tokens;
  std::vector<Entity> entities;    // token-aligned, sorted by start
  std::vector<Relation> relations; // both endpoints in this sentence
};

// Splits and tokenizes a document, snaps each entity to the smallest
// covering token span and drops relations that cross sentences. Entities
// that collide after snapping keep the first (by start, then longest) and
// the rest are dropped; all drops are counted in `diagnostics`.
std::vector<AnnotatedSentence> SentenceSplitAndTokenize(
    const Document &doc, Diagnostics *diagnostics = nullptr);

struct TokenSpan {
  int begin = 0;  // first token
  int end = 0;    // one past the last token

  bool operator==(const TokenSpan &) const = default;
};

// Token span whose boundaries coincide with the entity offsets. Throws
// ValidationError when the entity is not token-aligned.
TokenSpan EntityTokenSpan(std::span<const Token> tokens, const Entity &entity);

// Surface string of tokens [begin, end) with each whitespace gap rendered as
// one space.
std::string JoinTokens(std::span<const Token> tokens, int begin, int end);

using TagSequence = std::vector<int>;

// BIO tags over Tagset::Schema(). Throws ValidationError naming both ids
// when two entities overlap.
TagSequence ToBio(const AnnotatedSentence &sentence);

// Decodes maximal B-X (I-X)* runs. An I-X that follows O or a different
// type opens a new entity. Ids are "T1", "T2", ... in token order.
std::vector<Entity> FromBio(const TagSequence &tags,
                            std::span<const Token> tokens);

struct SplitIndices {
  std::vector<std::size_t> train, dev, test;
};

// Seeded document-level 50/25/25 split: dev and test each receive
// round(n / 4) items, train the remainder. Requires n >= 3.
SplitIndices SplitCorpusIndices(std::size_t n, std::uint64_t seed);

struct DocumentSplit {
  std::vector<Document> train, dev, test;
};
DocumentSplit SplitCorpus(std::span<const Document> docs, std::uint64_t seed);

struct SentenceSplit {
  std::vector<AnnotatedSentence> train, dev, test;
};
// Splits a sentence corpus by abstract; sentences keep corpus order.
SentenceSplit SplitCorpus(std::span<const AnnotatedSentence> sentences,
                          std::uint64_t seed);

// Abstract ids in order of first appearance.
std::vector<std::string> DocumentOrder(
    std::span<const AnnotatedSentence> sentences);

struct CorpusStats {
  int abstracts = 0;
  int sentences = 0;
  int tokens = 0;
  int entities = 0;
  int relations = 0;
  std::map<std::string, int> entity_types;
  std::map<std::string, int> relation_types;
};

CorpusStats ComputeCorpusStats(std::span<const AnnotatedSentence> sentences);

}  // namespace sciex

#endif  // SCIEX_CORPUS_H_
