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

// Rule-based sentence splitting, tokenization and entity alignment.

#include <algorithm>
#include <array>
#include <map>
#include <set>

#include "sciex/corpus.h"
#include "sciex/utf8.h"

namespace sciex {
namespace {

// Lowercased words that end in '.' without ending a sentence.
const std::set<std::u32string> &Abbreviations() {
  static const std::set<std::u32string> kAbbreviations = {
      U"al",  U"approx", U"ca",   U"cf",   U"dr",  U"e.g", U"eg",
      U"eq",  U"eqs",    U"fig",  U"figs", U"i.e", U"ie",  U"mr",
      U"ms",  U"no",     U"nos",  U"prof", U"ref", U"refs", U"resp",
      U"sec", U"vol",    U"vs",   U"viz",
  };
  return kAbbreviations;
}

bool IsTerminator(char32_t c) { return c == U'.' || c == U'?' || c == U'!'; }

bool IsSplitPunct(char32_t c) {
  switch (c) {
    case U'.': case U',': case U';': case U':': case U'(': case U')':
    case U'[': case U']': case U'/': case U'"': case U'\'': case U'%':
    case 0x2018: case 0x2019: case 0x201C: case 0x201D:
      return true;
    default:
      return false;
  }
}

bool IsHyphen(char32_t c) { return c == U'-' || c == 0x2010 || c == 0x2011; }

// True if the word ending just before `dot` is in the abbreviation list.
bool PrecededByAbbreviation(std::u32string_view text, int dot) {
  int b = dot;
  while (b > 0 && !IsSpace(text[b - 1])) --b;
  std::u32string word;
  for (int i = b; i < dot; ++i) {
    if (text[i] == U'(' || text[i] == U'[') continue;
    word.push_back(ToLower(text[i]));
  }
  return Abbreviations().contains(word);
}

void AppendTrimmed(std::u32string_view text, int start, int end,
                   std::vector<TextSpan> &out) {
  while (start < end && IsSpace(text[start])) ++start;
  while (end > start && IsSpace(text[end - 1])) --end;
  if (start < end) out.push_back({start, end});
}

}  // namespace

std::vector<TextSpan> SplitSentences(std::u32string_view text) {
  std::vector<TextSpan> sentences;
  const int n = static_cast<int>(text.size());
  int start = 0;
  for (int i = 0; i < n; ++i) {
    if (text[i] == U'\n') {
      AppendTrimmed(text, start, i, sentences);
      start = i + 1;
      continue;
    }
    if (!IsTerminator(text[i])) continue;
    int j = i + 1;
    if (j >= n || !IsSpace(text[j])) continue;
    while (j < n && IsSpace(text[j]) && text[j] != U'\n') ++j;
    if (j >= n || !IsUpper(text[j])) continue;
    if (text[i] == U'.' && PrecededByAbbreviation(text, i)) continue;
    AppendTrimmed(text, start, i + 1, sentences);
    start = i + 1;
  }
  AppendTrimmed(text, start, n, sentences);
  return sentences;
}

std::vector<Token> Tokenize(std::u32string_view text, TextSpan span) {
  std::vector<Token> tokens;
  std::u32string current;
  int current_start = 0;
  auto flush = [&](int end) {
    if (!current.empty()) {
      tokens.push_back({EncodeUtf8(current), current_start, end});
      current.clear();
    }
  };
  auto between = [&](int i, bool (*pred)(char32_t)) {
    return i > span.start && i + 1 < span.end && pred(text[i - 1]) &&
           pred(text[i + 1]);
  };

  for (int i = span.start; i < span.end; ++i) {
    const char32_t c = text[i];
    if (IsSpace(c)) {
      flush(i);
      continue;
    }
    bool split = false;
    if (IsHyphen(c)) {
      split = !between(i, IsAlnum);
    } else if (c == U'.' || c == U',') {
      split = !between(i, IsDigit);
    } else {
      split = IsSplitPunct(c);
    }
    if (split) {
      flush(i);
      tokens.push_back({EncodeUtf8(std::u32string(1, c)), i, i + 1});
      continue;
    }
    if (current.empty()) current_start = i;
    current.push_back(c);
  }
  flush(span.end);
  return tokens;
}

std::vector<AnnotatedSentence> SentenceSplitAndTokenize(
    const Document &doc, Diagnostics *diagnostics) {
  Diagnostics local;
  Diagnostics &diag = diagnostics != nullptr ? *diagnostics : local;
  const std::u32string text = DecodeUtf8(doc.text);

  std::vector<AnnotatedSentence> sentences;
  // Flattened token list with the owning sentence of each token.
  std::vector<Token> all_tokens;
  std::vector<int> token_sentence;
  std::vector<int> token_local;
  for (const TextSpan &span : SplitSentences(text)) {
    auto tokens = Tokenize(text, span);
    if (tokens.empty()) continue;
    AnnotatedSentence sentence;
    sentence.doc_id = doc.id;
    sentence.sent_index = static_cast<int>(sentences.size());
    for (std::size_t k = 0; k < tokens.size(); ++k) {
      all_tokens.push_back(tokens[k]);
      token_sentence.push_back(sentence.sent_index);
      token_local.push_back(static_cast<int>(k));
    }
    sentence.tokens = std::move(tokens);
    sentences.push_back(std::move(sentence));
  }

  // Snap entities to covering token spans within the sentence of their
  // first token.
  struct Placed {
    Entity entity;
    int sentence;
  };
  std::vector<Placed> placed;
  for (const Entity &e : doc.entities) {
    auto first = std::find_if(all_tokens.begin(), all_tokens.end(),
                              [&](const Token &t) { return t.end > e.start; });
    if (first == all_tokens.end() || first->start >= e.end) {
      ++diag.empty_entities;
      diag.Warn(doc.id + ": entity " + e.id + " covers no token; dropped");
      continue;
    }
    const auto f = static_cast<std::size_t>(first - all_tokens.begin());
    const int s = token_sentence[f];
    std::size_t l = f;
    bool clipped = false;
    for (std::size_t k = f + 1; k < all_tokens.size(); ++k) {
      if (all_tokens[k].start >= e.end) break;
      if (token_sentence[k] != s) {
        clipped = true;
        break;
      }
      l = k;
    }
    if (clipped) {
      ++diag.clipped_entities;
      diag.Warn(doc.id + ": entity " + e.id +
                " crosses a sentence boundary; clipped");
    }
    Entity snapped = e;
    snapped.start = all_tokens[f].start;
    snapped.end = all_tokens[l].end;
    snapped.surface = JoinTokens(sentences[s].tokens, token_local[f],
                                 token_local[l] + 1);
    placed.push_back({std::move(snapped), s});
  }

  // Resolve collisions: earliest start wins, then the longer span.
  std::stable_sort(placed.begin(), placed.end(),
                   [](const Placed &a, const Placed &b) {
                     if (a.entity.start != b.entity.start) {
                       return a.entity.start < b.entity.start;
                     }
                     return a.entity.end > b.entity.end;
                   });
  std::map<std::string, int> entity_sentence;
  int last_end = -1;
  for (auto &p : placed) {
    if (p.entity.start < last_end) {
      ++diag.overlapping_entities;
      diag.Warn(doc.id + ": entity " + p.entity.id +
                " overlaps an earlier entity after token alignment; dropped");
      continue;
    }
    last_end = p.entity.end;
    entity_sentence[p.entity.id] = p.sentence;
    sentences[p.sentence].entities.push_back(std::move(p.entity));
  }

  for (const Relation &r : doc.relations) {
    auto head = entity_sentence.find(r.head);
    auto tail = entity_sentence.find(r.tail);
    if (head == entity_sentence.end() || tail == entity_sentence.end()) {
      ++diag.orphaned_relations;
      diag.Warn(doc.id + ": relation " + r.id +
                " lost an endpoint during alignment; dropped");
      continue;
    }
    if (head->second != tail->second) {
      ++diag.cross_sentence_relations;
      continue;
    }
    sentences[head->second].relations.push_back(r);
  }
  return sentences;
}

std::string JoinTokens(std::span<const Token> tokens, int begin, int end) {
  std::string out;
  for (int i = begin; i < end; ++i) {
    if (i > begin && tokens[i].start > tokens[i - 1].end) out.push_back(' ');
    out += tokens[i].text;
  }
  return out;
}

}  // namespace sciex
