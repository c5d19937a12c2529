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

#include <algorithm>
#include <cmath>
#include <set>

#include "sciex/corpus.h"
#include "sciex/errors.h"
#include "sciex/rng.h"

namespace sciex {

TokenSpan EntityTokenSpan(std::span<const Token> tokens, const Entity &entity) {
  auto first = std::lower_bound(
      tokens.begin(), tokens.end(), entity.start,
      [](const Token &t, int offset) { return t.start < offset; });
  if (first == tokens.end() || first->start != entity.start) {
    throw ValidationError("entity " + entity.id +
                          " does not start on a token boundary");
  }
  auto last = std::lower_bound(
      first, tokens.end(), entity.end,
      [](const Token &t, int offset) { return t.end < offset; });
  if (last == tokens.end() || last->end != entity.end) {
    throw ValidationError("entity " + entity.id +
                          " does not end on a token boundary");
  }
  return {static_cast<int>(first - tokens.begin()),
          static_cast<int>(last - tokens.begin()) + 1};
}

TagSequence ToBio(const AnnotatedSentence &sentence) {
  TagSequence tags(sentence.tokens.size(), Tagset::kOutside);
  struct Placed {
    TokenSpan span;
    const Entity *entity;
  };
  std::vector<Placed> placed;
  for (const Entity &e : sentence.entities) {
    placed.push_back({EntityTokenSpan(sentence.tokens, e), &e});
  }
  std::sort(placed.begin(), placed.end(), [](const Placed &a, const Placed &b) {
    return a.span.begin < b.span.begin;
  });
  for (std::size_t i = 1; i < placed.size(); ++i) {
    if (placed[i].span.begin < placed[i - 1].span.end) {
      throw ValidationError("entities " + placed[i - 1].entity->id + " and " +
                            placed[i].entity->id + " overlap");
    }
  }
  for (const auto &p : placed) {
    const int type = static_cast<int>(p.entity->type);
    tags[p.span.begin] = Tagset::Begin(type);
    for (int t = p.span.begin + 1; t < p.span.end; ++t) {
      tags[t] = Tagset::Inside(type);
    }
  }
  return tags;
}

std::vector<Entity> FromBio(const TagSequence &tags,
                            std::span<const Token> tokens) {
  if (tags.size() != tokens.size()) {
    throw ValidationError("tag sequence length " + std::to_string(tags.size()) +
                          " does not match token count " +
                          std::to_string(tokens.size()));
  }
  std::vector<Entity> entities;
  const int n = static_cast<int>(tags.size());
  int i = 0;
  while (i < n) {
    const int tag = tags[i];
    if (tag == Tagset::kOutside) {
      ++i;
      continue;
    }
    // B-X, or a stray I-X, opens an entity that extends over following I-X.
    const int type = Tagset::TypeOf(tag);
    int j = i + 1;
    while (j < n && tags[j] == Tagset::Inside(type)) ++j;
    Entity e;
    e.id = "T" + std::to_string(entities.size() + 1);
    e.type = static_cast<EntityType>(type);
    e.start = tokens[i].start;
    e.end = tokens[j - 1].end;
    e.surface = JoinTokens(tokens, i, j);
    entities.push_back(std::move(e));
    i = j;
  }
  return entities;
}

SplitIndices SplitCorpusIndices(std::size_t n, std::uint64_t seed) {
  if (n < 3) {
    throw ValidationError("splitting needs at least 3 documents, got " +
                          std::to_string(n));
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.Shuffle(order);
  const auto held_out =
      static_cast<std::size_t>(std::llround(static_cast<double>(n) / 4.0));
  SplitIndices split;
  const std::size_t n_train = n - 2 * held_out;
  split.train.assign(order.begin(), order.begin() + n_train);
  split.dev.assign(order.begin() + n_train, order.begin() + n_train + held_out);
  split.test.assign(order.begin() + n_train + held_out, order.end());
  for (auto *part : {&split.train, &split.dev, &split.test}) {
    std::sort(part->begin(), part->end());
  }
  return split;
}

DocumentSplit SplitCorpus(std::span<const Document> docs, std::uint64_t seed) {
  const SplitIndices idx = SplitCorpusIndices(docs.size(), seed);
  DocumentSplit split;
  for (auto i : idx.train) split.train.push_back(docs[i]);
  for (auto i : idx.dev) split.dev.push_back(docs[i]);
  for (auto i : idx.test) split.test.push_back(docs[i]);
  return split;
}

std::vector<std::string> DocumentOrder(
    std::span<const AnnotatedSentence> sentences) {
  std::vector<std::string> order;
  std::set<std::string> seen;
  for (const auto &s : sentences) {
    if (seen.insert(s.doc_id).second) order.push_back(s.doc_id);
  }
  return order;
}

SentenceSplit SplitCorpus(std::span<const AnnotatedSentence> sentences,
                          std::uint64_t seed) {
  const auto docs = DocumentOrder(sentences);
  const SplitIndices idx = SplitCorpusIndices(docs.size(), seed);
  std::set<std::string> dev, test;
  for (auto i : idx.dev) dev.insert(docs[i]);
  for (auto i : idx.test) test.insert(docs[i]);
  SentenceSplit split;
  for (const auto &s : sentences) {
    if (dev.contains(s.doc_id)) {
      split.dev.push_back(s);
    } else if (test.contains(s.doc_id)) {
      split.test.push_back(s);
    } else {
      split.train.push_back(s);
    }
  }
  return split;
}

CorpusStats ComputeCorpusStats(std::span<const AnnotatedSentence> sentences) {
  CorpusStats stats;
  stats.abstracts = static_cast<int>(DocumentOrder(sentences).size());
  stats.sentences = static_cast<int>(sentences.size());
  for (const auto &s : sentences) {
    stats.tokens += static_cast<int>(s.tokens.size());
    stats.entities += static_cast<int>(s.entities.size());
    stats.relations += static_cast<int>(s.relations.size());
    for (const auto &e : s.entities) {
      ++stats.entity_types[std::string(EntityTypeName(e.type))];
    }
    for (const auto &r : s.relations) {
      ++stats.relation_types[std::string(RelationTypeName(r.type))];
    }
  }
  return stats;
}

}  // namespace sciex
