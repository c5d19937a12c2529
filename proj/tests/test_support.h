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

#ifndef SCIEX_TESTS_TEST_SUPPORT_H_
#define SCIEX_TESTS_TEST_SUPPORT_H_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "sciex/corpus.h"
#include "sciex/crf.h"
#include "sciex/labels.h"
#include "sciex/rng.h"

namespace sciex::testing {

// Toy tagset over `types` span types named A, B, C, ...
Tagset ToyTagset(int types);

// A lattice together with the chain scores it points at.
struct LatticeInstance {
  std::unique_ptr<ChainScores> chain;
  Lattice lattice;
};

// Emissions, transitions and boundary scores uniform in [-scale, scale].
LatticeInstance RandomLattice(Rng &rng, int n, const Tagset &tagset, bool mask,
                              bool boundary = true, double scale = 2.0);

// Every sequence in [0, k)^n, lexicographic.
std::vector<std::vector<int>> AllSequences(int n, int k);

// Path score summed directly from the lattice arrays.
double BruteScore(const Lattice &lattice, const std::vector<int> &tags);
double BruteLogPartition(const Lattice &lattice);
Matrix BruteMarginals(const Lattice &lattice);
// First maximizer in lexicographic order.
std::vector<int> BruteArgmax(const Lattice &lattice);

struct SpanSpec {
  int begin;  // token index
  int end;    // one past the last token
  EntityType type;
};

// Sentence over `words` joined by single spaces, with entities T1.. over
// the given token spans.
AnnotatedSentence MakeSentence(const std::string &doc_id, int sent_index,
                               const std::vector<std::string> &words,
                               const std::vector<SpanSpec> &spans = {});

std::string DataPath(const std::string &relative);

// The annotated sample abstract shipped under tests/data/sample_abstract.
Document SampleDocument(Diagnostics *diagnostics = nullptr);
std::vector<AnnotatedSentence> SampleSentences();

// Sentences whose tag is a function of token identity. Covers four entity
// types with multi-token spans.
std::vector<AnnotatedSentence> SeparableCorpus(int sentences, std::uint64_t seed,
                                               const std::string &doc_prefix);

// Measurement sentences ("heated at 700 C for 5 h") where each Number is
// related by Number-Of to the unit right after it; other pairs are
// unrelated.
std::vector<AnnotatedSentence> NumberOfCorpus(int sentences, std::uint64_t seed,
                                              const std::string &doc_prefix);

// Abstracts of ten sentences each: half built from a tiny fixed vocabulary
// that is learned from a handful of examples, half drawing entity words
// from a large vocabulary with type-specific suffixes.
std::vector<AnnotatedSentence> TwoClusterCorpus(int abstracts, std::uint64_t seed,
                                                const std::string &doc_prefix,
                                                double informative_share = 0.5);

// Random token-aligned, non-overlapping annotated sentence.
AnnotatedSentence RandomSentence(Rng &rng, int max_tokens, int sent_index = 0);

// Random text of letters and spaces.
std::string RandomText(Rng &rng, int length);
// Random entity lists over `text` with surfaces filled in. Gold entities do
// not overlap; predictions may, and are biased towards near-misses of
// `gold` so that every error category occurs.
std::vector<Entity> RandomGold(Rng &rng, const std::string &text, int types);
std::vector<Entity> RandomPred(Rng &rng, const std::string &text,
                               const std::vector<Entity> &gold, int types);

// One boundary-error example: a gold and a predicted entity over `text`
// and whether relaxed matching should turn the pair into a true positive.
struct BoundaryCase {
  std::string model;
  std::string text;
  Entity gold;
  Entity pred;
  bool corrected = false;
};

// The twelve published boundary-error examples, each with its own text.
std::vector<BoundaryCase> BoundaryCases();

// Relative error |a - b| / max(|a|, |b|, floor).
double RelativeError(double a, double b, double floor = 1e-6);

}  // namespace sciex::testing

#endif  // SCIEX_TESTS_TEST_SUPPORT_H_
