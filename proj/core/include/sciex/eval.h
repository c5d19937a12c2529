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

#ifndef SCIEX_EVAL_H_
#define SCIEX_EVAL_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sciex/corpus.h"

namespace sciex {

enum class Category { kCor, kInc, kPar, kMis, kSpu };
std::string_view CategoryName(Category category);

// exact: the five-way taxonomy as is. relaxed: PAR pairs whose surfaces
// contain one another (whitespace runs collapsed, case-sensitive) and whose
// types agree become COR. overlap: any PAR pair with agreeing types becomes
// COR; a looser, non-canonical reading offered for comparison.
enum class Regime { kExact, kRelaxed, kOverlap };
std::string_view RegimeName(Regime regime);
Regime ParseRegime(std::string_view name);

struct ErrorPair {
  std::optional<int> gold;  // index into the gold list
  std::optional<int> pred;  // index into the prediction list
  Category category = Category::kCor;

  bool operator==(const ErrorPair &) const = default;
};

struct ErrorAssignment {
  std::vector<ErrorPair> pairs;
};

// Pairs gold and predicted entities in four passes: exact span and type
// (COR), exact span with another type (INC), overlapping spans (PAR, greedy
// by overlap length, then gold start, then prediction start), and the
// leftovers (MIS, SPU). With labeled = false types are ignored, so INC never
// occurs. Throws ValidationError when two gold entities overlap.
ErrorAssignment ClassifyErrors(std::span<const Entity> gold,
                               std::span<const Entity> pred,
                               bool labeled = true);

// True when one surface contains the other after whitespace collapsing.
bool SurfaceContains(std::string_view a, std::string_view b);

// Reclassifies PAR pairs under `regime`; kExact returns the input.
ErrorAssignment RelaxedCorrect(const ErrorAssignment &assignment,
                               std::span<const Entity> gold,
                               std::span<const Entity> pred,
                               Regime regime = Regime::kRelaxed);

struct Counts {
  long long cor = 0, inc = 0, par = 0, mis = 0, spu = 0;

  void Add(Category category);
  Counts &operator+=(const Counts &other);
  long long gold() const { return cor + inc + par + mis; }
  long long predicted() const { return cor + inc + par + spu; }
  // COR / (COR + INC + SPU), 0 when the denominator is 0.
  double Precision() const;
  // COR / (COR + PAR + MIS), 0 when the denominator is 0.
  double Recall() const;
  double F1() const;

  bool operator==(const Counts &) const = default;
};

Counts CountCategories(const ErrorAssignment &assignment);

struct EvalReport {
  Regime regime = Regime::kExact;
  bool labeled = true;
  Counts counts;
  std::map<std::string, Counts> per_type;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  nlohmann::ordered_json ToJson() const;
};

// Scores one gold/prediction list pair. COR, PAR and MIS are attributed to
// the gold type; INC and SPU to the predicted type.
EvalReport EntityPrf(std::span<const Entity> gold, std::span<const Entity> pred,
                     Regime regime, bool labeled);

// Corpus-level entity scores. `pred[i]` holds the predictions for
// `gold[i]`; counts are summed over sentences.
EvalReport EvaluateEntities(std::span<const AnnotatedSentence> gold,
                            std::span<const std::vector<Entity>> pred,
                            Regime regime, bool labeled);

// Aligns predicted sentences to gold ones by (doc_id, sent_index); gold
// sentences without a prediction count as predicting nothing. Throws
// ValidationError for predicted sentences absent from the gold corpus.
EvalReport EvaluateEntities(std::span<const AnnotatedSentence> gold,
                            std::span<const AnnotatedSentence> pred,
                            Regime regime, bool labeled);

struct RelationCounts {
  long long tp = 0, fp = 0, fn = 0;

  RelationCounts &operator+=(const RelationCounts &other);
  double Precision() const;
  double Recall() const;
  double F1() const;

  bool operator==(const RelationCounts &) const = default;
};

struct RelationReport {
  bool labeled = true;
  RelationCounts counts;
  std::map<std::string, RelationCounts> per_type;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  nlohmann::ordered_json ToJson() const;
};

// A prediction is a true positive when an identical (head, tail, type)
// triple is gold (labeled) or any gold relation joins the same ordered pair
// (unlabeled). Throws ValidationError when a relation on either side names
// an id outside `entity_ids`.
RelationReport RelationPrf(std::span<const Relation> gold,
                           std::span<const Relation> pred,
                           std::span<const std::string> entity_ids,
                           bool labeled);

// Corpus-level relation scores over aligned sentence lists.
RelationReport EvaluateRelations(std::span<const AnnotatedSentence> gold,
                                 std::span<const std::vector<Relation>> pred,
                                 bool labeled);
RelationReport EvaluateRelations(std::span<const AnnotatedSentence> gold,
                                 std::span<const AnnotatedSentence> pred,
                                 bool labeled);

// One row of a per-type error breakdown.
struct BreakdownRow {
  std::string type;
  double f1 = 0.0;
  int test = 0, dev = 0, train = 0;  // gold occurrences per split

  int total() const { return test + dev + train; }
};

// Keeps types with at least `min_count` occurrences across the three
// splits, sorted by F1 descending (ties by type name). `f1_by_type` comes
// from the evaluated split.
std::vector<BreakdownRow> BreakdownByType(
    const std::map<std::string, double> &f1_by_type,
    const std::map<std::string, int> &test_counts,
    const std::map<std::string, int> &dev_counts,
    const std::map<std::string, int> &train_counts, int min_count = 20);

std::map<std::string, double> F1ByType(const EvalReport &report);
std::map<std::string, double> F1ByType(const RelationReport &report);

// Plain-text table: type, F1%, and "test, dev, train" counts.
std::string FormatBreakdown(std::span<const BreakdownRow> rows);
nlohmann::ordered_json BreakdownToJson(std::span<const BreakdownRow> rows);

}  // namespace sciex

#endif  // SCIEX_EVAL_H_
