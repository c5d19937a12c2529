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

#ifndef SCIEX_ACTIVE_H_
#define SCIEX_ACTIVE_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sciex/corpus.h"
#include "sciex/crf.h"
#include "sciex/relation.h"

namespace sciex {

enum class Strategy { kFull, kRand, kAl };
std::string_view StrategyName(Strategy strategy);
Strategy ParseStrategy(std::string_view name);

// entropy: mean per-token marginal entropy (nats). viterbi: 1 - p(best
// path).
enum class UncertaintyKind { kEntropy, kViterbi };
std::string_view UncertaintyName(UncertaintyKind kind);
UncertaintyKind ParseUncertainty(std::string_view name);

// Mean row entropy of a marginal matrix; 0 for an empty matrix.
double MeanEntropy(const Matrix &marginals);

double SentenceUncertainty(const AnnotatedSentence &sentence,
                           const CrfModel &model,
                           UncertaintyKind kind = UncertaintyKind::kEntropy);

// Mean entropy (nats) of the relation distributions over every ordered pair
// of `entities`; 0 with fewer than two entities.
double RelationUncertainty(const AnnotatedSentence &sentence,
                           std::span<const Entity> entities,
                           const RelModel &model);

// Entity uncertainty plus, when `rel_model` is given, the relation
// uncertainty over the entities `model` predicts.
double CombinedUncertainty(const AnnotatedSentence &sentence,
                           const CrfModel &model, const RelModel *rel_model,
                           UncertaintyKind kind = UncertaintyKind::kEntropy);

struct SentenceRef {
  std::string doc_id;
  int sent_index = 0;

  auto operator<=>(const SentenceRef &) const = default;
};

struct SelectionPlan {
  int cycle = 0;
  Strategy strategy = Strategy::kFull;
  double ratio = 1.0;
  std::vector<SentenceRef> chosen;  // corpus order
  long long cost_tokens = 0;

  nlohmann::ordered_json ToJson() const;
};

// Number of sentences picked from an abstract of n sentences:
// ceil(ratio * n), at least 1 for non-empty abstracts.
int SelectionSize(int n, double ratio);

// Selects from the sentences of the cycle's abstracts. FULL takes
// everything; RAND samples SelectionSize sentences per abstract with a
// seeded generator; AL takes the most uncertain ones per abstract (ties by
// sentence index). Throws ValidationError for AL without a model or a ratio
// outside (0, 1]. A relation model adds its uncertainty to AL scores.
SelectionPlan Select(std::span<const AnnotatedSentence> cycle_sentences,
                     Strategy strategy, double ratio, const CrfModel *model,
                     std::uint64_t seed, int cycle = 0,
                     UncertaintyKind kind = UncertaintyKind::kEntropy,
                     const RelModel *rel_model = nullptr);

// AL selection from precomputed scores (one per sentence).
SelectionPlan SelectByScores(std::span<const AnnotatedSentence> cycle_sentences,
                             std::span<const double> scores, double ratio,
                             int cycle = 0);

struct CurveConfig {
  int cycle_size = 4;          // abstracts per cycle
  double ratio = 0.4;
  NerTrainConfig ner;
  bool relation = false;       // also train and score the relation model
  RelTrainConfig rel;
  UncertaintyKind uncertainty = UncertaintyKind::kEntropy;
  // AL adds the relation model's uncertainty; requires `relation`.
  bool relation_uncertainty = false;
  // When set, abstracts are consumed in this seeded order instead of
  // corpus order.
  std::optional<std::uint64_t> shuffle_seed;

  nlohmann::ordered_json ToJson() const;
  static CurveConfig FromJson(const nlohmann::json &j);
};

struct CurvePoint {
  Strategy strategy = Strategy::kFull;
  std::uint64_t seed = 0;
  int cycle = 0;
  long long cumulative_cost_tokens = 0;
  double entity_dev_f1 = 0.0;
  double relation_dev_f1 = 0.0;  // NaN when relations are not simulated
};

// Simulated annotation: each cycle reveals the selected sentences of the
// next `cycle_size` abstracts, retrains from scratch on everything revealed
// so far and scores the dev set. AL has no model before the first cycle
// and selects randomly there. Throws ValidationError when dev is empty.
std::vector<CurvePoint> SimulateCurve(std::span<const AnnotatedSentence> pool,
                                      std::span<const AnnotatedSentence> dev,
                                      Strategy strategy,
                                      const CurveConfig &config,
                                      std::uint64_t seed);

// Runs SimulateCurve for every seed, optionally in parallel.
std::vector<CurvePoint> SimulateCurves(std::span<const AnnotatedSentence> pool,
                                       std::span<const AnnotatedSentence> dev,
                                       Strategy strategy,
                                       const CurveConfig &config,
                                       std::span<const std::uint64_t> seeds,
                                       int threads = 1);

// First cumulative cost at which the entity dev F1 reaches `target`.
std::optional<long long> CostToReach(std::span<const CurvePoint> curve,
                                     double target);

// CSV with header
// strategy,seed,cycle,cumulative_cost_tokens,entity_dev_f1,relation_dev_f1
// preceded by a "# " provenance line when `provenance` is non-empty.
void WriteCurveCsv(std::ostream &out, std::span<const CurvePoint> points,
                   std::string_view provenance = {});

// Worklist for annotators: one {doc_id, sent_index, text} object per line.
void WriteWorklist(std::ostream &out, const SelectionPlan &plan,
                   std::span<const AnnotatedSentence> sentences);

}  // namespace sciex

#endif  // SCIEX_ACTIVE_H_
