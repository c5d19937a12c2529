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

#include "sciex/active.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

#include "sciex/errors.h"
#include "sciex/eval.h"
#include "sciex/log_math.h"
#include "sciex/parallel.h"

namespace sciex {
namespace {

constexpr std::uint64_t kSelectSalt = 0x5e1ec7;
constexpr std::uint64_t kTrainSalt = 0x7a1;
constexpr std::uint64_t kRelTrainSalt = 0x7a2;

// Sentence index groups per abstract, in order of first appearance.
std::vector<std::vector<std::size_t>> GroupByAbstract(
    std::span<const AnnotatedSentence> sentences) {
  std::map<std::string, std::size_t> slot;
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    auto [it, inserted] = slot.emplace(sentences[i].doc_id, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(i);
  }
  return groups;
}

SelectionPlan MakePlan(std::span<const AnnotatedSentence> sentences,
                       std::vector<std::size_t> picked, Strategy strategy,
                       double ratio, int cycle) {
  std::sort(picked.begin(), picked.end());
  SelectionPlan plan;
  plan.cycle = cycle;
  plan.strategy = strategy;
  plan.ratio = ratio;
  for (std::size_t i : picked) {
    plan.chosen.push_back({sentences[i].doc_id, sentences[i].sent_index});
    plan.cost_tokens += static_cast<long long>(sentences[i].tokens.size());
  }
  return plan;
}

void CheckRatio(double ratio) {
  if (!(ratio > 0.0 && ratio <= 1.0)) {
    throw ValidationError("selection ratio must be in (0, 1], got " +
                          std::to_string(ratio));
  }
}

std::string FormatDouble(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

std::string_view StrategyName(Strategy strategy) {
  switch (strategy) {
    case Strategy::kFull:
      return "FULL";
    case Strategy::kRand:
      return "RAND";
    case Strategy::kAl:
      return "AL";
  }
  return "";
}

Strategy ParseStrategy(std::string_view name) {
  std::string upper(name);
  for (char &c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (upper == "FULL") return Strategy::kFull;
  if (upper == "RAND") return Strategy::kRand;
  if (upper == "AL") return Strategy::kAl;
  throw ValidationError("unknown strategy '" + std::string(name) +
                        "' (expected FULL, RAND or AL)");
}

std::string_view UncertaintyName(UncertaintyKind kind) {
  return kind == UncertaintyKind::kEntropy ? "entropy" : "viterbi";
}

UncertaintyKind ParseUncertainty(std::string_view name) {
  if (name == "entropy") return UncertaintyKind::kEntropy;
  if (name == "viterbi") return UncertaintyKind::kViterbi;
  throw ValidationError("unknown uncertainty '" + std::string(name) +
                        "' (expected entropy or viterbi)");
}

double MeanEntropy(const Matrix &marginals) {
  if (marginals.rows() == 0) return 0.0;
  double total = 0.0;
  for (int i = 0; i < marginals.rows(); ++i) {
    for (double p : marginals.row(i)) {
      if (p > 0.0) total -= p * std::log(p);
    }
  }
  return total / marginals.rows();
}

double SentenceUncertainty(const AnnotatedSentence &sentence,
                           const CrfModel &model, UncertaintyKind kind) {
  if (sentence.tokens.empty()) return 0.0;
  if (kind == UncertaintyKind::kEntropy) {
    return MeanEntropy(model.TagMarginals(sentence));
  }
  const ChainScores chain = model.Chain();
  const Lattice lattice = model.BuildLattice(sentence, chain);
  const TagSequence best = Viterbi(lattice);
  return 1.0 - std::exp(SequenceScore(lattice, best) - LogPartition(lattice));
}

double RelationUncertainty(const AnnotatedSentence &sentence,
                           std::span<const Entity> entities,
                           const RelModel &model) {
  const int n = static_cast<int>(entities.size());
  if (n < 2) return 0.0;
  double total = 0.0;
  for (int a = 0; a < n; ++a) {
    total += MeanEntropy(model.ScoreAnchor(sentence, entities, a).probs);
  }
  return total / n;
}

double CombinedUncertainty(const AnnotatedSentence &sentence,
                           const CrfModel &model, const RelModel *rel_model,
                           UncertaintyKind kind) {
  double score = SentenceUncertainty(sentence, model, kind);
  if (rel_model != nullptr && !sentence.tokens.empty()) {
    score += RelationUncertainty(sentence, model.PredictEntities(sentence), *rel_model);
  }
  return score;
}

nlohmann::ordered_json SelectionPlan::ToJson() const {
  nlohmann::ordered_json j;
  j["cycle"] = cycle;
  j["strategy"] = StrategyName(strategy);
  j["ratio"] = ratio;
  j["cost_tokens"] = cost_tokens;
  j["chosen"] = nlohmann::ordered_json::array();
  for (const auto &c : chosen) {
    j["chosen"].push_back({{"doc_id", c.doc_id}, {"sent_index", c.sent_index}});
  }
  return j;
}

int SelectionSize(int n, double ratio) {
  if (n <= 0) return 0;
  const int k = static_cast<int>(std::ceil(ratio * n - 1e-9));
  return std::clamp(k, 1, n);
}

SelectionPlan SelectByScores(std::span<const AnnotatedSentence> cycle_sentences,
                             std::span<const double> scores, double ratio,
                             int cycle) {
  CheckRatio(ratio);
  if (scores.size() != cycle_sentences.size()) {
    throw ValidationError("one uncertainty score per sentence is required");
  }
  std::vector<std::size_t> picked;
  for (auto group : GroupByAbstract(cycle_sentences)) {
    const int k = SelectionSize(static_cast<int>(group.size()), ratio);
    std::stable_sort(group.begin(), group.end(), [&](std::size_t a, std::size_t b) {
      if (scores[a] != scores[b]) return scores[a] > scores[b];
      return cycle_sentences[a].sent_index < cycle_sentences[b].sent_index;
    });
    picked.insert(picked.end(), group.begin(), group.begin() + k);
  }
  return MakePlan(cycle_sentences, std::move(picked), Strategy::kAl, ratio, cycle);
}

SelectionPlan Select(std::span<const AnnotatedSentence> cycle_sentences,
                     Strategy strategy, double ratio, const CrfModel *model,
                     std::uint64_t seed, int cycle, UncertaintyKind kind,
                     const RelModel *rel_model) {
  switch (strategy) {
    case Strategy::kFull: {
      std::vector<std::size_t> all(cycle_sentences.size());
      std::iota(all.begin(), all.end(), 0);
      return MakePlan(cycle_sentences, std::move(all), strategy, 1.0, cycle);
    }
    case Strategy::kRand: {
      CheckRatio(ratio);
      Rng rng(seed);
      std::vector<std::size_t> picked;
      for (auto group : GroupByAbstract(cycle_sentences)) {
        const int k = SelectionSize(static_cast<int>(group.size()), ratio);
        rng.Shuffle(group);
        picked.insert(picked.end(), group.begin(), group.begin() + k);
      }
      return MakePlan(cycle_sentences, std::move(picked), strategy, ratio, cycle);
    }
    case Strategy::kAl: {
      if (model == nullptr) {
        throw ValidationError("active selection needs a trained entity model");
      }
      std::vector<double> scores(cycle_sentences.size());
      for (std::size_t i = 0; i < cycle_sentences.size(); ++i) {
        scores[i] = CombinedUncertainty(cycle_sentences[i], *model, rel_model, kind);
      }
      return SelectByScores(cycle_sentences, scores, ratio, cycle);
    }
  }
  return {};
}

nlohmann::ordered_json CurveConfig::ToJson() const {
  nlohmann::ordered_json j;
  j["cycle_size"] = cycle_size;
  j["ratio"] = ratio;
  j["uncertainty"] = UncertaintyName(uncertainty);
  j["relation"] = relation;
  j["relation_uncertainty"] = relation_uncertainty;
  j["ner"] = ner.ToJson();
  if (relation) j["rel"] = rel.ToJson();
  if (shuffle_seed) j["shuffle_seed"] = *shuffle_seed;
  return j;
}

CurveConfig CurveConfig::FromJson(const nlohmann::json &j) {
  CurveConfig c;
  c.cycle_size = j.value("cycle_size", c.cycle_size);
  c.ratio = j.value("ratio", c.ratio);
  if (j.contains("uncertainty")) {
    c.uncertainty = ParseUncertainty(j["uncertainty"].get<std::string>());
  }
  c.relation = j.value("relation", c.relation);
  c.relation_uncertainty = j.value("relation_uncertainty", c.relation_uncertainty);
  if (j.contains("ner")) c.ner = NerTrainConfig::FromJson(j["ner"]);
  if (j.contains("rel")) c.rel = RelTrainConfig::FromJson(j["rel"]);
  if (j.contains("shuffle_seed")) c.shuffle_seed = j["shuffle_seed"].get<std::uint64_t>();
  return c;
}

std::vector<CurvePoint> SimulateCurve(std::span<const AnnotatedSentence> pool,
                                      std::span<const AnnotatedSentence> dev,
                                      Strategy strategy,
                                      const CurveConfig &config,
                                      std::uint64_t seed) {
  if (dev.empty()) throw ValidationError("curve simulation needs a dev set");
  if (config.cycle_size < 1) throw ValidationError("cycle_size must be >= 1");
  if (strategy != Strategy::kFull) CheckRatio(config.ratio);
  if (config.relation_uncertainty && !config.relation) {
    throw ValidationError("relation uncertainty needs relation simulation");
  }

  auto groups = GroupByAbstract(pool);
  if (config.shuffle_seed) {
    Rng rng(*config.shuffle_seed);
    rng.Shuffle(groups);
  }

  std::vector<AnnotatedSentence> revealed;
  std::optional<CrfModel> model;
  std::optional<RelModel> rel_model;
  std::vector<CurvePoint> curve;
  long long cost = 0;
  int cycle = 0;
  for (std::size_t lo = 0; lo < groups.size();
       lo += static_cast<std::size_t>(config.cycle_size), ++cycle) {
    const std::size_t hi =
        std::min(groups.size(), lo + static_cast<std::size_t>(config.cycle_size));
    std::vector<AnnotatedSentence> cycle_sentences;
    for (std::size_t g = lo; g < hi; ++g) {
      for (std::size_t i : groups[g]) cycle_sentences.push_back(pool[i]);
    }
    const std::uint64_t select_seed =
        DeriveSeed(seed, kSelectSalt + static_cast<std::uint64_t>(cycle));
    Strategy effective = strategy;
    if (strategy == Strategy::kAl && !model) effective = Strategy::kRand;
    const SelectionPlan plan =
        Select(cycle_sentences, effective, config.ratio,
               model ? &*model : nullptr, select_seed, cycle, config.uncertainty,
               config.relation_uncertainty && rel_model ? &*rel_model : nullptr);

    std::size_t next = 0;
    for (const auto &ref : plan.chosen) {
      while (cycle_sentences[next].doc_id != ref.doc_id ||
             cycle_sentences[next].sent_index != ref.sent_index) {
        ++next;
      }
      revealed.push_back(cycle_sentences[next]);
    }
    cost += plan.cost_tokens;

    model = TrainNer(revealed, dev, config.ner, DeriveSeed(seed, kTrainSalt));
    CurvePoint point;
    point.strategy = strategy;
    point.seed = seed;
    point.cycle = cycle;
    point.cumulative_cost_tokens = cost;
    point.entity_dev_f1 =
        EvaluateEntities(dev, PredictCorpusEntities(*model, dev), Regime::kExact,
                         true)
            .f1;
    point.relation_dev_f1 = std::nan("");
    if (config.relation) {
      rel_model = TrainRel(revealed, dev, config.rel, DeriveSeed(seed, kRelTrainSalt));
      const auto preds = PredictCorpusRelations(*rel_model, dev, config.rel.threshold);
      std::vector<std::vector<Relation>> rels;
      for (const auto &p : preds) rels.push_back(ToRelations(p));
      point.relation_dev_f1 =
          EvaluateRelations(dev, std::span<const std::vector<Relation>>(rels), true)
              .f1;
    }
    curve.push_back(point);
  }
  return curve;
}

std::vector<CurvePoint> SimulateCurves(std::span<const AnnotatedSentence> pool,
                                       std::span<const AnnotatedSentence> dev,
                                       Strategy strategy,
                                       const CurveConfig &config,
                                       std::span<const std::uint64_t> seeds,
                                       int threads) {
  std::vector<std::vector<CurvePoint>> per_seed(seeds.size());
  ParallelFor(seeds.size(), threads, [&](std::size_t i) {
    per_seed[i] = SimulateCurve(pool, dev, strategy, config, seeds[i]);
  });
  std::vector<CurvePoint> out;
  for (auto &c : per_seed) out.insert(out.end(), c.begin(), c.end());
  return out;
}

std::optional<long long> CostToReach(std::span<const CurvePoint> curve,
                                     double target) {
  for (const auto &p : curve) {
    if (p.entity_dev_f1 >= target) return p.cumulative_cost_tokens;
  }
  return std::nullopt;
}

void WriteCurveCsv(std::ostream &out, std::span<const CurvePoint> points,
                   std::string_view provenance) {
  if (!provenance.empty()) out << "# " << provenance << "\n";
  out << "strategy,seed,cycle,cumulative_cost_tokens,entity_dev_f1,"
         "relation_dev_f1\n";
  for (const auto &p : points) {
    out << StrategyName(p.strategy) << ',' << p.seed << ',' << p.cycle << ','
        << p.cumulative_cost_tokens << ',' << FormatDouble(p.entity_dev_f1)
        << ',' << FormatDouble(p.relation_dev_f1) << '\n';
  }
}

void WriteWorklist(std::ostream &out, const SelectionPlan &plan,
                   std::span<const AnnotatedSentence> sentences) {
  std::map<SentenceRef, const AnnotatedSentence *> index;
  for (const auto &s : sentences) index[{s.doc_id, s.sent_index}] = &s;
  for (const auto &ref : plan.chosen) {
    auto it = index.find(ref);
    if (it == index.end()) {
      throw ValidationError("selected sentence (" + ref.doc_id + ", " +
                            std::to_string(ref.sent_index) + ") not in corpus");
    }
    const auto &tokens = it->second->tokens;
    nlohmann::ordered_json j;
    j["doc_id"] = ref.doc_id;
    j["sent_index"] = ref.sent_index;
    j["text"] = JoinTokens(tokens, 0, static_cast<int>(tokens.size()));
    out << j.dump() << "\n";
  }
}

}  // namespace sciex
