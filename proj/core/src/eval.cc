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

#include "sciex/eval.h"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "sciex/errors.h"
#include "sciex/utf8.h"

namespace sciex {
namespace {

double SafeRatio(long long num, long long den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double Harmonic(double p, double r) {
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

int Overlap(const Entity &a, const Entity &b) {
  return std::max(0, std::min(a.end, b.end) - std::max(a.start, b.start));
}

std::string TypeKey(EntityType type) { return std::string(EntityTypeName(type)); }

}  // namespace

std::string_view CategoryName(Category category) {
  switch (category) {
    case Category::kCor:
      return "COR";
    case Category::kInc:
      return "INC";
    case Category::kPar:
      return "PAR";
    case Category::kMis:
      return "MIS";
    case Category::kSpu:
      return "SPU";
  }
  return "";
}

std::string_view RegimeName(Regime regime) {
  switch (regime) {
    case Regime::kExact:
      return "exact";
    case Regime::kRelaxed:
      return "relaxed";
    case Regime::kOverlap:
      return "overlap";
  }
  return "";
}

Regime ParseRegime(std::string_view name) {
  if (name == "exact") return Regime::kExact;
  if (name == "relaxed") return Regime::kRelaxed;
  if (name == "overlap") return Regime::kOverlap;
  throw ValidationError("unknown regime '" + std::string(name) +
                        "' (expected exact, relaxed or overlap)");
}

ErrorAssignment ClassifyErrors(std::span<const Entity> gold,
                               std::span<const Entity> pred, bool labeled) {
  const int ng = static_cast<int>(gold.size());
  const int np = static_cast<int>(pred.size());
  for (int a = 0; a < ng; ++a) {
    for (int b = a + 1; b < ng; ++b) {
      if (Overlap(gold[a], gold[b]) > 0) {
        throw ValidationError("gold entities " + gold[a].id + " and " +
                              gold[b].id + " overlap");
      }
    }
  }
  auto same_type = [&](int g, int p) {
    return !labeled || gold[g].type == pred[p].type;
  };
  auto same_span = [&](int g, int p) {
    return gold[g].start == pred[p].start && gold[g].end == pred[p].end;
  };

  std::vector<bool> gold_used(ng, false), pred_used(np, false);
  ErrorAssignment out;
  // Pass 1 and 2: exact spans, with and without type agreement.
  for (int pass = 0; pass < 2; ++pass) {
    for (int g = 0; g < ng; ++g) {
      if (gold_used[g]) continue;
      for (int p = 0; p < np; ++p) {
        if (pred_used[p] || !same_span(g, p)) continue;
        if (pass == 0 && !same_type(g, p)) continue;
        out.pairs.push_back({g, p, pass == 0 ? Category::kCor : Category::kInc});
        gold_used[g] = pred_used[p] = true;
        break;
      }
    }
  }
  // Pass 3: greedy overlap pairing.
  std::vector<std::tuple<int, int, int, int, int>> candidates;
  for (int g = 0; g < ng; ++g) {
    if (gold_used[g]) continue;
    for (int p = 0; p < np; ++p) {
      if (pred_used[p]) continue;
      const int overlap = Overlap(gold[g], pred[p]);
      if (overlap > 0) {
        candidates.emplace_back(-overlap, gold[g].start, pred[p].start, g, p);
      }
    }
  }
  std::sort(candidates.begin(), candidates.end());
  for (const auto &[neg, gs, ps, g, p] : candidates) {
    if (gold_used[g] || pred_used[p]) continue;
    out.pairs.push_back({g, p, Category::kPar});
    gold_used[g] = pred_used[p] = true;
  }
  for (int g = 0; g < ng; ++g) {
    if (!gold_used[g]) out.pairs.push_back({g, std::nullopt, Category::kMis});
  }
  for (int p = 0; p < np; ++p) {
    if (!pred_used[p]) out.pairs.push_back({std::nullopt, p, Category::kSpu});
  }
  return out;
}

bool SurfaceContains(std::string_view a, std::string_view b) {
  const std::string ca = CollapseWhitespace(a);
  const std::string cb = CollapseWhitespace(b);
  return ca.find(cb) != std::string::npos || cb.find(ca) != std::string::npos;
}

ErrorAssignment RelaxedCorrect(const ErrorAssignment &assignment,
                               std::span<const Entity> gold,
                               std::span<const Entity> pred, Regime regime) {
  ErrorAssignment out = assignment;
  if (regime == Regime::kExact) return out;
  for (auto &pair : out.pairs) {
    if (pair.category != Category::kPar) continue;
    const Entity &g = gold[*pair.gold];
    const Entity &p = pred[*pair.pred];
    if (g.type != p.type) continue;
    if (regime == Regime::kOverlap || SurfaceContains(g.surface, p.surface)) {
      pair.category = Category::kCor;
    }
  }
  return out;
}

void Counts::Add(Category category) {
  switch (category) {
    case Category::kCor:
      ++cor;
      break;
    case Category::kInc:
      ++inc;
      break;
    case Category::kPar:
      ++par;
      break;
    case Category::kMis:
      ++mis;
      break;
    case Category::kSpu:
      ++spu;
      break;
  }
}

Counts &Counts::operator+=(const Counts &o) {
  cor += o.cor;
  inc += o.inc;
  par += o.par;
  mis += o.mis;
  spu += o.spu;
  return *this;
}

double Counts::Precision() const { return SafeRatio(cor, cor + inc + spu); }
double Counts::Recall() const { return SafeRatio(cor, cor + par + mis); }
double Counts::F1() const { return Harmonic(Precision(), Recall()); }

Counts CountCategories(const ErrorAssignment &assignment) {
  Counts c;
  for (const auto &pair : assignment.pairs) c.Add(pair.category);
  return c;
}

namespace {

void Finish(EvalReport &report) {
  report.precision = report.counts.Precision();
  report.recall = report.counts.Recall();
  report.f1 = report.counts.F1();
}

void Accumulate(std::span<const Entity> gold, std::span<const Entity> pred,
                Regime regime, bool labeled, EvalReport &report) {
  const ErrorAssignment exact = ClassifyErrors(gold, pred, labeled);
  ErrorAssignment final = RelaxedCorrect(exact, gold, pred, regime);
  // Unlabeled scoring drops the type condition.
  if (!labeled && regime != Regime::kExact) {
    for (auto &pair : final.pairs) {
      if (pair.category != Category::kPar) continue;
      if (regime == Regime::kOverlap ||
          SurfaceContains(gold[*pair.gold].surface, pred[*pair.pred].surface)) {
        pair.category = Category::kCor;
      }
    }
  }
  for (const auto &pair : final.pairs) {
    report.counts.Add(pair.category);
    const bool by_gold = pair.category == Category::kCor ||
                         pair.category == Category::kPar ||
                         pair.category == Category::kMis;
    const EntityType type = by_gold ? gold[*pair.gold].type : pred[*pair.pred].type;
    report.per_type[TypeKey(type)].Add(pair.category);
  }
}

}  // namespace

EvalReport EntityPrf(std::span<const Entity> gold, std::span<const Entity> pred,
                     Regime regime, bool labeled) {
  EvalReport report;
  report.regime = regime;
  report.labeled = labeled;
  Accumulate(gold, pred, regime, labeled, report);
  Finish(report);
  return report;
}

EvalReport EvaluateEntities(std::span<const AnnotatedSentence> gold,
                            std::span<const std::vector<Entity>> pred,
                            Regime regime, bool labeled) {
  if (gold.size() != pred.size()) {
    throw ValidationError("prediction list has " + std::to_string(pred.size()) +
                          " sentences, gold has " + std::to_string(gold.size()));
  }
  EvalReport report;
  report.regime = regime;
  report.labeled = labeled;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    Accumulate(gold[i].entities, pred[i], regime, labeled, report);
  }
  Finish(report);
  return report;
}

namespace {

std::string SentenceKey(const AnnotatedSentence &s) {
  return s.doc_id + '\x1f' + std::to_string(s.sent_index);
}

template <typename T, typename Get>
std::vector<std::vector<T>> AlignPredictions(
    std::span<const AnnotatedSentence> gold,
    std::span<const AnnotatedSentence> pred, Get get) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    index.emplace(SentenceKey(gold[i]), i);
  }
  std::vector<std::vector<T>> aligned(gold.size());
  for (const auto &p : pred) {
    auto it = index.find(SentenceKey(p));
    if (it == index.end()) {
      throw ValidationError("predicted sentence (" + p.doc_id + ", " +
                            std::to_string(p.sent_index) +
                            ") is not in the gold corpus");
    }
    const auto &items = get(p);
    aligned[it->second].insert(aligned[it->second].end(), items.begin(),
                               items.end());
  }
  return aligned;
}

}  // namespace

EvalReport EvaluateEntities(std::span<const AnnotatedSentence> gold,
                            std::span<const AnnotatedSentence> pred,
                            Regime regime, bool labeled) {
  const auto aligned = AlignPredictions<Entity>(
      gold, pred,
      [](const AnnotatedSentence &s) -> const std::vector<Entity> & {
        return s.entities;
      });
  return EvaluateEntities(gold, std::span<const std::vector<Entity>>(aligned),
                          regime, labeled);
}

nlohmann::ordered_json EvalReport::ToJson() const {
  auto counts_json = [](const Counts &c) {
    nlohmann::ordered_json j;
    j["COR"] = c.cor;
    j["INC"] = c.inc;
    j["PAR"] = c.par;
    j["MIS"] = c.mis;
    j["SPU"] = c.spu;
    return j;
  };
  nlohmann::ordered_json j;
  j["regime"] = RegimeName(regime);
  j["labeled"] = labeled;
  j["counts"] = counts_json(counts);
  j["precision"] = precision;
  j["recall"] = recall;
  j["f1"] = f1;
  j["per_type"] = nlohmann::ordered_json::array();
  for (const auto &[type, c] : per_type) {
    nlohmann::ordered_json row;
    row["type"] = type;
    row["counts"] = counts_json(c);
    row["precision"] = c.Precision();
    row["recall"] = c.Recall();
    row["f1"] = c.F1();
    row["support"] = c.gold();
    j["per_type"].push_back(std::move(row));
  }
  return j;
}

// --- relations -------------------------------------------------------------

RelationCounts &RelationCounts::operator+=(const RelationCounts &o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  return *this;
}

double RelationCounts::Precision() const { return SafeRatio(tp, tp + fp); }
double RelationCounts::Recall() const { return SafeRatio(tp, tp + fn); }
double RelationCounts::F1() const { return Harmonic(Precision(), Recall()); }

namespace {

void AccumulateRelations(std::span<const Relation> gold,
                         std::span<const Relation> pred,
                         const std::set<std::string> &ids, bool labeled,
                         RelationReport &report) {
  auto check = [&](const Relation &r, const char *side) {
    for (const std::string *id : {&r.head, &r.tail}) {
      if (!ids.contains(*id)) {
        throw ValidationError(std::string(side) + " relation " + r.id +
                              " references unknown entity " + *id);
      }
    }
  };
  using Key = std::tuple<std::string, std::string, int>;
  auto key = [&](const Relation &r) {
    return Key{r.head, r.tail, labeled ? static_cast<int>(r.type) : -1};
  };
  // Multisets so that duplicate predictions count as false positives.
  std::multiset<Key> gold_keys;
  for (const auto &r : gold) {
    check(r, "gold");
    gold_keys.insert(key(r));
  }
  std::multiset<Key> matched;
  for (const auto &r : pred) {
    check(r, "predicted");
    const Key k = key(r);
    const std::string type(RelationTypeName(r.type));
    if (matched.count(k) < gold_keys.count(k)) {
      matched.insert(k);
      ++report.counts.tp;
      ++report.per_type[type].tp;
    } else {
      ++report.counts.fp;
      ++report.per_type[type].fp;
    }
  }
  std::multiset<Key> seen;
  for (const auto &r : gold) {
    const Key k = key(r);
    seen.insert(k);
    if (seen.count(k) > matched.count(k)) {
      ++report.counts.fn;
      ++report.per_type[std::string(RelationTypeName(r.type))].fn;
    }
  }
}

void Finish(RelationReport &report) {
  report.precision = report.counts.Precision();
  report.recall = report.counts.Recall();
  report.f1 = report.counts.F1();
}

}  // namespace

RelationReport RelationPrf(std::span<const Relation> gold,
                           std::span<const Relation> pred,
                           std::span<const std::string> entity_ids,
                           bool labeled) {
  RelationReport report;
  report.labeled = labeled;
  const std::set<std::string> ids(entity_ids.begin(), entity_ids.end());
  AccumulateRelations(gold, pred, ids, labeled, report);
  Finish(report);
  return report;
}

RelationReport EvaluateRelations(std::span<const AnnotatedSentence> gold,
                                 std::span<const std::vector<Relation>> pred,
                                 bool labeled) {
  if (gold.size() != pred.size()) {
    throw ValidationError("prediction list has " + std::to_string(pred.size()) +
                          " sentences, gold has " + std::to_string(gold.size()));
  }
  RelationReport report;
  report.labeled = labeled;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    std::set<std::string> ids;
    for (const auto &e : gold[i].entities) ids.insert(e.id);
    AccumulateRelations(gold[i].relations, pred[i], ids, labeled, report);
  }
  Finish(report);
  return report;
}

RelationReport EvaluateRelations(std::span<const AnnotatedSentence> gold,
                                 std::span<const AnnotatedSentence> pred,
                                 bool labeled) {
  const auto aligned = AlignPredictions<Relation>(
      gold, pred,
      [](const AnnotatedSentence &s) -> const std::vector<Relation> & {
        return s.relations;
      });
  return EvaluateRelations(gold, std::span<const std::vector<Relation>>(aligned),
                           labeled);
}

nlohmann::ordered_json RelationReport::ToJson() const {
  auto counts_json = [](const RelationCounts &c) {
    nlohmann::ordered_json j;
    j["TP"] = c.tp;
    j["FP"] = c.fp;
    j["FN"] = c.fn;
    return j;
  };
  nlohmann::ordered_json j;
  j["labeled"] = labeled;
  j["counts"] = counts_json(counts);
  j["precision"] = precision;
  j["recall"] = recall;
  j["f1"] = f1;
  j["per_type"] = nlohmann::ordered_json::array();
  for (const auto &[type, c] : per_type) {
    nlohmann::ordered_json row;
    row["type"] = type;
    row["counts"] = counts_json(c);
    row["precision"] = c.Precision();
    row["recall"] = c.Recall();
    row["f1"] = c.F1();
    row["support"] = c.tp + c.fn;
    j["per_type"].push_back(std::move(row));
  }
  return j;
}

// --- breakdown -------------------------------------------------------------

std::vector<BreakdownRow> BreakdownByType(
    const std::map<std::string, double> &f1_by_type,
    const std::map<std::string, int> &test_counts,
    const std::map<std::string, int> &dev_counts,
    const std::map<std::string, int> &train_counts, int min_count) {
  std::set<std::string> types;
  for (const auto *m : {&test_counts, &dev_counts, &train_counts}) {
    for (const auto &[type, n] : *m) types.insert(type);
  }
  for (const auto &[type, f1] : f1_by_type) types.insert(type);
  auto get = [](const std::map<std::string, int> &m, const std::string &t) {
    auto it = m.find(t);
    return it == m.end() ? 0 : it->second;
  };
  std::vector<BreakdownRow> rows;
  for (const auto &type : types) {
    BreakdownRow row;
    row.type = type;
    auto it = f1_by_type.find(type);
    row.f1 = it == f1_by_type.end() ? 0.0 : it->second;
    row.test = get(test_counts, type);
    row.dev = get(dev_counts, type);
    row.train = get(train_counts, type);
    if (row.total() >= min_count) rows.push_back(std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const BreakdownRow &a, const BreakdownRow &b) {
                     if (a.f1 != b.f1) return a.f1 > b.f1;
                     return a.type < b.type;
                   });
  return rows;
}

std::map<std::string, double> F1ByType(const EvalReport &report) {
  std::map<std::string, double> out;
  for (const auto &[type, c] : report.per_type) out[type] = c.F1();
  return out;
}

std::map<std::string, double> F1ByType(const RelationReport &report) {
  std::map<std::string, double> out;
  for (const auto &[type, c] : report.per_type) out[type] = c.F1();
  return out;
}

std::string FormatBreakdown(std::span<const BreakdownRow> rows) {
  std::size_t width = 4;
  for (const auto &r : rows) width = std::max(width, r.type.size());
  std::ostringstream out;
  char buf[64];
  out << "type" << std::string(width - 4 + 2, ' ') << "   F1%  Test, Dev, Train\n";
  for (const auto &r : rows) {
    std::snprintf(buf, sizeof(buf), "%6.2f", 100.0 * r.f1);
    out << r.type << std::string(width - r.type.size() + 2, ' ') << buf << "  "
        << r.test << ", " << r.dev << ", " << r.train << "\n";
  }
  return out.str();
}

nlohmann::ordered_json BreakdownToJson(std::span<const BreakdownRow> rows) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto &r : rows) {
    j.push_back({{"type", r.type},
                 {"f1", r.f1},
                 {"test", r.test},
                 {"dev", r.dev},
                 {"train", r.train}});
  }
  return j;
}

}  // namespace sciex
