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

#include "sciex/relation.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

#include "sciex/corpus_io.h"
#include "sciex/errors.h"
#include "sciex/eval.h"
#include "sciex/log_math.h"
#include "sciex/parallel.h"

namespace sciex {

std::string RelationLabelName(int label) {
  if (label == kNoneLabel) return "NONE";
  return std::string(RelationTypeName(LabelType(label))) +
         (IsForwardLabel(label) ? "->" : "<-");
}

std::vector<std::string> RelationLabelNames() {
  std::vector<std::string> names;
  for (int l = 0; l < kNumRelationLabels; ++l) names.push_back(RelationLabelName(l));
  return names;
}

std::vector<std::pair<int, int>> CandidatePairs(int num_entities) {
  std::vector<std::pair<int, int>> pairs;
  for (int a = 0; a < num_entities; ++a) {
    for (int o = 0; o < num_entities; ++o) {
      if (a != o) pairs.emplace_back(a, o);
    }
  }
  return pairs;
}

std::vector<PairExample> LabelPairs(const AnnotatedSentence &sentence) {
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < sentence.entities.size(); ++i) {
    index.emplace(sentence.entities[i].id, static_cast<int>(i));
  }
  std::map<std::pair<int, int>, RelationType> gold;
  for (const auto &r : sentence.relations) {
    auto h = index.find(r.head);
    auto t = index.find(r.tail);
    if (h == index.end() || t == index.end()) {
      throw ValidationError("relation " + r.id + " in (" + sentence.doc_id +
                            ", " + std::to_string(sentence.sent_index) +
                            ") references an entity outside the sentence");
    }
    auto [it, inserted] = gold.emplace(std::pair{h->second, t->second}, r.type);
    if (!inserted && it->second != r.type) {
      throw ValidationError("entities " + r.head + " and " + r.tail + " in (" +
                            sentence.doc_id + ", " +
                            std::to_string(sentence.sent_index) +
                            ") carry two relation types");
    }
  }
  std::vector<PairExample> rows;
  for (const auto &[a, o] : CandidatePairs(static_cast<int>(sentence.entities.size()))) {
    bool any = false;
    if (auto it = gold.find({a, o}); it != gold.end()) {
      rows.push_back({a, o, ForwardLabel(it->second)});
      any = true;
    }
    if (auto it = gold.find({o, a}); it != gold.end()) {
      rows.push_back({a, o, BackwardLabel(it->second)});
      any = true;
    }
    if (!any) rows.push_back({a, o, kNoneLabel});
  }
  return rows;
}

nlohmann::ordered_json RelationPrediction::ToJson() const {
  nlohmann::ordered_json j;
  j["doc_id"] = doc_id;
  j["sent_index"] = sent_index;
  j["head"] = head;
  j["tail"] = tail;
  j["type"] = RelationTypeName(type);
  j["prob"] = prob;
  return j;
}

nlohmann::ordered_json RelTrainConfig::ToJson() const {
  nlohmann::ordered_json j;
  j["source"] = source.ToJson();
  j["step"] = adam.step;
  j["beta1"] = adam.beta1;
  j["beta2"] = adam.beta2;
  j["epsilon"] = adam.epsilon;
  j["batch_size"] = batch_size;
  j["max_epochs"] = max_epochs;
  j["patience"] = patience;
  j["none_ratio"] = none_ratio;
  j["use_mixer"] = use_mixer;
  j["threshold"] = threshold;
  return j;
}

RelTrainConfig RelTrainConfig::FromJson(const nlohmann::json &j) {
  RelTrainConfig c;
  if (j.contains("source")) c.source = SourceConfig::FromJson(j["source"]);
  c.adam.step = j.value("step", c.adam.step);
  c.adam.beta1 = j.value("beta1", c.adam.beta1);
  c.adam.beta2 = j.value("beta2", c.adam.beta2);
  c.adam.epsilon = j.value("epsilon", c.adam.epsilon);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.max_epochs = j.value("max_epochs", c.max_epochs);
  c.patience = j.value("patience", c.patience);
  c.none_ratio = j.value("none_ratio", c.none_ratio);
  c.use_mixer = j.value("use_mixer", c.use_mixer);
  c.threshold = j.value("threshold", c.threshold);
  return c;
}

// --- model -----------------------------------------------------------------

RelModel::RelModel(Representer representer, bool use_mixer, Rng &rng)
    : representer_(std::move(representer)),
      markers_(representer_.dim()),
      weights_("rel.weights", kNumRelationLabels, 4 * representer_.dim()),
      bias_("rel.bias", 1, kNumRelationLabels) {
  markers_.InitUniform(rng);
  if (use_mixer) mixer_.emplace(dim(), rng);
}

TokenMatrix RelModel::AnchorMatrix(const TokenMatrix &h,
                                   std::span<const MarkedEntity> entities,
                                   int anchor) const {
  TokenMatrix m = MarkerAugment(h, entities, entities[anchor].id, markers_);
  return mixer_ ? mixer_->Forward(m) : m;
}

std::vector<double> RelModel::PairFeatures(const TokenMatrix &m,
                                           const MarkedEntity &anchor,
                                           const MarkedEntity &other) const {
  const int d = dim();
  std::vector<double> x(4 * d);
  const int rows[4] = {anchor.span.begin, anchor.span.end - 1,
                       other.span.begin, other.span.end - 1};
  for (int part = 0; part < 4; ++part) {
    const auto src = m.row(rows[part]);
    std::copy(src.begin(), src.end(), x.begin() + part * d);
  }
  return x;
}

namespace {

std::vector<MarkedEntity> CheckedMarks(const AnnotatedSentence &sentence,
                                       std::span<const Entity> entities) {
  std::vector<MarkedEntity> marked = MarkEntities(sentence, entities);
  for (const auto &e : marked) {
    if (e.span.end <= e.span.begin) {
      throw ValidationError("entity " + e.id + " covers no token");
    }
  }
  return marked;
}

}  // namespace

AnchorScores RelModel::ScoreAnchor(const AnnotatedSentence &sentence,
                                   std::span<const Entity> entities,
                                   int anchor) const {
  const std::vector<MarkedEntity> marked = CheckedMarks(sentence, entities);
  const TokenMatrix h = representer_.Represent(sentence);
  const TokenMatrix m = AnchorMatrix(h, marked, anchor);
  AnchorScores scores;
  for (int o = 0; o < static_cast<int>(marked.size()); ++o) {
    if (o != anchor) scores.others.push_back(o);
  }
  scores.probs = Matrix(static_cast<int>(scores.others.size()), kNumRelationLabels);
  for (std::size_t i = 0; i < scores.others.size(); ++i) {
    const auto x = PairFeatures(m, marked[anchor], marked[scores.others[i]]);
    auto z = scores.probs.row(static_cast<int>(i));
    const auto b = bias_.value.row(0);
    std::copy(b.begin(), b.end(), z.begin());
    AddMatVec(weights_.value, x, z);
    SoftmaxInPlace(z);
  }
  return scores;
}

double RelModel::Loss(const AnnotatedSentence &sentence,
                      std::span<const Entity> entities,
                      std::span<const PairExample> rows) const {
  double loss = 0.0;
  std::map<int, AnchorScores> cache;
  for (const auto &row : rows) {
    auto it = cache.find(row.anchor);
    if (it == cache.end()) {
      it = cache.emplace(row.anchor, ScoreAnchor(sentence, entities, row.anchor)).first;
    }
    const auto &others = it->second.others;
    const int i = static_cast<int>(
        std::lower_bound(others.begin(), others.end(), row.other) - others.begin());
    loss -= std::log(it->second.probs(i, row.label));
  }
  return loss;
}

double RelModel::AccumulateGradient(const AnnotatedSentence &sentence,
                                    std::span<const Entity> entities,
                                    std::span<const PairExample> rows,
                                    double scale) {
  if (rows.empty()) return 0.0;
  const int d = dim();
  const std::vector<MarkedEntity> marked = CheckedMarks(sentence, entities);
  const TokenMatrix h = representer_.Represent(sentence);
  TokenMatrix grad_h(h.rows(), d);

  std::vector<int> anchors;
  for (const auto &r : rows) anchors.push_back(r.anchor);
  std::sort(anchors.begin(), anchors.end());
  anchors.erase(std::unique(anchors.begin(), anchors.end()), anchors.end());

  double loss = 0.0;
  std::vector<double> z(kNumRelationLabels);
  std::vector<double> dx(4 * d);
  for (int anchor : anchors) {
    const std::string &anchor_id = marked[anchor].id;
    const TokenMatrix augmented = MarkerAugment(h, marked, anchor_id, markers_);
    const TokenMatrix mixed = mixer_ ? mixer_->Forward(augmented) : TokenMatrix();
    const TokenMatrix &m = mixer_ ? mixed : augmented;
    TokenMatrix grad_m(m.rows(), d);
    for (const auto &row : rows) {
      if (row.anchor != anchor) continue;
      const auto x = PairFeatures(m, marked[anchor], marked[row.other]);
      const auto b = bias_.value.row(0);
      std::copy(b.begin(), b.end(), z.begin());
      AddMatVec(weights_.value, x, z);
      SoftmaxInPlace(z);
      loss -= std::log(z[row.label]);
      z[row.label] -= 1.0;
      for (double &v : z) v *= scale;
      AddOuter(z, x, 1.0, weights_.grad);
      for (int l = 0; l < kNumRelationLabels; ++l) bias_.grad(0, l) += z[l];
      std::fill(dx.begin(), dx.end(), 0.0);
      AddMatTVec(weights_.value, z, dx);
      const int targets[4] = {marked[anchor].span.begin,
                              marked[anchor].span.end - 1,
                              marked[row.other].span.begin,
                              marked[row.other].span.end - 1};
      for (int part = 0; part < 4; ++part) {
        auto g = grad_m.row(targets[part]);
        for (int j = 0; j < d; ++j) g[j] += dx[part * d + j];
      }
    }
    const TokenMatrix grad_aug =
        mixer_ ? mixer_->Backward(augmented, mixed, grad_m) : grad_m;
    MarkerBackward(grad_aug, marked, anchor_id, markers_);
    if (representer_.trainable()) {
      for (int i = 0; i < h.rows(); ++i) {
        auto dst = grad_h.row(i);
        const auto src = grad_aug.row(i);
        for (int j = 0; j < d; ++j) dst[j] += src[j];
      }
    }
  }
  if (representer_.trainable()) representer_.Backward(sentence, grad_h);
  return loss;
}

std::vector<Parameter *> RelModel::Parameters() {
  std::vector<Parameter *> params = {&weights_, &bias_,
                                     &markers_.type_embeddings(),
                                     &markers_.anchor_embedding()};
  if (mixer_) {
    for (Parameter *p : mixer_->Parameters()) params.push_back(p);
  }
  for (Parameter *p : representer_.Parameters()) params.push_back(p);
  return params;
}

void RelModel::ZeroGrad() {
  for (Parameter *p : Parameters()) p->ZeroGrad();
}

nlohmann::ordered_json RelModel::ToJson() const {
  nlohmann::ordered_json j;
  j["format"] = "rel-v1";
  j["tool_version"] = kToolVersion;
  j["dim"] = dim();
  j["label_space"] = RelationLabelNames();
  j["source_config"] = representer_.config().ToJson();
  if (representer_.trainable()) j["representer"] = representer_.ToJson();
  j["W"] = MatrixToJson(weights_.value);
  j["b"] = MatrixToJson(bias_.value);
  j["marker_table"] = markers_.ToJson();
  j["mixer"] = mixer_ ? mixer_->ToJson() : nlohmann::ordered_json();
  j["training_config"] = SortedKeys(training_config);
  j["seed"] = seed;
  return j;
}

RelModel RelModel::FromJson(const nlohmann::json &j) {
  if (j.value("format", "") != "rel-v1") {
    throw ValidationError("not a rel-v1 model file");
  }
  if (j.at("label_space").get<std::vector<std::string>>() != RelationLabelNames()) {
    throw ValidationError("model label space differs from this build's");
  }
  RelModel m;
  const SourceConfig source = SourceConfig::FromJson(j.at("source_config"));
  m.representer_ = j.contains("representer")
                       ? Representer::FromJson(j["representer"])
                       : Representer::FromJson(source.ToJson());
  const int d = j.at("dim").get<int>();
  if (m.representer_.dim() != d) {
    throw ValidationError("model dim " + std::to_string(d) +
                          " differs from its representation source dim " +
                          std::to_string(m.representer_.dim()));
  }
  m.markers_ = MarkerTable::FromJson(j.at("marker_table"));
  m.weights_ = Parameter("rel.weights", kNumRelationLabels, 4 * d);
  m.bias_ = Parameter("rel.bias", 1, kNumRelationLabels);
  m.weights_.value = MatrixFromJson(j.at("W"), kNumRelationLabels, 4 * d);
  m.bias_.value = MatrixFromJson(j.at("b"), 1, kNumRelationLabels);
  if (j.contains("mixer") && !j["mixer"].is_null()) {
    m.mixer_ = WindowMixer::FromJson(j["mixer"]);
  }
  m.training_config = j.value("training_config", nlohmann::ordered_json());
  m.seed = j.value("seed", std::uint64_t{0});
  return m;
}

void RelModel::Save(const std::filesystem::path &path) const {
  WriteFile(path, ToJson().dump() + "\n");
}

RelModel RelModel::Load(const std::filesystem::path &path) {
  const std::string text = ReadFile(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw FormatError(e.byte, path.string() + ": " + e.what());
  }
  return FromJson(j);
}

// --- decoding --------------------------------------------------------------

std::vector<RelationPrediction> PredictRelations(
    const AnnotatedSentence &sentence, std::span<const Entity> entities,
    const RelModel &model, double threshold) {
  const int n = static_cast<int>(entities.size());
  std::vector<RelationPrediction> out;
  if (n < 2) return out;
  std::vector<AnchorScores> passes;
  passes.reserve(n);
  for (int a = 0; a < n; ++a) passes.push_back(model.ScoreAnchor(sentence, entities, a));
  // Row of `other` in the pass of `anchor`.
  auto row_of = [](int anchor, int other) { return other < anchor ? other : other - 1; };

  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      struct Candidate {
        double prob;
        const std::string *head;
        int label;
        int head_index, tail_index;
        double none;
      };
      std::optional<Candidate> best;
      for (const auto &[anchor, other] : {std::pair{a, b}, std::pair{b, a}}) {
        const auto probs = passes[anchor].probs.row(row_of(anchor, other));
        for (int l = 1; l < kNumRelationLabels; ++l) {
          const bool forward = IsForwardLabel(l);
          const int head = forward ? anchor : other;
          const int tail = forward ? other : anchor;
          Candidate c{probs[l], &entities[head].id, l, head, tail, probs[kNoneLabel]};
          const bool better =
              !best || c.prob > best->prob ||
              (c.prob == best->prob &&
               std::tie(*c.head, c.label) < std::tie(*best->head, best->label));
          if (better) best = c;
        }
      }
      if (best && best->prob >= threshold && best->prob > best->none) {
        RelationPrediction p;
        p.doc_id = sentence.doc_id;
        p.sent_index = sentence.sent_index;
        p.head = entities[best->head_index].id;
        p.tail = entities[best->tail_index].id;
        p.type = LabelType(best->label);
        p.prob = best->prob;
        out.push_back(std::move(p));
      }
    }
  }
  return out;
}

std::vector<std::vector<RelationPrediction>> PredictCorpusRelations(
    const RelModel &model, std::span<const AnnotatedSentence> sentences,
    double threshold, int threads) {
  std::vector<std::vector<RelationPrediction>> out(sentences.size());
  ParallelFor(sentences.size(), threads, [&](std::size_t i) {
    out[i] = PredictRelations(sentences[i], sentences[i].entities, model, threshold);
  });
  return out;
}

std::vector<Relation> ToRelations(std::span<const RelationPrediction> preds) {
  std::vector<Relation> out;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    out.push_back({"R" + std::to_string(i + 1), preds[i].type, preds[i].head,
                   preds[i].tail});
  }
  return out;
}

// --- training --------------------------------------------------------------

namespace {

double DevRelationF1(const RelModel &model,
                     std::span<const AnnotatedSentence> dev, double threshold) {
  const auto preds = PredictCorpusRelations(model, dev, threshold);
  std::vector<std::vector<Relation>> rels;
  rels.reserve(preds.size());
  for (const auto &p : preds) rels.push_back(ToRelations(p));
  return EvaluateRelations(dev, std::span<const std::vector<Relation>>(rels), true).f1;
}

}  // namespace

RelModel TrainRel(std::span<const AnnotatedSentence> train,
                  std::span<const AnnotatedSentence> dev,
                  const RelTrainConfig &config, std::uint64_t seed,
                  RelTrainLog *log) {
  if (train.empty()) throw ValidationError("training set is empty");
  Rng init_rng(DeriveSeed(seed, 1));
  Rng order_rng(DeriveSeed(seed, 2));
  Rng sample_rng(DeriveSeed(seed, 3));
  Representer representer = Representer::Create(config.source, train, init_rng);
  RelModel model(std::move(representer), config.use_mixer, init_rng);
  model.training_config = config.ToJson();
  model.seed = seed;

  std::vector<std::vector<PairExample>> rows(train.size());
  std::vector<std::pair<std::size_t, std::size_t>> positives, negatives;
  for (std::size_t s = 0; s < train.size(); ++s) {
    rows[s] = LabelPairs(train[s]);
    for (std::size_t r = 0; r < rows[s].size(); ++r) {
      (rows[s][r].label == kNoneLabel ? negatives : positives).emplace_back(s, r);
    }
  }
  if (positives.empty() && negatives.empty()) {
    throw ValidationError("training set has no entity pairs");
  }

  Adam adam(config.adam, model.Parameters());
  model.ZeroGrad();
  std::optional<RelModel> best;
  double best_f1 = -1.0;
  int best_epoch = 0;
  int stale = 0;
  if (log != nullptr) log->epochs.clear();
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    // Per-epoch NONE subsample.
    std::vector<std::pair<std::size_t, std::size_t>> kept_none = negatives;
    if (config.none_ratio > 0 && !positives.empty()) {
      const auto keep = static_cast<std::size_t>(
          std::ceil(config.none_ratio * static_cast<double>(positives.size())));
      if (keep < kept_none.size()) {
        sample_rng.Shuffle(kept_none);
        kept_none.resize(keep);
        std::sort(kept_none.begin(), kept_none.end());
      }
    }
    std::vector<std::vector<PairExample>> epoch_rows(train.size());
    for (const auto &[s, r] : positives) epoch_rows[s].push_back(rows[s][r]);
    for (const auto &[s, r] : kept_none) epoch_rows[s].push_back(rows[s][r]);
    std::vector<std::size_t> order;
    for (std::size_t s = 0; s < train.size(); ++s) {
      if (!epoch_rows[s].empty()) order.push_back(s);
    }
    const std::size_t batch = config.batch_size <= 0
                                  ? order.size()
                                  : static_cast<std::size_t>(config.batch_size);
    if (batch < order.size()) order_rng.Shuffle(order);

    double epoch_loss = 0.0;
    for (std::size_t lo = 0; lo < order.size(); lo += batch) {
      const std::size_t hi = std::min(order.size(), lo + batch);
      std::size_t count = 0;
      for (std::size_t b = lo; b < hi; ++b) count += epoch_rows[order[b]].size();
      const double scale = 1.0 / static_cast<double>(count);
      for (std::size_t b = lo; b < hi; ++b) {
        const std::size_t s = order[b];
        epoch_loss += model.AccumulateGradient(train[s], train[s].entities,
                                               epoch_rows[s], scale);
      }
      adam.Step();
    }
    RelEpochLog entry{epoch, epoch_loss, std::nan("")};
    if (!dev.empty()) entry.dev_f1 = DevRelationF1(model, dev, config.threshold);
    if (log != nullptr) log->epochs.push_back(entry);
    if (dev.empty()) {
      best_epoch = epoch;
      continue;
    }
    if (entry.dev_f1 > best_f1) {
      best_f1 = entry.dev_f1;
      best_epoch = epoch;
      best = model;
      stale = 0;
    } else if (++stale >= config.patience) {
      break;
    }
  }
  if (log != nullptr) log->best_epoch = best_epoch;
  return best ? *std::move(best) : model;
}

}  // namespace sciex
