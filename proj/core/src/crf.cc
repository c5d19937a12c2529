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

#include "sciex/crf.h"

#include <cmath>
#include <numeric>

#include "sciex/corpus_io.h"
#include "sciex/errors.h"
#include "sciex/eval.h"
#include "sciex/log_math.h"
#include "sciex/parallel.h"

namespace sciex {
namespace {

// Forward and backward tables in log space.
struct ForwardBackward {
  Matrix alpha;
  Matrix beta;
  double log_z = kNegInf;
};

Matrix Forward(const Lattice &lattice) {
  const int n = lattice.size();
  const int k = lattice.num_tags();
  const ChainScores &chain = *lattice.chain;
  Matrix alpha(n, k, kNegInf);
  for (int y = 0; y < k; ++y) {
    alpha(0, y) = chain.begin[y] + lattice.emissions(0, y);
  }
  std::vector<double> terms(k);
  for (int i = 1; i < n; ++i) {
    for (int y = 0; y < k; ++y) {
      for (int x = 0; x < k; ++x) {
        terms[x] = alpha(i - 1, x) + chain.transitions(x, y);
      }
      alpha(i, y) = LogSumExp(terms) + lattice.emissions(i, y);
    }
  }
  return alpha;
}

double FinalLogSum(const Lattice &lattice, const Matrix &alpha) {
  const int k = lattice.num_tags();
  std::vector<double> terms(k);
  for (int y = 0; y < k; ++y) {
    terms[y] = alpha(lattice.size() - 1, y) + lattice.chain->end[y];
  }
  return LogSumExp(terms);
}

ForwardBackward RunForwardBackward(const Lattice &lattice) {
  const int n = lattice.size();
  const int k = lattice.num_tags();
  const ChainScores &chain = *lattice.chain;
  ForwardBackward fb;
  fb.alpha = Forward(lattice);
  fb.log_z = FinalLogSum(lattice, fb.alpha);
  fb.beta = Matrix(n, k, kNegInf);
  for (int y = 0; y < k; ++y) fb.beta(n - 1, y) = chain.end[y];
  std::vector<double> terms(k);
  for (int i = n - 2; i >= 0; --i) {
    for (int x = 0; x < k; ++x) {
      for (int y = 0; y < k; ++y) {
        terms[y] = chain.transitions(x, y) + lattice.emissions(i + 1, y) +
                   fb.beta(i + 1, y);
      }
      fb.beta(i, x) = LogSumExp(terms);
    }
  }
  return fb;
}

void CheckLattice(const Lattice &lattice) {
  if (lattice.size() < 1) throw ValidationError("lattice has no positions");
  if (lattice.chain == nullptr ||
      lattice.chain->num_tags() != lattice.num_tags()) {
    throw ValidationError("lattice emissions and chain scores disagree on tags");
  }
}

}  // namespace

ChainScores MakeChainScores(const Tagset &tagset, const Matrix &transitions,
                            std::span<const double> begin,
                            std::span<const double> end, bool mask,
                            bool boundary) {
  const int k = tagset.size();
  ChainScores chain;
  chain.transitions = transitions;
  chain.begin.assign(k, 0.0);
  chain.end.assign(k, 0.0);
  for (int y = 0; y < k; ++y) {
    if (boundary) {
      chain.begin[y] = begin[y];
      chain.end[y] = end[y];
    }
    if (mask && !tagset.StartAllowed(y)) chain.begin[y] = kNegInf;
    for (int x = 0; mask && x < k; ++x) {
      if (!tagset.TransitionAllowed(x, y)) chain.transitions(x, y) = kNegInf;
    }
  }
  return chain;
}

double SequenceScore(const Lattice &lattice, std::span<const int> tags) {
  CheckLattice(lattice);
  if (static_cast<int>(tags.size()) != lattice.size()) {
    throw ValidationError("tag sequence length " + std::to_string(tags.size()) +
                          " differs from lattice length " +
                          std::to_string(lattice.size()));
  }
  const ChainScores &chain = *lattice.chain;
  double score = chain.begin[tags[0]] + chain.end[tags.back()];
  for (int i = 0; i < lattice.size(); ++i) {
    score += lattice.emissions(i, tags[i]);
    if (i > 0) score += chain.transitions(tags[i - 1], tags[i]);
  }
  return score;
}

double LogPartition(const Lattice &lattice) {
  CheckLattice(lattice);
  return FinalLogSum(lattice, Forward(lattice));
}

TagSequence Viterbi(const Lattice &lattice) {
  CheckLattice(lattice);
  const int n = lattice.size();
  const int k = lattice.num_tags();
  const ChainScores &chain = *lattice.chain;
  Matrix delta(n, k, kNegInf);
  std::vector<int> back(static_cast<std::size_t>(n) * k, 0);
  for (int y = 0; y < k; ++y) delta(0, y) = chain.begin[y] + lattice.emissions(0, y);
  for (int i = 1; i < n; ++i) {
    for (int y = 0; y < k; ++y) {
      double best = kNegInf;
      int arg = 0;
      for (int x = 0; x < k; ++x) {
        const double s = delta(i - 1, x) + chain.transitions(x, y);
        if (s > best) {
          best = s;
          arg = x;
        }
      }
      delta(i, y) = best + lattice.emissions(i, y);
      back[static_cast<std::size_t>(i) * k + y] = arg;
    }
  }
  double best = kNegInf;
  int arg = 0;
  for (int y = 0; y < k; ++y) {
    const double s = delta(n - 1, y) + chain.end[y];
    if (s > best) {
      best = s;
      arg = y;
    }
  }
  TagSequence tags(n);
  tags[n - 1] = arg;
  for (int i = n - 1; i > 0; --i) {
    tags[i - 1] = back[static_cast<std::size_t>(i) * k + tags[i]];
  }
  return tags;
}

Matrix Marginals(const Lattice &lattice) {
  CheckLattice(lattice);
  const ForwardBackward fb = RunForwardBackward(lattice);
  Matrix p(lattice.size(), lattice.num_tags());
  for (int i = 0; i < lattice.size(); ++i) {
    for (int y = 0; y < lattice.num_tags(); ++y) {
      p(i, y) = std::exp(fb.alpha(i, y) + fb.beta(i, y) - fb.log_z);
    }
  }
  return p;
}

double NegLogLikelihood(const Lattice &lattice, std::span<const int> gold,
                        LatticeGradient *grad) {
  const double gold_score = SequenceScore(lattice, gold);
  if (gold_score == kNegInf) {
    throw ValidationError("gold tag sequence uses a disallowed transition");
  }
  const int n = lattice.size();
  const int k = lattice.num_tags();
  if (grad == nullptr) return LogPartition(lattice) - gold_score;

  const ChainScores &chain = *lattice.chain;
  const ForwardBackward fb = RunForwardBackward(lattice);
  for (int i = 0; i < n; ++i) {
    for (int y = 0; y < k; ++y) {
      const double p = std::exp(fb.alpha(i, y) + fb.beta(i, y) - fb.log_z);
      grad->emissions(i, y) += p;
      if (i == 0) grad->begin[y] += p;
      if (i == n - 1) grad->end[y] += p;
    }
    grad->emissions(i, gold[i]) -= 1.0;
  }
  grad->begin[gold[0]] -= 1.0;
  grad->end[gold[n - 1]] -= 1.0;
  for (int i = 0; i + 1 < n; ++i) {
    for (int x = 0; x < k; ++x) {
      if (fb.alpha(i, x) == kNegInf) continue;
      for (int y = 0; y < k; ++y) {
        const double t = chain.transitions(x, y);
        if (t == kNegInf) continue;
        grad->transitions(x, y) +=
            std::exp(fb.alpha(i, x) + t + lattice.emissions(i + 1, y) +
                     fb.beta(i + 1, y) - fb.log_z);
      }
    }
    grad->transitions(gold[i], gold[i + 1]) -= 1.0;
  }
  return fb.log_z - gold_score;
}

// --- config ----------------------------------------------------------------

nlohmann::ordered_json NerTrainConfig::ToJson() const {
  nlohmann::ordered_json j;
  j["source"] = source.ToJson();
  j["step"] = adam.step;
  j["beta1"] = adam.beta1;
  j["beta2"] = adam.beta2;
  j["epsilon"] = adam.epsilon;
  j["batch_size"] = batch_size;
  j["max_epochs"] = max_epochs;
  j["patience"] = patience;
  j["use_mixer"] = use_mixer;
  j["boundary"] = boundary;
  j["mask"] = mask;
  return j;
}

NerTrainConfig NerTrainConfig::FromJson(const nlohmann::json &j) {
  NerTrainConfig c;
  if (j.contains("source")) c.source = SourceConfig::FromJson(j["source"]);
  c.adam.step = j.value("step", c.adam.step);
  c.adam.beta1 = j.value("beta1", c.adam.beta1);
  c.adam.beta2 = j.value("beta2", c.adam.beta2);
  c.adam.epsilon = j.value("epsilon", c.adam.epsilon);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.max_epochs = j.value("max_epochs", c.max_epochs);
  c.patience = j.value("patience", c.patience);
  c.use_mixer = j.value("use_mixer", c.use_mixer);
  c.boundary = j.value("boundary", c.boundary);
  c.mask = j.value("mask", c.mask);
  return c;
}

// --- model -----------------------------------------------------------------

CrfModel::CrfModel(Tagset tagset, Representer representer, bool use_mixer,
                   bool boundary, bool mask, Rng &rng)
    : tagset_(std::move(tagset)),
      representer_(std::move(representer)),
      boundary_(boundary),
      mask_(mask) {
  const int k = tagset_.size();
  const int d = representer_.dim();
  if (use_mixer) mixer_.emplace(d, rng);
  transitions_ = Parameter("crf.transitions", k, k);
  begin_ = Parameter("crf.begin", 1, k);
  end_ = Parameter("crf.end", 1, k);
  weights_ = Parameter("crf.emission_weights", k, d);
  bias_ = Parameter("crf.emission_bias", 1, k);
  weights_.InitUniform(rng, -0.01, 0.01);
}

ChainScores CrfModel::Chain() const {
  return MakeChainScores(tagset_, transitions_.value, begin_.value.row(0),
                         end_.value.row(0), mask_, boundary_);
}

Matrix CrfModel::Emissions(const AnnotatedSentence &sentence) const {
  TokenMatrix h = representer_.Represent(sentence);
  if (mixer_) h = mixer_->Forward(h);
  Matrix e(h.rows(), num_tags());
  for (int i = 0; i < h.rows(); ++i) {
    auto row = e.row(i);
    const auto b = bias_.value.row(0);
    std::copy(b.begin(), b.end(), row.begin());
    AddMatVec(weights_.value, h.row(i), row);
  }
  return e;
}

Lattice CrfModel::BuildLattice(const AnnotatedSentence &sentence,
                               const ChainScores &chain) const {
  return Lattice{Emissions(sentence), &chain};
}

TagSequence CrfModel::Decode(const AnnotatedSentence &sentence) const {
  if (sentence.tokens.empty()) return {};
  const ChainScores chain = Chain();
  return Viterbi(BuildLattice(sentence, chain));
}

std::vector<Entity> CrfModel::PredictEntities(
    const AnnotatedSentence &sentence) const {
  return FromBio(Decode(sentence), sentence.tokens);
}

Matrix CrfModel::TagMarginals(const AnnotatedSentence &sentence) const {
  const ChainScores chain = Chain();
  return Marginals(BuildLattice(sentence, chain));
}

double CrfModel::Loss(const AnnotatedSentence &sentence,
                      const TagSequence &gold) const {
  const ChainScores chain = Chain();
  return NegLogLikelihood(BuildLattice(sentence, chain), gold);
}

double CrfModel::AccumulateGradient(const AnnotatedSentence &sentence,
                                    const TagSequence &gold, double scale) {
  const int k = num_tags();
  const int d = dim();
  const ChainScores chain = Chain();
  const TokenMatrix h = representer_.Represent(sentence);
  const TokenMatrix mixed = mixer_ ? mixer_->Forward(h) : TokenMatrix();
  const TokenMatrix &features = mixer_ ? mixed : h;
  Matrix e(h.rows(), k);
  for (int i = 0; i < h.rows(); ++i) {
    auto row = e.row(i);
    const auto b = bias_.value.row(0);
    std::copy(b.begin(), b.end(), row.begin());
    AddMatVec(weights_.value, features.row(i), row);
  }
  const Lattice lattice{std::move(e), &chain};
  LatticeGradient g(lattice.size(), k);
  const double loss = NegLogLikelihood(lattice, gold, &g);

  for (int x = 0; x < k; ++x) {
    for (int y = 0; y < k; ++y) {
      transitions_.grad(x, y) += scale * g.transitions(x, y);
    }
    if (boundary_) {
      begin_.grad(0, x) += scale * g.begin[x];
      end_.grad(0, x) += scale * g.end[x];
    }
  }
  const bool need_input_grad = mixer_.has_value() || representer_.trainable();
  TokenMatrix grad_features(need_input_grad ? h.rows() : 0, d);
  for (int i = 0; i < lattice.size(); ++i) {
    auto de = g.emissions.row(i);
    for (double &v : de) v *= scale;
    AddOuter(de, features.row(i), 1.0, weights_.grad);
    for (int y = 0; y < k; ++y) bias_.grad(0, y) += de[y];
    if (need_input_grad) AddMatTVec(weights_.value, de, grad_features.row(i));
  }
  if (need_input_grad) {
    const TokenMatrix grad_h =
        mixer_ ? mixer_->Backward(h, mixed, grad_features) : grad_features;
    representer_.Backward(sentence, grad_h);
  }
  return loss;
}

std::vector<Parameter *> CrfModel::Parameters() {
  std::vector<Parameter *> params = {&transitions_, &weights_, &bias_};
  if (boundary_) {
    params.push_back(&begin_);
    params.push_back(&end_);
  }
  if (mixer_) {
    for (Parameter *p : mixer_->Parameters()) params.push_back(p);
  }
  for (Parameter *p : representer_.Parameters()) params.push_back(p);
  return params;
}

void CrfModel::ZeroGrad() {
  for (Parameter *p : Parameters()) p->ZeroGrad();
}

nlohmann::ordered_json CrfModel::ToJson() const {
  const int k = num_tags();
  nlohmann::ordered_json j;
  j["format"] = "crf-v1";
  j["tool_version"] = kToolVersion;
  j["tagset"] = tagset_.TagNames();
  j["types"] = nlohmann::ordered_json::array();
  for (int t = 0; t < tagset_.num_types(); ++t) {
    j["types"].push_back(tagset_.type_name(t));
  }
  j["dim"] = dim();
  j["source_config"] = representer_.config().ToJson();
  if (representer_.trainable()) j["representer"] = representer_.ToJson();
  j["boundary"] = boundary_;
  j["transitions"] = MatrixToJson(transitions_.value);
  j["begin"] = MatrixToJson(begin_.value);
  j["end"] = MatrixToJson(end_.value);
  j["emission_weights"] = MatrixToJson(weights_.value);
  j["emission_bias"] = MatrixToJson(bias_.value);
  nlohmann::ordered_json mask = nlohmann::ordered_json::array();
  for (int x = 0; x < k; ++x) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (int y = 0; y < k; ++y) {
      row.push_back(mask_ ? tagset_.TransitionAllowed(x, y) : true);
    }
    mask.push_back(std::move(row));
  }
  j["mask"] = std::move(mask);
  j["mask_enabled"] = mask_;
  j["mixer"] = mixer_ ? mixer_->ToJson() : nlohmann::ordered_json();
  j["training_config"] = SortedKeys(training_config);
  j["seed"] = seed;
  return j;
}

CrfModel CrfModel::FromJson(const nlohmann::json &j) {
  if (j.value("format", "") != "crf-v1") {
    throw ValidationError("not a crf-v1 model file");
  }
  CrfModel m;
  m.tagset_ = Tagset(j.at("types").get<std::vector<std::string>>());
  if (j.at("tagset").get<std::vector<std::string>>() != m.tagset_.TagNames()) {
    throw ValidationError("model tagset does not match its type list");
  }
  const int k = m.tagset_.size();
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
  m.boundary_ = j.value("boundary", true);
  m.mask_ = j.value("mask_enabled", true);
  m.transitions_ = Parameter("crf.transitions", k, k);
  m.begin_ = Parameter("crf.begin", 1, k);
  m.end_ = Parameter("crf.end", 1, k);
  m.weights_ = Parameter("crf.emission_weights", k, d);
  m.bias_ = Parameter("crf.emission_bias", 1, k);
  m.transitions_.value = MatrixFromJson(j.at("transitions"), k, k);
  m.begin_.value = MatrixFromJson(j.at("begin"), 1, k);
  m.end_.value = MatrixFromJson(j.at("end"), 1, k);
  m.weights_.value = MatrixFromJson(j.at("emission_weights"), k, d);
  m.bias_.value = MatrixFromJson(j.at("emission_bias"), 1, k);
  if (j.contains("mixer") && !j["mixer"].is_null()) {
    m.mixer_ = WindowMixer::FromJson(j["mixer"]);
  }
  m.training_config = j.value("training_config", nlohmann::ordered_json());
  m.seed = j.value("seed", std::uint64_t{0});
  return m;
}

void CrfModel::Save(const std::filesystem::path &path) const {
  WriteFile(path, ToJson().dump() + "\n");
}

CrfModel CrfModel::Load(const std::filesystem::path &path) {
  const std::string text = ReadFile(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw FormatError(e.byte, path.string() + ": " + e.what());
  }
  return FromJson(j);
}

// --- training --------------------------------------------------------------

std::vector<std::vector<Entity>> PredictCorpusEntities(
    const CrfModel &model, std::span<const AnnotatedSentence> sentences,
    int threads) {
  std::vector<std::vector<Entity>> out(sentences.size());
  ParallelFor(sentences.size(), threads, [&](std::size_t i) {
    out[i] = model.PredictEntities(sentences[i]);
  });
  return out;
}

CrfModel TrainNer(std::span<const AnnotatedSentence> train,
                  std::span<const AnnotatedSentence> dev,
                  const NerTrainConfig &config, std::uint64_t seed,
                  NerTrainLog *log) {
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (!train[i].tokens.empty()) usable.push_back(i);
  }
  if (usable.empty()) throw ValidationError("training set is empty");

  Rng init_rng(DeriveSeed(seed, 1));
  Rng order_rng(DeriveSeed(seed, 2));
  Representer representer = Representer::Create(config.source, train, init_rng);
  CrfModel model(Tagset::Schema(), std::move(representer), config.use_mixer,
                 config.boundary, config.mask, init_rng);
  model.training_config = config.ToJson();
  model.seed = seed;

  std::vector<TagSequence> gold(train.size());
  for (std::size_t i : usable) gold[i] = ToBio(train[i]);

  Adam adam(config.adam, model.Parameters());
  model.ZeroGrad();
  const std::size_t batch =
      config.batch_size <= 0 ? usable.size()
                             : static_cast<std::size_t>(config.batch_size);

  std::optional<CrfModel> best;
  double best_f1 = -1.0;
  int best_epoch = 0;
  int stale = 0;
  if (log != nullptr) log->epochs.clear();
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    if (batch < usable.size()) order_rng.Shuffle(usable);
    double epoch_loss = 0.0;
    for (std::size_t lo = 0; lo < usable.size(); lo += batch) {
      const std::size_t hi = std::min(usable.size(), lo + batch);
      const double scale = 1.0 / static_cast<double>(hi - lo);
      for (std::size_t b = lo; b < hi; ++b) {
        const std::size_t i = usable[b];
        epoch_loss += model.AccumulateGradient(train[i], gold[i], scale);
      }
      adam.Step();
    }
    NerEpochLog entry{epoch, epoch_loss, std::nan("")};
    if (!dev.empty()) {
      const auto pred = PredictCorpusEntities(model, dev);
      entry.dev_f1 = EvaluateEntities(dev, pred, Regime::kExact, true).f1;
    }
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
