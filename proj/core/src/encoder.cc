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

#include "sciex/encoder.h"

#include <cmath>

#include "sciex/errors.h"
#include "sciex/utf8.h"

namespace sciex {
namespace {

std::uint64_t Fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t SplitMix64(std::uint64_t &state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

char32_t ShapeOf(char32_t c) {
  if (IsDigit(c)) return U'd';
  if (IsUpper(c)) return U'X';
  if (IsLower(c) || IsAlnum(c)) return U'x';
  return c;
}

}  // namespace

// --- sources ---------------------------------------------------------------

std::string_view SourceKindName(SourceKind kind) {
  switch (kind) {
    case SourceKind::kSparseFeatures:
      return "sparse-features";
    case SourceKind::kTrainableEmbeddings:
      return "trainable-embeddings";
    case SourceKind::kStore:
      return "store";
  }
  return "";
}

SourceKind ParseSourceKind(std::string_view name) {
  if (name == "sparse-features" || name == "sparse") {
    return SourceKind::kSparseFeatures;
  }
  if (name == "trainable-embeddings" || name == "embeddings") {
    return SourceKind::kTrainableEmbeddings;
  }
  if (name == "store") return SourceKind::kStore;
  throw ValidationError("unknown representation source '" + std::string(name) +
                        "' (expected sparse-features, trainable-embeddings or "
                        "store)");
}

nlohmann::ordered_json SourceConfig::ToJson() const {
  nlohmann::ordered_json j;
  j["kind"] = SourceKindName(kind);
  j["dim"] = dim;
  if (kind == SourceKind::kStore) j["store_path"] = store_path;
  return j;
}

SourceConfig SourceConfig::FromJson(const nlohmann::json &j) {
  SourceConfig c;
  c.kind = ParseSourceKind(j.at("kind").get<std::string>());
  c.dim = j.at("dim").get<int>();
  c.store_path = j.value("store_path", "");
  return c;
}

std::string LowercaseForm(std::string_view token) {
  std::u32string cps = DecodeUtf8(token);
  for (char32_t &c : cps) c = ToLower(c);
  return EncodeUtf8(cps);
}

std::string SparseFeatureEncoder::ShapeClass(std::string_view token) {
  const std::u32string cps = DecodeUtf8(token);
  std::u32string shape;
  bool repeated = false;
  for (char32_t c : cps) {
    const char32_t s = ShapeOf(c);
    const bool same =
        !shape.empty() &&
        (shape.back() == s || (shape.size() >= 2 && shape.back() == U'+' &&
                               shape[shape.size() - 2] == s));
    if (same) {
      if (!repeated) shape.push_back(U'+');
      repeated = true;
      continue;
    }
    shape.push_back(s);
    repeated = false;
  }
  return EncodeUtf8(shape);
}

std::uint32_t SparseFeatureEncoder::Bucket(std::string_view feature) {
  return static_cast<std::uint32_t>(Fnv1a64(feature) &
                                    ((1u << kHashBits) - 1));
}

std::vector<std::string> SparseFeatureEncoder::Features(
    std::span<const Token> tokens, int i) {
  std::vector<std::string> features;
  const std::string form = LowercaseForm(tokens[i].text);
  const std::u32string cps = DecodeUtf8(form);
  features.push_back("w=" + form);
  features.push_back("shape=" + ShapeClass(tokens[i].text));
  const int len = static_cast<int>(cps.size());
  for (int k = 1; k <= std::min(3, len); ++k) {
    features.push_back("p" + std::to_string(k) + "=" +
                       EncodeUtf8(cps.substr(0, k)));
    features.push_back("s" + std::to_string(k) + "=" +
                       EncodeUtf8(cps.substr(len - k)));
  }
  features.push_back("w-1=" + (i > 0 ? LowercaseForm(tokens[i - 1].text)
                                     : std::string("<s>")));
  features.push_back("w+1=" + (i + 1 < static_cast<int>(tokens.size())
                                   ? LowercaseForm(tokens[i + 1].text)
                                   : std::string("</s>")));
  return features;
}

TokenMatrix SparseFeatureEncoder::Represent(std::span<const Token> tokens) const {
  const int n = static_cast<int>(tokens.size());
  TokenMatrix m(n, dim_);
  for (int i = 0; i < n; ++i) {
    const auto features = Features(tokens, i);
    const double scale = 1.0 / std::sqrt(static_cast<double>(features.size()));
    auto row = m.row(i);
    for (const auto &f : features) {
      std::uint64_t state = Bucket(f);
      std::uint64_t bits = 0;
      for (int j = 0; j < dim_; ++j) {
        if (j % 64 == 0) bits = SplitMix64(state);
        row[j] += ((bits >> (j % 64)) & 1) ? scale : -scale;
      }
    }
  }
  return m;
}

EmbeddingTable::EmbeddingTable(std::span<const AnnotatedSentence> sentences,
                               int dim, Rng &rng) {
  words_.push_back("<unk>");
  for (const auto &s : sentences) {
    for (const auto &t : s.tokens) {
      std::string form = LowercaseForm(t.text);
      if (vocab_.emplace(form, static_cast<int>(words_.size())).second) {
        words_.push_back(std::move(form));
      }
    }
  }
  table_ = Parameter("embeddings", static_cast<int>(words_.size()), dim);
  table_.InitUniform(rng, -0.1, 0.1);
}

int EmbeddingTable::Row(std::string_view token) const {
  auto it = vocab_.find(LowercaseForm(token));
  return it == vocab_.end() ? 0 : it->second;
}

TokenMatrix EmbeddingTable::Represent(std::span<const Token> tokens) const {
  TokenMatrix m(static_cast<int>(tokens.size()), dim());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto src = table_.value.row(Row(tokens[i].text));
    std::copy(src.begin(), src.end(), m.row(static_cast<int>(i)).begin());
  }
  return m;
}

void EmbeddingTable::Backward(std::span<const Token> tokens,
                              const TokenMatrix &grad) {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto dst = table_.grad.row(Row(tokens[i].text));
    const auto g = grad.row(static_cast<int>(i));
    for (int j = 0; j < dim(); ++j) dst[j] += g[j];
  }
}

nlohmann::ordered_json EmbeddingTable::ToJson() const {
  nlohmann::ordered_json j;
  j["vocab"] = words_;
  j["dim"] = dim();
  j["values"] = MatrixToJson(table_.value);
  return j;
}

EmbeddingTable EmbeddingTable::FromJson(const nlohmann::json &j) {
  EmbeddingTable t;
  t.words_ = j.at("vocab").get<std::vector<std::string>>();
  for (std::size_t i = 0; i < t.words_.size(); ++i) {
    t.vocab_.emplace(t.words_[i], static_cast<int>(i));
  }
  const int dim = j.at("dim").get<int>();
  const int rows = static_cast<int>(t.words_.size());
  t.table_ = Parameter("embeddings", rows, dim);
  t.table_.value = MatrixFromJson(j.at("values"), rows, dim);
  return t;
}

Representer Representer::Create(const SourceConfig &config,
                                std::span<const AnnotatedSentence> train,
                                Rng &rng) {
  Representer r;
  r.config_ = config;
  switch (config.kind) {
    case SourceKind::kSparseFeatures:
      r.sparse_.emplace(config.dim);
      break;
    case SourceKind::kTrainableEmbeddings:
      r.table_.emplace(train, config.dim, rng);
      break;
    case SourceKind::kStore: {
      auto store = std::make_shared<const EmbeddingStore>(
          EmbeddingStore::Load(config.store_path));
      r.config_.dim = store->dim();
      r.store_ = std::move(store);
      break;
    }
  }
  return r;
}

Representer Representer::FromStore(std::shared_ptr<const EmbeddingStore> store) {
  Representer r;
  r.config_.kind = SourceKind::kStore;
  r.config_.dim = store->dim();
  r.store_ = std::move(store);
  return r;
}

TokenMatrix Representer::Represent(const AnnotatedSentence &sentence) const {
  switch (config_.kind) {
    case SourceKind::kSparseFeatures:
      return sparse_->Represent(sentence.tokens);
    case SourceKind::kTrainableEmbeddings:
      return table_->Represent(sentence.tokens);
    case SourceKind::kStore: {
      TokenMatrix m = store_->Lookup(sentence.doc_id, sentence.sent_index);
      if (m.rows() != static_cast<int>(sentence.tokens.size())) {
        throw ValidationError(
            "embedding store has " + std::to_string(m.rows()) +
            " rows for sentence (" + sentence.doc_id + ", " +
            std::to_string(sentence.sent_index) + ") but it has " +
            std::to_string(sentence.tokens.size()) + " tokens");
      }
      return m;
    }
  }
  return {};
}

void Representer::Backward(const AnnotatedSentence &sentence,
                           const TokenMatrix &grad) {
  if (table_) table_->Backward(sentence.tokens, grad);
}

std::vector<Parameter *> Representer::Parameters() {
  if (table_) return {&table_->table()};
  return {};
}

nlohmann::ordered_json Representer::ToJson() const {
  nlohmann::ordered_json j = config_.ToJson();
  if (table_) j["embeddings"] = table_->ToJson();
  return j;
}

Representer Representer::FromJson(const nlohmann::json &j) {
  Representer r;
  r.config_ = SourceConfig::FromJson(j);
  switch (r.config_.kind) {
    case SourceKind::kSparseFeatures:
      r.sparse_.emplace(r.config_.dim);
      break;
    case SourceKind::kTrainableEmbeddings:
      r.table_ = EmbeddingTable::FromJson(j.at("embeddings"));
      break;
    case SourceKind::kStore:
      r.store_ = std::make_shared<const EmbeddingStore>(
          EmbeddingStore::Load(r.config_.store_path));
      if (r.store_->dim() != r.config_.dim) {
        throw ValidationError("embedding store " + r.config_.store_path +
                              " has dim " + std::to_string(r.store_->dim()) +
                              ", model expects " +
                              std::to_string(r.config_.dim));
      }
      break;
  }
  return r;
}

// --- markers ---------------------------------------------------------------

std::vector<MarkedEntity> MarkEntities(const AnnotatedSentence &sentence,
                                       std::span<const Entity> entities) {
  std::vector<MarkedEntity> marked;
  marked.reserve(entities.size());
  for (const auto &e : entities) {
    marked.push_back({e.id, e.type, EntityTokenSpan(sentence.tokens, e)});
  }
  return marked;
}

MarkerTable::MarkerTable(int dim)
    : type_("marker.type", kNumEntityTypes, dim),
      anchor_("marker.anchor", 1, dim) {}

void MarkerTable::InitUniform(Rng &rng) {
  type_.InitUniform(rng, -0.1, 0.1);
  anchor_.InitUniform(rng, -0.1, 0.1);
}

nlohmann::ordered_json MarkerTable::ToJson() const {
  nlohmann::ordered_json j;
  j["dim"] = dim();
  j["type_embeddings"] = MatrixToJson(type_.value);
  j["anchor_embedding"] = MatrixToJson(anchor_.value);
  return j;
}

MarkerTable MarkerTable::FromJson(const nlohmann::json &j) {
  MarkerTable t(j.at("dim").get<int>());
  t.type_.value = MatrixFromJson(j.at("type_embeddings"), kNumEntityTypes, t.dim());
  t.anchor_.value = MatrixFromJson(j.at("anchor_embedding"), 1, t.dim());
  return t;
}

namespace {

const MarkedEntity &FindAnchor(std::span<const MarkedEntity> entities,
                               std::string_view anchor_id) {
  for (const auto &e : entities) {
    if (e.id == anchor_id) return e;
  }
  throw ValidationError("anchor " + std::string(anchor_id) +
                        " is not among the sentence entities");
}

}  // namespace

TokenMatrix MarkerAugment(const TokenMatrix &m,
                          std::span<const MarkedEntity> entities,
                          std::string_view anchor_id,
                          const MarkerTable &table) {
  const MarkedEntity &anchor = FindAnchor(entities, anchor_id);
  TokenMatrix out = m;
  for (const auto &e : entities) {
    const auto type_row =
        table.type_embeddings().value.row(static_cast<int>(e.type));
    for (int i = e.span.begin; i < e.span.end; ++i) {
      auto row = out.row(i);
      for (int j = 0; j < out.cols(); ++j) row[j] += type_row[j];
    }
  }
  const auto anchor_row = table.anchor_embedding().value.row(0);
  for (int i = anchor.span.begin; i < anchor.span.end; ++i) {
    auto row = out.row(i);
    for (int j = 0; j < out.cols(); ++j) row[j] += anchor_row[j];
  }
  return out;
}

void MarkerBackward(const TokenMatrix &grad,
                    std::span<const MarkedEntity> entities,
                    std::string_view anchor_id, MarkerTable &table) {
  const MarkedEntity &anchor = FindAnchor(entities, anchor_id);
  for (const auto &e : entities) {
    auto dst = table.type_embeddings().grad.row(static_cast<int>(e.type));
    for (int i = e.span.begin; i < e.span.end; ++i) {
      const auto g = grad.row(i);
      for (int j = 0; j < grad.cols(); ++j) dst[j] += g[j];
    }
  }
  auto dst = table.anchor_embedding().grad.row(0);
  for (int i = anchor.span.begin; i < anchor.span.end; ++i) {
    const auto g = grad.row(i);
    for (int j = 0; j < grad.cols(); ++j) dst[j] += g[j];
  }
}

// --- mixer -----------------------------------------------------------------

WindowMixer::WindowMixer(int dim, Rng &rng)
    : prev_("mixer.prev", dim, dim),
      center_("mixer.center", dim, dim),
      next_("mixer.next", dim, dim),
      bias_("mixer.bias", 1, dim) {
  prev_.InitUniform(rng, -0.1, 0.1);
  next_.InitUniform(rng, -0.1, 0.1);
  for (int i = 0; i < dim; ++i) center_.value(i, i) = 1.0;
}

TokenMatrix WindowMixer::Forward(const TokenMatrix &h) const {
  const int n = h.rows();
  TokenMatrix out(n, dim());
  for (int i = 0; i < n; ++i) {
    auto row = out.row(i);
    const auto b = bias_.value.row(0);
    std::copy(b.begin(), b.end(), row.begin());
    AddMatVec(center_.value, h.row(i), row);
    if (i > 0) AddMatVec(prev_.value, h.row(i - 1), row);
    if (i + 1 < n) AddMatVec(next_.value, h.row(i + 1), row);
    for (double &v : row) v = std::tanh(v);
  }
  return out;
}

TokenMatrix WindowMixer::Backward(const TokenMatrix &h, const TokenMatrix &out,
                                  const TokenMatrix &grad_out) {
  const int n = h.rows();
  const int d = dim();
  TokenMatrix grad_in(n, d);
  std::vector<double> dz(d);
  for (int i = 0; i < n; ++i) {
    const auto o = out.row(i);
    const auto g = grad_out.row(i);
    bool any = false;
    for (int j = 0; j < d; ++j) {
      dz[j] = g[j] * (1.0 - o[j] * o[j]);
      any = any || dz[j] != 0.0;
    }
    if (!any) continue;
    auto db = bias_.grad.row(0);
    for (int j = 0; j < d; ++j) db[j] += dz[j];
    AddOuter(dz, h.row(i), 1.0, center_.grad);
    AddMatTVec(center_.value, dz, grad_in.row(i));
    if (i > 0) {
      AddOuter(dz, h.row(i - 1), 1.0, prev_.grad);
      AddMatTVec(prev_.value, dz, grad_in.row(i - 1));
    }
    if (i + 1 < n) {
      AddOuter(dz, h.row(i + 1), 1.0, next_.grad);
      AddMatTVec(next_.value, dz, grad_in.row(i + 1));
    }
  }
  return grad_in;
}

std::vector<Parameter *> WindowMixer::Parameters() {
  return {&prev_, &center_, &next_, &bias_};
}

nlohmann::ordered_json WindowMixer::ToJson() const {
  nlohmann::ordered_json j;
  j["dim"] = dim();
  j["prev"] = MatrixToJson(prev_.value);
  j["center"] = MatrixToJson(center_.value);
  j["next"] = MatrixToJson(next_.value);
  j["bias"] = MatrixToJson(bias_.value);
  return j;
}

WindowMixer WindowMixer::FromJson(const nlohmann::json &j) {
  WindowMixer m;
  const int d = j.at("dim").get<int>();
  m.prev_ = Parameter("mixer.prev", d, d);
  m.center_ = Parameter("mixer.center", d, d);
  m.next_ = Parameter("mixer.next", d, d);
  m.bias_ = Parameter("mixer.bias", 1, d);
  m.prev_.value = MatrixFromJson(j.at("prev"), d, d);
  m.center_.value = MatrixFromJson(j.at("center"), d, d);
  m.next_.value = MatrixFromJson(j.at("next"), d, d);
  m.bias_.value = MatrixFromJson(j.at("bias"), 1, d);
  return m;
}

}  // namespace sciex
