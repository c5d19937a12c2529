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

#ifndef SCIEX_ENCODER_H_
#define SCIEX_ENCODER_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "sciex/corpus.h"
#include "sciex/matrix.h"
#include "sciex/parameters.h"

namespace sciex {

// Row i is the representation of token i.
using TokenMatrix = Matrix;

// ---------------------------------------------------------------------------
// TKV1 embedding files.
//
// Line 1: UTF-8 JSON header terminated by '\n':
//   {"version":1,"dim":D,"sentences":[{"doc":..,"sent":..,"n":..},...]}
// followed by n x D little-endian float32 values per sentence, in header
// order, with no padding.

struct EmbeddingRecord {
  std::string doc;
  int sent = 0;
  TokenMatrix rows;
};

class EmbeddingStore {
 public:
  // Throws FormatError carrying the byte offset of the first problem.
  static EmbeddingStore Parse(std::string_view bytes);
  static EmbeddingStore Load(const std::filesystem::path &path);

  int dim() const { return dim_; }
  std::size_t size() const { return entries_.size(); }
  bool Contains(std::string_view doc, int sent) const;
  // Copy of the stored rows. Throws ValidationError naming the key when the
  // sentence is absent.
  TokenMatrix Lookup(std::string_view doc, int sent) const;
  // Row count recorded for a sentence, or -1.
  int RowCount(std::string_view doc, int sent) const;

 private:
  struct Entry {
    std::size_t offset;  // into values_, in floats
    int rows;
  };
  static std::string Key(std::string_view doc, int sent);

  int dim_ = 0;
  std::vector<float> values_;
  std::unordered_map<std::string, Entry> entries_;
};

// Serializes records into TKV1 bytes. All records must share `dim` columns.
std::string EncodeTkv1(int dim, std::span<const EmbeddingRecord> records);

// ---------------------------------------------------------------------------
// Representation sources.

enum class SourceKind { kSparseFeatures, kTrainableEmbeddings, kStore };

std::string_view SourceKindName(SourceKind kind);
SourceKind ParseSourceKind(std::string_view name);

struct SourceConfig {
  SourceKind kind = SourceKind::kSparseFeatures;
  int dim = 64;
  std::string store_path;  // kStore only

  nlohmann::ordered_json ToJson() const;
  static SourceConfig FromJson(const nlohmann::json &j);
};

// Hashed sparse token features projected to a dense vector. Features are
// the lowercased form, the shape class, prefixes and suffixes of length 1-3
// and the neighbouring forms. Each feature string is hashed with 64-bit
// FNV-1a into a 2^18 space; the bucket's projection is a +-1 vector whose
// sign j is bit (j mod 64) of the (j / 64 + 1)-th splitmix64 output seeded
// with the bucket index. A token's row is the sum of its feature
// projections divided by sqrt(feature count).
class SparseFeatureEncoder {
 public:
  static constexpr std::uint32_t kHashBits = 18;

  explicit SparseFeatureEncoder(int dim) : dim_(dim) {}

  int dim() const { return dim_; }
  TokenMatrix Represent(std::span<const Token> tokens) const;

  static std::vector<std::string> Features(std::span<const Token> tokens,
                                           int i);
  // "100" and "200" both map to "d+"; "Hastelloy" to "Xx+".
  static std::string ShapeClass(std::string_view token);
  static std::uint32_t Bucket(std::string_view feature);

 private:
  int dim_;
};

// Lookup table over lowercased token forms. Row 0 is the shared UNK row.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  // Vocabulary from the training sentences, rows uniform in [-0.1, 0.1].
  EmbeddingTable(std::span<const AnnotatedSentence> sentences, int dim,
                 Rng &rng);

  int dim() const { return table_.value.cols(); }
  int vocab_size() const { return table_.value.rows(); }
  int Row(std::string_view token) const;

  TokenMatrix Represent(std::span<const Token> tokens) const;
  void Backward(std::span<const Token> tokens, const TokenMatrix &grad);

  Parameter &table() { return table_; }
  const Parameter &table() const { return table_; }

  nlohmann::ordered_json ToJson() const;
  static EmbeddingTable FromJson(const nlohmann::json &j);

 private:
  std::unordered_map<std::string, int> vocab_;
  std::vector<std::string> words_;  // row -> form, words_[0] = "<unk>"
  Parameter table_;
};

std::string LowercaseForm(std::string_view token);

// Dispatches to one of the three sources.
class Representer {
 public:
  Representer() = default;
  // For kTrainableEmbeddings the vocabulary is built from `train`; for
  // kStore the file at config.store_path is loaded.
  static Representer Create(const SourceConfig &config,
                            std::span<const AnnotatedSentence> train,
                            Rng &rng);
  static Representer FromStore(std::shared_ptr<const EmbeddingStore> store);

  const SourceConfig &config() const { return config_; }
  int dim() const { return config_.dim; }
  bool trainable() const {
    return config_.kind == SourceKind::kTrainableEmbeddings;
  }

  TokenMatrix Represent(const AnnotatedSentence &sentence) const;
  // Accumulates gradients for trainable sources; no-op otherwise.
  void Backward(const AnnotatedSentence &sentence, const TokenMatrix &grad);
  std::vector<Parameter *> Parameters();

  // Only trainable state is serialized; a store is reloaded from its path.
  nlohmann::ordered_json ToJson() const;
  static Representer FromJson(const nlohmann::json &j);

 private:
  SourceConfig config_;
  std::optional<SparseFeatureEncoder> sparse_;
  std::optional<EmbeddingTable> table_;
  std::shared_ptr<const EmbeddingStore> store_;
};

// ---------------------------------------------------------------------------
// Entity markers.

// A token-level view of an entity, used by the marker and relation code.
struct MarkedEntity {
  std::string id;
  EntityType type = EntityType::kMaterial;
  TokenSpan span;
};

std::vector<MarkedEntity> MarkEntities(const AnnotatedSentence &sentence,
                                       std::span<const Entity> entities);

class MarkerTable {
 public:
  MarkerTable() = default;
  explicit MarkerTable(int dim);

  int dim() const { return type_.value.cols(); }
  void InitUniform(Rng &rng);

  Parameter &type_embeddings() { return type_; }
  const Parameter &type_embeddings() const { return type_; }
  Parameter &anchor_embedding() { return anchor_; }
  const Parameter &anchor_embedding() const { return anchor_; }

  nlohmann::ordered_json ToJson() const;
  static MarkerTable FromJson(const nlohmann::json &j);

 private:
  Parameter type_;    // kNumEntityTypes x dim
  Parameter anchor_;  // 1 x dim
};

// Adds each entity's type embedding to its token rows and the anchor
// embedding to the anchor's rows. Other rows are copied unchanged. Throws
// ValidationError when no entity has id `anchor_id`.
TokenMatrix MarkerAugment(const TokenMatrix &m,
                          std::span<const MarkedEntity> entities,
                          std::string_view anchor_id,
                          const MarkerTable &table);

// Accumulates dL/d(markers) given dL/d(augmented matrix).
void MarkerBackward(const TokenMatrix &grad,
                    std::span<const MarkedEntity> entities,
                    std::string_view anchor_id, MarkerTable &table);

// ---------------------------------------------------------------------------
// Shallow mixing layer: out_i = tanh(P h_{i-1} + C h_i + N h_{i+1} + b),
// with zero rows outside the sentence.
class WindowMixer {
 public:
  WindowMixer() = default;
  WindowMixer(int dim, Rng &rng);

  int dim() const { return center_.value.cols(); }

  TokenMatrix Forward(const TokenMatrix &h) const;
  // Given the forward input, its output and dL/d(output), accumulates
  // parameter gradients and returns dL/d(input).
  TokenMatrix Backward(const TokenMatrix &h, const TokenMatrix &out,
                       const TokenMatrix &grad_out);

  std::vector<Parameter *> Parameters();

  nlohmann::ordered_json ToJson() const;
  static WindowMixer FromJson(const nlohmann::json &j);

 private:
  Parameter prev_, center_, next_, bias_;
};

}  // namespace sciex

#endif  // SCIEX_ENCODER_H_
