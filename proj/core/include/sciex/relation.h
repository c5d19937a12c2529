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

#ifndef SCIEX_RELATION_H_
#define SCIEX_RELATION_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "sciex/corpus.h"
#include "sciex/encoder.h"
#include "sciex/parameters.h"

namespace sciex {

// Directed label space: 0 is NONE; relation type r owns 1 + 2r ("r->",
// anchor is the head) and 2 + 2r ("r<-", anchor is the tail).
inline constexpr int kNumRelationLabels = 1 + 2 * kNumRelationTypes;
inline constexpr int kNoneLabel = 0;

inline int ForwardLabel(RelationType type) { return 1 + 2 * static_cast<int>(type); }
inline int BackwardLabel(RelationType type) { return 2 + 2 * static_cast<int>(type); }
inline bool IsForwardLabel(int label) { return label > 0 && label % 2 == 1; }
inline RelationType LabelType(int label) {
  return static_cast<RelationType>((label - 1) / 2);
}
std::string RelationLabelName(int label);
std::vector<std::string> RelationLabelNames();

// Every ordered (anchor, other) pair of distinct entity indices.
std::vector<std::pair<int, int>> CandidatePairs(int num_entities);

// Supervision for one ordered (anchor, other) pair. A pair annotated in
// both directions yields two rows.
struct PairExample {
  int anchor = 0;
  int other = 0;
  int label = kNoneLabel;
};

// Labels every candidate pair of the sentence from its gold relations.
// Throws ValidationError when one ordered pair carries two relation types.
std::vector<PairExample> LabelPairs(const AnnotatedSentence &sentence);

// Distributions from one anchor pass.
struct AnchorScores {
  std::vector<int> others;   // entity indices, ascending, anchor excluded
  Matrix probs;              // others.size() x kNumRelationLabels
};

struct RelationPrediction {
  std::string doc_id;
  int sent_index = 0;
  std::string head;
  std::string tail;
  RelationType type = RelationType::kFormOf;
  double prob = 0.0;

  nlohmann::ordered_json ToJson() const;
};

struct RelTrainConfig {
  SourceConfig source;
  AdamConfig adam;
  int batch_size = 8;
  int max_epochs = 50;
  int patience = 5;
  double none_ratio = 5.0;   // NONE rows kept per positive row; <= 0 keeps all
  bool use_mixer = false;
  double threshold = 0.5;    // decoding threshold for dev scoring

  nlohmann::ordered_json ToJson() const;
  static RelTrainConfig FromJson(const nlohmann::json &j);
};

struct RelEpochLog {
  int epoch = 0;
  double loss = 0.0;
  double dev_f1 = 0.0;
};

struct RelTrainLog {
  std::vector<RelEpochLog> epochs;
  int best_epoch = 0;
};

class RelModel {
 public:
  RelModel() = default;
  // Markers and mixer start random; the classifier starts at zero.
  RelModel(Representer representer, bool use_mixer, Rng &rng);

  int dim() const { return representer_.dim(); }
  int input_width() const { return 4 * dim(); }
  bool has_mixer() const { return mixer_.has_value(); }

  // Marker-augmented (and mixed) representation for one anchor pass.
  TokenMatrix AnchorMatrix(const TokenMatrix &h,
                           std::span<const MarkedEntity> entities,
                           int anchor) const;
  // [h_l1; h_r1; h_l2; h_r2] for the anchor and one other entity.
  std::vector<double> PairFeatures(const TokenMatrix &m,
                                   const MarkedEntity &anchor,
                                   const MarkedEntity &other) const;

  // One pass: softmax distributions for the anchor against every other
  // entity of `entities`, which must be token-aligned to the sentence.
  AnchorScores ScoreAnchor(const AnnotatedSentence &sentence,
                           std::span<const Entity> entities, int anchor) const;

  // Cross-entropy summed over `rows` (all sharing one sentence); adds
  // gradients * scale and returns the unscaled loss.
  double AccumulateGradient(const AnnotatedSentence &sentence,
                            std::span<const Entity> entities,
                            std::span<const PairExample> rows,
                            double scale = 1.0);
  double Loss(const AnnotatedSentence &sentence,
              std::span<const Entity> entities,
              std::span<const PairExample> rows) const;

  std::vector<Parameter *> Parameters();
  void ZeroGrad();

  Parameter &weights() { return weights_; }
  Parameter &bias() { return bias_; }
  MarkerTable &markers() { return markers_; }
  Representer &representer() { return representer_; }
  const Representer &representer() const { return representer_; }

  nlohmann::ordered_json training_config;
  std::uint64_t seed = 0;

  nlohmann::ordered_json ToJson() const;
  static RelModel FromJson(const nlohmann::json &j);
  void Save(const std::filesystem::path &path) const;
  static RelModel Load(const std::filesystem::path &path);

 private:
  Representer representer_;
  MarkerTable markers_;
  std::optional<WindowMixer> mixer_;
  Parameter weights_;  // kNumRelationLabels x 4 dim
  Parameter bias_;     // 1 x kNumRelationLabels
};

// For each unordered entity pair, takes the single most probable non-NONE
// directed label across both anchor passes (ties: smaller head id, then
// smaller label index) and emits it when its probability is >= threshold
// and exceeds NONE in the same distribution.
std::vector<RelationPrediction> PredictRelations(
    const AnnotatedSentence &sentence, std::span<const Entity> entities,
    const RelModel &model, double threshold = 0.5);

// Predictions over gold entities for every sentence.
std::vector<std::vector<RelationPrediction>> PredictCorpusRelations(
    const RelModel &model, std::span<const AnnotatedSentence> sentences,
    double threshold = 0.5, int threads = 1);

// Converts predictions to relations with ids R1, R2, ...
std::vector<Relation> ToRelations(std::span<const RelationPrediction> preds);

// Mini-batch Adam on cross-entropy with per-epoch NONE downsampling and
// early stopping on dev labeled relation F1 (gold entities).
RelModel TrainRel(std::span<const AnnotatedSentence> train,
                  std::span<const AnnotatedSentence> dev,
                  const RelTrainConfig &config, std::uint64_t seed,
                  RelTrainLog *log = nullptr);

}  // namespace sciex

#endif  // SCIEX_RELATION_H_
