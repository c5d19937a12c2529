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

#ifndef SCIEX_CRF_H_
#define SCIEX_CRF_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "sciex/corpus.h"
#include "sciex/encoder.h"
#include "sciex/labels.h"
#include "sciex/matrix.h"
#include "sciex/parameters.h"

namespace sciex {

// ---------------------------------------------------------------------------
// Lattice algorithms. Everything runs in log space; disallowed transitions
// and starts carry -inf.

// Transition and boundary scores shared by every sentence of a model.
struct ChainScores {
  Matrix transitions;          // k x k, [from, to]
  std::vector<double> begin;   // score of starting in tag y
  std::vector<double> end;     // score of ending in tag y

  int num_tags() const { return transitions.rows(); }
};

// Builds chain scores from raw parameters. With `mask`, BIO-illegal
// transitions and starts become -inf; without `boundary` the begin/end
// vectors are zero (apart from the start mask).
ChainScores MakeChainScores(const Tagset &tagset, const Matrix &transitions,
                            std::span<const double> begin,
                            std::span<const double> end, bool mask = true,
                            bool boundary = true);

struct Lattice {
  Matrix emissions;            // n x k
  const ChainScores *chain = nullptr;

  int size() const { return emissions.rows(); }
  int num_tags() const { return emissions.cols(); }
};

// Sum of emission, transition and boundary scores along `tags`; -inf when
// the path uses a disallowed transition.
double SequenceScore(const Lattice &lattice, std::span<const int> tags);

// log of the sum of exp(SequenceScore) over all tag sequences.
double LogPartition(const Lattice &lattice);

// Highest-scoring sequence. Ties go to the lowest tag index at every
// backpointer and at the final position.
TagSequence Viterbi(const Lattice &lattice);

// n x k posteriors p(t_i = y).
Matrix Marginals(const Lattice &lattice);

// d(loss)/d(lattice inputs) for loss = LogPartition - SequenceScore(gold).
struct LatticeGradient {
  Matrix emissions;            // n x k
  Matrix transitions;          // k x k
  std::vector<double> begin;
  std::vector<double> end;

  LatticeGradient() = default;
  LatticeGradient(int n, int k)
      : emissions(n, k), transitions(k, k), begin(k), end(k) {}
};

// Returns the negative log-likelihood of `gold` and, when `grad` is given,
// accumulates its gradient (expected minus observed counts). Throws
// ValidationError when `gold` has the wrong length or uses a disallowed
// transition.
double NegLogLikelihood(const Lattice &lattice, std::span<const int> gold,
                        LatticeGradient *grad = nullptr);

// ---------------------------------------------------------------------------
// Model.

struct NerTrainConfig {
  SourceConfig source;
  AdamConfig adam;
  int batch_size = 8;      // sentences per update; <= 0 means full batch
  int max_epochs = 50;
  int patience = 5;        // epochs without dev improvement before stopping
  bool use_mixer = false;
  bool boundary = true;    // learn begin/end scores
  bool mask = true;        // BIO transition mask

  nlohmann::ordered_json ToJson() const;
  static NerTrainConfig FromJson(const nlohmann::json &j);
};

struct NerEpochLog {
  int epoch = 0;
  double loss = 0.0;       // summed training NLL seen during the epoch
  double dev_f1 = 0.0;     // labeled exact entity F1; NaN without dev data
};

struct NerTrainLog {
  std::vector<NerEpochLog> epochs;
  int best_epoch = 0;
};

class CrfModel {
 public:
  CrfModel() = default;
  // Emission weights start uniform in [-0.01, 0.01]; transitions and
  // boundary scores start at zero.
  CrfModel(Tagset tagset, Representer representer, bool use_mixer,
           bool boundary, bool mask, Rng &rng);

  const Tagset &tagset() const { return tagset_; }
  int dim() const { return representer_.dim(); }
  int num_tags() const { return tagset_.size(); }
  bool boundary() const { return boundary_; }
  bool mask() const { return mask_; }
  bool has_mixer() const { return mixer_.has_value(); }

  ChainScores Chain() const;
  // Emission scores E = H W^T + b for one sentence.
  Matrix Emissions(const AnnotatedSentence &sentence) const;
  Lattice BuildLattice(const AnnotatedSentence &sentence,
                       const ChainScores &chain) const;

  TagSequence Decode(const AnnotatedSentence &sentence) const;
  // Decoded entities with document character offsets and surfaces.
  std::vector<Entity> PredictEntities(const AnnotatedSentence &sentence) const;
  Matrix TagMarginals(const AnnotatedSentence &sentence) const;

  double Loss(const AnnotatedSentence &sentence, const TagSequence &gold) const;
  // Adds d(loss)/d(parameters) * scale to every parameter's gradient and
  // returns the (unscaled) loss.
  double AccumulateGradient(const AnnotatedSentence &sentence,
                            const TagSequence &gold, double scale = 1.0);

  std::vector<Parameter *> Parameters();
  void ZeroGrad();

  Parameter &transitions() { return transitions_; }
  Parameter &begin() { return begin_; }
  Parameter &end() { return end_; }
  Parameter &emission_weights() { return weights_; }
  Parameter &emission_bias() { return bias_; }
  Representer &representer() { return representer_; }
  const Representer &representer() const { return representer_; }

  // Provenance recorded into the model file.
  nlohmann::ordered_json training_config;
  std::uint64_t seed = 0;

  nlohmann::ordered_json ToJson() const;
  static CrfModel FromJson(const nlohmann::json &j);
  void Save(const std::filesystem::path &path) const;
  static CrfModel Load(const std::filesystem::path &path);

 private:
  Tagset tagset_ = Tagset::Schema();
  Representer representer_;
  std::optional<WindowMixer> mixer_;
  bool boundary_ = true;
  bool mask_ = true;
  Parameter transitions_;   // k x k
  Parameter begin_;         // 1 x k
  Parameter end_;           // 1 x k
  Parameter weights_;       // k x dim
  Parameter bias_;          // 1 x k
};

// Mini-batch Adam on the summed NLL, with per-epoch shuffling and early
// stopping on dev labeled entity F1. Returns the best-dev model (the last
// one when `dev` is empty). Throws ValidationError on an empty train set.
CrfModel TrainNer(std::span<const AnnotatedSentence> train,
                  std::span<const AnnotatedSentence> dev,
                  const NerTrainConfig &config, std::uint64_t seed,
                  NerTrainLog *log = nullptr);

// Decodes every sentence; `threads` > 1 fans out over sentences.
std::vector<std::vector<Entity>> PredictCorpusEntities(
    const CrfModel &model, std::span<const AnnotatedSentence> sentences,
    int threads = 1);

}  // namespace sciex

#endif  // SCIEX_CRF_H_
