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

#ifndef SCIEX_PARAMETERS_H_
#define SCIEX_PARAMETERS_H_

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sciex/matrix.h"
#include "sciex/rng.h"

namespace sciex {

// A trainable tensor with its gradient accumulator.
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;

  Parameter() = default;
  Parameter(std::string n, int rows, int cols)
      : name(std::move(n)), value(rows, cols), grad(rows, cols) {}

  void ZeroGrad() { grad.Fill(0.0); }
  void InitUniform(Rng &rng, double lo, double hi);
};

struct AdamConfig {
  double step = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam over a fixed list of parameters; moment buffers are bound to the
// list's order.
class Adam {
 public:
  Adam(AdamConfig config, std::vector<Parameter *> params);
  // Applies one update from the accumulated gradients and clears them.
  void Step();

 private:
  AdamConfig config_;
  std::vector<Parameter *> params_;
  std::vector<Matrix> first_;
  std::vector<Matrix> second_;
  long long t_ = 0;
};

// Row-major matrix <-> JSON array of numbers.
nlohmann::ordered_json MatrixToJson(const Matrix &m);
Matrix MatrixFromJson(const nlohmann::json &j, int rows, int cols);

// Copy with object keys sorted at every level, so that a value survives a
// trip through nlohmann::json unchanged.
nlohmann::ordered_json SortedKeys(const nlohmann::ordered_json &j);

}  // namespace sciex

#endif  // SCIEX_PARAMETERS_H_
