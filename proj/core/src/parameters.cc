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

#include "sciex/parameters.h"

#include <cmath>

#include "sciex/errors.h"

namespace sciex {

void Parameter::InitUniform(Rng &rng, double lo, double hi) {
  for (double &v : value.values()) v = rng.Uniform(lo, hi);
}

Adam::Adam(AdamConfig config, std::vector<Parameter *> params)
    : config_(config), params_(std::move(params)) {
  for (const Parameter *p : params_) {
    first_.emplace_back(p->value.rows(), p->value.cols());
    second_.emplace_back(p->value.rows(), p->value.cols());
  }
}

void Adam::Step() {
  ++t_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (std::size_t k = 0; k < params_.size(); ++k) {
    auto value = params_[k]->value.values();
    auto grad = params_[k]->grad.values();
    auto m = first_[k].values();
    auto v = second_[k].values();
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double g = grad[i];
      m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g;
      v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g * g;
      value[i] -= config_.step * (m[i] / c1) /
                  (std::sqrt(v[i] / c2) + config_.epsilon);
      grad[i] = 0.0;
    }
  }
}

nlohmann::ordered_json MatrixToJson(const Matrix &m) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (double v : m.values()) j.push_back(v);
  return j;
}

Matrix MatrixFromJson(const nlohmann::json &j, int rows, int cols) {
  if (!j.is_array() ||
      j.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    throw ValidationError("expected " + std::to_string(rows) + "x" +
                          std::to_string(cols) + " values, found " +
                          std::to_string(j.is_array() ? j.size() : 0));
  }
  Matrix m(rows, cols);
  auto values = m.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = j[i].get<double>();
  }
  return m;
}

nlohmann::ordered_json SortedKeys(const nlohmann::ordered_json &j) {
  return nlohmann::ordered_json::parse(nlohmann::json::parse(j.dump()).dump());
}

}  // namespace sciex
