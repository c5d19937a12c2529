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

#ifndef SCIEX_LOG_MATH_H_
#define SCIEX_LOG_MATH_H_

#include <cmath>
#include <limits>
#include <span>

namespace sciex {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(exp(x) + exp(y)), exact at -inf.
inline double LogAdd(double x, double y) {
  if (x == kNegInf) return y;
  if (y == kNegInf) return x;
  if (x < y) std::swap(x, y);
  return x + std::log1p(std::exp(y - x));
}

// log(sum_i exp(v_i)) with the max shifted out. Returns -inf for an empty
// span or one holding only -inf.
inline double LogSumExp(std::span<const double> v) {
  double max = kNegInf;
  for (double x : v) max = std::max(max, x);
  if (max == kNegInf) return kNegInf;
  double sum = 0.0;
  for (double x : v) sum += std::exp(x - max);
  return max + std::log(sum);
}

// In-place softmax over the span; returns the log normalizer.
inline double SoftmaxInPlace(std::span<double> v) {
  const double lse = LogSumExp(v);
  for (double &x : v) x = std::exp(x - lse);
  return lse;
}

}  // namespace sciex

#endif  // SCIEX_LOG_MATH_H_
