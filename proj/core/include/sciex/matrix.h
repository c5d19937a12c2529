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

#ifndef SCIEX_MATRIX_H_
#define SCIEX_MATRIX_H_

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace sciex {

// Dense row-major matrix of doubles. Small and value-semantic; the toolkit
// never needs more than a few hundred columns.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols),
        data_(static_cast<std::size_t>(rows) * cols, fill) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double &operator()(int r, int c) {
    assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
    return data_[static_cast<std::size_t>(r) * cols_ + c];
  }
  double operator()(int r, int c) const {
    assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
    return data_[static_cast<std::size_t>(r) * cols_ + c];
  }

  std::span<double> row(int r) {
    return {data_.data() + static_cast<std::size_t>(r) * cols_,
            static_cast<std::size_t>(cols_)};
  }
  std::span<const double> row(int r) const {
    return {data_.data() + static_cast<std::size_t>(r) * cols_,
            static_cast<std::size_t>(cols_)};
  }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  void Fill(double v) { std::fill(data_.begin(), data_.end(), v); }

  bool operator==(const Matrix &other) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

// y += A x, with A rows x cols, x of size cols.
inline void AddMatVec(const Matrix &a, std::span<const double> x,
                      std::span<double> y) {
  for (int r = 0; r < a.rows(); ++r) {
    const auto row = a.row(r);
    double acc = 0.0;
    for (int c = 0; c < a.cols(); ++c) acc += row[c] * x[c];
    y[r] += acc;
  }
}

// y += A^T x, with x of size rows.
inline void AddMatTVec(const Matrix &a, std::span<const double> x,
                       std::span<double> y) {
  for (int r = 0; r < a.rows(); ++r) {
    if (x[r] == 0.0) continue;
    const auto row = a.row(r);
    for (int c = 0; c < a.cols(); ++c) y[c] += row[c] * x[r];
  }
}

// A += scale * u v^T.
inline void AddOuter(std::span<const double> u, std::span<const double> v,
                     double scale, Matrix &a) {
  for (int r = 0; r < a.rows(); ++r) {
    const double ur = u[r] * scale;
    if (ur == 0.0) continue;
    auto row = a.row(r);
    for (int c = 0; c < a.cols(); ++c) row[c] += ur * v[c];
  }
}

}  // namespace sciex

#endif  // SCIEX_MATRIX_H_
