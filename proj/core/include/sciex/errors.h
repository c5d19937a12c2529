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

#ifndef SCIEX_ERRORS_H_
#define SCIEX_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sciex {

// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &what) : std::runtime_error(what) {}
};

// Input violates a documented precondition or schema rule (bad label,
// overlapping gold entities, empty training set, ...).
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string &what) : Error(what) {}
};

// Malformed standoff annotation. Carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(int line, const std::string &what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// A T-line used a discontinuous span ("start end;start end").
class DiscontinuousSpanError : public ParseError {
 public:
  DiscontinuousSpanError(int line, const std::string &annotation_id)
      : ParseError(line, "discontinuous span in annotation " + annotation_id +
                             " is not supported"),
        annotation_id_(annotation_id) {}
  const std::string &annotation_id() const { return annotation_id_; }

 private:
  std::string annotation_id_;
};

// Malformed binary or structured file. Carries the byte offset where
// decoding failed.
class FormatError : public Error {
 public:
  FormatError(std::size_t offset, const std::string &what)
      : Error("byte " + std::to_string(offset) + ": " + what),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Filesystem failure (missing file, unwritable output).
class IoError : public Error {
 public:
  explicit IoError(const std::string &what) : Error(what) {}
};

}  // namespace sciex

#endif  // SCIEX_ERRORS_H_
