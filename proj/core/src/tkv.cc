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

// TKV1 embedding file reader and writer.

#include <bit>
#include <cmath>
#include <cstring>

#include "sciex/corpus_io.h"
#include "sciex/encoder.h"
#include "sciex/errors.h"

namespace sciex {
namespace {

float ReadFloatLe(const unsigned char *p) {
  const std::uint32_t bits = static_cast<std::uint32_t>(p[0]) |
                             (static_cast<std::uint32_t>(p[1]) << 8) |
                             (static_cast<std::uint32_t>(p[2]) << 16) |
                             (static_cast<std::uint32_t>(p[3]) << 24);
  return std::bit_cast<float>(bits);
}

void WriteFloatLe(float value, std::string &out) {
  const auto bits = std::bit_cast<std::uint32_t>(value);
  out.push_back(static_cast<char>(bits & 0xFF));
  out.push_back(static_cast<char>((bits >> 8) & 0xFF));
  out.push_back(static_cast<char>((bits >> 16) & 0xFF));
  out.push_back(static_cast<char>((bits >> 24) & 0xFF));
}

}  // namespace

std::string EmbeddingStore::Key(std::string_view doc, int sent) {
  std::string key(doc);
  key.push_back('\x1f');
  key += std::to_string(sent);
  return key;
}

EmbeddingStore EmbeddingStore::Parse(std::string_view bytes) {
  const std::size_t newline = bytes.find('\n');
  if (bytes.empty() || bytes.front() != '{' || newline == std::string_view::npos) {
    throw FormatError(0, "bad magic: expected a JSON header line");
  }
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(0, newline));
  } catch (const nlohmann::json::parse_error &e) {
    throw FormatError(e.byte, std::string("bad header: ") + e.what());
  }
  if (!header.is_object() || header.value("version", 0) != 1) {
    throw FormatError(0, "bad magic: header version is not 1");
  }
  EmbeddingStore store;
  const auto &dim = header["dim"];
  if (!dim.is_number_integer() || dim.get<long long>() <= 0) {
    throw FormatError(0, "header dim must be a positive integer");
  }
  store.dim_ = dim.get<int>();
  const auto &sentences = header["sentences"];
  if (!sentences.is_array()) {
    throw FormatError(0, "header lacks a sentences array");
  }

  const std::size_t payload_start = newline + 1;
  const std::size_t row_bytes = static_cast<std::size_t>(store.dim_) * 4;
  std::size_t cursor = payload_start;
  std::size_t floats = 0;
  for (const auto &s : sentences) {
    if (!s.is_object() || !s.contains("doc") || !s.contains("sent") ||
        !s.contains("n") || !s["n"].is_number_integer() || s["n"].get<long long>() < 0) {
      throw FormatError(0, "malformed sentence entry in header: " + s.dump());
    }
    const std::string doc = s["doc"].get<std::string>();
    const int sent = s["sent"].get<int>();
    const int n = s["n"].get<int>();
    const std::size_t need = static_cast<std::size_t>(n) * row_bytes;
    if (cursor + need > bytes.size()) {
      const std::size_t have = (bytes.size() - cursor) / row_bytes;
      throw FormatError(bytes.size(),
                        "truncated payload: sentence (" + doc + ", " +
                            std::to_string(sent) + ") declares " +
                            std::to_string(n) + " rows but only " +
                            std::to_string(have) + " remain");
    }
    if (!store.entries_.emplace(Key(doc, sent), Entry{floats, n}).second) {
      throw FormatError(0, "duplicate sentence (" + doc + ", " +
                               std::to_string(sent) + ") in header");
    }
    cursor += need;
    floats += static_cast<std::size_t>(n) * store.dim_;
  }
  if (cursor != bytes.size()) {
    throw FormatError(cursor, std::to_string(bytes.size() - cursor) +
                                  " payload bytes beyond the rows declared "
                                  "in the header (dim mismatch?)");
  }

  store.values_.resize(floats);
  const auto *p = reinterpret_cast<const unsigned char *>(bytes.data()) +
                  payload_start;
  for (std::size_t i = 0; i < floats; ++i) {
    const float v = ReadFloatLe(p + 4 * i);
    if (!std::isfinite(v)) {
      throw FormatError(payload_start + 4 * i, "non-finite value in payload");
    }
    store.values_[i] = v;
  }
  return store;
}

EmbeddingStore EmbeddingStore::Load(const std::filesystem::path &path) {
  return Parse(ReadFile(path));
}

bool EmbeddingStore::Contains(std::string_view doc, int sent) const {
  return entries_.contains(Key(doc, sent));
}

int EmbeddingStore::RowCount(std::string_view doc, int sent) const {
  auto it = entries_.find(Key(doc, sent));
  return it == entries_.end() ? -1 : it->second.rows;
}

TokenMatrix EmbeddingStore::Lookup(std::string_view doc, int sent) const {
  auto it = entries_.find(Key(doc, sent));
  if (it == entries_.end()) {
    throw ValidationError("embedding store has no sentence (" +
                          std::string(doc) + ", " + std::to_string(sent) + ")");
  }
  TokenMatrix m(it->second.rows, dim_);
  auto out = m.values();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = values_[it->second.offset + i];
  }
  return m;
}

std::string EncodeTkv1(int dim, std::span<const EmbeddingRecord> records) {
  nlohmann::ordered_json header;
  header["version"] = 1;
  header["dim"] = dim;
  header["sentences"] = nlohmann::ordered_json::array();
  for (const auto &r : records) {
    if (r.rows.rows() > 0 && r.rows.cols() != dim) {
      throw ValidationError("record (" + r.doc + ", " + std::to_string(r.sent) +
                            ") has width " + std::to_string(r.rows.cols()) +
                            ", expected " + std::to_string(dim));
    }
    header["sentences"].push_back(
        {{"doc", r.doc}, {"sent", r.sent}, {"n", r.rows.rows()}});
  }
  std::string out = header.dump();
  out.push_back('\n');
  for (const auto &r : records) {
    for (double v : r.rows.values()) WriteFloatLe(static_cast<float>(v), out);
  }
  return out;
}

}  // namespace sciex
