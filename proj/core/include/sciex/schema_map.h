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

#ifndef SCIEX_SCHEMA_MAP_H_
#define SCIEX_SCHEMA_MAP_H_

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sciex/corpus.h"

namespace sciex {

// Label mapping from a foreign annotation schema onto this one. Targets are
// canonical names; several sources may share a target.
struct Mapping {
  std::string name;
  std::map<std::string, EntityType> entities;
  std::map<std::string, RelationType> relations;

  nlohmann::ordered_json ToJson() const;
};

// Parses {"entities": {src: tgt}, "relations": {src: tgt}}. Throws
// ValidationError for duplicate source keys, unknown targets or a wrong
// shape, and FormatError for malformed JSON.
Mapping ParseMapping(std::string_view json_text);
Mapping LoadMapping(const std::filesystem::path &path);

// Built-in presets by name; currently "annotated-materials-syntheses".
std::vector<std::string> PresetNames();
Mapping PresetMapping(std::string_view name);

struct Retention {
  long long kept = 0;
  long long total = 0;
  // kept / total; 0 for an empty corpus.
  double ratio() const {
    return total == 0 ? 0.0 : static_cast<double>(kept) / static_cast<double>(total);
  }
};

struct DroppedItem {
  std::string doc_id;
  std::string id;
  std::string label;
  std::string reason;
};

struct RetentionStats {
  Retention entities;
  Retention relations;
  std::vector<DroppedItem> dropped;

  nlohmann::ordered_json ToJson() const;
};

// Relabels entities and relations. A label listed as a source is mapped; a
// label that is already a target of the mapping is kept as is; anything
// else is dropped. Relations are also dropped when either endpoint was.
std::vector<Document> ApplyMapping(std::span<const StandoffDocument> corpus,
                                   const Mapping &mapping,
                                   RetentionStats *stats = nullptr);

}  // namespace sciex

#endif  // SCIEX_SCHEMA_MAP_H_
