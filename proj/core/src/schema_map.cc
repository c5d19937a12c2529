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

#include "sciex/schema_map.h"

#include <set>

#include "sciex/corpus_io.h"
#include "sciex/errors.h"
#include "sciex/presets_data.h"

namespace sciex {
namespace {

// Rejects repeated keys inside any object; nlohmann keeps the last one
// silently otherwise.
nlohmann::json ParseStrict(std::string_view text) {
  std::vector<std::set<std::string>> keys;
  std::string duplicate;
  auto callback = [&](int, nlohmann::json::parse_event_t event,
                      nlohmann::json &parsed) {
    using Event = nlohmann::json::parse_event_t;
    if (event == Event::object_start) {
      keys.emplace_back();
    } else if (event == Event::object_end) {
      keys.pop_back();
    } else if (event == Event::key) {
      const auto key = parsed.get<std::string>();
      if (!keys.back().insert(key).second && duplicate.empty()) {
        duplicate = key;
      }
    }
    return true;
  };
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text, callback);
  } catch (const nlohmann::json::parse_error &e) {
    throw FormatError(e.byte, std::string("mapping: ") + e.what());
  }
  if (!duplicate.empty()) {
    throw ValidationError("mapping lists source label '" + duplicate +
                          "' more than once");
  }
  return j;
}

template <typename T, typename Parse>
std::map<std::string, T> ReadSection(const nlohmann::json &j, const char *name,
                                     Parse parse, const std::string &known) {
  std::map<std::string, T> out;
  if (!j.contains(name)) return out;
  const auto &section = j[name];
  if (!section.is_object()) {
    throw ValidationError(std::string("mapping field '") + name +
                          "' must be an object");
  }
  for (const auto &[source, target] : section.items()) {
    if (!target.is_string()) {
      throw ValidationError("mapping target for '" + source + "' is not a string");
    }
    const auto parsed = parse(target.template get<std::string>());
    if (!parsed) {
      throw ValidationError("mapping target '" + target.template get<std::string>() +
                            "' for '" + source + "' is not one of: " + known);
    }
    out.emplace(source, *parsed);
  }
  return out;
}

}  // namespace

Mapping ParseMapping(std::string_view json_text) {
  const nlohmann::json j = ParseStrict(json_text);
  if (!j.is_object()) throw ValidationError("mapping must be a JSON object");
  Mapping m;
  m.name = j.value("name", "");
  m.entities = ReadSection<EntityType>(j, "entities", ParseEntityType,
                                       KnownEntityLabels());
  m.relations = ReadSection<RelationType>(j, "relations", ParseRelationType,
                                          KnownRelationLabels());
  return m;
}

Mapping LoadMapping(const std::filesystem::path &path) {
  return ParseMapping(ReadFile(path));
}

std::vector<std::string> PresetNames() { return {"annotated-materials-syntheses"}; }

Mapping PresetMapping(std::string_view name) {
  if (name == "annotated-materials-syntheses") {
    return ParseMapping(presets::kAnnotatedMaterialsSyntheses);
  }
  throw ValidationError("unknown mapping preset '" + std::string(name) + "'");
}

nlohmann::ordered_json Mapping::ToJson() const {
  nlohmann::ordered_json j;
  j["name"] = name;
  j["entities"] = nlohmann::ordered_json::object();
  for (const auto &[s, t] : entities) j["entities"][s] = EntityTypeName(t);
  j["relations"] = nlohmann::ordered_json::object();
  for (const auto &[s, t] : relations) j["relations"][s] = RelationTypeName(t);
  return j;
}

nlohmann::ordered_json RetentionStats::ToJson() const {
  nlohmann::ordered_json j;
  j["entities"] = {{"kept", entities.kept},
                   {"total", entities.total},
                   {"ratio", entities.ratio()}};
  j["relations"] = {{"kept", relations.kept},
                    {"total", relations.total},
                    {"ratio", relations.ratio()}};
  j["dropped"] = nlohmann::ordered_json::array();
  for (const auto &d : dropped) {
    j["dropped"].push_back(
        {{"doc_id", d.doc_id}, {"id", d.id}, {"label", d.label}, {"reason", d.reason}});
  }
  return j;
}

std::vector<Document> ApplyMapping(std::span<const StandoffDocument> corpus,
                                   const Mapping &mapping,
                                   RetentionStats *stats) {
  std::set<std::string> entity_targets, relation_targets;
  for (const auto &[s, t] : mapping.entities) {
    entity_targets.emplace(EntityTypeName(t));
  }
  for (const auto &[s, t] : mapping.relations) {
    relation_targets.emplace(RelationTypeName(t));
  }
  auto map_entity = [&](const std::string &label) -> std::optional<EntityType> {
    if (auto it = mapping.entities.find(label); it != mapping.entities.end()) {
      return it->second;
    }
    if (entity_targets.contains(label)) return ParseEntityType(label);
    return std::nullopt;
  };
  auto map_relation = [&](const std::string &label) -> std::optional<RelationType> {
    if (auto it = mapping.relations.find(label); it != mapping.relations.end()) {
      return it->second;
    }
    if (relation_targets.contains(label)) return ParseRelationType(label);
    return std::nullopt;
  };

  RetentionStats local;
  std::vector<Document> out;
  out.reserve(corpus.size());
  for (const auto &raw : corpus) {
    Document doc;
    doc.id = raw.id;
    doc.text = raw.text;
    std::set<std::string> kept_ids;
    for (const auto &e : raw.entities) {
      ++local.entities.total;
      const auto type = map_entity(e.label);
      if (!type) {
        local.dropped.push_back({raw.id, e.id, e.label, "unmapped entity label"});
        continue;
      }
      ++local.entities.kept;
      kept_ids.insert(e.id);
      doc.entities.push_back({e.id, *type, e.start, e.end, e.surface});
    }
    for (const auto &r : raw.relations) {
      ++local.relations.total;
      const auto type = map_relation(r.label);
      if (!type) {
        local.dropped.push_back({raw.id, r.id, r.label, "unmapped relation label"});
        continue;
      }
      if (!kept_ids.contains(r.head) || !kept_ids.contains(r.tail)) {
        local.dropped.push_back({raw.id, r.id, r.label, "endpoint entity dropped"});
        continue;
      }
      ++local.relations.kept;
      doc.relations.push_back({r.id, *type, r.head, r.tail});
    }
    out.push_back(std::move(doc));
  }
  if (stats != nullptr) *stats = std::move(local);
  return out;
}

}  // namespace sciex
