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

#include "sciex/labels.h"

#include <cctype>

namespace sciex {
namespace {

constexpr std::array<std::string_view, kNumEntityTypes> kEntityNames = {
    "Material",       "Participating-Material",
    "Synthesis",      "Characterization",
    "Environment",    "Phenomenon",
    "MStructure",     "Microstructure",
    "Phase",          "Property",
    "Descriptor",     "Operation",
    "Result",         "Application",
    "Number",         "Amount-Unit",
};

constexpr std::array<std::string_view, kNumRelationTypes> kRelationNames = {
    "Form-Of", "Condition-Of", "Observed-In", "Property-Of",
    "Input",   "Output",       "Result-Of",   "Next-Opr",
    "Coref",   "Number-Of",    "Amount-Of",
};

// Lowercase and drop separators so "Amount Unit", "amount_unit" and
// "Amount-Unit" all fold to "amountunit".
std::string Fold(std::string_view label) {
  std::string out;
  out.reserve(label.size());
  for (char c : label) {
    if (c == ' ' || c == '_' || c == '-' || c == '\t') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

template <typename Enum, std::size_t N>
std::optional<Enum> Lookup(const std::array<std::string_view, N> &names,
                           std::string_view label) {
  const std::string folded = Fold(label);
  if (folded.empty()) return std::nullopt;
  for (std::size_t i = 0; i < N; ++i) {
    if (Fold(names[i]) == folded) return static_cast<Enum>(i);
  }
  return std::nullopt;
}

template <std::size_t N>
std::string Join(const std::array<std::string_view, N> &names) {
  std::string out;
  for (std::size_t i = 0; i < N; ++i) {
    if (i > 0) out += ", ";
    out += names[i];
  }
  return out;
}

}  // namespace

std::string_view EntityTypeName(EntityType type) {
  return kEntityNames[static_cast<int>(type)];
}

std::string_view RelationTypeName(RelationType type) {
  return kRelationNames[static_cast<int>(type)];
}

const std::array<std::string_view, kNumEntityTypes> &EntityTypeNames() {
  return kEntityNames;
}

const std::array<std::string_view, kNumRelationTypes> &RelationTypeNames() {
  return kRelationNames;
}

std::optional<EntityType> ParseEntityType(std::string_view label) {
  const std::string folded = Fold(label);
  if (folded == "mesostructureormacrostructure" || folded == "mesostructure" ||
      folded == "macrostructure") {
    return EntityType::kMStructure;
  }
  return Lookup<EntityType>(kEntityNames, label);
}

std::optional<RelationType> ParseRelationType(std::string_view label) {
  return Lookup<RelationType>(kRelationNames, label);
}

std::string KnownEntityLabels() { return Join(kEntityNames); }
std::string KnownRelationLabels() { return Join(kRelationNames); }

Tagset Tagset::Schema() {
  std::vector<std::string> names;
  for (auto name : kEntityNames) names.emplace_back(name);
  return Tagset(std::move(names));
}

Tagset::Tagset(std::vector<std::string> type_names)
    : type_names_(std::move(type_names)) {}

std::string Tagset::TagName(int tag) const {
  if (tag == kOutside) return "O";
  return (IsBegin(tag) ? "B-" : "I-") + type_names_[TypeOf(tag)];
}

std::optional<int> Tagset::TagIndex(std::string_view name) const {
  if (name == "O") return kOutside;
  if (name.size() < 3 || name[1] != '-') return std::nullopt;
  const bool begin = name[0] == 'B';
  if (!begin && name[0] != 'I') return std::nullopt;
  const std::string_view type = name.substr(2);
  for (int t = 0; t < num_types(); ++t) {
    if (type_names_[t] == type) return begin ? Begin(t) : Inside(t);
  }
  return std::nullopt;
}

std::vector<std::string> Tagset::TagNames() const {
  std::vector<std::string> names;
  for (int t = 0; t < size(); ++t) names.push_back(TagName(t));
  return names;
}

bool Tagset::TransitionAllowed(int from, int to) const {
  if (!IsInside(to)) return true;
  return from != kOutside && TypeOf(from) == TypeOf(to);
}

bool IsWellFormedBio(const std::vector<int> &tags) {
  int prev = Tagset::kOutside;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const int tag = tags[i];
    if (Tagset::IsInside(tag)) {
      if (i == 0 || prev == Tagset::kOutside ||
          Tagset::TypeOf(prev) != Tagset::TypeOf(tag)) {
        return false;
      }
    }
    prev = tag;
  }
  return true;
}

}  // namespace sciex
