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

#ifndef SCIEX_LABELS_H_
#define SCIEX_LABELS_H_

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sciex {

// The 16 entity types of the process-structure-property schema, in
// canonical order. The order fixes tag indices and must not change.
enum class EntityType : int {
  kMaterial = 0,
  kParticipatingMaterial,
  kSynthesis,
  kCharacterization,
  kEnvironment,
  kPhenomenon,
  kMStructure,
  kMicrostructure,
  kPhase,
  kProperty,
  kDescriptor,
  kOperation,
  kResult,
  kApplication,
  kNumber,
  kAmountUnit,
};
inline constexpr int kNumEntityTypes = 16;

enum class RelationType : int {
  kFormOf = 0,
  kConditionOf,
  kObservedIn,
  kPropertyOf,
  kInput,
  kOutput,
  kResultOf,
  kNextOpr,
  kCoref,
  kNumberOf,
  kAmountOf,
};
inline constexpr int kNumRelationTypes = 11;

std::string_view EntityTypeName(EntityType type);
std::string_view RelationTypeName(RelationType type);

// Canonical hyphenated names in enum order.
const std::array<std::string_view, kNumEntityTypes> &EntityTypeNames();
const std::array<std::string_view, kNumRelationTypes> &RelationTypeNames();

// Resolves a label spelling to its canonical type. Accepts the canonical
// names, the long forms used in annotation guidelines ("Participating
// Material", "Mesostructure or Macrostructure", "Amount Unit", "Next Opr",
// "FormOf") and any variant that differs only in case, spaces, underscores or
// hyphens. Returns nullopt for anything else.
std::optional<EntityType> ParseEntityType(std::string_view label);
std::optional<RelationType> ParseRelationType(std::string_view label);

// Comma-separated canonical names, used in error messages.
std::string KnownEntityLabels();
std::string KnownRelationLabels();

// A BIO tag vocabulary over an ordered list of span types. Tag 0 is O;
// type i owns B = 1 + 2i and I = 2 + 2i. The full schema tagset has
// 2 * 16 + 1 = 33 tags.
class Tagset {
 public:
  static constexpr int kOutside = 0;

  // The 33-tag tagset over all entity types.
  static Tagset Schema();

  // A tagset over the given type names (used for small toy lattices).
  explicit Tagset(std::vector<std::string> type_names);

  int size() const { return 1 + 2 * num_types(); }
  int num_types() const { return static_cast<int>(type_names_.size()); }

  static int Begin(int type) { return 1 + 2 * type; }
  static int Inside(int type) { return 2 + 2 * type; }
  static bool IsBegin(int tag) { return tag > 0 && tag % 2 == 1; }
  static bool IsInside(int tag) { return tag > 0 && tag % 2 == 0; }
  // Type index of a B/I tag; -1 for O.
  static int TypeOf(int tag) { return tag == 0 ? -1 : (tag - 1) / 2; }

  const std::string &type_name(int type) const { return type_names_[type]; }
  std::string TagName(int tag) const;
  // Inverse of TagName; nullopt for unknown strings.
  std::optional<int> TagIndex(std::string_view name) const;
  std::vector<std::string> TagNames() const;

  // BIO well-formedness: I-X may only follow B-X or I-X and may not start a
  // sequence. Everything else is allowed.
  bool TransitionAllowed(int from, int to) const;
  bool StartAllowed(int tag) const { return !IsInside(tag); }

  bool operator==(const Tagset &other) const = default;

 private:
  std::vector<std::string> type_names_;
};

// True iff the tag sequence is in the BIO regular language.
bool IsWellFormedBio(const std::vector<int> &tags);

}  // namespace sciex

#endif  // SCIEX_LABELS_H_
