// Copyright 2026 The depoaspect Authors
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

#ifndef DEPO_ONTOLOGY_HPP
#define DEPO_ONTOLOGY_HPP

#include <array>
#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace depo {

// Aspect labels for accident/claim depositions. The enumerator value is the
// label index used by every model and confusion matrix.
enum class Aspect : std::size_t {
  B = 0,
  EB,
  ED,
  EC,
  PPC,
  TR,
  EE,
  IP,
  DP,
  OPS,
  PRD,
  O,
};

inline constexpr std::size_t kAspectCount = 12;

// Bumped whenever the label order or membership changes; model snapshots
// record it and refuse to load across versions.
inline constexpr int kLabelCodecVersion = 1;

struct AspectClass {
  Aspect code;
  std::string_view token;
  std::string_view name;
  std::string_view definition;
};

enum class DeponentRole {
  Plaintiff,
  FactWitness,
  ExpertWitness,
  RelatedOrganizationWitness,
  Defendant,
};

inline constexpr std::size_t kRoleCount = 5;

const std::array<AspectClass, kAspectCount>& aspect_catalog();

constexpr std::size_t index_of(Aspect a) { return static_cast<std::size_t>(a); }
Aspect aspect_from_index(std::size_t index);

std::string_view code_of(Aspect a);
std::string_view name_of(Aspect a);

// Case-insensitive match on the short code or the full name. Throws
// InvalidArgument listing the valid codes when nothing matches.
Aspect parse_label(std::string_view text);

const std::array<DeponentRole, kRoleCount>& all_roles();
std::string_view role_token(DeponentRole role);
std::string_view role_definition(DeponentRole role);

// Accepts the canonical token ("FactWitness") as well as spaced or
// underscored spellings ("fact witness", "fact_witness").
DeponentRole parse_role(std::string_view text);

const std::set<Aspect>& aspects_for_role(DeponentRole role);
std::set<Aspect> aspects_for_role(std::string_view role_text);

// {code, name, definition, roles: [...]} per aspect, as a JSON array.
std::string catalog_json();

}  // namespace depo

#endif  // DEPO_ONTOLOGY_HPP
