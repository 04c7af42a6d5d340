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

#include "depo/ontology.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "depo/common.hpp"
#include "json.hpp"

namespace depo {
namespace {

using enum Aspect;

constexpr std::array<AspectClass, kAspectCount> kCatalog = {{
    {B, "B", "Biographical",
     "This topic covers the background of the witness, family and work history, along with "
     "educational background, training, etc."},
    {EB, "EB", "Event Background",
     "This topic covers events that happened or conditions that existed just before the actual "
     "event (accident) that resulted in the legal claim."},
    {ED, "ED", "Event Details",
     "This topic covers all details about the accident event that resulted in the legal claim."},
    {EC, "EC", "Event Consequences",
     "This topic covers the results or effects of the event that resulted in the legal claim, "
     "including injuries, pain, medical treatment, lost income, and impact of the "
     "injury/accident on the person's life."},
    {PPC, "PPC", "Prior Physical Condition",
     "This topic covers what the injured person could do before this injury happened."},
    {TR, "TR", "Treatments Received",
     "This topic covers all medical treatment received by the plaintiff for the injury. It "
     "includes EMT services, diagnostic testing, hospitalization, medications, surgeries, "
     "medical appliances, therapy, and counseling."},
    {EE, "EE", "Expert Elaboration",
     "This topic covers any detailed explanation by an expert witness. It usually involves the "
     "use of precise medical, engineering, vocational or economic terminology, and may include "
     "detailed elaboration on the definition of the term."},
    {IP, "IP", "Impact on Plaintiff",
     "This topic covers any description of the physical, mental, emotional, or financial impact "
     "of the injury on the plaintiff, including physical limitations, recovery progress, and any "
     "planned or potential future treatment."},
    {DP, "DP", "Deposition Procedures",
     "This topic covers the instructions that are often provided to deponents."},
    {OPS, "OPS", "Operational procedures/inspections/maintenance/repairs",
     "Most injury claims involve movable (cars, boats, etc.) or immovable property (buildings, "
     "equipment, etc.). This topic covers the condition, operational procedures, inspection, "
     "maintenance, or repairs of the property involved in the accident/event."},
    {PRD, "PRD", "Plaintiff-related Details",
     "For fact witnesses other than the plaintiff, this topic covers information gathered from "
     "them about the plaintiff."},
    {O, "O", "Other",
     "This is to be used for any topic that the annotator believes is not covered in the list "
     "above."},
}};

constexpr std::array<DeponentRole, kRoleCount> kRoles = {
    DeponentRole::Plaintiff, DeponentRole::FactWitness, DeponentRole::ExpertWitness,
    DeponentRole::RelatedOrganizationWitness, DeponentRole::Defendant};

struct RoleInfo {
  std::string_view token;
  std::string_view definition;
};

constexpr std::array<RoleInfo, kRoleCount> kRoleInfo = {{
    {"Plaintiff",
     "Generally the person who files the case against the defendant requesting damages for "
     "injury caused by the defendant in an event."},
    {"FactWitness",
     "A witness to the event, or someone who knows facts about when/where/how the "
     "accident/injury occurred."},
    {"ExpertWitness",
     "A witness brought in for domain expertise pertaining to the case (medical, engineering, "
     "and other domain experts)."},
    {"RelatedOrganizationWitness",
     "A witness from an organization that is also involved in the case."},
    {"Defendant",
     "The party that has been sued, either a person or a representative of the organization "
     "being sued."},
}};

std::string normalize_key(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == ' ' || c == '_' || c == '-') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

}  // namespace

const std::array<AspectClass, kAspectCount>& aspect_catalog() { return kCatalog; }

Aspect aspect_from_index(std::size_t index) {
  if (index >= kAspectCount) {
    throw InvalidArgument("aspect index " + std::to_string(index) + " out of range [0,12)");
  }
  return static_cast<Aspect>(index);
}

std::string_view code_of(Aspect a) { return kCatalog[index_of(a)].token; }
std::string_view name_of(Aspect a) { return kCatalog[index_of(a)].name; }

Aspect parse_label(std::string_view text) {
  const std::string t = trim(text);
  for (const auto& c : kCatalog) {
    if (iequals(t, c.token) || iequals(t, c.name)) return c.code;
  }
  std::string valid;
  for (const auto& c : kCatalog) {
    if (!valid.empty()) valid += ", ";
    valid += c.token;
  }
  throw InvalidArgument("unknown aspect label '" + std::string(text) + "' (valid codes: " +
                        valid + ")");
}

const std::array<DeponentRole, kRoleCount>& all_roles() { return kRoles; }

std::string_view role_token(DeponentRole role) {
  return kRoleInfo[static_cast<std::size_t>(role)].token;
}

std::string_view role_definition(DeponentRole role) {
  return kRoleInfo[static_cast<std::size_t>(role)].definition;
}

DeponentRole parse_role(std::string_view text) {
  const std::string key = normalize_key(text);
  for (DeponentRole r : kRoles) {
    if (key == normalize_key(role_token(r))) return r;
  }
  throw InvalidArgument("unknown deponent role '" + std::string(text) + "'");
}

const std::set<Aspect>& aspects_for_role(DeponentRole role) {
  static const std::map<DeponentRole, std::set<Aspect>> kMap = {
      {DeponentRole::Plaintiff, {B, EB, ED, EC, PPC, TR, IP}},
      {DeponentRole::FactWitness, {B, EB, ED, EC, PRD}},
      {DeponentRole::ExpertWitness, {B, PPC, TR, EE, IP}},
      {DeponentRole::RelatedOrganizationWitness, {B, ED, IP, OPS, PRD}},
      {DeponentRole::Defendant, {B, EB, ED}},
  };
  return kMap.at(role);
}

std::set<Aspect> aspects_for_role(std::string_view role_text) {
  return aspects_for_role(parse_role(role_text));
}

std::string catalog_json() {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& c : kCatalog) {
    nlohmann::ordered_json entry;
    entry["code"] = c.token;
    entry["name"] = c.name;
    entry["definition"] = c.definition;
    nlohmann::ordered_json roles = nlohmann::ordered_json::array();
    for (DeponentRole r : kRoles) {
      if (aspects_for_role(r).count(c.code)) roles.push_back(role_token(r));
    }
    entry["roles"] = roles;
    doc.push_back(entry);
  }
  return doc.dump(2);
}

}  // namespace depo
