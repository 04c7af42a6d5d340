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

#include <set>
#include <string>

#include "depo/common.hpp"
#include "depo/ontology.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace depo;

TEST_CASE("catalog lists twelve classes in label order") {
  const auto& cat = aspect_catalog();
  REQUIRE(cat.size() == 12);
  CHECK(cat[0].token == "B");
  CHECK(cat[1].token == "EB");
  CHECK(cat[1].name == "Event Background");
  CHECK(cat[11].token == "O");
  std::set<std::string_view> codes;
  for (std::size_t i = 0; i < cat.size(); ++i) {
    codes.insert(cat[i].token);
    CHECK(index_of(cat[i].code) == i);
    CHECK(aspect_from_index(i) == cat[i].code);
    CHECK_FALSE(cat[i].definition.empty());
  }
  CHECK(codes.size() == 12);
}

TEST_CASE("role to aspect map") {
  CHECK(aspects_for_role(DeponentRole::Plaintiff) ==
        std::set<Aspect>{Aspect::B, Aspect::EB, Aspect::ED, Aspect::EC, Aspect::PPC, Aspect::TR, Aspect::IP});
  CHECK(aspects_for_role(DeponentRole::Defendant) == std::set<Aspect>{Aspect::B, Aspect::EB, Aspect::ED});
  CHECK(aspects_for_role(DeponentRole::ExpertWitness) ==
        std::set<Aspect>{Aspect::B, Aspect::PPC, Aspect::TR, Aspect::EE, Aspect::IP});
  CHECK(aspects_for_role(DeponentRole::FactWitness) ==
        std::set<Aspect>{Aspect::B, Aspect::EB, Aspect::ED, Aspect::EC, Aspect::PRD});
  CHECK(aspects_for_role(DeponentRole::RelatedOrganizationWitness) ==
        std::set<Aspect>{Aspect::B, Aspect::ED, Aspect::IP, Aspect::OPS, Aspect::PRD});
}

TEST_CASE("every role includes B and no role includes DP or O") {
  for (DeponentRole r : all_roles()) {
    CHECK(aspects_for_role(r).count(Aspect::B) == 1);
    CHECK(aspects_for_role(r).count(Aspect::DP) == 0);
    CHECK(aspects_for_role(r).count(Aspect::O) == 0);
  }
}

TEST_CASE("role tokens parse leniently and unknown roles name the token") {
  CHECK(parse_role("Plaintiff") == DeponentRole::Plaintiff);
  CHECK(parse_role("fact witness") == DeponentRole::FactWitness);
  CHECK(parse_role("EXPERT_WITNESS") == DeponentRole::ExpertWitness);
  CHECK(aspects_for_role("defendant").size() == 3);
  try {
    parse_role("juror");
    FAIL("expected an error");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("juror") != std::string::npos);
  }
}

TEST_CASE("label codec accepts codes and names case-insensitively") {
  CHECK(parse_label("eb") == Aspect::EB);
  CHECK(parse_label("Event Background") == Aspect::EB);
  CHECK(parse_label("  PRD ") == Aspect::PRD);
  CHECK(parse_label("plaintiff-related details") == Aspect::PRD);
  try {
    parse_label("XYZ");
    FAIL("expected an error");
  } catch (const InvalidArgument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("XYZ") != std::string::npos);
    CHECK(msg.find("OPS") != std::string::npos);
  }
}

TEST_CASE("codes round trip through the codec") {
  for (const auto& c : aspect_catalog()) {
    CHECK(parse_label(code_of(c.code)) == c.code);
    CHECK(parse_label(name_of(c.code)) == c.code);
  }
  CHECK_THROWS_AS(aspect_from_index(12), InvalidArgument);
}

TEST_CASE("catalog JSON carries roles per class") {
  const auto j = nlohmann::json::parse(catalog_json());
  REQUIRE(j.size() == 12);
  CHECK(j[0]["code"] == "B");
  CHECK(j[0]["roles"].size() == 5);
  CHECK(j[6]["code"] == "EE");
  CHECK(j[6]["roles"] == nlohmann::json::array({"ExpertWitness"}));
  CHECK(j[11]["roles"].empty());
}
