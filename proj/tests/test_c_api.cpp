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

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <string>

#include "depoaspect/depoaspect.h"
#include "doctest.h"
#include "json.hpp"

using nlohmann::json;

namespace {

// Takes ownership of a library string.
std::string take(char* s) {
  std::string out = s ? s : "";
  depo_free_string(s);
  return out;
}

depo_dataset* synth_set(int per_class, std::uint64_t seed) {
  depo_dataset* ds = nullptr;
  const std::string spec = "{\"per_class\": " + std::to_string(per_class) + "}";
  REQUIRE(depo_dataset_synth(spec.c_str(), seed, &ds) == DEPO_OK);
  return ds;
}

}  // namespace

TEST_CASE("version and catalog") {
  CHECK(std::strlen(depo_version()) > 0);
  CHECK(depo_aspect_count() == 12);
  CHECK(std::string(depo_aspect_code(0)) == "B");
  CHECK(std::string(depo_aspect_code(11)) == "O");
  CHECK(depo_aspect_code(12) == nullptr);
  size_t idx = 99;
  CHECK(depo_parse_label("ops", &idx) == DEPO_OK);
  CHECK(idx == 9);
  CHECK(depo_parse_label("nope", &idx) == DEPO_ERR_INVALID_ARGUMENT);
  CHECK(std::string(depo_last_error()).find("nope") != std::string::npos);
  char* cat = nullptr;
  REQUIRE(depo_catalog_json(&cat) == DEPO_OK);
  CHECK(json::parse(take(cat)).size() == 12);
}

TEST_CASE("null arguments are rejected, not dereferenced") {
  CHECK(depo_parse_label(nullptr, nullptr) == DEPO_ERR_INVALID_ARGUMENT);
  CHECK(depo_deposition_parse(nullptr, nullptr, nullptr, nullptr, nullptr) == DEPO_ERR_INVALID_ARGUMENT);
  CHECK(depo_canon_declarative("q", "a", nullptr) == DEPO_ERR_INVALID_ARGUMENT);
  depo_dataset_free(nullptr);
  depo_model_free(nullptr);
  depo_resources_free(nullptr);
  depo_deposition_free(nullptr);
  depo_free_string(nullptr);
}

TEST_CASE("parse a transcript through the C API") {
  depo_deposition* d = nullptr;
  REQUIRE(depo_deposition_parse("MR. SMITH: Objection.\nQ. Go on.\nA. Okay.", "dep1", "plaintiff", nullptr, &d) ==
          DEPO_OK);
  char* pairs = nullptr;
  REQUIRE(depo_deposition_pairs_jsonl(d, &pairs) == DEPO_OK);
  const json p = json::parse(take(pairs));
  CHECK(p["deposition_id"] == "dep1");
  CHECK(p["question"] == "Go on.");
  CHECK(p["role"] == "Plaintiff");
  char* disc = nullptr;
  REQUIRE(depo_deposition_discarded_json(d, &disc) == DEPO_OK);
  CHECK(json::parse(take(disc))[0]["reason"] == "colloquy");
  char* stats = nullptr;
  REQUIRE(depo_deposition_stats_json(d, &stats) == DEPO_OK);
  CHECK(json::parse(take(stats))["pairs"] == 1);
  depo_deposition_free(d);

  depo_deposition* none = nullptr;
  CHECK(depo_deposition_parse("MR. SMITH: Objection.", "dep2", nullptr, nullptr, &none) == DEPO_ERR_DATA);
  CHECK(none == nullptr);
  CHECK(std::string(depo_last_error()).find("no QA content") != std::string::npos);
  CHECK(depo_deposition_parse("Q. a\nA. b", "dep3", nullptr, "{\"bogus\": 1}", &none) == DEPO_ERR_INVALID_ARGUMENT);
}

TEST_CASE("canonicalize through the C API") {
  char* out = nullptr;
  REQUIRE(depo_canon_declarative("Were you able to do physical exercises before the accident?",
                                 "Yes. I used to play tennis before. Now I cannot stand for more than 5 minutes.",
                                 &out) == DEPO_OK);
  const json j = json::parse(take(out));
  CHECK(j["text"] ==
        "I was able to do physical exercises before the accident. I used to play tennis before. Now I cannot "
        "stand for more than 5 minutes.");
  CHECK(j["question_da"] == "YES_NO");
  CHECK(j["answer_da"] == "AFFIRM");
  CHECK(j["fallback"] == false);

  char* side = nullptr;
  size_t fallbacks = 7;
  REQUIRE(depo_canon_jsonl("{\"deposition_id\":\"d\",\"index\":0,\"question\":\"Were you at the site?\",\"answer\":\"No.\"}\n",
                           &side, &fallbacks) == DEPO_OK);
  CHECK(fallbacks == 0);
  CHECK(json::parse(take(side))["ds"] == "I was not at the site.");
}

TEST_CASE("datasets, splits and distributions") {
  depo_dataset* ds = synth_set(10, 3);
  CHECK(depo_dataset_size(ds) == 120);
  char* dj = nullptr;
  char* dt = nullptr;
  REQUIRE(depo_dataset_distribution(ds, &dj, &dt) == DEPO_OK);
  CHECK(json::parse(take(dj))["total"] == 120);
  CHECK(take(dt).find("Class") != std::string::npos);

  depo_dataset *tr = nullptr, *va = nullptr, *te = nullptr;
  char* warn = nullptr;
  REQUIRE(depo_dataset_split(ds, nullptr, 42, &tr, &va, &te, &warn) == DEPO_OK);
  CHECK(depo_dataset_size(tr) == 84);
  CHECK(depo_dataset_size(va) == 24);
  CHECK(depo_dataset_size(te) == 12);
  CHECK(json::parse(take(warn)).empty());

  char* jl = nullptr;
  REQUIRE(depo_dataset_to_jsonl(ds, &jl) == DEPO_OK);
  depo_dataset* back = nullptr;
  REQUIRE(depo_dataset_from_jsonl(jl, &back) == DEPO_OK);
  char* jl2 = nullptr;
  REQUIRE(depo_dataset_to_jsonl(back, &jl2) == DEPO_OK);
  CHECK(take(jl) == take(jl2));

  char* comp = nullptr;
  REQUIRE(depo_dataset_compose_jsonl(ds, "qa", &comp) == DEPO_OK);
  const std::string composed = take(comp);
  CHECK(json::parse(composed.substr(0, composed.find('\n')))["id"].get<std::string>().find("#qa") !=
        std::string::npos);
  CHECK(depo_dataset_compose_jsonl(ds, "zz", &comp) == DEPO_ERR_INVALID_ARGUMENT);
  CHECK(depo_dataset_split(ds, "{\"train\": 0.9}", 1, &tr, &va, &te, nullptr) == DEPO_ERR_INVALID_ARGUMENT);

  for (depo_dataset* p : {ds, tr, va, te, back}) depo_dataset_free(p);
}

TEST_CASE("train, evaluate, save and reload a model") {
  depo_dataset* ds = synth_set(20, 5);
  depo_dataset *tr = nullptr, *va = nullptr, *te = nullptr;
  REQUIRE(depo_dataset_split(ds, nullptr, 42, &tr, &va, &te, nullptr) == DEPO_OK);
  depo_resources* res = nullptr;
  REQUIRE(depo_resources_create(&res) == DEPO_OK);
  CHECK_FALSE(depo_resources_has_sentence_vectors(res));

  depo_model* m = nullptr;
  CHECK(depo_model_train(tr, va, res, "emb_head", "dsm", nullptr, 1, 0, &m) == DEPO_ERR_DATA);
  CHECK(std::string(depo_last_error()).find("no vectors") != std::string::npos);

  REQUIRE(depo_resources_synth_sentence_vectors(res, ds, "dsm", 64, 9) == DEPO_OK);
  CHECK(depo_resources_has_sentence_vectors(res));
  const char* hyper = "{\"learning_rate\": 0.01, \"hidden_size\": 32, \"max_epochs\": 30, \"batch_size\": 20}";
  CHECK(depo_model_train(tr, va, res, "emb_head", "dsm", hyper, 1, 1, &m) == DEPO_ERR_INVALID_ARGUMENT);
  REQUIRE(depo_model_train(tr, va, res, "emb_head", "dsm", hyper, 1, 0, &m) == DEPO_OK);

  char* report = nullptr;
  char* table = nullptr;
  REQUIRE(depo_model_evaluate(m, te, res, nullptr, &report, &table) == DEPO_OK);
  const double f1 = json::parse(take(report))["weighted_f1"].get<double>();
  CHECK(f1 > 0.5);
  CHECK(take(table).find("Avg.") != std::string::npos);

  char* preds = nullptr;
  REQUIRE(depo_model_predict_jsonl(m, te, res, nullptr, &preds) == DEPO_OK);
  const std::string pj = take(preds);
  CHECK(json::parse(pj.substr(0, pj.find('\n')))["probabilities"].size() == 12);

  const std::string path = (std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp")) + "/depo_c_api_test.model";
  REQUIRE(depo_model_save(m, path.c_str()) == DEPO_OK);
  depo_model* loaded = nullptr;
  CHECK(depo_model_load(path.c_str(), "cnn", &loaded) == DEPO_ERR_DATA);
  REQUIRE(depo_model_load(path.c_str(), "emb_head", &loaded) == DEPO_OK);
  char* info = nullptr;
  REQUIRE(depo_model_info_json(loaded, &info) == DEPO_OK);
  const json ij = json::parse(take(info));
  CHECK(ij["family"] == "emb_head");
  CHECK(ij["variant"] == "dsm");
  char* preds2 = nullptr;
  REQUIRE(depo_model_predict_jsonl(loaded, te, res, nullptr, &preds2) == DEPO_OK);
  CHECK(take(preds2) == pj);
  CHECK(depo_model_load("/nonexistent/x.model", nullptr, &loaded) == DEPO_ERR_IO);
  std::remove(path.c_str());

  for (depo_dataset* p : {ds, tr, va, te}) depo_dataset_free(p);
  depo_model_free(m);
  depo_model_free(loaded);
  depo_resources_free(res);
}

TEST_CASE("permutation test through the C API") {
  size_t g[6] = {0, 1, 2, 3, 4, 5};
  double obs = -1.0, p = -1.0;
  REQUIRE(depo_permutation_test(g, g, g, 6, 100, 1, &obs, &p) == DEPO_OK);
  CHECK(obs == 0.0);
  CHECK(p == 1.0);
  CHECK(depo_permutation_test(g, g, g, 6, 0, 1, &obs, &p) == DEPO_ERR_INVALID_ARGUMENT);
}

TEST_CASE("experiment through the C API") {
  const char* cfg = R"({
    "seed": 3,
    "dataset": {"synth": {"per_class": 10}},
    "sentence_dim": 16,
    "variants": ["qa"],
    "families": [{"family": "emb_head", "hyper": {"learning_rate": 0.01, "hidden_size": 16, "max_epochs": 2}}],
    "enforce_tuning_grid": false
  })";
  const std::string out = (std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp")) + "/depo_c_api_exp";
  char* results = nullptr;
  REQUIRE(depo_experiment_run(cfg, nullptr, out.c_str(), nullptr, 1, &results) == DEPO_OK);
  const std::string r = take(results);
  CHECK(json::parse(r)["cells"].size() == 1);
  char* text = nullptr;
  REQUIRE(depo_report_render(r.c_str(), &text) == DEPO_OK);
  CHECK(take(text).find("Q+A") != std::string::npos);
  char* file = nullptr;
  size_t len = 0;
  REQUIRE(depo_read_file((out + "/results.json").c_str(), &file, &len) == DEPO_OK);
  CHECK(take(file) == r);
  CHECK(depo_experiment_run("{\"variants\": []}", nullptr, nullptr, nullptr, 1, nullptr) == DEPO_ERR_INVALID_ARGUMENT);
  CHECK(depo_experiment_run("not json", nullptr, nullptr, nullptr, 1, nullptr) != DEPO_OK);
  std::error_code ec;
  std::filesystem::remove_all(out, ec);
}
