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

#include <filesystem>
#include <string>
#include <vector>

#include "depo/common.hpp"
#include "depo/experiment.hpp"
#include "doctest.h"
#include "json.hpp"
#include "support.hpp"

using namespace depo;
using nlohmann::json;

namespace {

json answer_signal_config() {
  return json::parse(R"({
    "seed": 11,
    "dataset": {"synth": {"per_class": 30, "signal": "answer", "overlap": 0.0}},
    "sentence_dim": 48,
    "variants": ["q", "dsm"],
    "families": [{"family": "emb_head", "hyper": {"learning_rate": 0.01, "hidden_size": 32, "max_epochs": 12}}],
    "significance": {"n_iter": 200},
    "enforce_tuning_grid": false
  })");
}

double cell_f1(const ExperimentResult& r, InputVariant v) {
  for (const CellResult& c : r.cells) {
    if (c.variant == v) return c.test.weighted_f1;
  }
  FAIL("no such cell");
  return 0.0;
}

}  // namespace

TEST_CASE("answer-borne signal favours the declarative variant") {
  const ExperimentConfig cfg = ExperimentConfig::from_json(answer_signal_config());
  cfg.validate();
  const ExperimentResult r = run_experiment(cfg);
  REQUIRE(r.cells.size() == 2);
  for (const CellResult& c : r.cells) CHECK(c.ok);
  CHECK(cell_f1(r, InputVariant::DSM) >= cell_f1(r, InputVariant::Q));
  REQUIRE(r.significance.size() == 1);
  CHECK(r.significance[0].p_value > 0.0);
  CHECK(r.train_size + r.val_size + r.test_size == 360);
}

TEST_CASE("grid search keeps the best validation point") {
  json j = answer_signal_config();
  j["variants"] = {"dsm"};
  j["families"][0]["grid"] = {{"dropout_rate", {0.1, 0.2}}};
  const ExperimentConfig cfg = ExperimentConfig::from_json(j);
  CHECK(expand_grid(cfg.families[0]).size() == 2);
  const ExperimentResult r = run_experiment(cfg);
  REQUIRE(r.cells.size() == 1);
  const CellResult& c = r.cells[0];
  REQUIRE(c.grid.size() == 2);
  CHECK(c.grid[0].hyper.dropout_rate == 0.1);
  CHECK(c.grid[1].hyper.dropout_rate == 0.2);
  const double best = std::max(c.grid[0].val_weighted_f1, c.grid[1].val_weighted_f1);
  CHECK(c.grid[c.best_index].val_weighted_f1 == best);
  if (c.grid[0].val_weighted_f1 == c.grid[1].val_weighted_f1) CHECK(c.best_index == 0);
}

TEST_CASE("grid expansion order") {
  FamilySpec f;
  f.family = Family::Cnn;
  f.grid = {{"hidden_size", {json(100), json(200)}}, {"dropout_rate", {json(0.1), json(0.3), json(0.5)}}};
  const auto points = expand_grid(f);
  REQUIRE(points.size() == 6);
  CHECK(points[0].hidden_size == 100);
  CHECK(points[0].dropout_rate == 0.1);
  CHECK(points[1].dropout_rate == 0.3);
  CHECK(points[3].hidden_size == 200);
  CHECK(cell_seed(1, InputVariant::Q, Family::Cnn, 0) != cell_seed(1, InputVariant::Q, Family::Cnn, 1));
  CHECK(cell_seed(1, InputVariant::Q, Family::Cnn, 0) == cell_seed(1, InputVariant::Q, Family::Cnn, 0));
}

TEST_CASE("config validation") {
  json j = answer_signal_config();
  j["variants"] = json::array();
  CHECK_THROWS_AS(ExperimentConfig::from_json(j).validate(), InvalidArgument);

  j = answer_signal_config();
  j["families"] = json::array();
  CHECK_THROWS_AS(ExperimentConfig::from_json(j).validate(), InvalidArgument);

  j = answer_signal_config();
  j["colour"] = "red";
  CHECK_THROWS_AS(ExperimentConfig::from_json(j), InvalidArgument);

  j = answer_signal_config();
  j["dataset"] = {{"examples", "does-not-exist.jsonl"}};
  CHECK_THROWS_AS(ExperimentConfig::from_json(j, "/nonexistent").validate(), InvalidArgument);

  // Off-grid hyperparameters are refused while the grid check is on.
  j = answer_signal_config();
  j["enforce_tuning_grid"] = true;
  CHECK_THROWS_AS(ExperimentConfig::from_json(j).validate(), InvalidArgument);

  j = answer_signal_config();
  j["variants"] = {"qq"};
  CHECK_THROWS_AS(ExperimentConfig::from_json(j), InvalidArgument);

  j = answer_signal_config();
  j["dataset"]["synth"]["overlap"] = 1.5;
  CHECK_THROWS_AS(ExperimentConfig::from_json(j).validate(), InvalidArgument);
}

TEST_CASE("split and synth sections") {
  const SplitSpec s = split_spec_from_json(json::parse(R"({"train": 0.8, "val": 0.1, "test": 0.1})"), 9);
  CHECK(s.train == 0.8);
  CHECK(s.seed == 9);
  CHECK(split_spec_from_json(json(), 3).train == 0.7);
  CHECK_THROWS_AS(split_spec_from_json(json::parse(R"({"trian": 0.8})"), 1), InvalidArgument);

  json counts = json::array();
  for (int i = 0; i < 12; ++i) counts.push_back(i + 1);
  const SynthSpec sy = synth_spec_from_json({{"per_class", counts}, {"signal", "answer"}}, 4);
  CHECK(sy.per_class_counts[11] == 12);
  CHECK(sy.signal == SignalPlacement::AnswerOnly);
  CHECK(sy.seed == 4);
  CHECK_THROWS_AS(synth_spec_from_json({{"per_class", {1, 2}}}, 4), InvalidArgument);
  CHECK_THROWS_AS(synth_spec_from_json({{"signal", "question"}}, 4), InvalidArgument);
}

TEST_CASE("comparison table marks every best cell") {
  const CompareTable one = compare_table({{"DS-M", "emb_head", 0.83}});
  REQUIRE(one.rows.size() == 1);
  CHECK(one.best[0][0]);
  CHECK(render_compare_table(one).find("0.83") != std::string::npos);

  const CompareTable tie = compare_table({{"Q", "cnn", 0.70},
                                          {"Q", "emb_head", 0.75},
                                          {"DS-M", "cnn", 0.75},
                                          {"DS-M", "emb_head", std::nullopt}});
  CHECK(tie.rows == std::vector<std::string>{"Q", "DS-M"});
  CHECK(tie.cols == std::vector<std::string>{"cnn", "emb_head"});
  CHECK_FALSE(tie.best[0][0]);
  CHECK(tie.best[0][1]);
  CHECK(tie.best[1][0]);
  CHECK_FALSE(tie.best[1][1]);
  CHECK_FALSE(tie.values[1][1].has_value());
  const auto tj = compare_table_json(tie);
  CHECK(tj["weighted_f1"][1][1].is_null());
}

TEST_CASE("outputs are written and independent of the worker count") {
  depo::testing::TempDir dir1("exp1"), dir2("exp2");
  json j = answer_signal_config();
  j["dataset"]["synth"]["per_class"] = 12;
  j["families"][0]["hyper"]["max_epochs"] = 3;
  ExperimentConfig a = ExperimentConfig::from_json(j);
  a.output_dir = dir1.path();
  ExperimentConfig b = a;
  b.output_dir = dir2.path();
  const std::string ra = write_experiment_outputs(run_experiment(a, 1), a);
  const std::string rb = write_experiment_outputs(run_experiment(b, 2), b);
  CHECK(ra == rb);
  CHECK(read_file(dir1.path() / "results.json") == ra);
  CHECK(std::filesystem::exists(dir1.path() / "tables.txt"));
  CHECK(std::filesystem::exists(dir1.path() / "models" / "dsm_emb_head.model"));
  CHECK(std::filesystem::exists(dir1.path() / "models" / "q_emb_head.model"));

  const json doc = json::parse(ra);
  CHECK(doc["cells"].size() == 2);
  CHECK(doc["dataset"]["size"] == 144);
  const std::string report = render_results_report(doc);
  CHECK(report.find("DS-M") != std::string::npos);
}

TEST_CASE("a failing cell is recorded without stopping the run") {
  json j = answer_signal_config();
  j["dataset"]["synth"]["per_class"] = 12;
  j["families"][0]["hyper"]["max_epochs"] = 2;
  j["variants"] = {"dsc", "dsm"};
  // Synthetic corpora carry DS-C text, so both cells run.
  const ExperimentResult ok = run_experiment(ExperimentConfig::from_json(j));
  CHECK(ok.cells.size() == 2);

  depo::testing::TempDir dir("exp-fail");
  const LabeledSet set = synth_corpus(SynthSpec::uniform(12));
  LabeledSet stripped = set;
  for (auto& e : stripped.examples) e.ds_c.reset();
  write_file_atomic(dir.path() / "examples.jsonl", labeled_set_to_jsonl(stripped));
  j["dataset"] = {{"examples", "examples.jsonl"}};
  const ExperimentConfig cfg = ExperimentConfig::from_json(j, dir.path());
  cfg.validate();
  const ExperimentResult r = run_experiment(cfg);
  REQUIRE(r.cells.size() == 2);
  CHECK_FALSE(r.cells[0].ok);
  CHECK(r.cells[0].error.find("DS-C") != std::string::npos);
  CHECK(r.cells[1].ok);

  j["variants"] = {"dsc"};
  CHECK_THROWS_AS(run_experiment(ExperimentConfig::from_json(j, dir.path())), DataError);
}
