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

#ifndef DEPO_EXPERIMENT_HPP
#define DEPO_EXPERIMENT_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "depo/datasets.hpp"
#include "depo/eval.hpp"
#include "depo/models.hpp"
#include "json.hpp"

namespace depo {

// {"per_class": n | [12 counts], "vocab_per_class", "shared_vocab",
// "overlap", "signal": "both" | "answer", "seed"}. Missing fields keep the
// SynthSpec defaults; `seed` applies when the document has none.
SynthSpec synth_spec_from_json(const nlohmann::json& j, std::uint64_t seed);

// {"train", "val", "test", "stratified", "by_deposition", "seed"}; null
// yields the defaults.
SplitSpec split_spec_from_json(const nlohmann::json& j, std::uint64_t seed);

struct FamilySpec {
  Family family = Family::Cnn;
  nlohmann::json base = nlohmann::json::object();  // overrides on the family defaults
  // Grid axes in declaration order; the last axis varies fastest.
  std::vector<std::pair<std::string, std::vector<nlohmann::json>>> grid;
};

struct ExperimentConfig {
  std::uint64_t seed = 42;

  // Exactly one dataset source.
  std::optional<SynthSpec> synth;
  std::filesystem::path examples_path;  // labeled-set JSONL
  std::filesystem::path pairs_path;     // pairs JSONL, with labels_path
  std::filesystem::path labels_path;
  std::filesystem::path ds_m_path;  // optional sidecars
  std::filesystem::path ds_c_path;

  std::string word_vectors = "synthetic";  // path or "synthetic"
  std::size_t word_dim = 32;
  std::string sentence_vectors = "synthetic";
  std::size_t sentence_dim = 64;

  std::vector<InputVariant> variants;
  std::vector<FamilySpec> families;
  SplitSpec split;
  std::size_t significance_iters = 1000;
  bool ds_study = false;
  bool enforce_tuning_grid = true;
  std::filesystem::path output_dir;

  // Relative paths in `j` resolve against base_dir.
  static ExperimentConfig from_json(const nlohmann::json& j,
                                    const std::filesystem::path& base_dir = {});
  // Throws InvalidArgument on an empty variant or family list, an invalid
  // grid point, or a referenced file that does not exist.
  void validate() const;
  nlohmann::ordered_json to_json() const;
};

// Every hyperparameter point of the family's grid, in enumeration order.
// Seeds are left at the base value; the runner derives them per cell.
std::vector<HyperParams> expand_grid(const FamilySpec& spec);

std::uint64_t cell_seed(std::uint64_t global_seed, InputVariant variant, Family family,
                        std::size_t grid_index);

struct GridPoint {
  HyperParams hyper;
  double val_weighted_f1 = 0.0;
  std::size_t best_epoch = 0;
  std::size_t epochs_run = 0;
};

struct CellResult {
  InputVariant variant = InputVariant::Q;
  Family family = Family::Cnn;
  bool ok = false;
  std::string error;
  std::vector<GridPoint> grid;
  std::size_t best_index = 0;
  std::optional<TrainedModel> model;
  EvalReport test;
  std::vector<std::size_t> test_predictions;
};

struct SignificanceEntry {
  std::string a;
  std::string b;
  double observed = 0.0;
  double p_value = 1.0;
};

struct StudyResult {
  InputVariant train_variant = InputVariant::DSM;
  Family family = Family::Cnn;
  bool ok = false;
  std::string error;
  double val_weighted_f1 = 0.0;
  EvalReport test;  // evaluated on DS-M inputs
};

struct ExperimentResult {
  std::string dataset_provenance;
  ClassDistribution distribution;
  std::size_t train_size = 0;
  std::size_t val_size = 0;
  std::size_t test_size = 0;
  std::vector<std::string> split_warnings;
  std::vector<CellResult> cells;  // variant-major, family-minor
  std::vector<SignificanceEntry> significance;
  std::vector<StudyResult> ds_study;
  std::vector<std::size_t> test_gold;
};

// Trains every (variant, family) cell, picking the grid point with the best
// validation weighted F1, and evaluates it on the test split. A failing cell
// is recorded and the run continues; throws DataError if every cell fails.
// `jobs` > 1 runs cells on a worker pool; results do not depend on it.
ExperimentResult run_experiment(const ExperimentConfig& config, unsigned jobs = 1);

struct TableCell {
  std::string row;
  std::string col;
  std::optional<double> value;  // empty for a failed cell
};

struct CompareTable {
  std::vector<std::string> rows;
  std::vector<std::string> cols;
  std::vector<std::vector<std::optional<double>>> values;
  std::vector<std::vector<bool>> best;  // every cell equal to the maximum
};

CompareTable compare_table(const std::vector<TableCell>& cells);
std::vector<TableCell> table_cells(const ExperimentResult& result);
std::string render_compare_table(const CompareTable& table);
nlohmann::ordered_json compare_table_json(const CompareTable& table);

nlohmann::ordered_json results_to_json(const ExperimentResult& result,
                                       const ExperimentConfig& config);

// results.json, tables.txt and models/<variant>_<family>.model under
// config.output_dir. Returns the serialized results.json.
std::string write_experiment_outputs(const ExperimentResult& result,
                                     const ExperimentConfig& config);

// Text report from a results.json document: comparison grid, per-cell
// class tables, significance and the DS study.
std::string render_results_report(const nlohmann::json& results);

}  // namespace depo

#endif  // DEPO_EXPERIMENT_HPP
