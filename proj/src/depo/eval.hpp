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

#ifndef DEPO_EVAL_HPP
#define DEPO_EVAL_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "depo/ontology.hpp"
#include "json.hpp"

namespace depo {

// Square count matrix, rows = gold, columns = predicted.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t classes = kAspectCount)
      : n_(classes), cells_(classes * classes, 0) {}

  std::size_t classes() const { return n_; }
  std::size_t& at(std::size_t gold, std::size_t pred) { return cells_[gold * n_ + pred]; }
  std::size_t at(std::size_t gold, std::size_t pred) const { return cells_[gold * n_ + pred]; }
  std::size_t total() const;
  std::size_t trace() const;
  std::size_t row_sum(std::size_t gold) const;
  std::size_t col_sum(std::size_t pred) const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::size_t n_;
  std::vector<std::size_t> cells_;
};

ConfusionMatrix confusion(const std::vector<std::size_t>& golds,
                          const std::vector<std::size_t>& preds,
                          std::size_t classes = kAspectCount);

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct ConfusionCell {
  std::size_t gold = 0;
  std::size_t pred = 0;
  std::size_t count = 0;
};

struct EvalReport {
  std::vector<ClassScores> per_class;
  double macro_f1 = 0.0;     // over classes with support > 0
  double weighted_f1 = 0.0;  // support-weighted
  double accuracy = 0.0;
  ConfusionMatrix confusion;
  std::vector<ConfusionCell> top_confusions;  // off-diagonal, descending
};

// Zero denominators give 0 for precision, recall and F1.
EvalReport prf1(const ConfusionMatrix& m);

double weighted_f1(const std::vector<std::size_t>& golds, const std::vector<std::size_t>& preds,
                   std::size_t classes = kAspectCount);

struct PermutationResult {
  double observed = 0.0;
  double p_value = 1.0;
  std::size_t n_iter = 0;
};

// Paired approximate randomization on |weighted F1(a) - weighted F1(b)|.
// Iteration i draws its swap mask from derive_seed(seed, i).
PermutationResult paired_permutation_test(const std::vector<std::size_t>& preds_a,
                                          const std::vector<std::size_t>& preds_b,
                                          const std::vector<std::size_t>& golds,
                                          std::size_t n_iter, std::uint64_t seed,
                                          std::size_t classes = kAspectCount);

struct ErrorExample {
  std::size_t gold = 0;
  std::size_t pred = 0;
  std::string text;
};

struct ErrorCell {
  ConfusionCell cell;
  std::vector<std::string> examples;  // up to 3
};

// Top-k off-diagonal cells with up to three example texts each, sampled
// deterministically from `seed`.
std::vector<ErrorCell> error_report(const EvalReport& report,
                                    const std::vector<ErrorExample>& examples, std::size_t k,
                                    std::uint64_t seed = 42);

// Class labels used in exports: aspect codes for 12 classes, "c<i>" otherwise.
std::string class_label(std::size_t index, std::size_t classes);

nlohmann::ordered_json report_to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& j);

// Per-class P / R / F1 table with an "Avg." row (support-weighted).
std::string render_report_table(const EvalReport& report);

}  // namespace depo

#endif  // DEPO_EVAL_HPP
