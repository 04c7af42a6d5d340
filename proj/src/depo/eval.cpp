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

#include "depo/eval.hpp"

#include <algorithm>
#include <cmath>

#include "depo/common.hpp"
#include "depo/rng.hpp"

namespace depo {
namespace {

void check_lengths(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw InvalidArgument(std::string(what) + ": length mismatch (" + std::to_string(a) + " vs " +
                          std::to_string(b) + ")");
  }
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

std::string pad_right(std::string s, std::size_t w) {
  if (s.size() < w) s.resize(w, ' ');
  return s;
}

std::string pad_left(std::string s, std::size_t w) {
  if (s.size() < w) s.insert(0, w - s.size(), ' ');
  return s;
}

}  // namespace

std::size_t ConfusionMatrix::total() const {
  std::size_t t = 0;
  for (std::size_t v : cells_) t += v;
  return t;
}

std::size_t ConfusionMatrix::trace() const {
  std::size_t t = 0;
  for (std::size_t i = 0; i < n_; ++i) t += at(i, i);
  return t;
}

std::size_t ConfusionMatrix::row_sum(std::size_t gold) const {
  std::size_t t = 0;
  for (std::size_t j = 0; j < n_; ++j) t += at(gold, j);
  return t;
}

std::size_t ConfusionMatrix::col_sum(std::size_t pred) const {
  std::size_t t = 0;
  for (std::size_t i = 0; i < n_; ++i) t += at(i, pred);
  return t;
}

ConfusionMatrix confusion(const std::vector<std::size_t>& golds,
                          const std::vector<std::size_t>& preds, std::size_t classes) {
  check_lengths(golds.size(), preds.size(), "confusion");
  ConfusionMatrix m(classes);
  for (std::size_t i = 0; i < golds.size(); ++i) {
    if (golds[i] >= classes || preds[i] >= classes) {
      throw InvalidArgument("confusion: label index out of range at position " + std::to_string(i));
    }
    ++m.at(golds[i], preds[i]);
  }
  return m;
}

EvalReport prf1(const ConfusionMatrix& m) {
  EvalReport r;
  r.confusion = m;
  const std::size_t n = m.classes();
  const std::size_t total = m.total();
  r.per_class.resize(n);
  double f1_sum = 0.0;
  std::size_t present = 0;
  double weighted = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    ClassScores& s = r.per_class[c];
    const std::size_t tp = m.at(c, c);
    s.support = m.row_sum(c);
    s.precision = ratio(tp, m.col_sum(c));
    s.recall = ratio(tp, s.support);
    const double den = s.precision + s.recall;
    s.f1 = den > 0.0 ? 2.0 * s.precision * s.recall / den : 0.0;
    if (s.support > 0) {
      f1_sum += s.f1;
      ++present;
      weighted += static_cast<double>(s.support) * s.f1;
    }
  }
  r.macro_f1 = present > 0 ? f1_sum / static_cast<double>(present) : 0.0;
  r.weighted_f1 = total > 0 ? weighted / static_cast<double>(total) : 0.0;
  r.accuracy = ratio(m.trace(), total);
  for (std::size_t g = 0; g < n; ++g) {
    for (std::size_t p = 0; p < n; ++p) {
      if (g != p && m.at(g, p) > 0) r.top_confusions.push_back({g, p, m.at(g, p)});
    }
  }
  std::stable_sort(r.top_confusions.begin(), r.top_confusions.end(),
                   [](const ConfusionCell& a, const ConfusionCell& b) { return a.count > b.count; });
  return r;
}

double weighted_f1(const std::vector<std::size_t>& golds, const std::vector<std::size_t>& preds,
                   std::size_t classes) {
  return prf1(confusion(golds, preds, classes)).weighted_f1;
}

PermutationResult paired_permutation_test(const std::vector<std::size_t>& preds_a,
                                          const std::vector<std::size_t>& preds_b,
                                          const std::vector<std::size_t>& golds,
                                          std::size_t n_iter, std::uint64_t seed,
                                          std::size_t classes) {
  check_lengths(preds_a.size(), golds.size(), "permutation test");
  check_lengths(preds_b.size(), golds.size(), "permutation test");
  if (n_iter == 0) throw InvalidArgument("permutation test: n_iter must be >= 1");
  PermutationResult res;
  res.n_iter = n_iter;
  res.observed = std::abs(weighted_f1(golds, preds_a, classes) - weighted_f1(golds, preds_b, classes));

  std::vector<std::size_t> pa(golds.size());
  std::vector<std::size_t> pb(golds.size());
  std::size_t at_least = 0;
  for (std::size_t it = 0; it < n_iter; ++it) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(it)));
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < golds.size(); ++i) {
      if (i % 64 == 0) bits = rng.next_u64();
      const bool swap = (bits >> (i % 64)) & 1U;
      pa[i] = swap ? preds_b[i] : preds_a[i];
      pb[i] = swap ? preds_a[i] : preds_b[i];
    }
    const double stat = std::abs(weighted_f1(golds, pa, classes) - weighted_f1(golds, pb, classes));
    if (stat >= res.observed) ++at_least;
  }
  res.p_value = static_cast<double>(1 + at_least) / static_cast<double>(1 + n_iter);
  return res;
}

std::vector<ErrorCell> error_report(const EvalReport& report,
                                    const std::vector<ErrorExample>& examples, std::size_t k,
                                    std::uint64_t seed) {
  if (k == 0) throw InvalidArgument("error_report: k must be >= 1");
  std::vector<ErrorCell> out;
  for (std::size_t i = 0; i < report.top_confusions.size() && i < k; ++i) {
    ErrorCell cell{report.top_confusions[i], {}};
    std::vector<const ErrorExample*> matches;
    for (const ErrorExample& e : examples) {
      if (e.gold == cell.cell.gold && e.pred == cell.cell.pred) matches.push_back(&e);
    }
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(cell.cell.gold * 1000 + cell.cell.pred)));
    rng.shuffle(matches);
    for (std::size_t j = 0; j < matches.size() && j < 3; ++j) cell.examples.push_back(matches[j]->text);
    out.push_back(std::move(cell));
  }
  return out;
}

std::string class_label(std::size_t index, std::size_t classes) {
  if (classes == kAspectCount) return std::string(code_of(aspect_from_index(index)));
  return "c" + std::to_string(index);
}

nlohmann::ordered_json report_to_json(const EvalReport& report) {
  using ojson = nlohmann::ordered_json;
  const std::size_t n = report.confusion.classes();
  ojson j;
  ojson per = ojson::array();
  for (std::size_t c = 0; c < n; ++c) {
    const ClassScores& s = report.per_class[c];
    per.push_back({{"class", class_label(c, n)},
                   {"precision", s.precision},
                   {"recall", s.recall},
                   {"f1", s.f1},
                   {"support", s.support}});
  }
  j["per_class"] = per;
  j["macro_f1"] = report.macro_f1;
  j["weighted_f1"] = report.weighted_f1;
  j["accuracy"] = report.accuracy;
  ojson rows = ojson::array();
  for (std::size_t g = 0; g < n; ++g) {
    ojson row = ojson::array();
    for (std::size_t p = 0; p < n; ++p) row.push_back(report.confusion.at(g, p));
    rows.push_back(row);
  }
  j["confusion"] = rows;
  ojson top = ojson::array();
  for (const ConfusionCell& c : report.top_confusions) {
    top.push_back({{"gold", class_label(c.gold, n)}, {"pred", class_label(c.pred, n)}, {"count", c.count}});
  }
  j["top_confusions"] = top;
  return j;
}

EvalReport report_from_json(const nlohmann::json& j) {
  try {
    const auto& rows = j.at("confusion");
    ConfusionMatrix m(rows.size());
    for (std::size_t g = 0; g < rows.size(); ++g) {
      if (rows[g].size() != rows.size()) throw DataError("confusion matrix is not square");
      for (std::size_t p = 0; p < rows.size(); ++p) m.at(g, p) = rows[g][p].get<std::size_t>();
    }
    return prf1(m);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("report JSON: ") + e.what());
  }
}

std::string render_report_table(const EvalReport& report) {
  const std::size_t n = report.confusion.classes();
  std::string out = pad_right("Class", 7) + pad_left("P", 7) + pad_left("R", 7) + pad_left("F1", 7) +
                    pad_left("Support", 9) + "\n";
  double wp = 0.0;
  double wr = 0.0;
  std::size_t total = 0;
  for (std::size_t c = 0; c < n; ++c) {
    const ClassScores& s = report.per_class[c];
    out += pad_right(class_label(c, n), 7) + pad_left(format_fixed(s.precision, 2), 7) +
           pad_left(format_fixed(s.recall, 2), 7) + pad_left(format_fixed(s.f1, 2), 7) +
           pad_left(std::to_string(s.support), 9) + "\n";
    wp += static_cast<double>(s.support) * s.precision;
    wr += static_cast<double>(s.support) * s.recall;
    total += s.support;
  }
  const double t = total > 0 ? static_cast<double>(total) : 1.0;
  out += pad_right("Avg.", 7) + pad_left(format_fixed(wp / t, 2), 7) +
         pad_left(format_fixed(wr / t, 2), 7) + pad_left(format_fixed(report.weighted_f1, 2), 7) +
         pad_left(std::to_string(total), 9) + "\n";
  out += "Avg. is support-weighted. Accuracy " + format_fixed(report.accuracy, 4) + ", macro F1 " +
         format_fixed(report.macro_f1, 4) + ".\n";
  return out;
}

}  // namespace depo
