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

#include "depo/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <map>
#include <set>
#include <thread>

#include "depo/common.hpp"
#include "depo/rng.hpp"

namespace depo {
namespace fs = std::filesystem;
namespace {

using ojson = nlohmann::ordered_json;

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  if (path.is_relative() && !base.empty()) return base / path;
  return path;
}

std::string cell_name(InputVariant v, Family f) {
  return std::string(variant_token(v)) + "/" + std::string(family_name(f));
}

void run_pool(std::vector<std::function<void()>>& tasks, unsigned jobs) {
  if (jobs <= 1 || tasks.size() <= 1) {
    for (auto& t : tasks) t();
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  const unsigned n = std::min<unsigned>(jobs, static_cast<unsigned>(tasks.size()));
  for (unsigned w = 0; w < n; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < tasks.size(); i = next++) tasks[i]();
    });
  }
  for (auto& w : workers) w.join();
}

}  // namespace

SynthSpec synth_spec_from_json(const nlohmann::json& j, std::uint64_t seed) {
  SynthSpec s;
  s.seed = seed;
  if (!j.is_object()) throw InvalidArgument("synth spec must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "per_class") {
        if (v.is_array()) {
          if (v.size() != kAspectCount) {
            throw InvalidArgument("synth.per_class must be a number or a list of 12 counts");
          }
          for (std::size_t i = 0; i < kAspectCount; ++i) s.per_class_counts[i] = v[i].get<std::size_t>();
        } else {
          s.per_class_counts.fill(v.get<std::size_t>());
        }
      } else if (key == "vocab_per_class") {
        s.vocab_per_class = v.get<std::size_t>();
      } else if (key == "shared_vocab") {
        s.shared_vocab = v.get<std::size_t>();
      } else if (key == "overlap") {
        s.overlap_fraction = v.get<double>();
      } else if (key == "signal") {
        const std::string sig = v.get<std::string>();
        if (sig == "both") s.signal = SignalPlacement::Both;
        else if (sig == "answer") s.signal = SignalPlacement::AnswerOnly;
        else throw InvalidArgument("synth.signal must be \"both\" or \"answer\"");
      } else if (key == "seed") {
        s.seed = v.get<std::uint64_t>();
      } else {
        throw InvalidArgument("unknown synth field '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("synth spec: ") + e.what());
  }
  return s;
}

SplitSpec split_spec_from_json(const nlohmann::json& s, std::uint64_t seed) {
  SplitSpec spec;
  spec.seed = seed;
  if (s.is_null()) return spec;
  if (!s.is_object()) throw InvalidArgument("split spec must be a JSON object");
  try {
    for (const auto& [key, v] : s.items()) {
      if (key == "train") spec.train = v.get<double>();
      else if (key == "val") spec.val = v.get<double>();
      else if (key == "test") spec.test = v.get<double>();
      else if (key == "stratified") spec.stratified = v.get<bool>();
      else if (key == "by_deposition") spec.by_deposition = v.get<bool>();
      else if (key == "seed") spec.seed = v.get<std::uint64_t>();
      else throw InvalidArgument("unknown split field '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("split spec: ") + e.what());
  }
  return spec;
}

namespace {

ojson synth_to_json(const SynthSpec& s) {
  ojson j;
  j["per_class"] = s.per_class_counts;
  j["vocab_per_class"] = s.vocab_per_class;
  j["shared_vocab"] = s.shared_vocab;
  j["overlap"] = s.overlap_fraction;
  j["signal"] = s.signal == SignalPlacement::Both ? "both" : "answer";
  j["seed"] = s.seed;
  return j;
}

LabeledSet load_dataset(const ExperimentConfig& c) {
  if (c.synth) return synth_corpus(*c.synth);
  if (!c.examples_path.empty()) {
    LabeledSet set = labeled_set_from_jsonl(read_file(c.examples_path));
    set.provenance = c.examples_path.filename().string();
    return set;
  }
  const auto pairs = parse_pairs_jsonl(read_file(c.pairs_path));
  const auto labels = parse_labels_jsonl(read_file(c.labels_path));
  std::optional<std::vector<DsRecord>> dsm;
  std::optional<std::vector<DsRecord>> dsc;
  if (!c.ds_m_path.empty()) dsm = parse_ds_jsonl(read_file(c.ds_m_path));
  if (!c.ds_c_path.empty()) dsc = parse_ds_jsonl(read_file(c.ds_c_path));
  BuildResult b = build_examples(pairs, labels, dsm ? &*dsm : nullptr, dsc ? &*dsc : nullptr);
  b.set.provenance = c.pairs_path.filename().string() + " + " + c.labels_path.filename().string();
  return std::move(b.set);
}

struct Splits {
  std::map<InputVariant, std::vector<ComposedExample>> train;
  std::map<InputVariant, std::vector<ComposedExample>> val;
  std::map<InputVariant, std::vector<ComposedExample>> test;
};

struct GridOutcome {
  std::vector<GridPoint> grid;
  std::size_t best_index = 0;
  TrainedModel model;
};

// Trains every grid point and keeps the model with the best validation F1
// (first on ties).
GridOutcome search(const std::vector<HyperParams>& points, InputVariant seed_variant, Family family,
                   std::uint64_t global_seed, const std::vector<ComposedExample>& train_set,
                   const std::vector<ComposedExample>& val_set, const Resources& res) {
  GridOutcome out;
  double best = -1.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    HyperParams h = points[i];
    h.seed = cell_seed(global_seed, seed_variant, family, i);
    TrainedModel tm = train(h, train_set, val_set, res);
    out.grid.push_back({h, tm.best_val_f1(), tm.best_epoch, tm.history.size()});
    if (tm.best_val_f1() > best) {
      best = tm.best_val_f1();
      out.best_index = i;
      out.model = std::move(tm);
    }
  }
  return out;
}

std::vector<std::size_t> golds_of(const std::vector<ComposedExample>& xs) {
  std::vector<std::size_t> g;
  g.reserve(xs.size());
  for (const ComposedExample& x : xs) g.push_back(x.label);
  return g;
}

ojson history_json(const std::vector<EpochRecord>& h) {
  ojson a = ojson::array();
  for (const EpochRecord& e : h) {
    a.push_back({{"epoch", e.epoch}, {"train_loss", e.train_loss}, {"val_weighted_f1", e.val_weighted_f1}});
  }
  return a;
}

std::string model_file_name(InputVariant v, Family f) {
  return std::string(variant_token(v)) + "_" + std::string(family_name(f)) + ".model";
}

std::string pad_right(std::string s, std::size_t w) {
  if (s.size() < w) s.resize(w, ' ');
  return s;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw InvalidArgument("experiment config must be a JSON object");
  static const std::set<std::string> known = {
      "seed",          "dataset",      "word_vectors", "word_dim",           "sentence_vectors",
      "sentence_dim",  "variants",     "families",     "split",              "significance",
      "ds_study",      "enforce_tuning_grid", "output_dir"};
  for (const auto& [key, v] : j.items()) {
    if (!known.count(key)) throw InvalidArgument("unknown config field '" + key + "'");
  }
  ExperimentConfig c;
  try {
    c.seed = j.value("seed", std::uint64_t{42});
    if (!j.contains("dataset")) throw InvalidArgument("config needs a \"dataset\" section");
    const auto& ds = j["dataset"];
    if (ds.contains("synth")) {
      c.synth = synth_spec_from_json(ds["synth"], c.seed);
    } else if (ds.contains("examples")) {
      c.examples_path = resolve(base_dir, ds["examples"].get<std::string>());
    } else if (ds.contains("pairs") && ds.contains("labels")) {
      c.pairs_path = resolve(base_dir, ds["pairs"].get<std::string>());
      c.labels_path = resolve(base_dir, ds["labels"].get<std::string>());
      if (ds.contains("ds_m")) c.ds_m_path = resolve(base_dir, ds["ds_m"].get<std::string>());
      if (ds.contains("ds_c")) c.ds_c_path = resolve(base_dir, ds["ds_c"].get<std::string>());
    } else {
      throw InvalidArgument("dataset must name \"synth\", \"examples\", or \"pairs\" + \"labels\"");
    }
    if (j.contains("word_vectors")) {
      const std::string wv = j["word_vectors"].get<std::string>();
      c.word_vectors = wv == "synthetic" ? wv : resolve(base_dir, wv).string();
    }
    c.word_dim = j.value("word_dim", c.word_dim);
    if (j.contains("sentence_vectors")) {
      const std::string sv = j["sentence_vectors"].get<std::string>();
      c.sentence_vectors = sv == "synthetic" ? sv : resolve(base_dir, sv).string();
    }
    c.sentence_dim = j.value("sentence_dim", c.sentence_dim);
    for (const auto& v : j.value("variants", nlohmann::json::array())) {
      c.variants.push_back(parse_variant(v.get<std::string>()));
    }
    for (const auto& f : j.value("families", nlohmann::json::array())) {
      FamilySpec fs;
      if (f.is_string()) {
        fs.family = parse_family(f.get<std::string>());
      } else {
        fs.family = parse_family(f.at("family").get<std::string>());
        if (f.contains("hyper")) fs.base = f["hyper"];
        if (f.contains("grid")) {
          for (const auto& [key, vals] : f["grid"].items()) {
            if (!vals.is_array() || vals.empty()) {
              throw InvalidArgument("grid axis '" + key + "' must be a non-empty list");
            }
            fs.grid.emplace_back(key, std::vector<nlohmann::json>(vals.begin(), vals.end()));
          }
        }
      }
      c.families.push_back(std::move(fs));
    }
    if (j.contains("split")) c.split = split_spec_from_json(j["split"], c.seed);
    if (j.contains("significance")) {
      c.significance_iters = j["significance"].value("n_iter", c.significance_iters);
    }
    c.ds_study = j.value("ds_study", false);
    c.enforce_tuning_grid = j.value("enforce_tuning_grid", true);
    if (j.contains("output_dir")) c.output_dir = resolve(base_dir, j["output_dir"].get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("experiment config: ") + e.what());
  }
  return c;
}

void ExperimentConfig::validate() const {
  if (variants.empty()) throw InvalidArgument("experiment config: no variants listed");
  if (families.empty()) throw InvalidArgument("experiment config: no families listed");
  split.validate();
  if (synth) synth->validate();
  auto must_exist = [](const fs::path& p, std::string_view what) {
    if (!p.empty() && !fs::exists(p)) {
      throw InvalidArgument(std::string(what) + " not found: " + p.string());
    }
  };
  must_exist(examples_path, "examples file");
  must_exist(pairs_path, "pairs file");
  must_exist(labels_path, "labels file");
  must_exist(ds_m_path, "DS-M sidecar");
  must_exist(ds_c_path, "DS-C sidecar");
  bool need_words = false;
  bool need_sentences = false;
  for (const FamilySpec& f : families) {
    need_words |= f.family == Family::Cnn;
    need_sentences |= f.family == Family::EmbHead;
    for (const HyperParams& h : expand_grid(f)) {
      if (enforce_tuning_grid) h.validate_tuning_grid();
      else h.validate();
    }
  }
  if (need_words && word_vectors != "synthetic") must_exist(word_vectors, "word vectors");
  if (need_sentences && sentence_vectors != "synthetic") must_exist(sentence_vectors, "sentence vectors");
  if (word_dim == 0 || sentence_dim == 0) throw InvalidArgument("vector dimensions must be > 0");
  if (significance_iters == 0) throw InvalidArgument("significance.n_iter must be >= 1");
}

ojson ExperimentConfig::to_json() const {
  ojson j;
  j["seed"] = seed;
  ojson ds;
  if (synth) ds["synth"] = synth_to_json(*synth);
  if (!examples_path.empty()) ds["examples"] = examples_path.filename().string();
  if (!pairs_path.empty()) ds["pairs"] = pairs_path.filename().string();
  if (!labels_path.empty()) ds["labels"] = labels_path.filename().string();
  j["dataset"] = ds;
  j["word_vectors"] = word_vectors == "synthetic" ? word_vectors : fs::path(word_vectors).filename().string();
  j["word_dim"] = word_dim;
  j["sentence_vectors"] =
      sentence_vectors == "synthetic" ? sentence_vectors : fs::path(sentence_vectors).filename().string();
  j["sentence_dim"] = sentence_dim;
  ojson vs = ojson::array();
  for (InputVariant v : variants) vs.push_back(variant_token(v));
  j["variants"] = vs;
  ojson fams = ojson::array();
  for (const FamilySpec& f : families) {
    ojson g;
    for (const auto& [k, vals] : f.grid) g[k] = vals;
    fams.push_back({{"family", family_name(f.family)}, {"hyper", f.base}, {"grid", g}});
  }
  j["families"] = fams;
  j["split"] = {{"train", split.train}, {"val", split.val}, {"test", split.test},
                {"stratified", split.stratified}, {"by_deposition", split.by_deposition},
                {"seed", split.seed}};
  j["significance"] = {{"n_iter", significance_iters}};
  j["ds_study"] = ds_study;
  j["enforce_tuning_grid"] = enforce_tuning_grid;
  return j;
}

std::vector<HyperParams> expand_grid(const FamilySpec& spec) {
  nlohmann::json base = spec.base.is_null() ? nlohmann::json::object() : spec.base;
  base["family"] = family_name(spec.family);
  std::vector<nlohmann::json> points{base};
  for (const auto& [key, values] : spec.grid) {
    std::vector<nlohmann::json> next;
    for (const nlohmann::json& p : points) {
      for (const nlohmann::json& v : values) {
        nlohmann::json q = p;
        q[key] = v;
        next.push_back(std::move(q));
      }
    }
    points = std::move(next);
  }
  std::vector<HyperParams> out;
  out.reserve(points.size());
  for (const nlohmann::json& p : points) out.push_back(HyperParams::from_json(p));
  return out;
}

std::uint64_t cell_seed(std::uint64_t global_seed, InputVariant variant, Family family,
                        std::size_t grid_index) {
  const std::string label = "cell/" + std::string(variant_token(variant)) + "/" +
                            std::string(family_name(family)) + "/" + std::to_string(grid_index);
  return derive_seed(global_seed, label);
}

ExperimentResult run_experiment(const ExperimentConfig& config, unsigned jobs) {
  config.validate();
  const LabeledSet data = load_dataset(config);
  if (data.empty()) throw DataError("experiment dataset is empty");
  SplitResult parts = split(data, config.split);

  ExperimentResult result;
  result.dataset_provenance = data.provenance;
  result.distribution = class_distribution(data);
  result.train_size = parts.train.size();
  result.val_size = parts.val.size();
  result.test_size = parts.test.size();
  result.split_warnings = parts.warnings;

  std::vector<InputVariant> needed = config.variants;
  if (config.ds_study) {
    for (InputVariant v : {InputVariant::DSM, InputVariant::DSC, InputVariant::DSCM}) {
      if (std::find(needed.begin(), needed.end(), v) == needed.end()) needed.push_back(v);
    }
  }

  // DS-C is only required by the variants that read it; a missing DS-C text
  // fails those cells, not the run.
  Splits sp;
  std::map<InputVariant, std::string> compose_errors;
  for (InputVariant v : needed) {
    try {
      sp.train[v] = compose_examples(parts.train, v);
      sp.val[v] = compose_examples(parts.val, v);
      sp.test[v] = compose_examples(parts.test, v);
    } catch (const Error& e) {
      compose_errors[v] = e.what();
    }
  }

  std::vector<InputVariant> composable;
  for (InputVariant v : needed) {
    if (!compose_errors.count(v)) composable.push_back(v);
  }

  bool need_words = false;
  bool need_sentences = false;
  for (const FamilySpec& f : config.families) {
    need_words |= f.family == Family::Cnn;
    need_sentences |= f.family == Family::EmbHead;
  }
  WordEmbeddings words;
  SentenceVectors sentences;
  if (need_words) {
    words = config.word_vectors == "synthetic"
                ? synth_word_vectors(data, config.word_dim, derive_seed(config.seed, "word-vectors"))
                : load_word_vectors(config.word_vectors).embeddings;
  }
  if (need_sentences) {
    sentences = config.sentence_vectors == "synthetic"
                    ? synth_sentence_vectors(data, composable, config.sentence_dim,
                                             derive_seed(config.seed, "sentence-vectors"))
                    : load_sentence_vectors(config.sentence_vectors);
  }
  const Resources res{need_words ? &words : nullptr, need_sentences ? &sentences : nullptr};

  std::vector<std::vector<HyperParams>> grids;
  for (const FamilySpec& f : config.families) grids.push_back(expand_grid(f));

  for (InputVariant v : config.variants) {
    for (const FamilySpec& f : config.families) {
      CellResult c;
      c.variant = v;
      c.family = f.family;
      result.cells.push_back(std::move(c));
    }
  }

  std::vector<std::function<void()>> tasks;
  for (std::size_t i = 0; i < result.cells.size(); ++i) {
    tasks.push_back([&, i] {
      CellResult& c = result.cells[i];
      const std::size_t fi = i % config.families.size();
      try {
        if (auto it = compose_errors.find(c.variant); it != compose_errors.end()) {
          throw DataError(it->second);
        }
        GridOutcome g = search(grids[fi], c.variant, c.family, config.seed, sp.train.at(c.variant),
                               sp.val.at(c.variant), res);
        g.model.variant = c.variant;
        c.grid = std::move(g.grid);
        c.best_index = g.best_index;
        const auto& test = sp.test.at(c.variant);
        c.test_predictions = predict_labels(g.model.model, test, res);
        c.test = prf1(confusion(golds_of(test), c.test_predictions));
        c.model = std::move(g.model);
        c.ok = true;
      } catch (const Error& e) {
        c.ok = false;
        c.error = e.what();
      }
    });
  }

  if (config.ds_study) {
    for (const FamilySpec& f : config.families) {
      for (InputVariant tv : {InputVariant::DSM, InputVariant::DSC, InputVariant::DSCM}) {
        StudyResult s;
        s.train_variant = tv;
        s.family = f.family;
        result.ds_study.push_back(std::move(s));
      }
    }
    for (std::size_t i = 0; i < result.ds_study.size(); ++i) {
      tasks.push_back([&, i] {
        StudyResult& s = result.ds_study[i];
        const std::size_t fi = i / 3;
        try {
          for (InputVariant v : {s.train_variant, InputVariant::DSM}) {
            if (auto it = compose_errors.find(v); it != compose_errors.end()) throw DataError(it->second);
          }
          GridOutcome g = search(grids[fi], s.train_variant, s.family, config.seed,
                                 sp.train.at(s.train_variant), sp.val.at(s.train_variant), res);
          s.val_weighted_f1 = g.model.best_val_f1();
          const auto& test = sp.test.at(InputVariant::DSM);
          s.test = prf1(confusion(golds_of(test), predict_labels(g.model.model, test, res)));
          s.ok = true;
        } catch (const Error& e) {
          s.ok = false;
          s.error = e.what();
        }
      });
    }
  }

  run_pool(tasks, jobs);

  const bool any_ok = std::any_of(result.cells.begin(), result.cells.end(),
                                  [](const CellResult& c) { return c.ok; });
  if (!any_ok) {
    std::string msg = "all experiment cells failed";
    if (!result.cells.empty()) msg += "; first error: " + result.cells.front().error;
    throw DataError(msg);
  }

  for (const auto& [v, xs] : sp.test) {
    if (std::find(config.variants.begin(), config.variants.end(), v) != config.variants.end()) {
      result.test_gold = golds_of(xs);
      break;
    }
  }
  for (std::size_t a = 0; a < result.cells.size(); ++a) {
    for (std::size_t b = a + 1; b < result.cells.size(); ++b) {
      const CellResult& ca = result.cells[a];
      const CellResult& cb = result.cells[b];
      if (!ca.ok || !cb.ok) continue;
      const std::string na = cell_name(ca.variant, ca.family);
      const std::string nb = cell_name(cb.variant, cb.family);
      const PermutationResult pr =
          paired_permutation_test(ca.test_predictions, cb.test_predictions, result.test_gold,
                                  config.significance_iters,
                                  derive_seed(config.seed, "significance/" + na + "/" + nb));
      result.significance.push_back({na, nb, pr.observed, pr.p_value});
    }
  }
  return result;
}

CompareTable compare_table(const std::vector<TableCell>& cells) {
  CompareTable t;
  for (const TableCell& c : cells) {
    if (std::find(t.rows.begin(), t.rows.end(), c.row) == t.rows.end()) t.rows.push_back(c.row);
    if (std::find(t.cols.begin(), t.cols.end(), c.col) == t.cols.end()) t.cols.push_back(c.col);
  }
  t.values.assign(t.rows.size(), std::vector<std::optional<double>>(t.cols.size()));
  t.best.assign(t.rows.size(), std::vector<bool>(t.cols.size(), false));
  std::optional<double> best;
  for (const TableCell& c : cells) {
    const auto r = static_cast<std::size_t>(std::find(t.rows.begin(), t.rows.end(), c.row) - t.rows.begin());
    const auto k = static_cast<std::size_t>(std::find(t.cols.begin(), t.cols.end(), c.col) - t.cols.begin());
    t.values[r][k] = c.value;
    if (c.value && (!best || *c.value > *best)) best = c.value;
  }
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    for (std::size_t k = 0; k < t.cols.size(); ++k) {
      t.best[r][k] = best && t.values[r][k] && *t.values[r][k] == *best;
    }
  }
  return t;
}

std::vector<TableCell> table_cells(const ExperimentResult& result) {
  std::vector<TableCell> cells;
  for (const CellResult& c : result.cells) {
    TableCell t{std::string(variant_display(c.variant)), std::string(family_name(c.family)), std::nullopt};
    if (c.ok) t.value = c.test.weighted_f1;
    cells.push_back(std::move(t));
  }
  return cells;
}

std::string render_compare_table(const CompareTable& table) {
  std::size_t w0 = 8;
  for (const std::string& r : table.rows) w0 = std::max(w0, r.size() + 2);
  std::size_t w = 10;
  for (const std::string& c : table.cols) w = std::max(w, c.size() + 2);
  std::string out = pad_right("Input", w0);
  for (const std::string& c : table.cols) out += pad_right(c, w);
  out += "\n";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    out += pad_right(table.rows[r], w0);
    for (std::size_t k = 0; k < table.cols.size(); ++k) {
      std::string cell = table.values[r][k] ? format_fixed(*table.values[r][k], 4) : "failed";
      if (table.best[r][k]) cell += "*";
      out += pad_right(cell, w);
    }
    out += "\n";
  }
  out += "Weighted F1 on the test split; * marks the best score (all ties marked).\n";
  return out;
}

ojson compare_table_json(const CompareTable& table) {
  ojson j;
  j["rows"] = table.rows;
  j["cols"] = table.cols;
  ojson vals = ojson::array();
  ojson best = ojson::array();
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    ojson vr = ojson::array();
    ojson br = ojson::array();
    for (std::size_t k = 0; k < table.cols.size(); ++k) {
      vr.push_back(table.values[r][k] ? ojson(*table.values[r][k]) : ojson());
      br.push_back(static_cast<bool>(table.best[r][k]));
    }
    vals.push_back(vr);
    best.push_back(br);
  }
  j["weighted_f1"] = vals;
  j["best"] = best;
  return j;
}

ojson results_to_json(const ExperimentResult& result, const ExperimentConfig& config) {
  ojson j;
  j["config"] = config.to_json();
  ojson dist = ojson::array();
  for (const ClassShare& s : result.distribution.classes) {
    dist.push_back({{"class", code_of(s.aspect)}, {"count", s.count}, {"percent", s.percent}});
  }
  j["dataset"] = {{"provenance", result.dataset_provenance},
                  {"size", result.distribution.total},
                  {"train", result.train_size},
                  {"val", result.val_size},
                  {"test", result.test_size},
                  {"distribution", dist},
                  {"split_warnings", result.split_warnings}};
  ojson cells = ojson::array();
  for (const CellResult& c : result.cells) {
    ojson cj;
    cj["variant"] = variant_token(c.variant);
    cj["family"] = family_name(c.family);
    cj["status"] = c.ok ? "ok" : "failed";
    if (!c.ok) {
      cj["error"] = c.error;
      cells.push_back(cj);
      continue;
    }
    ojson grid = ojson::array();
    for (std::size_t i = 0; i < c.grid.size(); ++i) {
      grid.push_back({{"index", i},
                      {"hyper", c.grid[i].hyper.to_json()},
                      {"val_weighted_f1", c.grid[i].val_weighted_f1},
                      {"best_epoch", c.grid[i].best_epoch},
                      {"epochs_run", c.grid[i].epochs_run}});
    }
    cj["best_index"] = c.best_index;
    cj["best_hyper"] = c.grid[c.best_index].hyper.to_json();
    cj["grid"] = grid;
    cj["history"] = history_json(c.model->history);
    cj["test"] = report_to_json(c.test);
    cj["model_file"] = "models/" + model_file_name(c.variant, c.family);
    cells.push_back(cj);
  }
  j["cells"] = cells;
  j["comparison"] = compare_table_json(compare_table(table_cells(result)));
  ojson sig = ojson::array();
  for (const SignificanceEntry& s : result.significance) {
    sig.push_back({{"a", s.a}, {"b", s.b}, {"observed", s.observed}, {"p_value", s.p_value}});
  }
  j["significance"] = {{"test", "paired approximate randomization on weighted F1"},
                       {"n_iter", config.significance_iters},
                       {"pairs", sig}};
  ojson study = ojson::array();
  for (const StudyResult& s : result.ds_study) {
    ojson sj{{"train_variant", variant_token(s.train_variant)},
             {"test_variant", "dsm"},
             {"family", family_name(s.family)},
             {"status", s.ok ? "ok" : "failed"}};
    if (s.ok) {
      sj["val_weighted_f1"] = s.val_weighted_f1;
      sj["test_weighted_f1"] = s.test.weighted_f1;
    } else {
      sj["error"] = s.error;
    }
    study.push_back(sj);
  }
  j["ds_study"] = study;
  return j;
}

std::string write_experiment_outputs(const ExperimentResult& result, const ExperimentConfig& config) {
  const std::string doc = results_to_json(result, config).dump(2) + "\n";
  if (config.output_dir.empty()) return doc;
  fs::create_directories(config.output_dir / "models");
  for (const CellResult& c : result.cells) {
    if (c.ok && c.model) save_model(*c.model, config.output_dir / "models" / model_file_name(c.variant, c.family));
  }
  write_file_atomic(config.output_dir / "tables.txt",
                    render_results_report(nlohmann::json::parse(doc)));
  write_file_atomic(config.output_dir / "results.json", doc);
  return doc;
}

std::string render_results_report(const nlohmann::json& results) {
  std::string out;
  try {
    const auto& cmp = results.at("comparison");
    CompareTable t;
    t.rows = cmp.at("rows").get<std::vector<std::string>>();
    t.cols = cmp.at("cols").get<std::vector<std::string>>();
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      std::vector<std::optional<double>> vr;
      std::vector<bool> br;
      for (std::size_t k = 0; k < t.cols.size(); ++k) {
        const auto& v = cmp["weighted_f1"][r][k];
        vr.push_back(v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()));
        br.push_back(cmp["best"][r][k].get<bool>());
      }
      t.values.push_back(vr);
      t.best.push_back(br);
    }
    out += "== Weighted F1 by input variant and model ==\n" + render_compare_table(t);

    for (const auto& c : results.at("cells")) {
      out += "\n== " + c.at("variant").get<std::string>() + " / " + c.at("family").get<std::string>() +
             " ==\n";
      if (c.at("status") != "ok") {
        out += "failed: " + c.value("error", std::string()) + "\n";
        continue;
      }
      out += render_report_table(report_from_json(c.at("test")));
    }

    const auto& sig = results.at("significance");
    if (!sig.at("pairs").empty()) {
      out += "\n== Significance (" + sig.at("test").get<std::string>() + ", n_iter " +
             std::to_string(sig.at("n_iter").get<std::size_t>()) + ") ==\n";
      for (const auto& p : sig.at("pairs")) {
        out += pad_right(p.at("a").get<std::string>() + " vs " + p.at("b").get<std::string>(), 36) +
               "diff " + format_fixed(p.at("observed").get<double>(), 4) + "  p " +
               format_fixed(p.at("p_value").get<double>(), 4) + "\n";
      }
    }
    const auto& study = results.at("ds_study");
    if (!study.empty()) {
      out += "\n== Declarative training study (test on DS-M) ==\n";
      for (const auto& s : study) {
        out += pad_right(s.at("family").get<std::string>() + " trained on " +
                             s.at("train_variant").get<std::string>(), 36);
        if (s.at("status") == "ok") {
          out += format_fixed(s.at("test_weighted_f1").get<double>(), 4) + "\n";
        } else {
          out += "failed: " + s.value("error", std::string()) + "\n";
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("results document: ") + e.what());
  }
  return out;
}

}  // namespace depo
