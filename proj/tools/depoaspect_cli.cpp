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

// depoaspect command-line tool. Talks to the library through the C API only.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include "CLI11.hpp"
#include "depoaspect/depoaspect.h"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr std::uint64_t kDefaultSeed = 42;

// Carries an exit code and message up to main.
struct Failure {
  int code;
  std::string kind;
  std::string message;
};

[[noreturn]] void fail_status(depo_status st, const std::string& context) {
  std::string msg = depo_last_error();
  if (!context.empty()) msg = context + ": " + msg;
  switch (st) {
    case DEPO_ERR_INVALID_ARGUMENT:
      throw Failure{kExitUsage, "usage", msg};
    case DEPO_ERR_IO:
      throw Failure{kExitData, "io", msg};
    case DEPO_ERR_DATA:
      throw Failure{kExitData, "data", msg};
    default:
      throw Failure{kExitData, "internal", msg};
  }
}

void check(depo_status st, const std::string& context = {}) {
  if (st != DEPO_OK) fail_status(st, context);
}

[[noreturn]] void missing_input(const std::string& flag, const std::string& why) {
  throw Failure{kExitData, "data", "missing input " + flag + ": " + why};
}

// Owns a string returned by the library.
class CStr {
 public:
  CStr() = default;
  ~CStr() { depo_free_string(p_); }
  CStr(const CStr&) = delete;
  CStr& operator=(const CStr&) = delete;
  char** out() { return &p_; }
  std::string str() const { return p_ ? std::string(p_) : std::string(); }

 private:
  char* p_ = nullptr;
};

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using DatasetPtr = std::unique_ptr<depo_dataset, Deleter<depo_dataset, depo_dataset_free>>;
using ResourcesPtr = std::unique_ptr<depo_resources, Deleter<depo_resources, depo_resources_free>>;
using ModelPtr = std::unique_ptr<depo_model, Deleter<depo_model, depo_model_free>>;
using DepositionPtr =
    std::unique_ptr<depo_deposition, Deleter<depo_deposition, depo_deposition_free>>;

std::string read_text(const std::string& path) {
  CStr s;
  check(depo_read_file(path.c_str(), s.out(), nullptr));
  return s.str();
}

void write_text(const std::string& path, const std::string& data) {
  check(depo_write_file_atomic(path.c_str(), data.data(), data.size()));
}

// Sends `data` to stdout when requested, otherwise to `path`.
void emit(bool to_stdout, const std::string& path, const std::string& data, const char* what) {
  if (to_stdout) {
    std::cout << data;
    std::cout.flush();
    return;
  }
  if (path.empty()) throw Failure{kExitUsage, "usage", std::string("--out is required for ") + what + " (or pass --stdout)"};
  write_text(path, data);
  std::cerr << "wrote " << path << "\n";
}

// Dataset inputs shared by split, train and eval.
struct DataArgs {
  std::string examples;
  std::string pairs;
  std::string labels;
  std::string ds_m;
  std::string ds_c;

  void add(CLI::App* app, const std::string& examples_flag, const std::string& desc) {
    app->add_option(examples_flag, examples, desc);
    app->add_option("--pairs", pairs, "pairs JSONL (with --labels)");
    app->add_option("--labels", labels, "labels JSONL");
    app->add_option("--ds-m", ds_m, "machine DS sidecar JSONL");
    app->add_option("--ds-c", ds_c, "human DS sidecar JSONL");
  }

  DatasetPtr load(const std::string& examples_flag) const {
    depo_dataset* ds = nullptr;
    if (!examples.empty()) {
      check(depo_dataset_from_jsonl(read_text(examples).c_str(), &ds), examples);
      return DatasetPtr(ds);
    }
    if (pairs.empty() || labels.empty()) {
      missing_input(examples_flag, "give a labeled examples file, or --pairs and --labels");
    }
    const std::string p = read_text(pairs);
    const std::string l = read_text(labels);
    std::optional<std::string> m;
    std::optional<std::string> c;
    if (!ds_m.empty()) m = read_text(ds_m);
    if (!ds_c.empty()) c = read_text(ds_c);
    CStr summary;
    check(depo_dataset_build(p.c_str(), l.c_str(), m ? m->c_str() : nullptr, c ? c->c_str() : nullptr,
                             &ds, summary.out()));
    std::cerr << "dataset: " << summary.str() << "\n";
    return DatasetPtr(ds);
  }
};

// Vector inputs for train and eval.
struct VectorArgs {
  std::string word_vectors;
  std::size_t word_dim = 32;
  std::string sentence_vectors;
  std::size_t sentence_dim = 64;
  std::uint64_t vector_seed = kDefaultSeed;

  void add(CLI::App* app) {
    app->add_option("--word-vectors", word_vectors, "word vector text file, or 'synthetic'");
    app->add_option("--word-dim", word_dim, "dimension of synthetic word vectors")->capture_default_str();
    app->add_option("--sentence-vectors", sentence_vectors, "sentence vector JSONL, or 'synthetic'");
    app->add_option("--sentence-dim", sentence_dim, "dimension of synthetic sentence vectors")
        ->capture_default_str();
    app->add_option("--vector-seed", vector_seed, "seed for synthetic vectors")->capture_default_str();
  }

  // Fails before any work when `family` needs a table that was not given.
  void require(const std::string& family) const {
    if (family == "cnn" && word_vectors.empty()) {
      missing_input("--word-vectors", "family cnn reads pretrained word vectors");
    }
    if (family == "emb_head" && sentence_vectors.empty()) {
      missing_input("--sentence-vectors", "family emb_head reads precomputed sentence vectors");
    }
  }

  // Loads what `family` reads; synthetic tables cover every given dataset.
  ResourcesPtr load(const std::string& family, const std::string& variant,
                    std::initializer_list<const depo_dataset*> sets) const {
    require(family);
    depo_resources* raw = nullptr;
    check(depo_resources_create(&raw));
    ResourcesPtr r(raw);
    if (family == "cnn") {
      if (word_vectors == "synthetic") {
        for (const depo_dataset* ds : sets) {
          check(depo_resources_synth_word_vectors(r.get(), ds, word_dim, vector_seed));
        }
      } else {
        check(depo_resources_load_word_vectors(r.get(), word_vectors.c_str()), word_vectors);
      }
    }
    if (family == "emb_head") {
      if (sentence_vectors == "synthetic") {
        for (const depo_dataset* ds : sets) {
          check(depo_resources_synth_sentence_vectors(r.get(), ds, variant.c_str(), sentence_dim,
                                                      vector_seed));
        }
      } else {
        check(depo_resources_load_sentence_vectors(r.get(), sentence_vectors.c_str()), sentence_vectors);
      }
    }
    return r;
  }
};

std::string canonical_family(const std::string& f) {
  if (f == "bilstm" || f == "bilstm_attn") return "bilstm_attn";
  if (f == "emb" || f == "bert" || f == "emb_head") return "emb_head";
  return f;
}

std::string hyper_argument(const std::string& h) {
  if (h.empty()) return {};
  if (h.front() == '{') return h;
  return read_text(h);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deposition aspect classification: parse, canonicalize, train, evaluate."};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(depo_version()));

  std::uint64_t seed = kDefaultSeed;
  bool to_stdout = false;
  auto add_common = [&](CLI::App* sub, bool with_seed) {
    sub->add_flag("--stdout", to_stdout, "write the main artifact to stdout instead of --out");
    if (with_seed) sub->add_option("--seed", seed, "random seed")->capture_default_str();
  };

  // parse
  auto* parse = app.add_subcommand("parse", "split a transcript into question/answer pairs");
  std::string parse_in, parse_out, parse_id, parse_role, parse_options;
  parse->add_option("--in", parse_in, "transcript text file")->required();
  parse->add_option("--out", parse_out, "pairs JSONL output");
  parse->add_option("--id", parse_id, "deposition id (default: file stem)");
  parse->add_option("--role", parse_role, "deponent role");
  parse->add_option("--options", parse_options, "parser options JSON file");
  add_common(parse, false);

  // canon
  auto* canon = app.add_subcommand("canon", "rewrite pairs as declarative sentences (DS sidecar)");
  std::string canon_in, canon_out;
  canon->add_option("--in", canon_in, "pairs JSONL")->required();
  canon->add_option("--out", canon_out, "DS sidecar JSONL output");
  add_common(canon, false);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic labeled corpus");
  std::size_t synth_per_class = 100;
  double synth_overlap = 0.0;
  std::string synth_signal = "both", synth_out, synth_sv_out, synth_wv_out, synth_variants = "dsm";
  std::size_t synth_vocab = 20, synth_shared = 60, synth_sv_dim = 64, synth_wv_dim = 32;
  synth->add_option("--per-class", synth_per_class, "examples per class")->capture_default_str();
  synth->add_option("--overlap", synth_overlap, "fraction of cross-class vocabulary")->capture_default_str();
  synth->add_option("--signal", synth_signal, "where class words appear: both | answer")
      ->check(CLI::IsMember({"both", "answer"}))
      ->capture_default_str();
  synth->add_option("--vocab-per-class", synth_vocab, "class-specific words")->capture_default_str();
  synth->add_option("--shared-vocab", synth_shared, "shared filler words")->capture_default_str();
  synth->add_option("--out", synth_out, "labeled examples JSONL output");
  synth->add_option("--sentence-vectors-out", synth_sv_out, "also write synthetic sentence vectors");
  synth->add_option("--variants", synth_variants, "variants for --sentence-vectors-out (comma list)")
      ->capture_default_str();
  synth->add_option("--sentence-dim", synth_sv_dim, "sentence vector dimension")->capture_default_str();
  synth->add_option("--word-vectors-out", synth_wv_out, "also write synthetic word vectors");
  synth->add_option("--word-dim", synth_wv_dim, "word vector dimension")->capture_default_str();
  add_common(synth, true);

  // split
  auto* split = app.add_subcommand("split", "stratified train/val/test split");
  DataArgs split_data;
  split_data.add(split, "--in", "labeled examples JSONL");
  std::string split_out_dir;
  double split_train = 0.7, split_val = 0.2, split_test = 0.1;
  bool split_by_dep = false, split_no_strat = false;
  split->add_option("--out-dir", split_out_dir, "directory for train/val/test.jsonl")->required();
  split->add_option("--train", split_train, "train ratio")->capture_default_str();
  split->add_option("--val", split_val, "validation ratio")->capture_default_str();
  split->add_option("--test", split_test, "test ratio")->capture_default_str();
  split->add_flag("--by-deposition", split_by_dep, "keep each deposition in one split");
  split->add_flag("--no-stratify", split_no_strat, "shuffle all examples together");
  add_common(split, true);

  // compose
  auto* cmp = app.add_subcommand("compose", "export classifier input texts for an external sentence encoder");
  DataArgs compose_data;
  compose_data.add(cmp, "--in", "labeled examples JSONL");
  std::string compose_variants = "dsm", compose_out;
  cmp->add_option("--variants", compose_variants, "comma list of input variants")->capture_default_str();
  cmp->add_option("--out", compose_out, "{\"id\", \"text\"} JSONL output");
  add_common(cmp, false);

  // train
  auto* trn = app.add_subcommand("train", "train one model");
  std::string train_family, train_variant, train_val, train_hyper, train_out;
  bool train_free_grid = false;
  DataArgs train_data;
  VectorArgs train_vecs;
  trn->add_option("--family", train_family, "cnn | bilstm_attn | emb_head")->required();
  trn->add_option("--variant", train_variant, "input variant: q, a, qa, dsm, qadsm, dsc, dscm")->required();
  train_data.add(trn, "--train", "training examples JSONL");
  trn->add_option("--val", train_val, "validation examples JSONL")->required();
  train_vecs.add(trn);
  trn->add_option("--hyper", train_hyper, "hyperparameters: JSON file or inline object");
  trn->add_flag("--no-grid-check", train_free_grid, "allow values off the tuning grid");
  trn->add_option("--out", train_out, "model snapshot path")->required();
  add_common(trn, true);

  // eval
  auto* evl = app.add_subcommand("eval", "evaluate a model snapshot");
  std::string eval_model, eval_variant, eval_out, eval_predictions, eval_table;
  DataArgs eval_data;
  VectorArgs eval_vecs;
  evl->add_option("--model", eval_model, "model snapshot")->required();
  eval_data.add(evl, "--data", "labeled examples JSONL");
  evl->add_option("--variant", eval_variant, "input variant (default: the model's)");
  eval_vecs.add(evl);
  evl->add_option("--out", eval_out, "report JSON output");
  evl->add_option("--table", eval_table, "per-class table text output");
  evl->add_option("--predictions", eval_predictions, "per-example predictions JSONL output");
  add_common(evl, false);

  // experiment
  auto* exp = app.add_subcommand("experiment", "run the full variant x family grid from a config");
  std::string exp_config, exp_out_dir;
  unsigned exp_jobs = 1;
  exp->add_option("--config", exp_config, "experiment config JSON")->required();
  exp->add_option("--out-dir", exp_out_dir, "output directory (overrides the config)");
  exp->add_option("--jobs", exp_jobs, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  auto* exp_seed = exp->add_option("--seed", seed, "random seed (default: the config's, else 42)");
  exp->add_flag("--stdout", to_stdout, "also print results.json to stdout");

  // report
  auto* rep = app.add_subcommand("report", "render text tables from results.json");
  std::string rep_in, rep_out;
  rep->add_option("--results", rep_in, "results.json")->required();
  rep->add_option("--out", rep_out, "text output");
  add_common(rep, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (parse->parsed()) {
      const std::string text = read_text(parse_in);
      const std::string id = parse_id.empty() ? fs::path(parse_in).stem().string() : parse_id;
      std::optional<std::string> opts;
      if (!parse_options.empty()) opts = read_text(parse_options);
      depo_deposition* raw = nullptr;
      check(depo_deposition_parse(text.c_str(), id.c_str(), parse_role.empty() ? nullptr : parse_role.c_str(),
                                  opts ? opts->c_str() : nullptr, &raw),
            parse_in);
      DepositionPtr d(raw);
      CStr jsonl;
      CStr stats;
      check(depo_deposition_pairs_jsonl(d.get(), jsonl.out()));
      check(depo_deposition_stats_json(d.get(), stats.out()));
      emit(to_stdout, parse_out, jsonl.str(), "parse");
      std::cerr << "stats: " << stats.str() << "\n";
    } else if (canon->parsed()) {
      CStr out;
      std::size_t fallbacks = 0;
      check(depo_canon_jsonl(read_text(canon_in).c_str(), out.out(), &fallbacks), canon_in);
      emit(to_stdout, canon_out, out.str(), "canon");
      std::cerr << "fallbacks to question+answer: " << fallbacks << "\n";
    } else if (synth->parsed()) {
      const nlohmann::json spec{{"per_class", synth_per_class},
                                {"overlap", synth_overlap},
                                {"signal", synth_signal},
                                {"vocab_per_class", synth_vocab},
                                {"shared_vocab", synth_shared}};
      depo_dataset* raw = nullptr;
      check(depo_dataset_synth(spec.dump().c_str(), seed, &raw));
      DatasetPtr ds(raw);
      CStr jsonl;
      check(depo_dataset_to_jsonl(ds.get(), jsonl.out()));
      emit(to_stdout, synth_out, jsonl.str(), "synth");
      if (!synth_sv_out.empty()) {
        CStr sv;
        check(depo_dataset_synth_sentence_vectors(ds.get(), synth_variants.c_str(), synth_sv_dim, seed, sv.out()));
        write_text(synth_sv_out, sv.str());
        std::cerr << "wrote " << synth_sv_out << "\n";
      }
      if (!synth_wv_out.empty()) {
        CStr wv;
        check(depo_dataset_synth_word_vectors(ds.get(), synth_wv_dim, seed, wv.out()));
        write_text(synth_wv_out, wv.str());
        std::cerr << "wrote " << synth_wv_out << "\n";
      }
    } else if (split->parsed()) {
      DatasetPtr ds = split_data.load("--in");
      const nlohmann::json spec{{"train", split_train},
                                {"val", split_val},
                                {"test", split_test},
                                {"stratified", !split_no_strat},
                                {"by_deposition", split_by_dep}};
      depo_dataset *a = nullptr, *b = nullptr, *c = nullptr;
      CStr warnings;
      check(depo_dataset_split(ds.get(), spec.dump().c_str(), seed, &a, &b, &c, warnings.out()));
      DatasetPtr tr(a), va(b), te(c);
      for (const auto& w : nlohmann::json::parse(warnings.str())) {
        std::cerr << "warning: " << w.get<std::string>() << "\n";
      }
      fs::create_directories(split_out_dir);
      const std::pair<const char*, depo_dataset*> parts[] = {{"train", tr.get()}, {"val", va.get()}, {"test", te.get()}};
      for (const auto& [name, part] : parts) {
        CStr jsonl;
        check(depo_dataset_to_jsonl(part, jsonl.out()));
        write_text((fs::path(split_out_dir) / (std::string(name) + ".jsonl")).string(), jsonl.str());
        std::cerr << name << ": " << depo_dataset_size(part) << "\n";
      }
      if (to_stdout) {
        CStr dist;
        check(depo_dataset_distribution(ds.get(), nullptr, dist.out()));
        std::cout << dist.str();
      }
    } else if (cmp->parsed()) {
      DatasetPtr ds = compose_data.load("--in");
      std::string all;
      std::stringstream list(compose_variants);
      for (std::string v; std::getline(list, v, ',');) {
        CStr rows;
        check(depo_dataset_compose_jsonl(ds.get(), v.c_str(), rows.out()));
        all += rows.str();
      }
      emit(to_stdout, compose_out, all, "compose");
    } else if (trn->parsed()) {
      const std::string family = canonical_family(train_family);
      train_vecs.require(family);
      DatasetPtr tr = train_data.load("--train");
      depo_dataset* vraw = nullptr;
      check(depo_dataset_from_jsonl(read_text(train_val).c_str(), &vraw), train_val);
      DatasetPtr va(vraw);
      ResourcesPtr res = train_vecs.load(family, train_variant, {tr.get(), va.get()});
      const std::string hyper = hyper_argument(train_hyper);
      depo_model* mraw = nullptr;
      check(depo_model_train(tr.get(), va.get(), res.get(), family.c_str(), train_variant.c_str(),
                             hyper.empty() ? nullptr : hyper.c_str(), seed, train_free_grid ? 0 : 1, &mraw));
      ModelPtr model(mraw);
      check(depo_model_save(model.get(), train_out.c_str()), train_out);
      CStr info;
      check(depo_model_info_json(model.get(), info.out()));
      if (to_stdout) std::cout << info.str() << "\n";
      std::cerr << "wrote " << train_out << "\n";
    } else if (evl->parsed()) {
      depo_model* mraw = nullptr;
      check(depo_model_load(eval_model.c_str(), nullptr, &mraw), eval_model);
      ModelPtr model(mraw);
      CStr info;
      check(depo_model_info_json(model.get(), info.out()));
      const auto meta = nlohmann::json::parse(info.str());
      const std::string family = meta.at("family").get<std::string>();
      std::string variant = eval_variant;
      if (variant.empty() && meta.contains("variant") && meta["variant"].is_string()) {
        variant = meta["variant"].get<std::string>();
      }
      if (variant.empty()) missing_input("--variant", "the model does not record its input variant");
      DatasetPtr ds = eval_data.load("--data");
      ResourcesPtr res = eval_vecs.load(family, variant, {ds.get()});
      CStr report;
      CStr table;
      check(depo_model_evaluate(model.get(), ds.get(), res.get(), variant.c_str(), report.out(), table.out()));
      if (!eval_predictions.empty()) {
        CStr preds;
        check(depo_model_predict_jsonl(model.get(), ds.get(), res.get(), variant.c_str(), preds.out()));
        write_text(eval_predictions, preds.str());
      }
      if (!eval_table.empty()) write_text(eval_table, table.str());
      if (to_stdout || !eval_out.empty()) emit(to_stdout, eval_out, report.str() + "\n", "eval");
      std::cerr << table.str();
    } else if (exp->parsed()) {
      const std::string cfg = read_text(exp_config);
      const std::string base = fs::absolute(exp_config).parent_path().string();
      const std::uint64_t seed_value = seed;
      CStr results;
      check(depo_experiment_run(cfg.c_str(), base.c_str(), exp_out_dir.empty() ? nullptr : exp_out_dir.c_str(),
                                exp_seed->count() > 0 ? &seed_value : nullptr, exp_jobs, results.out()),
            exp_config);
      if (to_stdout) std::cout << results.str();
      // Comparison grid only; `report` renders the rest.
      CStr report;
      check(depo_report_render(results.str().c_str(), report.out()));
      const std::string text = report.str();
      std::cerr << text.substr(0, text.find("\n\n") + 1);
    } else if (rep->parsed()) {
      CStr out;
      check(depo_report_render(read_text(rep_in).c_str(), out.out()), rep_in);
      if (!to_stdout && rep_out.empty()) {
        std::cout << out.str();
      } else {
        emit(to_stdout, rep_out, out.str(), "report");
      }
    }
  } catch (const Failure& f) {
    std::cerr << "error[" << f.kind << "]: " << f.message << "\n";
    return f.code;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error[data]: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error[io]: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}
