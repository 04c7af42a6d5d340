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

#include "depoaspect/depoaspect.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "depo/canon.hpp"
#include "depo/common.hpp"
#include "depo/datasets.hpp"
#include "depo/embeddings.hpp"
#include "depo/eval.hpp"
#include "depo/experiment.hpp"
#include "depo/models.hpp"
#include "depo/ontology.hpp"
#include "depo/transcript.hpp"
#include "json.hpp"

struct depo_deposition {
  depo::Deposition value;
};

struct depo_dataset {
  depo::LabeledSet value;
};

struct depo_resources {
  std::optional<depo::WordEmbeddings> words;
  std::optional<depo::SentenceVectors> sentences;

  depo::Resources view() const {
    return {words ? &*words : nullptr, sentences ? &*sentences : nullptr};
  }
};

struct depo_model {
  depo::TrainedModel value;
};

namespace {

thread_local std::string g_last_error;

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

// Runs `body`, translating exceptions into status codes.
template <typename F>
depo_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return DEPO_OK;
  } catch (const depo::InvalidArgument& e) {
    g_last_error = e.what();
    return DEPO_ERR_INVALID_ARGUMENT;
  } catch (const depo::DataError& e) {
    g_last_error = e.what();
    return DEPO_ERR_DATA;
  } catch (const depo::IoError& e) {
    g_last_error = e.what();
    return DEPO_ERR_IO;
  } catch (const json::exception& e) {
    g_last_error = std::string("JSON: ") + e.what();
    return DEPO_ERR_DATA;
  } catch (const std::filesystem::filesystem_error& e) {
    g_last_error = e.what();
    return DEPO_ERR_IO;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return DEPO_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return DEPO_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return DEPO_ERR_INTERNAL;
  }
}

char* dup_string(std::string_view s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p == nullptr) throw std::bad_alloc();
  std::memcpy(p, s.data(), s.size());
  p[s.size()] = '\0';
  return p;
}

void put(char** out, std::string_view s) {
  if (out == nullptr) throw depo::InvalidArgument("output pointer must not be NULL");
  *out = dup_string(s);
}

void put_optional(char** out, std::string_view s) {
  if (out != nullptr) *out = dup_string(s);
}

void need(const void* p, const char* what) {
  if (p == nullptr) throw depo::InvalidArgument(std::string(what) + " must not be NULL");
}

json parse_json_arg(const char* text, const char* what) {
  if (text == nullptr) return json();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw depo::InvalidArgument(std::string(what) + " is not valid JSON: " + e.what());
  }
}

depo::ParseConfig parse_options(const json& j) {
  depo::ParseConfig c;
  if (j.is_null()) return c;
  if (!j.is_object()) throw depo::InvalidArgument("parse options must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "question_prefixes") c.question_prefixes = v.get<std::vector<std::string>>();
    else if (key == "answer_prefixes") c.answer_prefixes = v.get<std::vector<std::string>>();
    else if (key == "keep_unanswered") c.keep_unanswered = v.get<bool>();
    else if (key == "strip_line_numbers") c.strip_line_numbers = v.get<bool>();
    else throw depo::InvalidArgument("unknown parse option '" + key + "'");
  }
  c.validate();
  return c;
}

std::vector<depo::InputVariant> parse_variant_list(const char* csv) {
  std::vector<depo::InputVariant> out;
  if (csv == nullptr) return out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = depo::trim(item);
    if (!item.empty()) out.push_back(depo::parse_variant(item));
  }
  return out;
}

depo::InputVariant variant_for(const depo_model* m, const char* variant) {
  if (variant != nullptr) return depo::parse_variant(variant);
  if (m->value.variant) return *m->value.variant;
  throw depo::InvalidArgument("model carries no input variant; pass one explicitly");
}

}  // namespace

extern "C" {

const char* depo_version(void) { return "0.1.0"; }

const char* depo_last_error(void) { return g_last_error.c_str(); }

void depo_free_string(char* s) { std::free(s); }

size_t depo_aspect_count(void) { return depo::kAspectCount; }

const char* depo_aspect_code(size_t index) {
  if (index >= depo::kAspectCount) return nullptr;
  return depo::aspect_catalog()[index].token.data();
}

depo_status depo_parse_label(const char* text, size_t* index_out) {
  return guarded([&] {
    need(text, "text");
    need(index_out, "index_out");
    *index_out = depo::index_of(depo::parse_label(text));
  });
}

depo_status depo_catalog_json(char** out) {
  return guarded([&] { put(out, depo::catalog_json()); });
}

depo_status depo_deposition_parse(const char* text, const char* deposition_id, const char* role,
                                  const char* options_json, depo_deposition** out) {
  return guarded([&] {
    need(text, "text");
    need(out, "out");
    const depo::ParseConfig cfg = parse_options(parse_json_arg(options_json, "options_json"));
    std::optional<depo::DeponentRole> r;
    if (role != nullptr) r = depo::parse_role(role);
    auto d = std::make_unique<depo_deposition>();
    d->value = depo::parse_transcript(text, cfg, deposition_id ? deposition_id : "deposition", r);
    *out = d.release();
  });
}

depo_status depo_deposition_pairs_jsonl(const depo_deposition* d, char** out) {
  return guarded([&] {
    need(d, "deposition");
    put(out, depo::pairs_to_jsonl(d->value));
  });
}

depo_status depo_deposition_discarded_json(const depo_deposition* d, char** out) {
  return guarded([&] {
    need(d, "deposition");
    ojson arr = ojson::array();
    for (const depo::Discarded& x : d->value.discarded) {
      arr.push_back({{"first_line", x.lines.first},
                     {"last_line", x.lines.last},
                     {"reason", x.reason},
                     {"text", x.text}});
    }
    put(out, arr.dump());
  });
}

depo_status depo_deposition_stats_json(const depo_deposition* d, char** out) {
  return guarded([&] {
    need(d, "deposition");
    const depo::QAStats s = depo::qa_stats(d->value);
    ojson j{{"deposition_id", d->value.id},
            {"pairs", s.pair_count},
            {"mean_question_tokens", s.mean_question_tokens},
            {"mean_answer_tokens", s.mean_answer_tokens},
            {"discarded", s.discarded_count}};
    put(out, j.dump());
  });
}

void depo_deposition_free(depo_deposition* d) { delete d; }

depo_status depo_canon_declarative(const char* question, const char* answer, char** out_json) {
  return guarded([&] {
    need(question, "question");
    need(answer, "answer");
    bool fell_back = false;
    const depo::DeclarativeText t = depo::to_declarative_or_concat(question, answer, &fell_back);
    ojson j{{"question_da", depo::da_name(depo::tag_question_da(question))},
            {"answer_da", depo::da_name(depo::tag_answer_da(answer))},
            {"sentences", t.sentences},
            {"text", t.joined()},
            {"fallback", fell_back}};
    put(out_json, j.dump());
  });
}

depo_status depo_canon_jsonl(const char* pairs_jsonl, char** out_jsonl, size_t* fallbacks_out) {
  return guarded([&] {
    need(pairs_jsonl, "pairs_jsonl");
    const depo::CanonRun run = depo::canonicalize_pairs(depo::parse_pairs_jsonl(pairs_jsonl));
    if (fallbacks_out != nullptr) *fallbacks_out = run.fallbacks;
    put(out_jsonl, depo::format_ds_jsonl(run.records));
  });
}

depo_status depo_dataset_build(const char* pairs_jsonl, const char* labels_jsonl,
                               const char* ds_m_jsonl, const char* ds_c_jsonl, depo_dataset** out,
                               char** summary_json) {
  return guarded([&] {
    need(pairs_jsonl, "pairs_jsonl");
    need(labels_jsonl, "labels_jsonl");
    need(out, "out");
    const auto pairs = depo::parse_pairs_jsonl(pairs_jsonl);
    const auto labels = depo::parse_labels_jsonl(labels_jsonl);
    std::optional<std::vector<depo::DsRecord>> dsm;
    std::optional<std::vector<depo::DsRecord>> dsc;
    if (ds_m_jsonl != nullptr) dsm = depo::parse_ds_jsonl(ds_m_jsonl);
    if (ds_c_jsonl != nullptr) dsc = depo::parse_ds_jsonl(ds_c_jsonl);
    depo::BuildResult b =
        depo::build_examples(pairs, labels, dsm ? &*dsm : nullptr, dsc ? &*dsc : nullptr);
    ojson s{{"examples", b.set.size()},
            {"unlabeled", b.unlabeled},
            {"ds_m_fallbacks", b.ds_m_fallbacks}};
    auto ds = std::make_unique<depo_dataset>();
    ds->value = std::move(b.set);
    put_optional(summary_json, s.dump());
    *out = ds.release();
  });
}

depo_status depo_dataset_from_jsonl(const char* jsonl, depo_dataset** out) {
  return guarded([&] {
    need(jsonl, "jsonl");
    need(out, "out");
    auto ds = std::make_unique<depo_dataset>();
    ds->value = depo::labeled_set_from_jsonl(jsonl);
    *out = ds.release();
  });
}

depo_status depo_dataset_synth(const char* spec_json, uint64_t seed, depo_dataset** out) {
  return guarded([&] {
    need(spec_json, "spec_json");
    need(out, "out");
    const depo::SynthSpec spec =
        depo::synth_spec_from_json(parse_json_arg(spec_json, "spec_json"), seed);
    spec.validate();
    auto ds = std::make_unique<depo_dataset>();
    ds->value = depo::synth_corpus(spec);
    *out = ds.release();
  });
}

depo_status depo_dataset_to_jsonl(const depo_dataset* ds, char** out) {
  return guarded([&] {
    need(ds, "dataset");
    put(out, depo::labeled_set_to_jsonl(ds->value));
  });
}

size_t depo_dataset_size(const depo_dataset* ds) { return ds == nullptr ? 0 : ds->value.size(); }

depo_status depo_dataset_distribution(const depo_dataset* ds, char** json_out, char** text_out) {
  return guarded([&] {
    need(ds, "dataset");
    const depo::ClassDistribution d = depo::class_distribution(ds->value);
    ojson classes = ojson::array();
    for (const depo::ClassShare& s : d.classes) {
      classes.push_back({{"class", depo::code_of(s.aspect)}, {"count", s.count}, {"percent", s.percent}});
    }
    ojson j{{"total", d.total}, {"classes", classes}};
    put_optional(json_out, j.dump());
    put_optional(text_out, depo::format_distribution(d));
  });
}

depo_status depo_dataset_split(const depo_dataset* ds, const char* split_json, uint64_t seed,
                               depo_dataset** train, depo_dataset** val, depo_dataset** test,
                               char** warnings_json) {
  return guarded([&] {
    need(ds, "dataset");
    need(train, "train");
    need(val, "val");
    need(test, "test");
    const depo::SplitSpec spec = depo::split_spec_from_json(parse_json_arg(split_json, "split_json"), seed);
    depo::SplitResult r = depo::split(ds->value, spec);
    auto a = std::make_unique<depo_dataset>();
    auto b = std::make_unique<depo_dataset>();
    auto c = std::make_unique<depo_dataset>();
    a->value = std::move(r.train);
    b->value = std::move(r.val);
    c->value = std::move(r.test);
    put_optional(warnings_json, json(r.warnings).dump());
    *train = a.release();
    *val = b.release();
    *test = c.release();
  });
}

depo_status depo_dataset_compose_jsonl(const depo_dataset* ds, const char* variant, char** out) {
  return guarded([&] {
    need(ds, "dataset");
    need(variant, "variant");
    put(out, depo::compose_jsonl(ds->value, depo::parse_variant(variant)));
  });
}

depo_status depo_dataset_synth_word_vectors(const depo_dataset* ds, size_t dim, uint64_t seed,
                                            char** out_text) {
  return guarded([&] {
    need(ds, "dataset");
    put(out_text, depo::format_word_vectors(depo::synth_word_vectors(ds->value, dim, seed)));
  });
}

depo_status depo_dataset_synth_sentence_vectors(const depo_dataset* ds, const char* variants_csv,
                                                size_t dim, uint64_t seed, char** out_jsonl) {
  return guarded([&] {
    need(ds, "dataset");
    const auto variants = parse_variant_list(variants_csv);
    if (variants.empty()) throw depo::InvalidArgument("variants_csv names no variants");
    put(out_jsonl, depo::format_sentence_vectors(
                       depo::synth_sentence_vectors(ds->value, variants, dim, seed)));
  });
}

void depo_dataset_free(depo_dataset* ds) { delete ds; }

depo_status depo_resources_create(depo_resources** out) {
  return guarded([&] {
    need(out, "out");
    *out = new depo_resources();
  });
}

depo_status depo_resources_load_word_vectors(depo_resources* r, const char* path) {
  return guarded([&] {
    need(r, "resources");
    need(path, "path");
    r->words = depo::load_word_vectors(path).embeddings;
  });
}

depo_status depo_resources_load_sentence_vectors(depo_resources* r, const char* path) {
  return guarded([&] {
    need(r, "resources");
    need(path, "path");
    r->sentences = depo::load_sentence_vectors(path);
  });
}

depo_status depo_resources_synth_word_vectors(depo_resources* r, const depo_dataset* ds, size_t dim,
                                              uint64_t seed) {
  return guarded([&] {
    need(r, "resources");
    need(ds, "dataset");
    depo::WordEmbeddings fresh = depo::synth_word_vectors(ds->value, dim, seed);
    if (!r->words) {
      r->words = std::move(fresh);
      return;
    }
    if (r->words->dim() != dim) throw depo::InvalidArgument("word vector dimension mismatch");
    for (const std::string& tok : fresh.tokens()) {
      if (!r->words->contains(tok)) r->words->set(tok, {fresh.find(tok), dim});
    }
  });
}

depo_status depo_resources_synth_sentence_vectors(depo_resources* r, const depo_dataset* ds,
                                                  const char* variants_csv, size_t dim,
                                                  uint64_t seed) {
  return guarded([&] {
    need(r, "resources");
    need(ds, "dataset");
    const auto variants = parse_variant_list(variants_csv);
    if (variants.empty()) throw depo::InvalidArgument("variants_csv names no variants");
    depo::SentenceVectors fresh = depo::synth_sentence_vectors(ds->value, variants, dim, seed);
    if (!r->sentences) {
      r->sentences = std::move(fresh);
      return;
    }
    for (const std::string& id : fresh.ids()) {
      if (r->sentences->find(id) == nullptr) r->sentences->add(id, *fresh.find(id));
    }
  });
}

int depo_resources_has_word_vectors(const depo_resources* r) {
  return r != nullptr && r->words.has_value();
}

int depo_resources_has_sentence_vectors(const depo_resources* r) {
  return r != nullptr && r->sentences.has_value();
}

void depo_resources_free(depo_resources* r) { delete r; }

depo_status depo_model_train(const depo_dataset* train, const depo_dataset* val,
                             const depo_resources* res, const char* family, const char* variant,
                             const char* hyper_json, uint64_t seed, int enforce_grid,
                             depo_model** out) {
  return guarded([&] {
    need(train, "train");
    need(val, "val");
    need(family, "family");
    need(variant, "variant");
    need(out, "out");
    json hj = parse_json_arg(hyper_json, "hyper_json");
    if (hj.is_null()) hj = json::object();
    if (!hj.is_object()) throw depo::InvalidArgument("hyper_json must be a JSON object");
    hj["family"] = std::string(depo::family_name(depo::parse_family(family)));
    hj["seed"] = seed;
    const depo::HyperParams h = depo::HyperParams::from_json(hj);
    if (enforce_grid != 0) h.validate_tuning_grid();
    else h.validate();
    const depo::InputVariant v = depo::parse_variant(variant);
    const depo::Resources view = res != nullptr ? res->view() : depo::Resources{};
    auto m = std::make_unique<depo_model>();
    m->value = depo::train(h, depo::compose_examples(train->value, v),
                           depo::compose_examples(val->value, v), view);
    m->value.variant = v;
    *out = m.release();
  });
}

depo_status depo_model_save(const depo_model* m, const char* path) {
  return guarded([&] {
    need(m, "model");
    need(path, "path");
    depo::save_model(m->value, path);
  });
}

depo_status depo_model_load(const char* path, const char* expected_family, depo_model** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    std::optional<depo::Family> fam;
    if (expected_family != nullptr) fam = depo::parse_family(expected_family);
    auto m = std::make_unique<depo_model>();
    m->value = depo::load_model(path, fam);
    *out = m.release();
  });
}

depo_status depo_model_info_json(const depo_model* m, char** out) {
  return guarded([&] {
    need(m, "model");
    put(out, depo::model_info_json(m->value).dump(2));
  });
}

depo_status depo_model_evaluate(const depo_model* m, const depo_dataset* ds,
                                const depo_resources* res, const char* variant,
                                char** report_json, char** table_text) {
  return guarded([&] {
    need(m, "model");
    need(ds, "dataset");
    const auto examples = depo::compose_examples(ds->value, variant_for(m, variant));
    const depo::Resources view = res != nullptr ? res->view() : depo::Resources{};
    const auto preds = depo::predict_labels(m->value.model, examples, view);
    std::vector<std::size_t> golds;
    golds.reserve(examples.size());
    for (const auto& e : examples) golds.push_back(e.label);
    const depo::EvalReport rep = depo::prf1(depo::confusion(golds, preds, m->value.model.num_classes));
    put_optional(report_json, depo::report_to_json(rep).dump(2));
    put_optional(table_text, depo::render_report_table(rep));
  });
}

depo_status depo_model_predict_jsonl(const depo_model* m, const depo_dataset* ds,
                                     const depo_resources* res, const char* variant, char** out) {
  return guarded([&] {
    need(m, "model");
    need(ds, "dataset");
    const depo::InputVariant v = variant_for(m, variant);
    const auto examples = depo::compose_examples(ds->value, v);
    const depo::Resources view = res != nullptr ? res->view() : depo::Resources{};
    std::string text;
    for (std::size_t i = 0; i < examples.size(); ++i) {
      const depo::Prediction p = depo::predict(m->value.model, examples[i], view);
      ojson line{{"id", ds->value.examples[i].id},
                 {"label", depo::class_label(p.predicted, m->value.model.num_classes)},
                 {"probabilities", p.probabilities}};
      text += line.dump();
      text += '\n';
    }
    put(out, text);
  });
}

void depo_model_free(depo_model* m) { delete m; }

depo_status depo_permutation_test(const size_t* preds_a, const size_t* preds_b, const size_t* golds,
                                  size_t n, size_t n_iter, uint64_t seed, double* observed_out,
                                  double* p_value_out) {
  return guarded([&] {
    if (n > 0) {
      need(preds_a, "preds_a");
      need(preds_b, "preds_b");
      need(golds, "golds");
    }
    std::vector<std::size_t> a(preds_a, preds_a + n);
    std::vector<std::size_t> b(preds_b, preds_b + n);
    std::vector<std::size_t> g(golds, golds + n);
    const depo::PermutationResult r = depo::paired_permutation_test(a, b, g, n_iter, seed);
    if (observed_out != nullptr) *observed_out = r.observed;
    if (p_value_out != nullptr) *p_value_out = r.p_value;
  });
}

depo_status depo_experiment_run(const char* config_json, const char* base_dir, const char* out_dir,
                                const uint64_t* seed_override, unsigned jobs,
                                char** results_json) {
  return guarded([&] {
    need(config_json, "config_json");
    json j = parse_json_arg(config_json, "config_json");
    if (!j.is_object()) throw depo::InvalidArgument("experiment config must be a JSON object");
    if (seed_override != nullptr) j["seed"] = *seed_override;
    depo::ExperimentConfig cfg =
        depo::ExperimentConfig::from_json(j, base_dir ? std::filesystem::path(base_dir) : "");
    if (out_dir != nullptr) cfg.output_dir = out_dir;
    const depo::ExperimentResult r = depo::run_experiment(cfg, jobs);
    put_optional(results_json, depo::write_experiment_outputs(r, cfg));
  });
}

depo_status depo_report_render(const char* results_json, char** out) {
  return guarded([&] {
    need(results_json, "results_json");
    json j;
    try {
      j = json::parse(results_json);
    } catch (const json::parse_error& e) {
      throw depo::DataError(std::string("results document is not valid JSON: ") + e.what());
    }
    put(out, depo::render_results_report(j));
  });
}

depo_status depo_write_file_atomic(const char* path, const char* data, size_t len) {
  return guarded([&] {
    need(path, "path");
    if (len > 0) need(data, "data");
    depo::write_file_atomic(path, std::string_view(data ? data : "", len));
  });
}

depo_status depo_read_file(const char* path, char** out, size_t* len_out) {
  return guarded([&] {
    need(path, "path");
    const std::string s = depo::read_file(path);
    if (len_out != nullptr) *len_out = s.size();
    put(out, s);
  });
}

}  // extern "C"
