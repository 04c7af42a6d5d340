/* Copyright 2026 The depoaspect Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to libdepoaspect.
 *
 * Every fallible call returns a depo_status. On failure the message is
 * available from depo_last_error() on the calling thread until the next
 * call on that thread. Strings handed out through `char**` parameters are
 * NUL-terminated, owned by the caller, and released with depo_free_string.
 * Handles are released with their matching *_free function; passing NULL
 * to any *_free is a no-op. */

#ifndef DEPOASPECT_H
#define DEPOASPECT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define DEPO_API __declspec(dllexport)
#else
#define DEPO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum depo_status {
  DEPO_OK = 0,
  DEPO_ERR_INVALID_ARGUMENT = 1, /* bad parameter, malformed config */
  DEPO_ERR_DATA = 2,             /* malformed or inconsistent input data */
  DEPO_ERR_IO = 3,               /* file could not be read or written */
  DEPO_ERR_INTERNAL = 4
} depo_status;

typedef struct depo_deposition depo_deposition;
typedef struct depo_dataset depo_dataset;
typedef struct depo_resources depo_resources;
typedef struct depo_model depo_model;

DEPO_API const char* depo_version(void);
DEPO_API const char* depo_last_error(void);
DEPO_API void depo_free_string(char* s);

/* ---- ontology ---- */

DEPO_API size_t depo_aspect_count(void);
/* Short code ("B", "EB", ...) for a class index; NULL when out of range. */
DEPO_API const char* depo_aspect_code(size_t index);
DEPO_API depo_status depo_parse_label(const char* text, size_t* index_out);
DEPO_API depo_status depo_catalog_json(char** out);

/* ---- transcripts ---- */

/* options_json may be NULL or an object with "question_prefixes",
 * "answer_prefixes", "keep_unanswered", "strip_line_numbers". role may be
 * NULL. */
DEPO_API depo_status depo_deposition_parse(const char* text, const char* deposition_id,
                                           const char* role, const char* options_json,
                                           depo_deposition** out);
DEPO_API depo_status depo_deposition_pairs_jsonl(const depo_deposition* d, char** out);
DEPO_API depo_status depo_deposition_discarded_json(const depo_deposition* d, char** out);
DEPO_API depo_status depo_deposition_stats_json(const depo_deposition* d, char** out);
DEPO_API void depo_deposition_free(depo_deposition* d);

/* ---- canonicalization ---- */

/* JSON object: {"question_da", "answer_da", "sentences", "text", "fallback"}. */
DEPO_API depo_status depo_canon_declarative(const char* question, const char* answer,
                                            char** out_json);
/* Pairs JSONL in, DS sidecar JSONL out. */
DEPO_API depo_status depo_canon_jsonl(const char* pairs_jsonl, char** out_jsonl,
                                      size_t* fallbacks_out);

/* ---- datasets ---- */

/* ds_m_jsonl and ds_c_jsonl may be NULL. summary_json (may be NULL)
 * receives {"examples", "unlabeled", "ds_m_fallbacks"}. */
DEPO_API depo_status depo_dataset_build(const char* pairs_jsonl, const char* labels_jsonl,
                                        const char* ds_m_jsonl, const char* ds_c_jsonl,
                                        depo_dataset** out, char** summary_json);
DEPO_API depo_status depo_dataset_from_jsonl(const char* jsonl, depo_dataset** out);
/* spec_json as the "synth" section of an experiment config. */
DEPO_API depo_status depo_dataset_synth(const char* spec_json, uint64_t seed,
                                        depo_dataset** out);
DEPO_API depo_status depo_dataset_to_jsonl(const depo_dataset* ds, char** out);
DEPO_API size_t depo_dataset_size(const depo_dataset* ds);
/* Either output may be NULL. */
DEPO_API depo_status depo_dataset_distribution(const depo_dataset* ds, char** json_out,
                                               char** text_out);
/* split_json may be NULL for the defaults. warnings_json (may be NULL)
 * receives a JSON array of strings. */
DEPO_API depo_status depo_dataset_split(const depo_dataset* ds, const char* split_json,
                                        uint64_t seed, depo_dataset** train, depo_dataset** val,
                                        depo_dataset** test, char** warnings_json);
/* {"id", "text"} lines for the given variant token ("q", "a", "qa", ...). */
DEPO_API depo_status depo_dataset_compose_jsonl(const depo_dataset* ds, const char* variant,
                                                char** out);
/* Seeded synthetic vectors for the dataset: word vectors in text format,
 * sentence vectors as {"id", "vector"} JSONL. */
DEPO_API depo_status depo_dataset_synth_word_vectors(const depo_dataset* ds, size_t dim,
                                                     uint64_t seed, char** out_text);
DEPO_API depo_status depo_dataset_synth_sentence_vectors(const depo_dataset* ds,
                                                         const char* variants_csv, size_t dim,
                                                         uint64_t seed, char** out_jsonl);
DEPO_API void depo_dataset_free(depo_dataset* ds);

/* ---- resources (word and sentence vectors) ---- */

DEPO_API depo_status depo_resources_create(depo_resources** out);
DEPO_API depo_status depo_resources_load_word_vectors(depo_resources* r, const char* path);
DEPO_API depo_status depo_resources_load_sentence_vectors(depo_resources* r, const char* path);
/* Seeded stand-ins covering the tokens / examples of `ds`. Repeated calls
 * with the same seed and dimension extend the table consistently.
 * variants_csv lists variant tokens, e.g. "dsm,qa". */
DEPO_API depo_status depo_resources_synth_word_vectors(depo_resources* r, const depo_dataset* ds,
                                                       size_t dim, uint64_t seed);
DEPO_API depo_status depo_resources_synth_sentence_vectors(depo_resources* r,
                                                           const depo_dataset* ds,
                                                           const char* variants_csv, size_t dim,
                                                           uint64_t seed);
DEPO_API int depo_resources_has_word_vectors(const depo_resources* r);
DEPO_API int depo_resources_has_sentence_vectors(const depo_resources* r);
DEPO_API void depo_resources_free(depo_resources* r);

/* ---- models ---- */

/* hyper_json may be NULL for the family defaults. seed overrides the
 * hyperparameter seed. With enforce_grid != 0 the hyperparameters must lie
 * on the family's tuning grid. */
DEPO_API depo_status depo_model_train(const depo_dataset* train, const depo_dataset* val,
                                      const depo_resources* res, const char* family,
                                      const char* variant, const char* hyper_json, uint64_t seed,
                                      int enforce_grid, depo_model** out);
DEPO_API depo_status depo_model_save(const depo_model* m, const char* path);
/* expected_family may be NULL. */
DEPO_API depo_status depo_model_load(const char* path, const char* expected_family,
                                     depo_model** out);
DEPO_API depo_status depo_model_info_json(const depo_model* m, char** out);
/* variant may be NULL to use the one the model was trained on. Either
 * output may be NULL. */
DEPO_API depo_status depo_model_evaluate(const depo_model* m, const depo_dataset* ds,
                                         const depo_resources* res, const char* variant,
                                         char** report_json, char** table_text);
/* {"id", "label", "probabilities"} per example. */
DEPO_API depo_status depo_model_predict_jsonl(const depo_model* m, const depo_dataset* ds,
                                              const depo_resources* res, const char* variant,
                                              char** out);
DEPO_API void depo_model_free(depo_model* m);

/* ---- evaluation and experiments ---- */

DEPO_API depo_status depo_permutation_test(const size_t* preds_a, const size_t* preds_b,
                                           const size_t* golds, size_t n, size_t n_iter,
                                           uint64_t seed, double* observed_out,
                                           double* p_value_out);

/* Runs a full experiment from a JSON config. base_dir resolves relative
 * paths in the config (may be NULL). out_dir overrides the config's
 * output_dir when non-NULL. seed_override (may be NULL) replaces the
 * config seed. results_json (may be NULL) receives results.json. */
DEPO_API depo_status depo_experiment_run(const char* config_json, const char* base_dir,
                                         const char* out_dir, const uint64_t* seed_override,
                                         unsigned jobs, char** results_json);
/* Text tables from a results.json document. */
DEPO_API depo_status depo_report_render(const char* results_json, char** out);

/* ---- files ---- */

/* Writes through a temporary file and renames it into place. */
DEPO_API depo_status depo_write_file_atomic(const char* path, const char* data, size_t len);
DEPO_API depo_status depo_read_file(const char* path, char** out, size_t* len_out);

#ifdef __cplusplus
}
#endif

#endif /* DEPOASPECT_H */
