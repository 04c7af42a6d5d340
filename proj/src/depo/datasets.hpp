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

#ifndef DEPO_DATASETS_HPP
#define DEPO_DATASETS_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "depo/canon.hpp"
#include "depo/embeddings.hpp"
#include "depo/ontology.hpp"
#include "depo/transcript.hpp"

namespace depo {

struct LabeledExample {
  std::string id;  // "<deposition_id>#<index>"
  std::string deposition_id;
  std::size_t index = 0;
  std::string question;
  std::string answer;
  std::optional<DeclarativeText> ds_m;
  std::optional<DeclarativeText> ds_c;
  Aspect label = Aspect::B;
  std::optional<DeponentRole> role;
};

struct LabeledSet {
  std::vector<LabeledExample> examples;
  std::string provenance;

  std::size_t size() const { return examples.size(); }
  bool empty() const { return examples.empty(); }
};

std::string example_id(std::string_view deposition_id, std::size_t index);

// Labels file rows: {"deposition_id", "index", "label", "role"?}.
struct LabelRecord {
  std::string deposition_id;
  std::size_t index = 0;
  Aspect label = Aspect::B;
  std::optional<DeponentRole> role;
};

std::vector<LabelRecord> parse_labels_jsonl(std::string_view text);
std::string format_labels_jsonl(const std::vector<LabelRecord>& labels);

// DS sidecar rows: {"deposition_id", "index", "ds", "provenance"}.
struct DsRecord {
  std::string deposition_id;
  std::size_t index = 0;
  std::string ds;
  Provenance provenance = Provenance::Machine;
};

std::vector<DsRecord> parse_ds_jsonl(std::string_view text);
std::string format_ds_jsonl(const std::vector<DsRecord>& records);

struct CanonRun {
  std::vector<DsRecord> records;
  std::size_t fallbacks = 0;
};

// Machine declaratives for every pair; untransformable pairs fall back to
// the question and answer joined.
CanonRun canonicalize_pairs(const std::vector<PairRecord>& pairs);

struct BuildResult {
  LabeledSet set;
  std::size_t unlabeled = 0;      // pairs without a label row, excluded
  std::size_t ds_m_fallbacks = 0;  // generated DS-M that fell back to Q+A
};

// Joins pairs with labels and DS sidecars. Without a DS-M sidecar the
// declaratives are generated. Throws DataError listing label rows that name
// a missing pair, and on duplicate label rows.
BuildResult build_examples(const std::vector<PairRecord>& pairs,
                           const std::vector<LabelRecord>& labels,
                           const std::vector<DsRecord>* ds_m = nullptr,
                           const std::vector<DsRecord>* ds_c = nullptr);

std::string labeled_set_to_jsonl(const LabeledSet& set);
LabeledSet labeled_set_from_jsonl(std::string_view text);

struct SplitSpec {
  double train = 0.70;
  double val = 0.20;
  double test = 0.10;
  bool stratified = true;
  bool by_deposition = false;
  std::uint64_t seed = 42;

  void validate() const;
};

struct SplitResult {
  LabeledSet train;
  LabeledSet val;
  LabeledSet test;
  std::vector<std::string> warnings;
};

// Splits n items into three counts by largest-remainder rounding of
// n * ratio; ties in the remainder go to the earlier bucket.
std::array<std::size_t, 3> largest_remainder(std::size_t n, const std::array<double, 3>& ratios);

SplitResult split(const LabeledSet& set, const SplitSpec& spec);

struct ClassShare {
  Aspect aspect = Aspect::B;
  std::size_t count = 0;
  double percent = 0.0;  // rounded to 2 decimals
};

struct ClassDistribution {
  std::vector<ClassShare> classes;  // all 12, in label order
  std::size_t total = 0;
};

ClassDistribution class_distribution(const LabeledSet& set);
std::string format_distribution(const ClassDistribution& d);

enum class SignalPlacement { Both, AnswerOnly };

struct SynthSpec {
  std::array<std::size_t, kAspectCount> per_class_counts{};
  std::size_t vocab_per_class = 20;
  std::size_t shared_vocab = 60;
  double overlap_fraction = 0.0;
  SignalPlacement signal = SignalPlacement::Both;
  std::uint64_t seed = 42;

  static SynthSpec uniform(std::size_t per_class);
  void validate() const;
};

// Class-specific pseudo-words plus a shared confounder pool. Each content
// slot draws from the shared pool with probability overlap_fraction.
LabeledSet synth_corpus(const SynthSpec& spec);

// The class-specific pool for one aspect.
std::vector<std::string> synth_class_vocab(Aspect aspect, std::size_t size);

// Word vectors for every token that occurs in the set, each an independent
// seeded Gaussian draw scaled to unit length.
WordEmbeddings synth_word_vectors(const LabeledSet& set, std::size_t dim, std::uint64_t seed);

// Bag-of-token random projections of each example's composed text, keyed by
// sentence_vector_key(id, variant token).
SentenceVectors synth_sentence_vectors(const LabeledSet& set,
                                       const std::vector<InputVariant>& variants,
                                       std::size_t dim, std::uint64_t seed);

// A classifier input: the composed text, its sentence-vector key, and the
// gold label index.
struct ComposedExample {
  std::string key;
  std::string text;
  std::size_t label = 0;
};

// Examples missing a needed DS text fall back: DS-M to Q+A, DS-C is an error.
std::vector<ComposedExample> compose_examples(const LabeledSet& set, InputVariant variant);

// {"id", "text"} rows for the external sentence encoder.
std::string compose_jsonl(const LabeledSet& set, InputVariant variant);

}  // namespace depo

#endif  // DEPO_DATASETS_HPP
