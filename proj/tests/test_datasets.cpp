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

#include <array>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "depo/common.hpp"
#include "depo/datasets.hpp"
#include "depo/eval.hpp"
#include "depo/models.hpp"
#include "depo/rng.hpp"
#include "doctest.h"

using namespace depo;

namespace {

// Per-class counts of the reference corpus, in label order.
constexpr std::array<std::size_t, 12> kCorpusCounts = {1455, 1468, 522, 220, 39, 245, 62, 51, 80, 1011, 1617, 2477};
constexpr std::array<double, 12> kCorpusPercents = {15.73, 15.87, 5.64, 2.38, 0.42, 2.65,
                                                    0.67,  0.55,  0.86, 10.93, 17.48, 26.78};

LabeledSet set_with_counts(const std::array<std::size_t, 12>& counts) {
  LabeledSet s;
  s.provenance = "fixture";
  std::size_t n = 0;
  for (std::size_t c = 0; c < 12; ++c) {
    for (std::size_t k = 0; k < counts[c]; ++k, ++n) {
      LabeledExample e;
      e.deposition_id = "dep" + std::to_string(n % 37);
      e.index = n;
      e.id = example_id(e.deposition_id, e.index);
      e.question = "q" + std::to_string(n);
      e.answer = "a";
      e.label = aspect_from_index(c);
      s.examples.push_back(e);
    }
  }
  return s;
}

std::vector<std::string> ids(const LabeledSet& s) {
  std::vector<std::string> out;
  for (const auto& e : s.examples) out.push_back(e.id);
  return out;
}

std::array<std::size_t, 12> counts_of(const LabeledSet& s) {
  std::array<std::size_t, 12> c{};
  for (const auto& e : s.examples) ++c[index_of(e.label)];
  return c;
}

std::vector<PairRecord> two_pairs() {
  return {{"d1", 0, "Were you at the site?", "Yes.", DeponentRole::Plaintiff},
          {"d1", 1, "Where do you work?", "I work at the mill.", DeponentRole::Plaintiff}};
}

std::string error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("build_examples joins pairs and labels") {
  const std::vector<LabelRecord> labels = {{"d1", 0, Aspect::ED, std::nullopt}, {"d1", 1, Aspect::B, std::nullopt}};
  const BuildResult r = build_examples(two_pairs(), labels);
  REQUIRE(r.set.size() == 2);
  CHECK(r.unlabeled == 0);
  CHECK(r.set.examples[0].id == "d1#0");
  CHECK(r.set.examples[0].label == Aspect::ED);
  CHECK(r.set.examples[0].role == DeponentRole::Plaintiff);
  // No DS-M sidecar, so the declaratives are generated.
  REQUIRE(r.set.examples[0].ds_m.has_value());
  CHECK(r.set.examples[0].ds_m->joined() == "I was at the site.");
  CHECK(r.set.examples[1].ds_m->joined() == "I work at the mill.");
  CHECK_FALSE(r.set.examples[0].ds_c.has_value());
}

TEST_CASE("build_examples errors") {
  const std::vector<LabelRecord> stray = {{"d1", 99, Aspect::B, std::nullopt}};
  CHECK(error_of([&] { build_examples(two_pairs(), stray); }).find("d1#99") != std::string::npos);
  const std::vector<LabelRecord> dup = {{"d1", 0, Aspect::B, std::nullopt}, {"d1", 0, Aspect::O, std::nullopt}};
  CHECK_THROWS_AS(build_examples(two_pairs(), dup), DataError);
  const std::vector<LabelRecord> one = {{"d1", 1, Aspect::B, std::nullopt}};
  CHECK(build_examples(two_pairs(), one).unlabeled == 1);
}

TEST_CASE("DS sidecars override generated text") {
  const std::vector<LabelRecord> labels = {{"d1", 0, Aspect::ED, std::nullopt}};
  const std::vector<DsRecord> dsm = {{"d1", 0, "I attended the site.", Provenance::Human}};
  const std::vector<DsRecord> dsc = {{"d1", 0, "I was present at the site.", Provenance::Human}};
  const BuildResult r = build_examples(two_pairs(), labels, &dsm, &dsc);
  CHECK(r.set.examples[0].ds_m->joined() == "I attended the site.");
  CHECK(r.set.examples[0].ds_c->joined() == "I was present at the site.");
  const auto composed = compose_examples(r.set, InputVariant::DSCM);
  CHECK(composed[0].text == "I was present at the site. I attended the site.");
  CHECK(composed[0].key == "d1#0#dscm");
}

TEST_CASE("JSONL formats round trip") {
  const std::vector<LabelRecord> labels = {{"d1", 0, Aspect::ED, DeponentRole::FactWitness},
                                           {"d1", 1, Aspect::PRD, std::nullopt}};
  const auto back = parse_labels_jsonl(format_labels_jsonl(labels));
  REQUIRE(back.size() == 2);
  CHECK(back[0].label == Aspect::ED);
  CHECK(back[0].role == DeponentRole::FactWitness);
  CHECK_FALSE(back[1].role.has_value());

  const CanonRun run = canonicalize_pairs(two_pairs());
  CHECK(run.fallbacks == 0);
  const auto ds = parse_ds_jsonl(format_ds_jsonl(run.records));
  REQUIRE(ds.size() == 2);
  CHECK(ds[1].ds == "I work at the mill.");

  const LabeledSet set = build_examples(two_pairs(), labels).set;
  const LabeledSet again = labeled_set_from_jsonl(labeled_set_to_jsonl(set));
  CHECK(labeled_set_to_jsonl(again) == labeled_set_to_jsonl(set));
  CHECK(error_of([] { parse_labels_jsonl("{\"deposition_id\":\"d\",\"index\":0,\"label\":\"ZZ\"}\n"); })
            .find("line 1") != std::string::npos);
}

TEST_CASE("largest remainder rounding") {
  CHECK(largest_remainder(100, {0.7, 0.2, 0.1}) == std::array<std::size_t, 3>{70, 20, 10});
  CHECK(largest_remainder(1, {0.7, 0.2, 0.1}) == std::array<std::size_t, 3>{1, 0, 0});
  CHECK(largest_remainder(3, {0.7, 0.2, 0.1}) == std::array<std::size_t, 3>{2, 1, 0});
  Rng rng(3);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = rng.below(5000);
    const auto c = largest_remainder(n, {0.7, 0.2, 0.1});
    CHECK(c[0] + c[1] + c[2] == n);
    const std::array<double, 3> r{0.7, 0.2, 0.1};
    for (int i = 0; i < 3; ++i) CHECK(std::abs(static_cast<double>(c[i]) - r[i] * static_cast<double>(n)) < 1.0);
  }
}

TEST_CASE("single-class split of 100") {
  std::array<std::size_t, 12> counts{};
  counts[0] = 100;
  const LabeledSet set = set_with_counts(counts);
  const SplitResult a = split(set, {});
  CHECK(a.train.size() == 70);
  CHECK(a.val.size() == 20);
  CHECK(a.test.size() == 10);

  SplitSpec other;
  other.seed = 43;
  const SplitResult b = split(set, other);
  CHECK(b.train.size() == 70);
  CHECK(ids(b.train) != ids(a.train));
}

TEST_CASE("reference corpus distribution and split") {
  const LabeledSet set = set_with_counts(kCorpusCounts);
  REQUIRE(set.size() == 9247);
  const ClassDistribution d = class_distribution(set);
  CHECK(d.total == 9247);
  for (std::size_t c = 0; c < 12; ++c) {
    CAPTURE(c);
    CHECK(d.classes[c].count == kCorpusCounts[c]);
    // Reference percentages mix rounding and truncation; either lands
    // within one unit of the last digit.
    CHECK(std::abs(d.classes[c].percent - kCorpusPercents[c]) <= 0.01 + 1e-9);
  }

  const SplitResult s = split(set, {});
  CHECK(s.warnings.empty());
  const auto tr = counts_of(s.train), va = counts_of(s.val), te = counts_of(s.test);
  for (std::size_t c = 0; c < 12; ++c) {
    CAPTURE(c);
    const double n = static_cast<double>(kCorpusCounts[c]);
    CHECK(std::abs(static_cast<double>(tr[c]) - 0.7 * n) <= 1.0);
    CHECK(std::abs(static_cast<double>(va[c]) - 0.2 * n) <= 1.0);
    CHECK(std::abs(static_cast<double>(te[c]) - 0.1 * n) <= 1.0);
    CHECK(tr[c] + va[c] + te[c] == kCorpusCounts[c]);
  }
  CHECK(std::abs(static_cast<double>(s.train.size()) - 6473.0) <= 12.0);
  CHECK(std::abs(static_cast<double>(s.val.size()) - 1849.0) <= 12.0);
  CHECK(std::abs(static_cast<double>(s.test.size()) - 925.0) <= 12.0);

  std::set<std::string> all;
  for (const LabeledSet* part : {&s.train, &s.val, &s.test}) {
    for (const auto& id : ids(*part)) CHECK(all.insert(id).second);
  }
  CHECK(all.size() == set.size());

  const SplitResult again = split(set, {});
  CHECK(ids(again.train) == ids(s.train));
  CHECK(ids(again.val) == ids(s.val));
  CHECK(ids(again.test) == ids(s.test));
}

TEST_CASE("tiny classes go to train with a warning") {
  std::array<std::size_t, 12> counts{};
  counts[0] = 50;
  counts[4] = 2;
  const SplitResult s = split(set_with_counts(counts), {});
  REQUIRE(s.warnings.size() == 1);
  CHECK(s.warnings[0].find("PPC") != std::string::npos);
  CHECK(counts_of(s.train)[4] == 2);
}

TEST_CASE("deposition-level split keeps depositions together") {
  const LabeledSet set = set_with_counts(kCorpusCounts);
  SplitSpec spec;
  spec.by_deposition = true;
  const SplitResult s = split(set, spec);
  std::set<std::string> tr, va, te;
  for (const auto& e : s.train.examples) tr.insert(e.deposition_id);
  for (const auto& e : s.val.examples) va.insert(e.deposition_id);
  for (const auto& e : s.test.examples) te.insert(e.deposition_id);
  for (const auto& d : tr) {
    CHECK_FALSE(va.count(d));
    CHECK_FALSE(te.count(d));
  }
  for (const auto& d : va) CHECK_FALSE(te.count(d));
  CHECK(tr.size() + va.size() + te.size() == 37);
}

TEST_CASE("split spec validation") {
  SplitSpec bad;
  bad.train = 0.8;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = {};
  bad.test = 0.0;
  bad.train = 0.8;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  CHECK_THROWS_AS(split(LabeledSet{}, {}), InvalidArgument);
}

TEST_CASE("property: random splits partition exactly") {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    std::array<std::size_t, 12> counts{};
    for (auto& c : counts) c = rng.below(40);
    counts[rng.below(12)] += 1;
    const LabeledSet set = set_with_counts(counts);
    SplitSpec spec;
    spec.seed = rng.below(1u << 30);
    spec.stratified = rng.below(2) == 0;
    const SplitResult s = split(set, spec);
    CHECK(s.train.size() + s.val.size() + s.test.size() == set.size());
    std::set<std::string> all;
    for (const LabeledSet* part : {&s.train, &s.val, &s.test}) {
      for (const auto& id : ids(*part)) CHECK(all.insert(id).second);
    }
    if (spec.stratified) {
      const auto tr = counts_of(s.train);
      for (std::size_t c = 0; c < 12; ++c) {
        if (counts[c] >= 3) CHECK(std::abs(static_cast<double>(tr[c]) - 0.7 * static_cast<double>(counts[c])) <= 1.0);
      }
    }
  }
}

TEST_CASE("distribution edge cases") {
  const ClassDistribution empty = class_distribution(LabeledSet{});
  CHECK(empty.total == 0);
  CHECK(empty.classes.size() == 12);
  for (const auto& c : empty.classes) CHECK(c.percent == 0.0);

  std::array<std::size_t, 12> counts{};
  counts[11] = 17;
  const ClassDistribution one = class_distribution(set_with_counts(counts));
  CHECK(one.classes[11].percent == 100.0);
  CHECK(format_distribution(one).find("100.00") != std::string::npos);
}

TEST_CASE("synthetic corpus") {
  SynthSpec spec = SynthSpec::uniform(10);
  const LabeledSet a = synth_corpus(spec);
  const LabeledSet b = synth_corpus(spec);
  CHECK(a.size() == 120);
  CHECK(labeled_set_to_jsonl(a) == labeled_set_to_jsonl(b));
  spec.seed = 7;
  CHECK(labeled_set_to_jsonl(synth_corpus(spec)) != labeled_set_to_jsonl(a));
  for (const auto& c : class_distribution(a).classes) CHECK(c.count == 10);
  for (const auto& e : a.examples) {
    CHECK(e.ds_m.has_value());
    CHECK(e.ds_c.has_value());
  }
  spec.overlap_fraction = 1.0;
  CHECK_THROWS_AS(spec.validate(), InvalidArgument);
}

TEST_CASE("answer-only signal keeps class words out of the questions") {
  SynthSpec spec = SynthSpec::uniform(5);
  spec.signal = SignalPlacement::AnswerOnly;
  const LabeledSet set = synth_corpus(spec);
  for (const auto& e : set.examples) {
    const auto vocab = synth_class_vocab(e.label, spec.vocab_per_class);
    const std::set<std::string> own(vocab.begin(), vocab.end());
    for (const auto& t : tokenize(e.question)) CHECK_FALSE(own.count(t));
  }
}

TEST_CASE("synthetic vectors are deterministic and keyed by variant") {
  const LabeledSet set = synth_corpus(SynthSpec::uniform(3));
  const WordEmbeddings w1 = synth_word_vectors(set, 6, 1), w2 = synth_word_vectors(set, 6, 1);
  CHECK(format_word_vectors(w1) == format_word_vectors(w2));
  for (const auto& e : set.examples) {
    for (const auto& t : tokenize(e.question + " " + e.answer)) CHECK(w1.contains(t));
  }
  const SentenceVectors sv = synth_sentence_vectors(set, {InputVariant::DSM, InputVariant::Q}, 8, 2);
  CHECK(sv.size() == 2 * set.size());
  CHECK(sv.find(set.examples[0].id + "#dsm") != nullptr);
  CHECK(sv.find(set.examples[0].id + "#q") != nullptr);
  CHECK(format_sentence_vectors(sv) ==
        format_sentence_vectors(synth_sentence_vectors(set, {InputVariant::DSM, InputVariant::Q}, 8, 2)));
}

TEST_CASE("overlap with the shared pool degrades a trained head") {
  auto score = [](double overlap) {
    SynthSpec spec = SynthSpec::uniform(40);
    spec.overlap_fraction = overlap;
    const LabeledSet set = synth_corpus(spec);
    const SplitResult s = split(set, {});
    const SentenceVectors sv = synth_sentence_vectors(set, {InputVariant::QA}, 48, 9);
    const Resources res{nullptr, &sv};
    HyperParams h = HyperParams::defaults(Family::EmbHead);
    h.learning_rate = 0.01;
    h.hidden_size = 32;
    h.max_epochs = 15;
    const TrainedModel tm =
        train(h, compose_examples(s.train, InputVariant::QA), compose_examples(s.val, InputVariant::QA), res);
    const auto test = compose_examples(s.test, InputVariant::QA);
    std::vector<std::size_t> golds;
    for (const auto& e : test) golds.push_back(e.label);
    return prf1(confusion(golds, predict_labels(tm.model, test, res))).weighted_f1;
  };
  const double clean = score(0.0), noisy = score(0.9);
  CHECK(clean > noisy);
  CHECK(clean >= 0.8);
}
