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

#include "depo/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "depo/common.hpp"
#include "depo/rng.hpp"
#include "json.hpp"

namespace depo {
namespace {

using ojson = nlohmann::ordered_json;

using PairKey = std::pair<std::string, std::size_t>;

template <typename F>
void for_each_json_line(std::string_view text, std::string_view what, F&& f) {
  const std::vector<std::string> lines = split_lines(text);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    if (trim(lines[ln]).empty()) continue;
    const std::string where = std::string(what) + " line " + std::to_string(ln + 1);
    try {
      f(nlohmann::json::parse(lines[ln]));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where + ": " + e.what());
    } catch (const InvalidArgument& e) {
      throw DataError(where + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
  }
}

ojson sentences_json(const std::optional<DeclarativeText>& ds) {
  if (!ds) return ojson();
  return ojson(ds->sentences);
}

std::optional<DeclarativeText> sentences_from_json(const nlohmann::json& j, Provenance p) {
  if (j.is_null()) return std::nullopt;
  DeclarativeText t;
  t.provenance = p;
  if (j.is_string()) {
    t.sentences.push_back(j.get<std::string>());
  } else {
    t.sentences = j.get<std::vector<std::string>>();
  }
  return t;
}

std::string base26(std::size_t i, std::size_t min_len) {
  std::string s;
  do {
    s.push_back(static_cast<char>('a' + i % 26));
    i /= 26;
  } while (i > 0);
  while (s.size() < min_len) s.push_back('a');
  std::reverse(s.begin(), s.end());
  return s;
}

std::vector<std::string> shared_vocab(std::size_t size) {
  std::vector<std::string> v;
  v.reserve(size);
  for (std::size_t i = 0; i < size; ++i) v.push_back("zq" + base26(i, 2));
  return v;
}

std::vector<double> unit_gaussian(std::uint64_t seed, std::size_t dim) {
  Rng rng(seed);
  std::vector<double> v(dim);
  double norm = 0.0;
  for (double& x : v) {
    x = rng.normal();
    norm += x * x;
  }
  norm = std::sqrt(norm);
  if (norm > 0.0) {
    for (double& x : v) x /= norm;
  }
  return v;
}

}  // namespace

std::string example_id(std::string_view deposition_id, std::size_t index) {
  return std::string(deposition_id) + "#" + std::to_string(index);
}

std::vector<LabelRecord> parse_labels_jsonl(std::string_view text) {
  std::vector<LabelRecord> out;
  for_each_json_line(text, "labels", [&](const nlohmann::json& rec) {
    LabelRecord r;
    r.deposition_id = rec.at("deposition_id").get<std::string>();
    r.index = rec.at("index").get<std::size_t>();
    r.label = parse_label(rec.at("label").get<std::string>());
    if (rec.contains("role") && !rec["role"].is_null()) {
      r.role = parse_role(rec["role"].get<std::string>());
    }
    out.push_back(std::move(r));
  });
  return out;
}

std::string format_labels_jsonl(const std::vector<LabelRecord>& labels) {
  std::string out;
  for (const LabelRecord& r : labels) {
    ojson rec;
    rec["deposition_id"] = r.deposition_id;
    rec["index"] = r.index;
    rec["label"] = code_of(r.label);
    rec["role"] = r.role ? ojson(role_token(*r.role)) : ojson();
    out += rec.dump();
    out += '\n';
  }
  return out;
}

std::vector<DsRecord> parse_ds_jsonl(std::string_view text) {
  std::vector<DsRecord> out;
  for_each_json_line(text, "DS sidecar", [&](const nlohmann::json& rec) {
    DsRecord r;
    r.deposition_id = rec.at("deposition_id").get<std::string>();
    r.index = rec.at("index").get<std::size_t>();
    r.ds = rec.at("ds").get<std::string>();
    const std::string prov = to_lower(rec.value("provenance", std::string("machine")));
    if (prov == "machine") {
      r.provenance = Provenance::Machine;
    } else if (prov == "human") {
      r.provenance = Provenance::Human;
    } else {
      throw DataError("provenance must be \"machine\" or \"human\", got \"" + prov + "\"");
    }
    out.push_back(std::move(r));
  });
  return out;
}

std::string format_ds_jsonl(const std::vector<DsRecord>& records) {
  std::string out;
  for (const DsRecord& r : records) {
    ojson rec;
    rec["deposition_id"] = r.deposition_id;
    rec["index"] = r.index;
    rec["ds"] = r.ds;
    rec["provenance"] = r.provenance == Provenance::Human ? "human" : "machine";
    out += rec.dump();
    out += '\n';
  }
  return out;
}

CanonRun canonicalize_pairs(const std::vector<PairRecord>& pairs) {
  CanonRun run;
  run.records.reserve(pairs.size());
  for (const PairRecord& p : pairs) {
    bool fell_back = false;
    const DeclarativeText t = to_declarative_or_concat(p.question, p.answer, &fell_back);
    if (fell_back) ++run.fallbacks;
    run.records.push_back({p.deposition_id, p.index, t.joined(), Provenance::Machine});
  }
  return run;
}

BuildResult build_examples(const std::vector<PairRecord>& pairs,
                           const std::vector<LabelRecord>& labels,
                           const std::vector<DsRecord>* ds_m, const std::vector<DsRecord>* ds_c) {
  std::map<PairKey, const PairRecord*> by_key;
  for (const PairRecord& p : pairs) {
    if (!by_key.emplace(PairKey{p.deposition_id, p.index}, &p).second) {
      throw DataError("duplicate pair " + example_id(p.deposition_id, p.index));
    }
  }
  auto index_ds = [](const std::vector<DsRecord>* src, std::string_view what) {
    std::map<PairKey, const DsRecord*> m;
    if (!src) return m;
    for (const DsRecord& r : *src) {
      if (!m.emplace(PairKey{r.deposition_id, r.index}, &r).second) {
        throw DataError(std::string(what) + ": duplicate entry for " +
                        example_id(r.deposition_id, r.index));
      }
    }
    return m;
  };
  const auto dsm_map = index_ds(ds_m, "DS-M sidecar");
  const auto dsc_map = index_ds(ds_c, "DS-C sidecar");

  std::vector<std::string> missing;
  std::set<PairKey> seen;
  for (const LabelRecord& l : labels) {
    const PairKey key{l.deposition_id, l.index};
    if (!by_key.count(key)) missing.push_back(example_id(l.deposition_id, l.index));
    if (!seen.insert(key).second) {
      throw DataError("duplicate label for " + example_id(l.deposition_id, l.index));
    }
  }
  if (!missing.empty()) {
    std::string msg = "labels reference missing pairs:";
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i) msg += " " + missing[i];
    if (missing.size() > 20) msg += " (+" + std::to_string(missing.size() - 20) + " more)";
    throw DataError(msg);
  }

  BuildResult result;
  result.set.provenance = "assembled from " + std::to_string(pairs.size()) + " pairs";
  for (const LabelRecord& l : labels) {
    const PairRecord& p = *by_key.at({l.deposition_id, l.index});
    LabeledExample e;
    e.id = example_id(p.deposition_id, p.index);
    e.deposition_id = p.deposition_id;
    e.index = p.index;
    e.question = p.question;
    e.answer = p.answer;
    e.label = l.label;
    e.role = l.role ? l.role : p.role;
    if (auto it = dsm_map.find({l.deposition_id, l.index}); it != dsm_map.end()) {
      e.ds_m = DeclarativeText{{it->second->ds}, it->second->provenance};
    } else {
      bool fell_back = false;
      e.ds_m = to_declarative_or_concat(p.question, p.answer, &fell_back);
      if (fell_back) ++result.ds_m_fallbacks;
    }
    if (auto it = dsc_map.find({l.deposition_id, l.index}); it != dsc_map.end()) {
      e.ds_c = DeclarativeText{{it->second->ds}, Provenance::Human};
    }
    result.set.examples.push_back(std::move(e));
  }
  result.unlabeled = pairs.size() - labels.size();
  return result;
}

std::string labeled_set_to_jsonl(const LabeledSet& set) {
  std::string out;
  for (const LabeledExample& e : set.examples) {
    ojson rec;
    rec["id"] = e.id;
    rec["deposition_id"] = e.deposition_id;
    rec["index"] = e.index;
    rec["question"] = e.question;
    rec["answer"] = e.answer;
    rec["ds_m"] = sentences_json(e.ds_m);
    rec["ds_c"] = sentences_json(e.ds_c);
    rec["label"] = code_of(e.label);
    rec["role"] = e.role ? ojson(role_token(*e.role)) : ojson();
    out += rec.dump();
    out += '\n';
  }
  return out;
}

LabeledSet labeled_set_from_jsonl(std::string_view text) {
  LabeledSet set;
  std::set<std::string> ids;
  for_each_json_line(text, "examples", [&](const nlohmann::json& rec) {
    LabeledExample e;
    e.deposition_id = rec.at("deposition_id").get<std::string>();
    e.index = rec.at("index").get<std::size_t>();
    e.id = rec.contains("id") ? rec["id"].get<std::string>() : example_id(e.deposition_id, e.index);
    e.question = rec.at("question").get<std::string>();
    e.answer = rec.at("answer").get<std::string>();
    e.ds_m = sentences_from_json(rec.value("ds_m", nlohmann::json()), Provenance::Machine);
    e.ds_c = sentences_from_json(rec.value("ds_c", nlohmann::json()), Provenance::Human);
    e.label = parse_label(rec.at("label").get<std::string>());
    if (rec.contains("role") && !rec["role"].is_null()) {
      e.role = parse_role(rec["role"].get<std::string>());
    }
    if (!ids.insert(e.id).second) throw DataError("duplicate example id '" + e.id + "'");
    set.examples.push_back(std::move(e));
  });
  return set;
}

void SplitSpec::validate() const {
  if (!(train > 0.0) || !(val > 0.0) || !(test > 0.0)) {
    throw InvalidArgument("split ratios must all be positive");
  }
  if (std::abs(train + val + test - 1.0) > 1e-9) {
    throw InvalidArgument("split ratios must sum to 1, got " + format_double(train + val + test));
  }
}

std::array<std::size_t, 3> largest_remainder(std::size_t n, const std::array<double, 3>& ratios) {
  std::array<std::size_t, 3> counts{};
  std::array<double, 3> frac{};
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double exact = static_cast<double>(n) * ratios[i];
    counts[i] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    frac[i] = exact - static_cast<double>(counts[i]);
    assigned += counts[i];
  }
  std::array<std::size_t, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return frac[a] > frac[b] + 1e-12; });
  for (std::size_t k = 0; assigned < n; k = (k + 1) % 3) {
    ++counts[order[k]];
    ++assigned;
  }
  while (assigned > n) {
    // Only reachable through the epsilon above; trim from the largest bucket.
    --counts[0];
    --assigned;
  }
  return counts;
}

SplitResult split(const LabeledSet& set, const SplitSpec& spec) {
  spec.validate();
  if (set.empty()) throw InvalidArgument("cannot split an empty set");
  const std::array<double, 3> ratios{spec.train, spec.val, spec.test};
  std::vector<int> bucket(set.size(), 0);
  SplitResult result;

  if (spec.by_deposition) {
    std::vector<std::string> deps;
    std::set<std::string> seen;
    for (const LabeledExample& e : set.examples) {
      if (seen.insert(e.deposition_id).second) deps.push_back(e.deposition_id);
    }
    std::sort(deps.begin(), deps.end());
    Rng rng(derive_seed(spec.seed, "split/deposition"));
    rng.shuffle(deps);
    const auto counts = largest_remainder(deps.size(), ratios);
    std::map<std::string, int> dep_bucket;
    for (std::size_t i = 0; i < deps.size(); ++i) {
      dep_bucket[deps[i]] = i < counts[0] ? 0 : (i < counts[0] + counts[1] ? 1 : 2);
    }
    for (std::size_t i = 0; i < set.size(); ++i) bucket[i] = dep_bucket[set.examples[i].deposition_id];
  } else {
    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < set.size(); ++i) {
      groups[spec.stratified ? index_of(set.examples[i].label) : 0].push_back(i);
    }
    for (auto& [cls, members] : groups) {
      if (spec.stratified && members.size() < 3) {
        result.warnings.push_back("class " + std::string(code_of(aspect_from_index(cls))) + " has " +
                                  std::to_string(members.size()) +
                                  " example(s); all assigned to train");
        continue;
      }
      const std::string label =
          spec.stratified ? "split/" + std::string(code_of(aspect_from_index(cls))) : "split/all";
      Rng rng(derive_seed(spec.seed, label));
      rng.shuffle(members);
      const auto counts = largest_remainder(members.size(), ratios);
      for (std::size_t k = 0; k < members.size(); ++k) {
        bucket[members[k]] = k < counts[0] ? 0 : (k < counts[0] + counts[1] ? 1 : 2);
      }
    }
  }

  result.train.provenance = "train split of " + set.provenance;
  result.val.provenance = "validation split of " + set.provenance;
  result.test.provenance = "test split of " + set.provenance;
  for (std::size_t i = 0; i < set.size(); ++i) {
    LabeledSet& dst = bucket[i] == 0 ? result.train : (bucket[i] == 1 ? result.val : result.test);
    dst.examples.push_back(set.examples[i]);
  }
  return result;
}

ClassDistribution class_distribution(const LabeledSet& set) {
  ClassDistribution d;
  std::array<std::size_t, kAspectCount> counts{};
  for (const LabeledExample& e : set.examples) ++counts[index_of(e.label)];
  d.total = set.size();
  for (std::size_t i = 0; i < kAspectCount; ++i) {
    ClassShare s;
    s.aspect = aspect_from_index(i);
    s.count = counts[i];
    if (d.total > 0) {
      s.percent = std::round(10000.0 * static_cast<double>(counts[i]) / static_cast<double>(d.total)) /
                  100.0;
    }
    d.classes.push_back(s);
  }
  return d;
}

std::string format_distribution(const ClassDistribution& d) {
  std::string out = "Class  Count  Percent\n";
  for (const ClassShare& s : d.classes) {
    std::string code(code_of(s.aspect));
    code.resize(5, ' ');
    std::string count = std::to_string(s.count);
    count.insert(0, count.size() < 5 ? 5 - count.size() : 0, ' ');
    out += code + "  " + count + "  " + format_fixed(s.percent, 2) + "%\n";
  }
  out += "Total  " + std::to_string(d.total) + "\n";
  return out;
}

SynthSpec SynthSpec::uniform(std::size_t per_class) {
  SynthSpec s;
  s.per_class_counts.fill(per_class);
  return s;
}

void SynthSpec::validate() const {
  if (vocab_per_class == 0) throw InvalidArgument("synth corpus: vocab_per_class must be > 0");
  if (shared_vocab == 0) throw InvalidArgument("synth corpus: shared_vocab must be > 0");
  if (!(overlap_fraction >= 0.0) || !(overlap_fraction < 1.0)) {
    throw InvalidArgument("synth corpus: overlap_fraction must be in [0, 1)");
  }
}

std::vector<std::string> synth_class_vocab(Aspect aspect, std::size_t size) {
  const std::string prefix = to_lower(code_of(aspect)) + "x";
  std::vector<std::string> v;
  v.reserve(size);
  for (std::size_t i = 0; i < size; ++i) v.push_back(prefix + base26(i, 2));
  return v;
}

LabeledSet synth_corpus(const SynthSpec& spec) {
  spec.validate();
  const std::vector<std::string> shared = shared_vocab(spec.shared_vocab);
  Rng rng(derive_seed(spec.seed, "synth/corpus"));

  std::vector<LabeledExample> drafts;

  for (std::size_t c = 0; c < kAspectCount; ++c) {
    const Aspect aspect = aspect_from_index(c);
    const std::vector<std::string> pool = synth_class_vocab(aspect, spec.vocab_per_class);
    std::vector<DeponentRole> roles;
    for (DeponentRole r : all_roles()) {
      if (aspects_for_role(r).count(aspect)) roles.push_back(r);
    }
    auto content = [&](bool signal) {
      if (signal && rng.uniform() >= spec.overlap_fraction) return pool[rng.below(pool.size())];
      return shared[rng.below(shared.size())];
    };
    const bool q_signal = spec.signal == SignalPlacement::Both;
    for (std::size_t k = 0; k < spec.per_class_counts[c]; ++k) {
      const std::string q1 = content(q_signal);
      const std::string q2 = content(q_signal);
      const std::string a1 = content(true);
      const std::string a2 = content(true);
      const std::string a3 = content(true);
      LabeledExample e;
      e.label = aspect;
      std::string human;
      switch (rng.below(4)) {
        case 0:
          e.question = "Did you " + q1 + " the " + q2 + "?";
          e.answer = "Yes. I " + a1 + " " + a2 + " " + a3 + ".";
          human = "I " + q1 + " the " + q2 + ". I " + a1 + " " + a2 + " " + a3 + ".";
          break;
        case 1:
          e.question = "Were you " + q1 + " " + q2 + "?";
          e.answer = "No. I " + a1 + " the " + a2 + " " + a3 + ".";
          human = "I was not " + q1 + " " + q2 + ". I " + a1 + " the " + a2 + " " + a3 + ".";
          break;
        case 2:
          e.question = "What did you " + q1 + " about the " + q2 + "?";
          e.answer = "I " + a1 + " the " + a2 + " " + a3 + ".";
          human = "I " + a1 + " the " + a2 + " " + a3 + " about the " + q2 + ".";
          break;
        default:
          e.question = "You " + q1 + " the " + q2 + ", correct?";
          e.answer = "Yes, I " + a1 + " " + a2 + " " + a3 + ".";
          human = "I " + q1 + " the " + q2 + ". I " + a1 + " " + a2 + " " + a3 + ".";
          break;
      }
      e.ds_c = DeclarativeText{{human}, Provenance::Human};
      if (!roles.empty()) {
        e.role = roles[rng.below(roles.size())];
      } else {
        e.role = all_roles()[rng.below(all_roles().size())];
      }
      drafts.push_back(std::move(e));
    }
  }

  rng.shuffle(drafts);
  constexpr std::size_t kPairsPerDeposition = 25;
  LabeledSet set;
  set.provenance = "synthetic corpus (seed " + std::to_string(spec.seed) + ", overlap " +
                   format_double(spec.overlap_fraction) + ")";
  for (std::size_t i = 0; i < drafts.size(); ++i) {
    LabeledExample& e = drafts[i];
    const std::size_t dep = i / kPairsPerDeposition;
    e.deposition_id = "synth-" + base26(dep, 3);
    e.index = i % kPairsPerDeposition;
    e.id = example_id(e.deposition_id, e.index);
    e.ds_m = to_declarative_or_concat(e.question, e.answer);
    set.examples.push_back(std::move(e));
  }
  return set;
}

WordEmbeddings synth_word_vectors(const LabeledSet& set, std::size_t dim, std::uint64_t seed) {
  WordEmbeddings we(dim);
  std::set<std::string> seen;
  auto add_text = [&](std::string_view text) {
    for (const std::string& tok : tokenize(text)) {
      if (!seen.insert(tok).second) continue;
      const auto v = unit_gaussian(derive_seed(seed, "wv/" + tok), dim);
      we.set(tok, v);
    }
  };
  for (const LabeledExample& e : set.examples) {
    add_text(e.question);
    add_text(e.answer);
    if (e.ds_m) add_text(e.ds_m->joined());
    if (e.ds_c) add_text(e.ds_c->joined());
  }
  return we;
}

SentenceVectors synth_sentence_vectors(const LabeledSet& set,
                                       const std::vector<InputVariant>& variants, std::size_t dim,
                                       std::uint64_t seed) {
  if (dim == 0) throw InvalidArgument("sentence vector dim must be > 0");
  SentenceVectors sv;
  std::map<std::string, std::vector<double>> cache;
  for (InputVariant v : variants) {
    for (const ComposedExample& ce : compose_examples(set, v)) {
      std::vector<std::string> toks = tokenize(ce.text);
      std::sort(toks.begin(), toks.end());
      toks.erase(std::unique(toks.begin(), toks.end()), toks.end());
      std::vector<double> out(dim, 0.0);
      for (const std::string& t : toks) {
        auto it = cache.find(t);
        if (it == cache.end()) {
          it = cache.emplace(t, unit_gaussian(derive_seed(seed, "sv/" + t), dim)).first;
        }
        for (std::size_t i = 0; i < dim; ++i) out[i] += it->second[i];
      }
      if (!toks.empty()) {
        const double s = 1.0 / std::sqrt(static_cast<double>(toks.size()));
        for (double& x : out) x *= s;
      }
      sv.add(ce.key, std::move(out));
    }
  }
  return sv;
}

std::vector<ComposedExample> compose_examples(const LabeledSet& set, InputVariant variant) {
  std::vector<ComposedExample> out;
  out.reserve(set.size());
  for (const LabeledExample& e : set.examples) {
    std::optional<DeclarativeText> generated;
    const DeclarativeText* ds_m = e.ds_m ? &*e.ds_m : nullptr;
    if (!ds_m && (variant == InputVariant::DSM || variant == InputVariant::QADSM ||
                  variant == InputVariant::DSCM)) {
      generated = to_declarative_or_concat(e.question, e.answer);
      ds_m = &*generated;
    }
    if (!e.ds_c && (variant == InputVariant::DSC || variant == InputVariant::DSCM)) {
      throw DataError("example " + e.id + " has no DS-C text (variant " +
                      std::string(variant_display(variant)) + ")");
    }
    ComposeSource src{e.question, e.answer, ds_m, e.ds_c ? &*e.ds_c : nullptr};
    out.push_back({sentence_vector_key(e.id, variant_token(variant)), compose_input(src, variant),
                   index_of(e.label)});
  }
  return out;
}

std::string compose_jsonl(const LabeledSet& set, InputVariant variant) {
  std::string out;
  for (const ComposedExample& ce : compose_examples(set, variant)) {
    ojson rec;
    rec["id"] = ce.key;
    rec["text"] = ce.text;
    out += rec.dump();
    out += '\n';
  }
  return out;
}

}  // namespace depo
