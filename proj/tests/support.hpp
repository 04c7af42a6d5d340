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

// Shared generators for the test binaries.

#ifndef DEPO_TESTS_SUPPORT_HPP
#define DEPO_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "depo/grad_check.hpp"
#include "depo/models.hpp"
#include "depo/ops.hpp"
#include "depo/rng.hpp"
#include "depo/tensor.hpp"

namespace depo::testing {

inline Tensor random_tensor(Rng& rng, std::vector<std::size_t> shape, double scale = 1.0) {
  Tensor t(std::move(shape), 0.0);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = scale * rng.normal();
  return t;
}

inline std::size_t between(Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    const auto base = std::filesystem::temp_directory_path();
    for (std::uint64_t i = 0;; ++i) {
      path_ = base / ("depo-" + tag + "-" + std::to_string(splitmix64(i ^ fnv1a64(tag)) % 1000000));
      if (std::filesystem::create_directory(path_)) break;
    }
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// One randomized gradient-check instance: a scalar function of `params`.
struct GradInstance {
  ad::ScalarBuilder fn;
  std::vector<Tensor> params;
};

struct GradCase {
  std::string name;
  std::function<GradInstance(Rng&)> make;
};

// Reduces any tensor-valued op to a scalar by a fixed random projection.
inline ad::Var project(ad::Tape& t, ad::Var v, const Tensor& probe) {
  return ad::sum(t, ad::mul(t, v, t.constant(probe)));
}

inline std::vector<GradCase> primitive_grad_cases() {
  using namespace ad;
  std::vector<GradCase> cases;
  auto unary = [&](std::string name, std::function<Var(Tape&, Var)> op) {
    cases.push_back({name, [op](Rng& rng) {
                       const std::size_t n = between(rng, 1, 6);
                       Tensor x = random_tensor(rng, {n});
                       Tape probe_tape;
                       const Tensor out = probe_tape.value(op(probe_tape, probe_tape.constant(x)));
                       Tensor probe = random_tensor(rng, out.shape());
                       return GradInstance{[op, probe](Tape& t, std::span<const Var> p) {
                                             return project(t, op(t, p[0]), probe);
                                           },
                                           {x}};
                     }});
  };
  unary("scale", [](Tape& t, Var x) { return scale(t, x, -1.7); });
  unary("sum", [](Tape& t, Var x) { return sum(t, x); });
  unary("sum_squares", [](Tape& t, Var x) { return sum_squares(t, x); });
  unary("activate.identity", [](Tape& t, Var x) { return activate(t, x, Activation::Identity); });
  unary("activate.relu", [](Tape& t, Var x) { return activate(t, x, Activation::Relu); });
  unary("activate.tanh", [](Tape& t, Var x) { return activate(t, x, Activation::Tanh); });
  unary("activate.logistic", [](Tape& t, Var x) { return activate(t, x, Activation::Logistic); });
  unary("softmax", [](Tape& t, Var x) { return softmax(t, x); });
  unary("slice", [](Tape& t, Var x) {
    const std::size_t n = t.value(x).size();
    return slice(t, x, n / 2, n - n / 2);
  });

  auto binary = [&](std::string name, std::function<Var(Tape&, Var, Var)> op) {
    cases.push_back({name, [op](Rng& rng) {
                       const std::size_t n = between(rng, 1, 6);
                       Tensor a = random_tensor(rng, {n});
                       Tensor b = random_tensor(rng, {n});
                       Tensor probe = random_tensor(rng, {n});
                       return GradInstance{[op, probe](Tape& t, std::span<const Var> p) {
                                             return project(t, op(t, p[0], p[1]), probe);
                                           },
                                           {a, b}};
                     }});
  };
  binary("add", [](Tape& t, Var a, Var b) { return add(t, a, b); });
  binary("mul", [](Tape& t, Var a, Var b) { return mul(t, a, b); });

  cases.push_back({"concat.full", [](Rng& rng) {
                     const std::size_t n = between(rng, 1, 4);
                     const std::size_t m = between(rng, 1, 4);
                     Tensor probe = random_tensor(rng, {n + m + n});
                     return GradInstance{[probe](Tape& t, std::span<const Var> p) {
                                           return project(t, concat(t, {p[0], p[1], p[0]}), probe);
                                         },
                                         {random_tensor(rng, {n}), random_tensor(rng, {m})}};
                   }});
  cases.push_back({"matvec", [](Rng& rng) {
                     const std::size_t r = between(rng, 1, 5);
                     const std::size_t c = between(rng, 1, 5);
                     Tensor probe = random_tensor(rng, {r});
                     return GradInstance{[probe](Tape& t, std::span<const Var> p) {
                                           return project(t, matvec(t, p[0], p[1]), probe);
                                         },
                                         {random_tensor(rng, {r, c}), random_tensor(rng, {c})}};
                   }});
  cases.push_back({"vecmat", [](Rng& rng) {
                     const std::size_t r = between(rng, 1, 5);
                     const std::size_t c = between(rng, 1, 5);
                     Tensor probe = random_tensor(rng, {c});
                     return GradInstance{[probe](Tape& t, std::span<const Var> p) {
                                           return project(t, vecmat(t, p[0], p[1]), probe);
                                         },
                                         {random_tensor(rng, {r}), random_tensor(rng, {r, c})}};
                   }});
  cases.push_back({"row", [](Rng& rng) {
                     const std::size_t r = between(rng, 1, 5);
                     const std::size_t c = between(rng, 1, 5);
                     const std::size_t pick = static_cast<std::size_t>(rng.below(r));
                     Tensor probe = random_tensor(rng, {c});
                     return GradInstance{[probe, pick](Tape& t, std::span<const Var> p) {
                                           return project(t, row(t, p[0], pick), probe);
                                         },
                                         {random_tensor(rng, {r, c})}};
                   }});
  cases.push_back({"stack_rows", [](Rng& rng) {
                     const std::size_t c = between(rng, 1, 5);
                     Tensor probe = random_tensor(rng, {3, c});
                     return GradInstance{[probe](Tape& t, std::span<const Var> p) {
                                           return project(t, stack_rows(t, {p[0], p[1], p[0]}), probe);
                                         },
                                         {random_tensor(rng, {c}), random_tensor(rng, {c})}};
                   }});
  cases.push_back({"gather_rows", [](Rng& rng) {
                     const std::size_t v = between(rng, 2, 6);
                     const std::size_t d = between(rng, 1, 4);
                     std::vector<std::size_t> ids(between(rng, 1, 6));
                     for (auto& id : ids) id = static_cast<std::size_t>(rng.below(v));
                     Tensor probe = random_tensor(rng, {ids.size(), d});
                     return GradInstance{[probe, ids](Tape& t, std::span<const Var> p) {
                                           return project(t, gather_rows(t, p[0], ids), probe);
                                         },
                                         {random_tensor(rng, {v, d})}};
                   }});
  for (std::size_t n : {1, 2, 3}) {
    cases.push_back({"conv1d_ngram.n" + std::to_string(n), [n](Rng& rng) {
                       const std::size_t L = between(rng, n, n + 4);
                       const std::size_t D = between(rng, 1, 4);
                       const std::size_t K = between(rng, 1, 4);
                       Tensor probe = random_tensor(rng, {L - n + 1, K});
                       return GradInstance{[probe, n](Tape& t, std::span<const Var> p) {
                                             return project(t, conv1d_ngram(t, p[0], p[1], p[2], n), probe);
                                           },
                                           {random_tensor(rng, {L, D}), random_tensor(rng, {K, n * D}),
                                            random_tensor(rng, {K})}};
                     }});
  }
  cases.push_back({"maxpool_over_time", [](Rng& rng) {
                     const std::size_t L = between(rng, 1, 6);
                     const std::size_t K = between(rng, 1, 5);
                     const std::size_t mask = between(rng, 1, L);
                     Tensor probe = random_tensor(rng, {K});
                     return GradInstance{[probe, mask](Tape& t, std::span<const Var> p) {
                                           return project(t, maxpool_over_time(t, p[0], mask), probe);
                                         },
                                         {random_tensor(rng, {L, K})}};
                   }});
  cases.push_back({"dense", [](Rng& rng) {
                     const std::size_t in = between(rng, 1, 5);
                     const std::size_t out = between(rng, 1, 5);
                     const auto act = static_cast<Activation>(rng.below(4));
                     Tensor probe = random_tensor(rng, {out});
                     return GradInstance{[probe, act](Tape& t, std::span<const Var> p) {
                                           return project(t, dense(t, p[0], p[1], p[2], act), probe);
                                         },
                                         {random_tensor(rng, {in}), random_tensor(rng, {out, in}),
                                          random_tensor(rng, {out})}};
                   }});
  cases.push_back({"dropout", [](Rng& rng) {
                     const std::size_t n = between(rng, 1, 8);
                     const double rate = 0.1 * static_cast<double>(between(rng, 1, 5));
                     const std::uint64_t mask_seed = rng.next_u64();
                     Tensor probe = random_tensor(rng, {n});
                     return GradInstance{[probe, rate, mask_seed](Tape& t, std::span<const Var> p) {
                                           Rng mask_rng(mask_seed);
                                           return project(t, dropout(t, p[0], rate, mask_rng, true), probe);
                                         },
                                         {random_tensor(rng, {n})}};
                   }});
  cases.push_back({"softmax_cross_entropy", [](Rng& rng) {
                     const std::size_t n = between(rng, 2, 12);
                     const std::size_t gold = static_cast<std::size_t>(rng.below(n));
                     return GradInstance{[gold](Tape& t, std::span<const Var> p) {
                                           return softmax_cross_entropy(t, p[0], gold);
                                         },
                                         {random_tensor(rng, {n}, 2.0)}};
                   }});
  cases.push_back({"lstm_cell_step", [](Rng& rng) {
                     const std::size_t D = between(rng, 1, 4);
                     const std::size_t H = between(rng, 1, 3);
                     Tensor ph = random_tensor(rng, {H});
                     Tensor pc = random_tensor(rng, {H});
                     return GradInstance{[ph, pc](Tape& t, std::span<const Var> p) {
                                           const LstmState s = lstm_cell_step(t, p[0], p[1], p[2], {p[3], p[4], p[5]});
                                           return add(t, project(t, s.h, ph), project(t, s.c, pc));
                                         },
                                         {random_tensor(rng, {D}), random_tensor(rng, {H}),
                                          random_tensor(rng, {H}), random_tensor(rng, {4 * H, D}, 0.5),
                                          random_tensor(rng, {4 * H, H}, 0.5), random_tensor(rng, {4 * H}, 0.5)}};
                   }});
  cases.push_back({"bilstm_sequence", [](Rng& rng) {
                     const std::size_t L = between(rng, 1, 4);
                     const std::size_t D = between(rng, 1, 3);
                     const std::size_t H = between(rng, 1, 3);
                     Tensor probe = random_tensor(rng, {L, 2 * H});
                     return GradInstance{[probe](Tape& t, std::span<const Var> p) {
                                           return project(t, bilstm_sequence(t, p[0], {p[1], p[2], p[3]}, {p[4], p[5], p[6]}),
                                                          probe);
                                         },
                                         {random_tensor(rng, {L, D}), random_tensor(rng, {4 * H, D}, 0.5),
                                          random_tensor(rng, {4 * H, H}, 0.5), random_tensor(rng, {4 * H}, 0.5),
                                          random_tensor(rng, {4 * H, D}, 0.5), random_tensor(rng, {4 * H, H}, 0.5),
                                          random_tensor(rng, {4 * H}, 0.5)}};
                   }});
  cases.push_back({"attention_pool", [](Rng& rng) {
                     const std::size_t L = between(rng, 1, 5);
                     const std::size_t S = between(rng, 1, 4);
                     Tensor pc = random_tensor(rng, {S});
                     Tensor pw = random_tensor(rng, {L});
                     return GradInstance{[pc, pw](Tape& t, std::span<const Var> p) {
                                           const Attention a = attention_pool(t, p[0], p[1]);
                                           return add(t, project(t, a.context, pc), project(t, a.weights, pw));
                                         },
                                         {random_tensor(rng, {L, S}), random_tensor(rng, {S})}};
                   }});
  return cases;
}

// Small-vocabulary inputs for full-model checks.
inline std::string random_sentence(Rng& rng, std::size_t words) {
  static const char* kWords[] = {"did", "you", "see", "the", "doctor", "after", "accident", "yes",
                                 "no", "work", "pain", "back", "car", "home", "i", "was"};
  std::string s;
  for (std::size_t i = 0; i < words; ++i) {
    if (i) s += ' ';
    s += kWords[rng.below(std::size(kWords))];
  }
  return s;
}

// Full training loss (cross-entropy plus L2) of a freshly built model with
// small shapes; dropout active with a fixed mask seed.
inline std::vector<GradCase> model_grad_cases() {
  std::vector<GradCase> cases;
  cases.push_back({"model.cnn", [](Rng& rng) {
                     const std::size_t D = between(rng, 2, 4);
                     HyperParams h = HyperParams::defaults(Family::Cnn);
                     h.hidden_size = between(rng, 2, 4);
                     h.num_filters = between(rng, 2, 4);
                     h.ngram_windows = rng.below(2) ? std::vector<std::size_t>{1, 2} : std::vector<std::size_t>{1, 3};
                     h.activation = static_cast<ad::Activation>(1 + rng.below(3));
                     h.dropout_rate = 0.3;
                     h.l2_coeff = 1e-2;
                     h.max_seq_len = 8;
                     h.seed = rng.next_u64();
                     auto words = std::make_shared<WordEmbeddings>(D);
                     ComposedExample ex{"x#0#q", random_sentence(rng, between(rng, 1, 6)),
                                        static_cast<std::size_t>(rng.below(kAspectCount))};
                     for (const std::string& tok : tokenize(ex.text)) {
                       if (!words->contains(tok)) {
                         Tensor v = random_tensor(rng, {D});
                         words->set(tok, v.data());
                       }
                     }
                     Model m = build_cnn(h, D);
                     const Encoded enc = encode(m, ex, Resources{words.get(), nullptr});
                     const std::uint64_t mask_seed = rng.next_u64();
                     auto model = std::make_shared<Model>(m);
                     const std::size_t gold = ex.label;
                     return GradInstance{[model, enc, mask_seed, gold, words](ad::Tape& t, std::span<const ad::Var> p) {
                                           Rng drop(mask_seed);
                                           ad::Var logits = forward_logits(t, *model, p, enc, drop, true);
                                           return ad::add(t, ad::softmax_cross_entropy(t, logits, gold),
                                                          l2_penalty(t, *model, p));
                                         },
                                         m.params};
                   }});
  cases.push_back({"model.bilstm_attn", [](Rng& rng) {
                     HyperParams h = HyperParams::defaults(Family::BilstmAttn);
                     h.hidden_size = between(rng, 1, 3);
                     h.embedding_size = between(rng, 2, 3);
                     h.dropout_rate = 0.3;
                     h.l2_coeff = 1e-2;
                     h.max_seq_len = 6;
                     h.seed = rng.next_u64();
                     ComposedExample ex{"x#0#q", random_sentence(rng, between(rng, 1, 5)),
                                        static_cast<std::size_t>(rng.below(kAspectCount))};
                     std::vector<std::string> vocab{std::string(kUnkToken)};
                     for (const std::string& tok : tokenize(ex.text)) {
                       if (std::find(vocab.begin(), vocab.end(), tok) == vocab.end() && rng.below(4) != 0) {
                         vocab.push_back(tok);
                       }
                     }
                     Model m = build_bilstm_attn(h, vocab);
                     const Encoded enc = encode(m, ex, Resources{});
                     const std::uint64_t mask_seed = rng.next_u64();
                     auto model = std::make_shared<Model>(m);
                     const std::size_t gold = ex.label;
                     return GradInstance{[model, enc, mask_seed, gold](ad::Tape& t, std::span<const ad::Var> p) {
                                           Rng drop(mask_seed);
                                           ad::Var logits = forward_logits(t, *model, p, enc, drop, true);
                                           return ad::add(t, ad::softmax_cross_entropy(t, logits, gold),
                                                          l2_penalty(t, *model, p));
                                         },
                                         m.params};
                   }});
  cases.push_back({"model.emb_head", [](Rng& rng) {
                     const std::size_t D = between(rng, 2, 6);
                     HyperParams h = HyperParams::defaults(Family::EmbHead);
                     h.hidden_size = between(rng, 2, 5);
                     h.activation = static_cast<ad::Activation>(1 + rng.below(3));
                     h.dropout_rate = 0.2;
                     h.l2_coeff = 1e-2;
                     h.seed = rng.next_u64();
                     auto sv = std::make_shared<SentenceVectors>();
                     std::vector<double> v(D);
                     for (double& x : v) x = rng.normal();
                     sv->add("x#0#dsm", v);
                     ComposedExample ex{"x#0#dsm", "unused", static_cast<std::size_t>(rng.below(kAspectCount))};
                     Model m = build_emb_head(h, D);
                     const Encoded enc = encode(m, ex, Resources{nullptr, sv.get()});
                     const std::uint64_t mask_seed = rng.next_u64();
                     auto model = std::make_shared<Model>(m);
                     const std::size_t gold = ex.label;
                     return GradInstance{[model, enc, mask_seed, gold](ad::Tape& t, std::span<const ad::Var> p) {
                                           Rng drop(mask_seed);
                                           ad::Var logits = forward_logits(t, *model, p, enc, drop, true);
                                           return ad::add(t, ad::softmax_cross_entropy(t, logits, gold),
                                                          l2_penalty(t, *model, p));
                                         },
                                         m.params};
                   }});
  return cases;
}

// Worst relative error over `trials` seeded instances of a case.
inline double worst_grad_error(const GradCase& c, std::size_t trials, std::uint64_t seed) {
  double worst = 0.0;
  for (std::size_t i = 0; i < trials; ++i) {
    Rng rng(derive_seed(derive_seed(seed, c.name), static_cast<std::uint64_t>(i)));
    const GradInstance inst = c.make(rng);
    worst = std::max(worst, ad::grad_check(inst.fn, inst.params, 1e-5).max_rel_error);
  }
  return worst;
}

// Reference per-class scores computed straight from the label lists, one
// class at a time, without a confusion matrix.
struct BruteScores {
  std::vector<double> precision, recall, f1;
  std::vector<std::size_t> support;
  double weighted_f1 = 0.0;
  double macro_f1 = 0.0;
};

inline BruteScores brute_prf1(const std::vector<std::size_t>& golds, const std::vector<std::size_t>& preds,
                              std::size_t classes) {
  BruteScores b;
  double wsum = 0.0, msum = 0.0;
  std::size_t present = 0;
  for (std::size_t c = 0; c < classes; ++c) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < golds.size(); ++i) {
      if (preds[i] == c && golds[i] == c) ++tp;
      if (preds[i] == c && golds[i] != c) ++fp;
      if (preds[i] != c && golds[i] == c) ++fn;
    }
    const double p = tp + fp ? double(tp) / double(tp + fp) : 0.0;
    const double r = tp + fn ? double(tp) / double(tp + fn) : 0.0;
    const double f = p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
    b.precision.push_back(p);
    b.recall.push_back(r);
    b.f1.push_back(f);
    b.support.push_back(tp + fn);
    wsum += f * double(tp + fn);
    if (tp + fn) {
      msum += f;
      ++present;
    }
  }
  b.weighted_f1 = golds.empty() ? 0.0 : wsum / double(golds.size());
  b.macro_f1 = present ? msum / double(present) : 0.0;
  return b;
}

}  // namespace depo::testing

#endif  // DEPO_TESTS_SUPPORT_HPP
