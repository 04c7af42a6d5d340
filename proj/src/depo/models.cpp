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

#include "depo/models.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

#include "depo/common.hpp"
#include "depo/eval.hpp"
#include "depo/optim.hpp"

namespace depo {
namespace {

using ad::Activation;
using ad::Tape;
using ad::Var;
using ojson = nlohmann::ordered_json;

constexpr std::string_view kMagic = "DEPOMDL1";
constexpr std::uint32_t kFormatVersion = 1;
constexpr std::size_t kPredictChunk = 64;

bool near(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

bool in_set(double v, std::initializer_list<double> set) {
  return std::any_of(set.begin(), set.end(), [v](double s) { return near(v, s); });
}

template <typename T>
bool in_set(T v, std::initializer_list<T> set) {
  return std::find(set.begin(), set.end(), v) != set.end();
}

void grid_fail(std::string_view family, std::string_view field, const std::string& value,
               std::string_view allowed) {
  throw InvalidArgument(std::string(family) + ": " + std::string(field) + " = " + value +
                        " is outside the tuning grid " + std::string(allowed));
}

void add_param(Model& m, std::string name, Tensor value) {
  m.param_names.push_back(std::move(name));
  m.params.push_back(std::move(value));
}

Tensor flat(Tensor t) {
  const std::size_t n = t.size();
  return Tensor({n}, std::vector<double>(t.data().begin(), t.data().end()));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::string_view take(std::size_t n) {
    if (bytes_.size() - pos_ < n) throw DataError("truncated model file");
    std::string_view s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint64_t u(int width) {
    std::string_view s = take(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int i = width - 1; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(s[i]);
    return v;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

std::vector<Var> param_vars(Tape& t, const Model& m, bool trainable) {
  std::vector<Var> vars;
  vars.reserve(m.params.size());
  for (const Tensor& p : m.params) vars.push_back(trainable ? t.parameter(p) : t.constant(p));
  return vars;
}

std::size_t index_of_param(const Model& m, std::string_view name) {
  for (std::size_t i = 0; i < m.param_names.size(); ++i) {
    if (m.param_names[i] == name) return i;
  }
  throw InvalidArgument("model has no parameter '" + std::string(name) + "'");
}

using VocabIndex = std::unordered_map<std::string, std::size_t>;

VocabIndex make_vocab_index(const Model& m) {
  VocabIndex index;
  for (std::size_t i = 0; i < m.vocab.size(); ++i) index.emplace(m.vocab[i], i);
  return index;
}

Encoded encode_with(const Model& model, const ComposedExample& example, const Resources& res,
                    const VocabIndex* vocab_index);

std::vector<Prediction> predict_encoded(const Model& model, const std::vector<Encoded>& inputs) {
  std::vector<Prediction> out;
  out.reserve(inputs.size());
  Rng unused(0);
  for (std::size_t start = 0; start < inputs.size(); start += kPredictChunk) {
    Tape t;
    const std::vector<Var> vars = param_vars(t, model, false);
    const std::size_t end = std::min(inputs.size(), start + kPredictChunk);
    for (std::size_t i = start; i < end; ++i) {
      Var logits = forward_logits(t, model, vars, inputs[i], unused, false);
      Prediction p;
      const Tensor probs = ad::softmax_values(t.value(logits));
      p.probabilities.assign(probs.data().begin(), probs.data().end());
      const Tensor& z = t.value(logits);
      for (std::size_t c = 1; c < z.size(); ++c) {
        if (z[c] > z[p.predicted]) p.predicted = c;
      }
      out.push_back(std::move(p));
    }
  }
  return out;
}

std::vector<Encoded> encode_all(const Model& m, const std::vector<ComposedExample>& xs,
                                const Resources& res) {
  std::vector<Encoded> out;
  out.reserve(xs.size());
  const VocabIndex index = make_vocab_index(m);
  for (const ComposedExample& x : xs) out.push_back(encode_with(m, x, res, &index));
  return out;
}

}  // namespace

std::string_view family_name(Family f) {
  switch (f) {
    case Family::Cnn: return "cnn";
    case Family::BilstmAttn: return "bilstm_attn";
    case Family::EmbHead: return "emb_head";
  }
  return "cnn";
}

Family parse_family(std::string_view text) {
  std::string k;
  for (char c : text) {
    if (c == '-' || c == '_' || c == ' ') continue;
    k.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (k == "cnn") return Family::Cnn;
  if (k == "bilstmattn" || k == "bilstm") return Family::BilstmAttn;
  if (k == "embhead" || k == "bert" || k == "emb") return Family::EmbHead;
  throw InvalidArgument("unknown model family '" + std::string(text) +
                        "' (expected cnn, bilstm_attn, emb_head)");
}

HyperParams HyperParams::defaults(Family family) {
  HyperParams h;
  h.family = family;
  switch (family) {
    case Family::Cnn:
      break;
    case Family::BilstmAttn:
      h.hidden_size = 256;
      h.embedding_size = 128;
      h.dropout_rate = 0.5;
      h.activation = Activation::Identity;
      h.ngram_windows = {};
      h.learning_rate = 0.01;
      h.max_seq_len = 32;
      h.l2_coeff = 1e-4;
      break;
    case Family::EmbHead:
      h.hidden_size = 256;
      h.dropout_rate = 0.1;
      h.activation = Activation::Tanh;
      h.ngram_windows = {};
      h.learning_rate = 2e-5;
      h.max_seq_len = 32;
      h.batch_size = 80;
      break;
  }
  return h;
}

void HyperParams::validate() const {
  const std::string f(family_name(family));
  auto fail = [&](const std::string& msg) { throw InvalidArgument(f + ": " + msg); };
  if (hidden_size == 0) fail("hidden_size must be > 0");
  if (!(dropout_rate >= 0.0) || dropout_rate >= 1.0) fail("dropout_rate must be in [0, 1)");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) fail("learning_rate must be > 0");
  if (max_seq_len == 0) fail("max_seq_len must be > 0");
  if (batch_size == 0) fail("batch_size must be > 0");
  if (max_epochs == 0 || max_epochs > 30) fail("max_epochs must be in [1, 30]");
  if (!(l2_coeff >= 0.0) || !std::isfinite(l2_coeff)) fail("l2_coeff must be >= 0");
  if (patience == 0) fail("patience must be >= 1");
  if (family == Family::Cnn) {
    if (ngram_windows.empty()) fail("ngram_windows must not be empty");
    if (num_filters == 0) fail("num_filters must be > 0");
    for (std::size_t n : ngram_windows) {
      if (n == 0) fail("ngram window must be >= 1");
      if (n > max_seq_len) {
        fail("ngram window " + std::to_string(n) + " exceeds max_seq_len " +
             std::to_string(max_seq_len));
      }
    }
    std::set<std::size_t> uniq(ngram_windows.begin(), ngram_windows.end());
    if (uniq.size() != ngram_windows.size()) fail("ngram_windows contains duplicates");
  }
  if (family == Family::BilstmAttn && embedding_size == 0) fail("embedding_size must be > 0");
}

void HyperParams::validate_tuning_grid() const {
  validate();
  const std::string f(family_name(family));
  if (!in_set(dropout_rate, {0.1, 0.2, 0.3, 0.4, 0.5})) {
    grid_fail(f, "dropout_rate", format_double(dropout_rate), "{0.1, 0.2, 0.3, 0.4, 0.5}");
  }
  if (max_epochs != 30) grid_fail(f, "max_epochs", std::to_string(max_epochs), "{30}");
  switch (family) {
    case Family::Cnn:
      if (!in_set<std::size_t>(hidden_size, {100, 200, 300, 400, 500})) {
        grid_fail(f, "hidden_size", std::to_string(hidden_size), "{100, 200, 300, 400, 500}");
      }
      if (activation == Activation::Identity) {
        grid_fail(f, "activation", "identity", "{sigmoid, tanh, relu}");
      }
      for (std::size_t n : ngram_windows) {
        if (n > 3) grid_fail(f, "ngram_windows", std::to_string(n), "{1, 2, 3}");
      }
      if (max_seq_len != 128) grid_fail(f, "max_seq_len", std::to_string(max_seq_len), "{128}");
      if (batch_size != 100) grid_fail(f, "batch_size", std::to_string(batch_size), "{100}");
      break;
    case Family::BilstmAttn:
      if (!in_set<std::size_t>(hidden_size, {64, 128, 256})) {
        grid_fail(f, "hidden_size", std::to_string(hidden_size), "{64, 128, 256}");
      }
      if (!in_set<std::size_t>(embedding_size, {32, 64, 128, 256})) {
        grid_fail(f, "embedding_size", std::to_string(embedding_size), "{32, 64, 128, 256}");
      }
      if (!in_set(learning_rate, {1e-4, 1e-3, 1e-2, 1e-1})) {
        grid_fail(f, "learning_rate", format_double(learning_rate), "{1e-4, 1e-3, 1e-2, 1e-1}");
      }
      if (!in_set<std::size_t>(max_seq_len, {32, 128})) {
        grid_fail(f, "max_seq_len", std::to_string(max_seq_len), "{32, 128}");
      }
      if (batch_size != 100) grid_fail(f, "batch_size", std::to_string(batch_size), "{100}");
      break;
    case Family::EmbHead:
      if (!in_set(learning_rate, {5e-5, 2e-5, 1e-4, 5e-4, 2e-4, 1e-3, 5e-3, 1e-2, 5e-2, 1e-1})) {
        grid_fail(f, "learning_rate", format_double(learning_rate),
                  "{5e-5, 2e-5, 1e-4, 5e-4, 2e-4, 1e-3, 5e-3, 1e-2, 5e-2, 1e-1}");
      }
      if (!in_set<std::size_t>(max_seq_len, {32, 128})) {
        grid_fail(f, "max_seq_len", std::to_string(max_seq_len), "{32, 128}");
      }
      if (batch_size != 80) grid_fail(f, "batch_size", std::to_string(batch_size), "{80}");
      break;
  }
}

ojson HyperParams::to_json() const {
  ojson j;
  j["family"] = family_name(family);
  j["hidden_size"] = hidden_size;
  j["embedding_size"] = embedding_size;
  j["dropout_rate"] = dropout_rate;
  j["activation"] = ad::activation_name(activation);
  j["ngram_windows"] = ngram_windows;
  j["num_filters"] = num_filters;
  j["learning_rate"] = learning_rate;
  j["max_seq_len"] = max_seq_len;
  j["batch_size"] = batch_size;
  j["max_epochs"] = max_epochs;
  j["l2_coeff"] = l2_coeff;
  j["patience"] = patience;
  j["seed"] = seed;
  return j;
}

HyperParams HyperParams::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidArgument("hyperparameters must be a JSON object");
  Family family = Family::Cnn;
  if (j.contains("family")) family = parse_family(j["family"].get<std::string>());
  HyperParams h = defaults(family);
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "family") continue;
      if (key == "hidden_size") h.hidden_size = v.get<std::size_t>();
      else if (key == "embedding_size") h.embedding_size = v.get<std::size_t>();
      else if (key == "dropout_rate") h.dropout_rate = v.get<double>();
      else if (key == "activation") h.activation = ad::parse_activation(v.get<std::string>());
      else if (key == "ngram_windows") {
        h.ngram_windows = v.is_array() ? v.get<std::vector<std::size_t>>()
                                       : std::vector<std::size_t>{v.get<std::size_t>()};
      } else if (key == "num_filters") h.num_filters = v.get<std::size_t>();
      else if (key == "learning_rate") h.learning_rate = v.get<double>();
      else if (key == "max_seq_len") h.max_seq_len = v.get<std::size_t>();
      else if (key == "batch_size") h.batch_size = v.get<std::size_t>();
      else if (key == "max_epochs") h.max_epochs = v.get<std::size_t>();
      else if (key == "l2_coeff") h.l2_coeff = v.get<double>();
      else if (key == "patience") h.patience = v.get<std::size_t>();
      else if (key == "seed") h.seed = v.get<std::uint64_t>();
      else throw InvalidArgument("unknown hyperparameter '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("hyperparameters: ") + e.what());
  }
  return h;
}

std::size_t Model::parameter_count() const {
  std::size_t n = 0;
  for (const Tensor& t : params) n += t.size();
  return n;
}

const Tensor& Model::param(std::string_view name) const { return params[index_of_param(*this, name)]; }

Model build_cnn(const HyperParams& hyper, std::size_t word_dim, std::size_t num_classes) {
  if (hyper.family != Family::Cnn) throw InvalidArgument("build_cnn: hyper.family is not cnn");
  hyper.validate();
  if (word_dim == 0) throw InvalidArgument("build_cnn: word vector dimension must be > 0");
  Model m;
  m.hyper = hyper;
  m.input_dim = word_dim;
  m.num_classes = num_classes;
  Rng rng(derive_seed(hyper.seed, "init"));
  const std::size_t K = hyper.num_filters;
  for (std::size_t n : hyper.ngram_windows) {
    add_param(m, "conv" + std::to_string(n) + ".w", ad::glorot_uniform(K, n * word_dim, rng));
    add_param(m, "conv" + std::to_string(n) + ".b", Tensor({K}, 0.0));
  }
  const std::size_t feat = K * hyper.ngram_windows.size();
  add_param(m, "hidden.w", ad::glorot_uniform(hyper.hidden_size, feat, rng));
  add_param(m, "hidden.b", Tensor({hyper.hidden_size}, 0.0));
  add_param(m, "out.w", ad::glorot_uniform(num_classes, hyper.hidden_size, rng));
  add_param(m, "out.b", Tensor({num_classes}, 0.0));
  return m;
}

Model build_bilstm_attn(const HyperParams& hyper, std::vector<std::string> vocab,
                        std::size_t num_classes) {
  if (hyper.family != Family::BilstmAttn) {
    throw InvalidArgument("build_bilstm_attn: hyper.family is not bilstm_attn");
  }
  hyper.validate();
  if (vocab.empty()) throw InvalidArgument("build_bilstm_attn: empty vocabulary");
  if (vocab.front() != kUnkToken) vocab.insert(vocab.begin(), std::string(kUnkToken));
  Model m;
  m.hyper = hyper;
  m.num_classes = num_classes;
  m.input_dim = hyper.embedding_size;
  Rng rng(derive_seed(hyper.seed, "init"));
  const std::size_t E = hyper.embedding_size;
  const std::size_t H = hyper.hidden_size;
  add_param(m, "embed", ad::glorot_uniform(vocab.size(), E, rng));
  for (const char* dir : {"fwd", "bwd"}) {
    add_param(m, std::string(dir) + ".wx", ad::glorot_uniform(4 * H, E, rng));
    add_param(m, std::string(dir) + ".wh", ad::glorot_uniform(4 * H, H, rng));
    add_param(m, std::string(dir) + ".b", Tensor({4 * H}, 0.0));
  }
  add_param(m, "attn.scorer", flat(ad::glorot_uniform(1, 2 * H, rng)));
  add_param(m, "out.w", ad::glorot_uniform(num_classes, 2 * H, rng));
  add_param(m, "out.b", Tensor({num_classes}, 0.0));
  m.vocab = std::move(vocab);
  return m;
}

Model build_emb_head(const HyperParams& hyper, std::size_t sentence_dim, std::size_t num_classes) {
  if (hyper.family != Family::EmbHead) throw InvalidArgument("build_emb_head: hyper.family is not emb_head");
  hyper.validate();
  if (sentence_dim == 0) throw InvalidArgument("build_emb_head: sentence dimension must be > 0");
  Model m;
  m.hyper = hyper;
  m.input_dim = sentence_dim;
  m.num_classes = num_classes;
  Rng rng(derive_seed(hyper.seed, "init"));
  add_param(m, "hidden.w", ad::glorot_uniform(hyper.hidden_size, sentence_dim, rng));
  add_param(m, "hidden.b", Tensor({hyper.hidden_size}, 0.0));
  add_param(m, "out.w", ad::glorot_uniform(num_classes, hyper.hidden_size, rng));
  add_param(m, "out.b", Tensor({num_classes}, 0.0));
  return m;
}

std::vector<std::string> build_vocab(const std::vector<ComposedExample>& examples) {
  std::map<std::string, std::size_t> freq;
  for (const ComposedExample& e : examples) {
    for (std::string& tok : tokenize(e.text)) ++freq[std::move(tok)];
  }
  std::vector<std::pair<std::string, std::size_t>> items(freq.begin(), freq.end());
  std::stable_sort(items.begin(), items.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> vocab{std::string(kUnkToken)};
  for (auto& [tok, n] : items) {
    if (tok != kUnkToken) vocab.push_back(tok);
  }
  return vocab;
}

void zero_parameters(Model& model) {
  for (Tensor& t : model.params) t.fill(0.0);
}

Encoded encode(const Model& model, const ComposedExample& example, const Resources& res) {
  return encode_with(model, example, res, nullptr);
}

namespace {

Encoded encode_with(const Model& model, const ComposedExample& example, const Resources& res,
                    const VocabIndex* vocab_index) {
  Encoded enc;
  const HyperParams& h = model.hyper;
  switch (h.family) {
    case Family::Cnn: {
      if (!res.words || res.words->dim() == 0) {
        throw DataError("cnn needs word vectors; none supplied");
      }
      if (res.words->dim() != model.input_dim) {
        throw DataError("word vectors have dimension " + std::to_string(res.words->dim()) +
                        ", model expects " + std::to_string(model.input_dim));
      }
      std::vector<std::string> toks = tokenize(example.text);
      if (toks.size() > h.max_seq_len) toks.resize(h.max_seq_len);
      enc.length = toks.size();
      std::size_t widest = 1;
      for (std::size_t n : h.ngram_windows) widest = std::max(widest, n);
      const std::size_t rows = std::max(enc.length, widest);
      enc.features = embed_tokens(toks, *res.words, rows).matrix;
      break;
    }
    case Family::BilstmAttn: {
      std::unordered_map<std::string, std::size_t> local;
      const VocabIndex* index = vocab_index;
      if (!index) {
        local = make_vocab_index(model);
        index = &local;
      }
      std::vector<std::string> toks = tokenize(example.text);
      if (toks.size() > h.max_seq_len) toks.resize(h.max_seq_len);
      for (const std::string& t : toks) {
        auto it = index->find(t);
        enc.ids.push_back(it == index->end() ? 0 : it->second);
      }
      if (enc.ids.empty()) enc.ids.push_back(0);
      enc.length = enc.ids.size();
      break;
    }
    case Family::EmbHead: {
      if (!res.sentences || res.sentences->empty()) {
        throw DataError("emb_head: no vectors (sentence vectors are empty or missing)");
      }
      const std::vector<double>* v = res.sentences->find(example.key);
      if (!v) throw DataError("no sentence vector for example '" + example.key + "'");
      if (v->size() != model.input_dim) {
        throw DataError("sentence vector '" + example.key + "' has dimension " +
                        std::to_string(v->size()) + ", model expects " +
                        std::to_string(model.input_dim));
      }
      enc.features = Tensor::vector(*v);
      enc.length = 1;
      break;
    }
  }
  return enc;
}

}  // namespace

Var forward_logits(Tape& t, const Model& model, std::span<const Var> params, const Encoded& input,
                   Rng& rng, bool training) {
  const HyperParams& h = model.hyper;
  auto P = [&](std::string_view name) { return params[index_of_param(model, name)]; };
  switch (h.family) {
    case Family::Cnn: {
      Var seq = t.constant(input.features);
      std::vector<Var> pooled;
      for (std::size_t n : h.ngram_windows) {
        const std::string base = "conv" + std::to_string(n);
        Var conv = ad::conv1d_ngram(t, seq, P(base + ".w"), P(base + ".b"), n);
        const std::size_t mask = input.length >= n ? input.length - n + 1 : 1;
        pooled.push_back(ad::maxpool_over_time(t, conv, mask));
      }
      Var feat = pooled.size() == 1 ? pooled[0] : ad::concat(t, pooled);
      Var hidden = ad::dense(t, feat, P("hidden.w"), P("hidden.b"), h.activation);
      hidden = ad::dropout(t, hidden, h.dropout_rate, rng, training);
      return ad::dense(t, hidden, P("out.w"), P("out.b"), Activation::Identity);
    }
    case Family::BilstmAttn: {
      Var emb = ad::gather_rows(t, P("embed"), input.ids);
      emb = ad::dropout(t, emb, h.dropout_rate, rng, training);
      const ad::LstmParams fwd{P("fwd.wx"), P("fwd.wh"), P("fwd.b")};
      const ad::LstmParams bwd{P("bwd.wx"), P("bwd.wh"), P("bwd.b")};
      Var states = ad::bilstm_sequence(t, emb, fwd, bwd);
      Var context = ad::attention_pool(t, states, P("attn.scorer")).context;
      context = ad::dropout(t, context, h.dropout_rate, rng, training);
      return ad::dense(t, context, P("out.w"), P("out.b"), Activation::Identity);
    }
    case Family::EmbHead: {
      Var x = t.constant(input.features);
      Var hidden = ad::dense(t, x, P("hidden.w"), P("hidden.b"), h.activation);
      hidden = ad::dropout(t, hidden, h.dropout_rate, rng, training);
      return ad::dense(t, hidden, P("out.w"), P("out.b"), Activation::Identity);
    }
  }
  throw InvalidArgument("forward_logits: unknown family");
}

bool l2_penalized(std::string_view name) {
  if (name == "embed") return false;
  return !(name.size() >= 2 && name.substr(name.size() - 2) == ".b");
}

Var l2_penalty(Tape& t, const Model& model, std::span<const Var> params) {
  std::vector<Var> terms;
  if (model.hyper.l2_coeff > 0.0) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (l2_penalized(model.param_names[i])) terms.push_back(ad::sum_squares(t, params[i]));
    }
  }
  if (terms.empty()) return t.constant(Tensor::scalar(0.0));
  Var total = terms[0];
  for (std::size_t i = 1; i < terms.size(); ++i) total = ad::add(t, total, terms[i]);
  return ad::scale(t, total, model.hyper.l2_coeff);
}

Prediction predict(const Model& model, const Encoded& input) {
  return predict_encoded(model, {input}).front();
}

Prediction predict(const Model& model, const ComposedExample& example, const Resources& res) {
  return predict(model, encode(model, example, res));
}

std::vector<std::size_t> predict_labels(const Model& model,
                                        const std::vector<ComposedExample>& examples,
                                        const Resources& res) {
  std::vector<std::size_t> out;
  out.reserve(examples.size());
  for (const Prediction& p : predict_encoded(model, encode_all(model, examples, res))) {
    out.push_back(p.predicted);
  }
  return out;
}

double TrainedModel::best_val_f1() const {
  if (best_epoch == 0 || best_epoch > history.size()) return 0.0;
  return history[best_epoch - 1].val_weighted_f1;
}

TrainedModel train(const HyperParams& hyper, const std::vector<ComposedExample>& train_set,
                   const std::vector<ComposedExample>& val_set, const Resources& res) {
  hyper.validate();
  if (train_set.empty()) throw InvalidArgument("train: empty training set");
  switch (hyper.family) {
    case Family::Cnn:
      if (!res.words || res.words->dim() == 0) throw DataError("cnn needs word vectors; none supplied");
      return train_model(build_cnn(hyper, res.words->dim()), train_set, val_set, res);
    case Family::BilstmAttn:
      return train_model(build_bilstm_attn(hyper, build_vocab(train_set)), train_set, val_set, res);
    case Family::EmbHead:
      if (!res.sentences || res.sentences->empty()) {
        throw DataError("emb_head: no vectors (sentence vectors are empty or missing)");
      }
      return train_model(build_emb_head(hyper, res.sentences->dim()), train_set, val_set, res);
  }
  throw InvalidArgument("train: unknown family");
}

TrainedModel train_model(Model model, const std::vector<ComposedExample>& train_set,
                         const std::vector<ComposedExample>& val_set, const Resources& res) {
  const HyperParams& h = model.hyper;
  h.validate();
  if (train_set.empty()) throw InvalidArgument("train: empty training set");
  if (val_set.empty()) throw InvalidArgument("train: empty validation set");
  for (const ComposedExample& e : train_set) {
    if (e.label >= model.num_classes) {
      throw InvalidArgument("train: label " + std::to_string(e.label) + " out of range");
    }
  }

  const std::vector<Encoded> train_enc = encode_all(model, train_set, res);
  const std::vector<Encoded> val_enc = encode_all(model, val_set, res);
  std::vector<std::size_t> val_gold;
  for (const ComposedExample& e : val_set) val_gold.push_back(e.label);

  Rng shuffle_rng(derive_seed(h.seed, "train/shuffle"));
  Rng dropout_rng(derive_seed(h.seed, "train/dropout"));
  ad::Adam adam(h.learning_rate);

  TrainedModel result;
  std::vector<Tensor> best_params = model.params;
  double best_f1 = -1.0;
  std::size_t below_best = 0;
  std::vector<std::size_t> order(train_enc.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 1; epoch <= h.max_epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += h.batch_size) {
      const std::size_t end = std::min(order.size(), start + h.batch_size);
      Tape t;
      const std::vector<Var> vars = param_vars(t, model, true);
      std::vector<Var> losses;
      for (std::size_t k = start; k < end; ++k) {
        const std::size_t i = order[k];
        Var logits = forward_logits(t, model, vars, train_enc[i], dropout_rng, true);
        losses.push_back(ad::softmax_cross_entropy(t, logits, train_set[i].label));
      }
      Var total = losses[0];
      for (std::size_t k = 1; k < losses.size(); ++k) total = ad::add(t, total, losses[k]);
      Var loss = ad::scale(t, total, 1.0 / static_cast<double>(losses.size()));
      if (h.l2_coeff > 0.0) loss = ad::add(t, loss, l2_penalty(t, model, vars));
      const double value = t.value(loss)[0];
      if (!std::isfinite(value)) {
        throw DataError("diverged: non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                        std::to_string(batches + 1));
      }
      t.backward(loss);
      std::vector<Tensor*> ptrs;
      std::vector<Tensor> grads;
      for (std::size_t p = 0; p < model.params.size(); ++p) {
        ptrs.push_back(&model.params[p]);
        grads.push_back(t.grad(vars[p]));
      }
      adam.step(ptrs, grads);
      loss_sum += value;
      ++batches;
    }

    const std::vector<Prediction> preds = predict_encoded(model, val_enc);
    std::vector<std::size_t> val_pred;
    for (const Prediction& p : preds) val_pred.push_back(p.predicted);
    const double f1 = weighted_f1(val_gold, val_pred, model.num_classes);
    result.history.push_back({epoch, loss_sum / static_cast<double>(batches), f1});

    if (f1 > best_f1) {
      best_f1 = f1;
      best_params = model.params;
      result.best_epoch = epoch;
      below_best = 0;
    } else if (f1 < best_f1) {
      if (++below_best >= h.patience) break;
    } else {
      below_best = 0;
    }
  }

  model.params = std::move(best_params);
  result.model = std::move(model);
  return result;
}

std::string serialize_model(const TrainedModel& tm) {
  const Model& m = tm.model;
  ojson header;
  header["family"] = family_name(m.hyper.family);
  header["label_codec_version"] = tm.label_codec_version;
  header["variant"] = tm.variant ? ojson(variant_token(*tm.variant)) : ojson();
  header["hyper"] = m.hyper.to_json();
  header["input_dim"] = m.input_dim;
  header["num_classes"] = m.num_classes;
  header["vocab"] = m.vocab;
  ojson hist = ojson::array();
  for (const EpochRecord& e : tm.history) {
    hist.push_back({{"epoch", e.epoch}, {"train_loss", e.train_loss},
                    {"val_weighted_f1", e.val_weighted_f1}});
  }
  header["history"] = hist;
  header["best_epoch"] = tm.best_epoch;
  ojson tensors = ojson::array();
  for (std::size_t i = 0; i < m.params.size(); ++i) {
    tensors.push_back({{"name", m.param_names[i]}, {"shape", m.params[i].shape()}});
  }
  header["tensors"] = tensors;
  const std::string hs = header.dump();

  std::string out(kMagic);
  put_u32(out, kFormatVersion);
  put_u64(out, hs.size());
  out += hs;
  for (const Tensor& t : m.params) {
    for (double v : t.data()) put_u64(out, std::bit_cast<std::uint64_t>(v));
  }
  return out;
}

TrainedModel deserialize_model(std::string_view bytes, std::optional<Family> expected_family) {
  Reader r(bytes);
  if (bytes.size() < kMagic.size() || r.take(kMagic.size()) != kMagic) {
    throw DataError("not a model file (bad magic)");
  }
  const std::uint64_t version = r.u(4);
  if (version != kFormatVersion) {
    throw DataError("unsupported model format version " + std::to_string(version));
  }
  const std::uint64_t hlen = r.u(8);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(r.take(static_cast<std::size_t>(hlen)));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model header: ") + e.what());
  }
  TrainedModel tm;
  try {
    const Family family = parse_family(header.at("family").get<std::string>());
    if (expected_family && *expected_family != family) {
      throw DataError("model file holds family '" + std::string(family_name(family)) +
                      "', expected '" + std::string(family_name(*expected_family)) + "'");
    }
    tm.label_codec_version = header.at("label_codec_version").get<std::uint32_t>();
    if (tm.label_codec_version != kLabelCodecVersion) {
      throw DataError("model label codec version " + std::to_string(tm.label_codec_version) +
                      " does not match library version " + std::to_string(kLabelCodecVersion));
    }
    if (!header.at("variant").is_null()) tm.variant = parse_variant(header["variant"].get<std::string>());
    tm.model.hyper = HyperParams::from_json(header.at("hyper"));
    tm.model.input_dim = header.at("input_dim").get<std::size_t>();
    tm.model.num_classes = header.at("num_classes").get<std::size_t>();
    tm.model.vocab = header.at("vocab").get<std::vector<std::string>>();
    for (const auto& e : header.at("history")) {
      tm.history.push_back({e.at("epoch").get<std::size_t>(), e.at("train_loss").get<double>(),
                            e.at("val_weighted_f1").get<double>()});
    }
    tm.best_epoch = header.at("best_epoch").get<std::size_t>();
    for (const auto& t : header.at("tensors")) {
      tm.model.param_names.push_back(t.at("name").get<std::string>());
      const auto shape = t.at("shape").get<std::vector<std::size_t>>();
      Tensor value(shape, 0.0);
      for (std::size_t i = 0; i < value.size(); ++i) value[i] = std::bit_cast<double>(r.u(8));
      tm.model.params.push_back(std::move(value));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model header: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw DataError(std::string("model header: ") + e.what());
  }
  if (!r.done()) throw DataError("model file has trailing bytes");
  return tm;
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_model(model));
}

TrainedModel load_model(const std::filesystem::path& path, std::optional<Family> expected_family) {
  try {
    return deserialize_model(read_file(path), expected_family);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

ojson model_info_json(const TrainedModel& tm) {
  ojson j;
  j["family"] = family_name(tm.model.hyper.family);
  j["variant"] = tm.variant ? ojson(variant_token(*tm.variant)) : ojson();
  j["label_codec_version"] = tm.label_codec_version;
  j["hyper"] = tm.model.hyper.to_json();
  j["input_dim"] = tm.model.input_dim;
  j["vocab_size"] = tm.model.vocab.size();
  j["parameter_count"] = tm.model.parameter_count();
  j["best_epoch"] = tm.best_epoch;
  j["best_val_weighted_f1"] = tm.best_val_f1();
  ojson hist = ojson::array();
  for (const EpochRecord& e : tm.history) {
    hist.push_back({{"epoch", e.epoch}, {"train_loss", e.train_loss},
                    {"val_weighted_f1", e.val_weighted_f1}});
  }
  j["history"] = hist;
  return j;
}

}  // namespace depo
