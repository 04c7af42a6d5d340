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

#ifndef DEPO_MODELS_HPP
#define DEPO_MODELS_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "depo/canon.hpp"
#include "depo/datasets.hpp"
#include "depo/embeddings.hpp"
#include "depo/ops.hpp"
#include "depo/tensor.hpp"
#include "json.hpp"

namespace depo {

enum class Family { Cnn, BilstmAttn, EmbHead };

std::string_view family_name(Family f);  // "cnn", "bilstm_attn", "emb_head"
Family parse_family(std::string_view text);

struct HyperParams {
  Family family = Family::Cnn;
  std::size_t hidden_size = 300;
  std::size_t embedding_size = 128;  // BILSTM_ATTN only
  double dropout_rate = 0.5;
  ad::Activation activation = ad::Activation::Logistic;
  std::vector<std::size_t> ngram_windows{1};  // CNN only
  std::size_t num_filters = 100;              // CNN only
  double learning_rate = 1e-3;
  std::size_t max_seq_len = 128;
  std::size_t batch_size = 100;
  std::size_t max_epochs = 30;
  double l2_coeff = 0.0;
  std::size_t patience = 3;
  std::uint64_t seed = 42;

  static HyperParams defaults(Family family);

  // Structural checks: positive sizes, dropout in [0, 1), windows within
  // max_seq_len, max_epochs in [1, 30]. Throws InvalidArgument.
  void validate() const;

  // Checks that every value lies on the tuning grid of its
  // family. Throws InvalidArgument naming the offending field.
  void validate_tuning_grid() const;

  nlohmann::ordered_json to_json() const;
  // Fields absent from `j` keep the family defaults.
  static HyperParams from_json(const nlohmann::json& j);
};

// Named parameter tensors plus whatever the family needs to read its input.
struct Model {
  HyperParams hyper;
  std::vector<std::string> param_names;
  std::vector<Tensor> params;
  std::vector<std::string> vocab;  // BILSTM_ATTN; index 0 is "<unk>"
  std::size_t input_dim = 0;       // word dim (CNN) or sentence dim (EMB_HEAD)
  std::size_t num_classes = kAspectCount;

  std::size_t parameter_count() const;
  const Tensor& param(std::string_view name) const;
};

inline constexpr std::string_view kUnkToken = "<unk>";

Model build_cnn(const HyperParams& hyper, std::size_t word_dim,
                std::size_t num_classes = kAspectCount);
Model build_bilstm_attn(const HyperParams& hyper, std::vector<std::string> vocab,
                        std::size_t num_classes = kAspectCount);
Model build_emb_head(const HyperParams& hyper, std::size_t sentence_dim,
                     std::size_t num_classes = kAspectCount);

// Vocabulary for the recurrent model: "<unk>" first, then training tokens by
// descending frequency, ties broken alphabetically.
std::vector<std::string> build_vocab(const std::vector<ComposedExample>& examples);

void zero_parameters(Model& model);

// External tables a model reads at train and predict time.
struct Resources {
  const WordEmbeddings* words = nullptr;
  const SentenceVectors* sentences = nullptr;
};

// Per-example input in the form the family consumes.
struct Encoded {
  Tensor features;                // CNN: [rows x D]; EMB_HEAD: [dim]
  std::vector<std::size_t> ids;   // BILSTM_ATTN token ids
  std::size_t length = 0;         // true token count after truncation
};

// Throws DataError when a resource the family needs is missing, naming it.
Encoded encode(const Model& model, const ComposedExample& example, const Resources& res);

// Logits for one example. `params` are tape variables aligned with
// model.params.
ad::Var forward_logits(ad::Tape& tape, const Model& model, std::span<const ad::Var> params,
                       const Encoded& input, Rng& rng, bool training);

// lambda * sum of squares over weight matrices (biases and the embedding
// table excluded). Returns a constant zero when l2_coeff is 0.
ad::Var l2_penalty(ad::Tape& tape, const Model& model, std::span<const ad::Var> params);

bool l2_penalized(std::string_view param_name);

struct Prediction {
  std::vector<double> probabilities;
  std::size_t predicted = 0;  // argmax, lowest index on ties
};

Prediction predict(const Model& model, const Encoded& input);
Prediction predict(const Model& model, const ComposedExample& example, const Resources& res);

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_weighted_f1 = 0.0;
};

struct TrainedModel {
  Model model;
  std::optional<InputVariant> variant;
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;  // 1-based; 0 before training
  std::uint32_t label_codec_version = kLabelCodecVersion;

  double best_val_f1() const;
};

// Builds the family's model from the training data and trains it: seeded
// shuffle per epoch, Adam on mini-batches, weighted F1 on `val` after every
// epoch, early stop after `patience` consecutive epochs below the best.
// Returns the parameters of the best epoch. Throws InvalidArgument on an
// empty training or validation set and DataError("diverged ...") on a
// non-finite loss.
TrainedModel train(const HyperParams& hyper, const std::vector<ComposedExample>& train_set,
                   const std::vector<ComposedExample>& val_set, const Resources& res);

// Same loop for an already-built model.
TrainedModel train_model(Model model, const std::vector<ComposedExample>& train_set,
                         const std::vector<ComposedExample>& val_set, const Resources& res);

std::vector<std::size_t> predict_labels(const Model& model,
                                        const std::vector<ComposedExample>& examples,
                                        const Resources& res);

// Snapshot layout: "DEPOMDL1", u32 format version, u64 header length, JSON
// header (family, hyper, codec version, vocab, history, tensor shapes), then
// every tensor as little-endian 64-bit floats in header order.
std::string serialize_model(const TrainedModel& model);
TrainedModel deserialize_model(std::string_view bytes,
                               std::optional<Family> expected_family = std::nullopt);
void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path,
                        std::optional<Family> expected_family = std::nullopt);

nlohmann::ordered_json model_info_json(const TrainedModel& model);

}  // namespace depo

#endif  // DEPO_MODELS_HPP
