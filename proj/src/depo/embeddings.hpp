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

#ifndef DEPO_EMBEDDINGS_HPP
#define DEPO_EMBEDDINGS_HPP

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "depo/tensor.hpp"

namespace depo {

// Whitespace tokenizer that splits every ASCII punctuation character into
// its own token. Bytes >= 0x80 are treated as word characters.
struct Tokenizer {
  bool lowercase = true;

  std::vector<std::string> operator()(std::string_view text) const;
};

std::vector<std::string> tokenize(std::string_view text);

enum class UnkPolicy { ZeroVector, LearnedUnk };

class WordEmbeddings {
 public:
  WordEmbeddings() = default;
  explicit WordEmbeddings(std::size_t dim, UnkPolicy policy = UnkPolicy::ZeroVector);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return index_.size(); }
  UnkPolicy unk_policy() const { return policy_; }

  // Returns true if the token replaced an existing entry.
  bool set(const std::string& token, std::span<const double> vector);
  const double* find(std::string_view token) const;
  bool contains(std::string_view token) const { return find(token) != nullptr; }

  // Vector used for out-of-vocabulary tokens under UnkPolicy::LearnedUnk.
  std::span<const double> unk_vector() const { return unk_; }
  void set_unk_vector(std::span<const double> v);

  // Tokens in insertion order.
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::size_t dim_ = 0;
  UnkPolicy policy_ = UnkPolicy::ZeroVector;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::string> tokens_;
  std::vector<double> table_;
  std::vector<double> unk_;
};

struct EmbeddedSequence {
  Tensor matrix;           // [max_len x dim]
  std::size_t length = 0;  // min(token count, max_len)
};

EmbeddedSequence embed_tokens(const std::vector<std::string>& tokens, const WordEmbeddings& we,
                              std::size_t max_len);

struct WordVectorLoad {
  WordEmbeddings embeddings;
  std::size_t duplicates = 0;
};

// Textual word-vector format: optional "count dim" header, then
// "token v1 ... vdim" per line. Duplicate tokens keep the last vector.
WordVectorLoad parse_word_vectors(std::string_view text);
WordVectorLoad load_word_vectors(const std::filesystem::path& path);
std::string format_word_vectors(const WordEmbeddings& we, bool header = true);

class SentenceVectors {
 public:
  // 0 until the first vector is added.
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return map_.size(); }
  bool empty() const { return map_.empty(); }

  // Throws DataError on duplicate id or dimension mismatch.
  void add(const std::string& id, std::vector<double> vector);
  const std::vector<double>* find(const std::string& id) const;
  const std::vector<std::string>& ids() const { return order_; }

 private:
  std::size_t dim_ = 0;
  std::unordered_map<std::string, std::vector<double>> map_;
  std::vector<std::string> order_;
};

// JSONL, one {"id": str, "vector": [floats]} per line.
SentenceVectors parse_sentence_vectors(std::string_view text);
SentenceVectors load_sentence_vectors(const std::filesystem::path& path);
std::string format_sentence_vectors(const SentenceVectors& sv);

// Key under which a sentence vector for (example, variant) is stored:
// "depositionId#index#variant".
std::string sentence_vector_key(std::string_view example_id, std::string_view variant_token);

}  // namespace depo

#endif  // DEPO_EMBEDDINGS_HPP
