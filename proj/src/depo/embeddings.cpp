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

#include "depo/embeddings.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "depo/common.hpp"
#include "json.hpp"

namespace depo {
namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool is_punct(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u < 0x80 && std::ispunct(u) != 0;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

bool parse_number(std::string_view s, double& out) {
  const char* end = s.data() + s.size();
  auto res = std::from_chars(s.data(), end, out);
  return res.ec == std::errc() && res.ptr == end;
}

bool parse_count(std::string_view s, std::size_t& out) {
  const char* end = s.data() + s.size();
  auto res = std::from_chars(s.data(), end, out);
  return res.ec == std::errc() && res.ptr == end;
}

}  // namespace

std::vector<std::string> Tokenizer::operator()(std::string_view text) const {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (char c : text) {
    if (is_space(c)) {
      flush();
    } else if (is_punct(c)) {
      flush();
      tokens.emplace_back(1, c);
    } else {
      current.push_back(lowercase ? static_cast<char>(std::tolower(static_cast<unsigned char>(c)))
                                  : c);
    }
  }
  flush();
  return tokens;
}

std::vector<std::string> tokenize(std::string_view text) { return Tokenizer{}(text); }

WordEmbeddings::WordEmbeddings(std::size_t dim, UnkPolicy policy)
    : dim_(dim), policy_(policy), unk_(dim, 0.0) {
  if (dim == 0) throw InvalidArgument("word embeddings need dim > 0");
}

bool WordEmbeddings::set(const std::string& token, std::span<const double> vector) {
  if (vector.size() != dim_) {
    throw DataError("vector for '" + token + "' has " + std::to_string(vector.size()) +
                    " components, expected " + std::to_string(dim_));
  }
  auto it = index_.find(token);
  if (it != index_.end()) {
    std::copy(vector.begin(), vector.end(), table_.begin() + static_cast<std::ptrdiff_t>(it->second * dim_));
    return true;
  }
  index_.emplace(token, tokens_.size());
  tokens_.push_back(token);
  table_.insert(table_.end(), vector.begin(), vector.end());
  return false;
}

const double* WordEmbeddings::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return nullptr;
  return table_.data() + it->second * dim_;
}

void WordEmbeddings::set_unk_vector(std::span<const double> v) {
  if (v.size() != dim_) throw InvalidArgument("unk vector has the wrong dimension");
  unk_.assign(v.begin(), v.end());
}

EmbeddedSequence embed_tokens(const std::vector<std::string>& tokens, const WordEmbeddings& we,
                              std::size_t max_len) {
  if (max_len == 0) throw InvalidArgument("embed_tokens: max_len must be >= 1");
  const std::size_t dim = we.dim();
  EmbeddedSequence out{Tensor({max_len, dim}, 0.0), std::min(tokens.size(), max_len)};
  for (std::size_t r = 0; r < out.length; ++r) {
    const double* v = we.find(tokens[r]);
    if (!v && we.unk_policy() == UnkPolicy::LearnedUnk) v = we.unk_vector().data();
    if (!v) continue;
    std::copy(v, v + dim, out.matrix.row(r).begin());
  }
  return out;
}

WordVectorLoad parse_word_vectors(std::string_view text) {
  const std::vector<std::string> lines = split_lines(text);
  WordVectorLoad result;
  std::size_t dim = 0;
  std::size_t first = 0;
  // Skip leading blank lines, then look for a "count dim" header.
  while (first < lines.size() && trim(lines[first]).empty()) ++first;
  if (first < lines.size()) {
    auto fields = split_ws(lines[first]);
    std::size_t count = 0;
    std::size_t hdim = 0;
    if (fields.size() == 2 && parse_count(fields[0], count) && parse_count(fields[1], hdim)) {
      if (hdim == 0) throw DataError("word vectors: header declares dimension 0 (line " +
                                     std::to_string(first + 1) + ")");
      dim = hdim;
      ++first;
    }
  }
  std::vector<double> values;
  for (std::size_t ln = first; ln < lines.size(); ++ln) {
    auto fields = split_ws(lines[ln]);
    if (fields.empty()) continue;
    const std::size_t n = fields.size() - 1;
    if (n == 0) {
      throw DataError("word vectors: line " + std::to_string(ln + 1) + " has no components");
    }
    if (dim == 0) dim = n;
    if (n != dim) {
      throw DataError("word vectors: line " + std::to_string(ln + 1) + " has " +
                      std::to_string(n) + " components, expected " + std::to_string(dim));
    }
    values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!parse_number(fields[i + 1], values[i])) {
        throw DataError("word vectors: line " + std::to_string(ln + 1) + ": '" +
                        std::string(fields[i + 1]) + "' is not a number");
      }
    }
    if (result.embeddings.dim() == 0) result.embeddings = WordEmbeddings(dim);
    if (result.embeddings.set(std::string(fields[0]), values)) ++result.duplicates;
  }
  if (result.embeddings.dim() == 0) {
    throw DataError("word vectors: file contains no vectors");
  }
  return result;
}

WordVectorLoad load_word_vectors(const std::filesystem::path& path) {
  try {
    return parse_word_vectors(read_file(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string format_word_vectors(const WordEmbeddings& we, bool header) {
  std::string out;
  if (header) out += std::to_string(we.size()) + " " + std::to_string(we.dim()) + "\n";
  for (const std::string& tok : we.tokens()) {
    out += tok;
    const double* v = we.find(tok);
    for (std::size_t i = 0; i < we.dim(); ++i) {
      out += ' ';
      out += format_double(v[i]);
    }
    out += '\n';
  }
  return out;
}

void SentenceVectors::add(const std::string& id, std::vector<double> vector) {
  if (map_.count(id)) throw DataError("sentence vectors: duplicate id '" + id + "'");
  if (vector.empty()) throw DataError("sentence vectors: empty vector for id '" + id + "'");
  if (dim_ == 0) dim_ = vector.size();
  if (vector.size() != dim_) {
    throw DataError("sentence vectors: id '" + id + "' has dimension " +
                    std::to_string(vector.size()) + ", expected " + std::to_string(dim_));
  }
  map_.emplace(id, std::move(vector));
  order_.push_back(id);
}

const std::vector<double>* SentenceVectors::find(const std::string& id) const {
  auto it = map_.find(id);
  return it == map_.end() ? nullptr : &it->second;
}

SentenceVectors parse_sentence_vectors(std::string_view text) {
  SentenceVectors sv;
  const std::vector<std::string> lines = split_lines(text);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    if (trim(lines[ln]).empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(lines[ln]);
    } catch (const nlohmann::json::exception& e) {
      throw DataError("sentence vectors: line " + std::to_string(ln + 1) + ": " + e.what());
    }
    if (!rec.is_object() || !rec.contains("id") || !rec["id"].is_string() ||
        !rec.contains("vector") || !rec["vector"].is_array()) {
      throw DataError("sentence vectors: line " + std::to_string(ln + 1) +
                      ": expected {\"id\": str, \"vector\": [numbers]}");
    }
    std::vector<double> v;
    v.reserve(rec["vector"].size());
    for (const auto& x : rec["vector"]) {
      if (!x.is_number()) {
        throw DataError("sentence vectors: line " + std::to_string(ln + 1) +
                        ": non-numeric component");
      }
      v.push_back(x.get<double>());
    }
    try {
      sv.add(rec["id"].get<std::string>(), std::move(v));
    } catch (const DataError& e) {
      std::string msg = e.what();
      msg.insert(std::string_view("sentence vectors: ").size(), "line " + std::to_string(ln + 1) + ": ");
      throw DataError(msg);
    }
  }
  return sv;
}

SentenceVectors load_sentence_vectors(const std::filesystem::path& path) {
  try {
    return parse_sentence_vectors(read_file(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string format_sentence_vectors(const SentenceVectors& sv) {
  std::string out;
  for (const std::string& id : sv.ids()) {
    nlohmann::ordered_json rec;
    rec["id"] = id;
    rec["vector"] = *sv.find(id);
    out += rec.dump();
    out += '\n';
  }
  return out;
}

std::string sentence_vector_key(std::string_view example_id, std::string_view variant_token) {
  std::string key(example_id);
  key += '#';
  key += variant_token;
  return key;
}

}  // namespace depo
