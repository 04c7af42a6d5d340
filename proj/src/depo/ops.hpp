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

#ifndef DEPO_OPS_HPP
#define DEPO_OPS_HPP

#include <cstddef>
#include <string_view>
#include <vector>

#include "depo/rng.hpp"
#include "depo/tape.hpp"

// Differentiable primitives. Every op validates shapes and throws
// InvalidArgument on mismatch; backward closures accumulate (+=) into the
// input gradients so a value used twice receives the sum of both paths.
namespace depo::ad {

enum class Activation { Identity, Relu, Tanh, Logistic };

// Accepts "identity", "relu", "tanh", "logistic" and the alias "sigmoid".
Activation parse_activation(std::string_view name);
std::string_view activation_name(Activation a);

Var add(Tape& t, Var a, Var b);
Var mul(Tape& t, Var a, Var b);
Var scale(Tape& t, Var a, double s);
Var sum(Tape& t, Var a);
Var sum_squares(Tape& t, Var a);

// [m x n] . [n] -> [m]
Var matvec(Tape& t, Var w, Var x);
// [L] . [L x S] -> [S]  (weighted sum of rows)
Var vecmat(Tape& t, Var x, Var m);

Var activate(Tape& t, Var x, Activation a);
Var softmax(Tape& t, Var x);

Var concat(Tape& t, const std::vector<Var>& parts);
Var slice(Tape& t, Var x, std::size_t offset, std::size_t length);
Var row(Tape& t, Var m, std::size_t r);
Var stack_rows(Tape& t, const std::vector<Var>& rows);
// Rows of `table` selected by id, as an [ids.size() x cols] matrix.
Var gather_rows(Tape& t, Var table, const std::vector<std::size_t>& ids);

// Row i of the result is filters . (seq rows i..i+n-1 flattened) + bias.
// seq [L x D], filters [K x n*D], bias [K] -> [(L-n+1) x K].
Var conv1d_ngram(Tape& t, Var seq, Var filters, Var bias, std::size_t n);

// Column-wise max over the first mask_len rows of x [T x K] -> [K]. The
// gradient goes to the first row attaining the max.
Var maxpool_over_time(Tape& t, Var x, std::size_t mask_len);

// activation(W x + b); W [out x in], b [out].
Var dense(Tape& t, Var x, Var w, Var b, Activation act);

// Inverted dropout. Identity (the same Var) when not training or rate == 0.
Var dropout(Tape& t, Var x, double rate, Rng& rng, bool training);

// log(sum(exp(logits))) - logits[gold], computed with the max shifted out.
Var softmax_cross_entropy(Tape& t, Var logits, std::size_t gold);

// Numerically stable softmax of a plain tensor (no tape).
Tensor softmax_values(const Tensor& logits);

// Gate layout of the stacked 4H rows: input, forget, output, candidate.
struct LstmParams {
  Var input_weights;      // [4H x D]
  Var recurrent_weights;  // [4H x H]
  Var bias;               // [4H]
};

struct LstmState {
  Var h;
  Var c;
};

LstmState lstm_cell_step(Tape& t, Var x, Var h_prev, Var c_prev, const LstmParams& p);

// seq [L x D] -> [L x 2H]; row t is (forward state at t, backward state at t),
// the backward direction reading the sequence from the end.
Var bilstm_sequence(Tape& t, Var seq, const LstmParams& fwd, const LstmParams& bwd);

struct Attention {
  Var context;  // [S]
  Var weights;  // [L]
};

// weights = softmax(states . scorer); context = sum_t weights[t] * states[t].
Attention attention_pool(Tape& t, Var states, Var scorer);

}  // namespace depo::ad

#endif  // DEPO_OPS_HPP
