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

#include <cmath>
#include <numeric>

#include "depo/common.hpp"
#include "depo/ops.hpp"
#include "depo/optim.hpp"
#include "depo/tape.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace depo;
using namespace depo::ad;
using depo::testing::random_tensor;

TEST_CASE("every primitive matches central differences") {
  for (const auto& c : depo::testing::primitive_grad_cases()) {
    CAPTURE(c.name);
    CHECK(depo::testing::worst_grad_error(c, 20, 7) <= 1e-4);
  }
}

TEST_CASE("full model losses match central differences") {
  for (const auto& c : depo::testing::model_grad_cases()) {
    CAPTURE(c.name);
    CHECK(depo::testing::worst_grad_error(c, 5, 11) <= 1e-4);
  }
}

TEST_CASE("cross-entropy of uniform logits over 12 classes is ln 12") {
  Tape t;
  Var z = t.constant(Tensor({12}, 0.0));
  CHECK(t.value(softmax_cross_entropy(t, z, 5))[0] == doctest::Approx(std::log(12.0)).epsilon(1e-12));
}

TEST_CASE("cross-entropy stays finite for extreme logits") {
  Tape t;
  Var z = t.parameter(Tensor::vector({1000.0, 0.0}));
  Var loss = softmax_cross_entropy(t, z, 0);
  CHECK(t.value(loss)[0] == doctest::Approx(0.0).epsilon(1e-12));
  t.backward(loss);
  const Tensor g = t.grad(z);
  CHECK(std::isfinite(g[0]));
  CHECK(std::isfinite(g[1]));

  Tape t2;
  Var z2 = t2.constant(Tensor::vector({1000.0, 0.0}));
  CHECK(t2.value(softmax_cross_entropy(t2, z2, 1))[0] == doctest::Approx(1000.0));
}

TEST_CASE("softmax_values sums to one and survives large inputs") {
  const Tensor p = softmax_values(Tensor::vector({1e4, 1e4 - 1.0, -1e4}));
  double s = 0.0;
  for (double v : p.data()) s += v;
  CHECK(s == doctest::Approx(1.0));
  CHECK(p[0] > p[1]);
  CHECK(p[2] == 0.0);
}

TEST_CASE("dropout keeps the mean in expectation") {
  // 10000 masks over a constant vector; the rescaled mean stays within 2%.
  Rng rng(123);
  const double rate = 0.5;
  double total = 0.0;
  const std::size_t n = 10;
  for (int trial = 0; trial < 10000; ++trial) {
    Tape t;
    Var x = t.constant(Tensor({n}, 1.0));
    const Tensor& y = t.value(dropout(t, x, rate, rng, true));
    for (double v : y.data()) total += v;
  }
  const double mean = total / (10000.0 * n);
  CHECK(std::abs(mean - 1.0) <= 0.02);
}

TEST_CASE("dropout is the identity at inference and at rate zero") {
  Rng rng(1);
  Tape t;
  Var x = t.constant(Tensor::vector({1.0, 2.0, 3.0}));
  CHECK(dropout(t, x, 0.5, rng, false).id == x.id);
  CHECK(dropout(t, x, 0.0, rng, true).id == x.id);
  CHECK_THROWS_AS(dropout(t, x, 1.0, rng, true), InvalidArgument);
  CHECK_THROWS_AS(dropout(t, x, -0.1, rng, true), InvalidArgument);
}

TEST_CASE("unigram convolution with max-pooling ignores word order") {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t L = 2 + rng.below(6);
    const std::size_t D = 1 + rng.below(5);
    const std::size_t K = 1 + rng.below(5);
    const Tensor seq = random_tensor(rng, {L, D});
    const Tensor f = random_tensor(rng, {K, D});
    const Tensor b = random_tensor(rng, {K});
    std::vector<std::size_t> perm(L);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    Tensor shuffled({L, D}, 0.0);
    for (std::size_t r = 0; r < L; ++r) {
      for (std::size_t c = 0; c < D; ++c) shuffled.at(r, c) = seq.at(perm[r], c);
    }
    auto pooled = [&](const Tensor& s) {
      Tape t;
      return t.value(maxpool_over_time(
          t, conv1d_ngram(t, t.constant(s), t.constant(f), t.constant(b), 1), L));
    };
    CHECK(pooled(seq) == pooled(shuffled));
  }
}

TEST_CASE("BiLSTM with swapped directions on a reversed sequence mirrors the output") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t L = 1 + rng.below(5);
    const std::size_t D = 1 + rng.below(3);
    const std::size_t H = 1 + rng.below(3);
    const Tensor seq = random_tensor(rng, {L, D});
    Tensor rev({L, D}, 0.0);
    for (std::size_t r = 0; r < L; ++r) {
      for (std::size_t c = 0; c < D; ++c) rev.at(r, c) = seq.at(L - 1 - r, c);
    }
    const Tensor fx = random_tensor(rng, {4 * H, D}), fh = random_tensor(rng, {4 * H, H}), fb = random_tensor(rng, {4 * H});
    const Tensor bx = random_tensor(rng, {4 * H, D}), bh = random_tensor(rng, {4 * H, H}), bb = random_tensor(rng, {4 * H});
    Tape t;
    const LstmParams f{t.constant(fx), t.constant(fh), t.constant(fb)};
    const LstmParams b{t.constant(bx), t.constant(bh), t.constant(bb)};
    const Tensor out = t.value(bilstm_sequence(t, t.constant(seq), f, b));
    const Tensor mirrored = t.value(bilstm_sequence(t, t.constant(rev), b, f));
    for (std::size_t r = 0; r < L; ++r) {
      for (std::size_t k = 0; k < H; ++k) {
        CHECK(out.at(r, k) == doctest::Approx(mirrored.at(L - 1 - r, H + k)).epsilon(1e-12));
        CHECK(out.at(r, H + k) == doctest::Approx(mirrored.at(L - 1 - r, k)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("attention weights form a distribution") {
  Rng rng(8);
  Tape t;
  const Attention a = attention_pool(t, t.constant(random_tensor(rng, {4, 3})), t.constant(random_tensor(rng, {3})));
  double s = 0.0;
  for (double w : t.value(a.weights).data()) {
    CHECK(w >= 0.0);
    s += w;
  }
  CHECK(s == doctest::Approx(1.0));
}

TEST_CASE("maxpool respects the mask") {
  Tape t;
  Var x = t.constant(Tensor::matrix(3, 2, {1.0, 5.0, 2.0, 0.0, 9.0, 9.0}));
  const Tensor& y = t.value(maxpool_over_time(t, x, 2));
  CHECK(y[0] == 2.0);
  CHECK(y[1] == 5.0);
  CHECK_THROWS_AS(maxpool_over_time(t, x, 4), InvalidArgument);
  CHECK_THROWS_AS(maxpool_over_time(t, x, 0), InvalidArgument);
}

TEST_CASE("shape errors name the operation") {
  Tape t;
  Var a = t.constant(Tensor({3}, 1.0));
  Var b = t.constant(Tensor({2}, 1.0));
  try {
    add(t, a, b);
    FAIL("expected a shape error");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("add") != std::string::npos);
  }
  CHECK_THROWS_AS(conv1d_ngram(t, t.constant(Tensor({1, 2}, 0.0)), t.constant(Tensor({1, 4}, 0.0)),
                               t.constant(Tensor({1}, 0.0)), 2),
                  InvalidArgument);
  CHECK_THROWS_AS(softmax_cross_entropy(t, a, 3), InvalidArgument);
}

TEST_CASE("gradients accumulate across repeated uses") {
  Tape t;
  Var x = t.parameter(Tensor::vector({2.0}));
  Var y = add(t, mul(t, x, x), x);  // x^2 + x
  t.backward(sum(t, y));
  CHECK(t.grad(x)[0] == doctest::Approx(5.0));
}

TEST_CASE("backward rejects non-scalar losses") {
  Tape t;
  Var x = t.parameter(Tensor::vector({1.0, 2.0}));
  CHECK_THROWS_AS(t.backward(x), InvalidArgument);
}

TEST_CASE("Adam moves a quadratic towards its minimum") {
  Tensor w = Tensor::vector({3.0, -2.0});
  Adam opt(0.1);
  for (int step = 0; step < 500; ++step) {
    Tensor g = w;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = 2.0 * w[i];
    opt.step({&w}, {g});
  }
  CHECK(std::abs(w[0]) < 1e-2);
  CHECK(std::abs(w[1]) < 1e-2);
  CHECK(opt.steps() == 500);
}

TEST_CASE("glorot init stays inside its bound") {
  Rng rng(3);
  const Tensor w = glorot_uniform(10, 20, rng);
  const double a = std::sqrt(6.0 / 30.0);
  for (double v : w.data()) CHECK(std::abs(v) <= a);
}

TEST_CASE("activation names round trip") {
  for (Activation a : {Activation::Identity, Activation::Relu, Activation::Tanh, Activation::Logistic}) {
    CHECK(parse_activation(activation_name(a)) == a);
  }
  CHECK_THROWS_AS(parse_activation("swish"), InvalidArgument);
}
