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

#include "depo/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "depo/common.hpp"

namespace depo::ad {
namespace {

void require(bool cond, const std::string& what) {
  if (!cond) throw InvalidArgument(what);
}

std::string shape_of(const Tape& t, Var v) { return t.value(v).shape_string(); }

double logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Activation parse_activation(std::string_view name) {
  const std::string n = to_lower(name);
  if (n == "identity" || n == "linear") return Activation::Identity;
  if (n == "relu") return Activation::Relu;
  if (n == "tanh") return Activation::Tanh;
  if (n == "logistic" || n == "sigmoid") return Activation::Logistic;
  throw InvalidArgument("unknown activation '" + std::string(name) +
                        "' (expected identity, relu, tanh, sigmoid)");
}

std::string_view activation_name(Activation a) {
  switch (a) {
    case Activation::Identity: return "identity";
    case Activation::Relu: return "relu";
    case Activation::Tanh: return "tanh";
    case Activation::Logistic: return "sigmoid";
  }
  return "identity";
}

Var add(Tape& t, Var a, Var b) {
  const Tensor& va = t.value(a);
  const Tensor& vb = t.value(b);
  require(va.same_shape(vb), "add: shape mismatch " + va.shape_string() + " vs " + vb.shape_string());
  Tensor out = va;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += vb[i];
  return t.record(std::move(out), {a, b}, [a, b](Tape& tp, std::size_t self) {
    const Tensor& g = *tp.grad_if_any(self);
    for (Var in : {a, b}) {
      if (Tensor* gi = tp.grad_buffer(in.id)) {
        for (std::size_t i = 0; i < g.size(); ++i) (*gi)[i] += g[i];
      }
    }
  });
}

Var mul(Tape& t, Var a, Var b) {
  const Tensor& va = t.value(a);
  const Tensor& vb = t.value(b);
  require(va.same_shape(vb), "mul: shape mismatch " + va.shape_string() + " vs " + vb.shape_string());
  Tensor out = va;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= vb[i];
  return t.record(std::move(out), {a, b}, [a, b](Tape& tp, std::size_t self) {
    const Tensor& g = *tp.grad_if_any(self);
    const Tensor& xa = tp.value(a);
    const Tensor& xb = tp.value(b);
    if (Tensor* ga = tp.grad_buffer(a.id)) {
      for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i] * xb[i];
    }
    if (Tensor* gb = tp.grad_buffer(b.id)) {
      for (std::size_t i = 0; i < g.size(); ++i) (*gb)[i] += g[i] * xa[i];
    }
  });
}

Var scale(Tape& t, Var a, double s) {
  Tensor out = t.value(a);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= s;
  return t.record(std::move(out), {a}, [a, s](Tape& tp, std::size_t self) {
    const Tensor& g = *tp.grad_if_any(self);
    if (Tensor* ga = tp.grad_buffer(a.id)) {
      for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += s * g[i];
    }
  });
}

Var sum(Tape& t, Var a) {
  double s = 0.0;
  for (double v : t.value(a).data()) s += v;
  return t.record(Tensor::scalar(s), {a}, [a](Tape& tp, std::size_t self) {
    const double g = (*tp.grad_if_any(self))[0];
    if (Tensor* ga = tp.grad_buffer(a.id)) {
      for (std::size_t i = 0; i < ga->size(); ++i) (*ga)[i] += g;
    }
  });
}

Var sum_squares(Tape& t, Var a) {
  double s = 0.0;
  for (double v : t.value(a).data()) s += v * v;
  return t.record(Tensor::scalar(s), {a}, [a](Tape& tp, std::size_t self) {
    const double g = (*tp.grad_if_any(self))[0];
    const Tensor& x = tp.value(a);
    if (Tensor* ga = tp.grad_buffer(a.id)) {
      for (std::size_t i = 0; i < ga->size(); ++i) (*ga)[i] += 2.0 * g * x[i];
    }
  });
}

Var matvec(Tape& t, Var w, Var x) {
  const Tensor& W = t.value(w);
  const Tensor& X = t.value(x);
  require(W.rank() == 2 && X.rank() == 1 && W.cols() == X.size(),
          "matvec: cannot multiply " + W.shape_string() + " by " + X.shape_string());
  const std::size_t m = W.rows();
  const std::size_t n = W.cols();
  Tensor out({m}, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double* wr = W.data().data() + i * n;
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += wr[j] * X[j];
    out[i] = acc;
  }
  return t.record(std::move(out), {w, x}, [w, x, m, n](Tape& tp, std::size_t self) {
    const Tensor& g = *tp.grad_if_any(self);
    const Tensor& Wv = tp.value(w);
    const Tensor& Xv = tp.value(x);
    if (Tensor* gw = tp.grad_buffer(w.id)) {
      for (std::size_t i = 0; i < m; ++i) {
        if (g[i] == 0.0) continue;
        double* row = gw->data().data() + i * n;
        for (std::size_t j = 0; j < n; ++j) row[j] += g[i] * Xv[j];
      }
    }
    if (Tensor* gx = tp.grad_buffer(x.id)) {
      for (std::size_t i = 0; i < m; ++i) {
        if (g[i] == 0.0) continue;
        const double* wr = Wv.data().data() + i * n;
        for (std::size_t j = 0; j < n; ++j) (*gx)[j] += g[i] * wr[j];
      }
    }
  });
}

Var vecmat(Tape& t, Var x, Var m) {
  const Tensor& X = t.value(x);
  const Tensor& M = t.value(m);
  require(X.rank() == 1 && M.rank() == 2 && M.rows() == X.size(),
          "vecmat: cannot multiply " + X.shape_string() + " by " + M.shape_string());
  const std::size_t rows = M.rows();
  const std::size_t cols = M.cols();
  Tensor out({cols}, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) out[c] += X[r] * M.at(r, c);
  }
  return t.record(std::move(out), {x, m}, [x, m, rows, cols](Tape& tp, std::size_t self) {
    const Tensor& g = *tp.grad_if_any(self);
    const Tensor& Xv = tp.value(x);
    const Tensor& Mv = tp.value(m);
    if (Tensor* gx = tp.grad_buffer(x.id)) {
      for (std::size_t r = 0; r < rows; ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < cols; ++c) acc += g[c] * Mv.at(r, c);
        (*gx)[r] += acc;
      }
    }
    if (Tensor* gm = tp.grad_buffer(m.id)) {
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) gm->at(r, c) += Xv[r] * g[c];
      }
    }
  });
}

Var activate(Tape& t, Var x, Activation a) {
  if (a == Activation::Identity) return x;
  Tensor out = t.value(x);
  for (std::size_t i = 0; i < out.size(); ++i) {
    double& v = out[i];
    switch (a) {
      case Activation::Relu: v = v > 0.0 ? v : 0.0; break;
      case Activation::Tanh: v = std::tanh(v); break;
      case Activation::Logistic: v = logistic(v); break;
      case Activation::Identity: break;
    }
  }
  return t.record(std::move(out), {x}, [x, a](Tape& tp, std::size_t self) {
    const Tensor& g = *tp.grad_if_any(self);
    const Tensor& y = tp.value(self);
    const Tensor& in = tp.value(x);
    Tensor* gx = tp.grad_buffer(x.id);
    if (!gx) return;
    for (std::size_t i = 0; i < g.size(); ++i) {
      double d = 1.0;
      switch (a) {
        case Activation::Relu: d = in[i] > 0.0 ? 1.0 : 0.0; break;
        case Activation::Tanh: d = 1.0 - y[i] * y[i]; break;
        case Activation::Logistic: d = y[i] * (1.0 - y[i]); break;
        case Activation::Identity: break;
      }
      (*gx)[i] += g[i] * d;
    }
  });
}

Tensor softmax_values(const Tensor& logits) {
  Tensor p = logits;
  if (p.empty()) return p;
  double mx = p[0];
  for (double v : p.data()) mx = std::max(mx, v);
  double z = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::exp(p[i] - mx);
    z += p[i];
  }
  for (std::size_t i = 0; i < p.size(); ++i) p[i] /= z;
  return p;
}

Var softmax(Tape& t, Var x) {
  require(t.value(x).rank() == 1 && t.value(x).size() > 0,
          "softmax: expected a non-empty vector, got " + shape_of(t, x));
  Tensor p = softmax_values(t.value(x));
  return t.record(std::move(p), {x}, [x](Tape& tp, std::size_t self) {
    const Tensor& g = *tp.grad_if_any(self);
    const Tensor& y = tp.value(self);
    Tensor* gx = tp.grad_buffer(x.id);
    if (!gx) return;
    double dot = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) dot += g[i] * y[i];
    for (std::size_t i = 0; i < g.size(); ++i) (*gx)[i] += y[i] * (g[i] - dot);
  });
}

Var concat(Tape& t, const std::vector<Var>& parts) {
  require(!parts.empty(), "concat: no inputs");
  std::vector<double> data;
  for (Var p : parts) {
    require(t.value(p).rank() == 1, "concat: expected vectors, got " + shape_of(t, p));
    auto d = t.value(p).data();
    data.insert(data.end(), d.begin(), d.end());
  }
  return t.record(Tensor::vector(std::move(data)), parts, [parts](Tape& tp, std::size_t self) {
    const Tensor& g = *tp.grad_if_any(self);
    std::size_t off = 0;
    for (Var p : parts) {
      const std::size_t n = tp.value(p).size();
      if (Tensor* gp = tp.grad_buffer(p.id)) {
        for (std::size_t i = 0; i < n; ++i) (*gp)[i] += g[off + i];
      }
      off += n;
    }
  });
}

Var slice(Tape& t, Var x, std::size_t offset, std::size_t length) {
  const Tensor& X = t.value(x);
  require(X.rank() == 1 && offset + length <= X.size(),
          "slice: [" + std::to_string(offset) + ", +" + std::to_string(length) +
              ") out of range for " + X.shape_string());
  std::vector<double> d(X.data().begin() + static_cast<std::ptrdiff_t>(offset),
                        X.data().begin() + static_cast<std::ptrdiff_t>(offset + length));
  return t.record(Tensor::vector(std::move(d)), {x}, [x, offset](Tape& tp, std::size_t self) {
    const Tensor& g = *tp.grad_if_any(self);
    if (Tensor* gx = tp.grad_buffer(x.id)) {
      for (std::size_t i = 0; i < g.size(); ++i) (*gx)[offset + i] += g[i];
    }
  });
}

Var row(Tape& t, Var m, std::size_t r) {
  const Tensor& M = t.value(m);
  require(M.rank() == 2 && r < M.rows(),
          "row: index " + std::to_string(r) + " out of range for " + M.shape_string());
  auto src = M.row(r);
  return t.record(Tensor::vector({src.begin(), src.end()}), {m}, [m, r](Tape& tp, std::size_t self) {
    const Tensor& g = *tp.grad_if_any(self);
    if (Tensor* gm = tp.grad_buffer(m.id)) {
      auto dst = gm->row(r);
      for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i];
    }
  });
}

Var stack_rows(Tape& t, const std::vector<Var>& rows) {
  require(!rows.empty(), "stack_rows: no inputs");
  const std::size_t cols = t.value(rows[0]).size();
  std::vector<double> data;
  data.reserve(rows.size() * cols);
  for (Var r : rows) {
    require(t.value(r).rank() == 1 && t.value(r).size() == cols,
            "stack_rows: ragged row " + shape_of(t, r));
    auto d = t.value(r).data();
    data.insert(data.end(), d.begin(), d.end());
  }
  return t.record(Tensor::matrix(rows.size(), cols, std::move(data)), rows,
                  [rows, cols](Tape& tp, std::size_t self) {
                    const Tensor& g = *tp.grad_if_any(self);
                    for (std::size_t r = 0; r < rows.size(); ++r) {
                      if (Tensor* gr = tp.grad_buffer(rows[r].id)) {
                        for (std::size_t c = 0; c < cols; ++c) (*gr)[c] += g.at(r, c);
                      }
                    }
                  });
}

Var gather_rows(Tape& t, Var table, const std::vector<std::size_t>& ids) {
  const Tensor& T = t.value(table);
  require(T.rank() == 2, "gather_rows: table must be a matrix, got " + T.shape_string());
  require(!ids.empty(), "gather_rows: no ids");
  const std::size_t cols = T.cols();
  std::vector<double> data;
  data.reserve(ids.size() * cols);
  for (std::size_t id : ids) {
    require(id < T.rows(), "gather_rows: id " + std::to_string(id) + " out of range for " +
                               T.shape_string());
    auto r = T.row(id);
    data.insert(data.end(), r.begin(), r.end());
  }
  return t.record(Tensor::matrix(ids.size(), cols, std::move(data)), {table},
                  [table, ids](Tape& tp, std::size_t self) {
                    const Tensor& g = *tp.grad_if_any(self);
                    Tensor* gt = tp.grad_buffer(table.id);
                    if (!gt) return;
                    for (std::size_t r = 0; r < ids.size(); ++r) {
                      auto dst = gt->row(ids[r]);
                      auto src = g.row(r);
                      for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += src[c];
                    }
                  });
}

Var conv1d_ngram(Tape& t, Var seq, Var filters, Var bias, std::size_t n) {
  const Tensor& S = t.value(seq);
  const Tensor& F = t.value(filters);
  const Tensor& B = t.value(bias);
  require(n >= 1, "conv1d_ngram: window size must be >= 1");
  require(S.rank() == 2, "conv1d_ngram: sequence must be a matrix, got " + S.shape_string());
  const std::size_t L = S.rows();
  const std::size_t D = S.cols();
  if (L < n) {
    throw InvalidArgument("conv1d_ngram: sequence shorter than window (" + std::to_string(L) +
                          " < " + std::to_string(n) + ")");
  }
  require(F.rank() == 2 && F.cols() == n * D,
          "conv1d_ngram: filters " + F.shape_string() + " do not match window " +
              std::to_string(n) + " x dim " + std::to_string(D));
  const std::size_t K = F.rows();
  require(B.rank() == 1 && B.size() == K,
          "conv1d_ngram: bias " + B.shape_string() + " does not match " + std::to_string(K) +
              " filters");
  const std::size_t T = L - n + 1;
  const std::size_t W = n * D;
  Tensor out({T, K}, 0.0);
  const double* s = S.data().data();
  for (std::size_t i = 0; i < T; ++i) {
    const double* window = s + i * D;
    for (std::size_t k = 0; k < K; ++k) {
      const double* f = F.data().data() + k * W;
      double acc = B[k];
      for (std::size_t j = 0; j < W; ++j) acc += f[j] * window[j];
      out.at(i, k) = acc;
    }
  }
  return t.record(std::move(out), {seq, filters, bias},
                  [seq, filters, bias, T, K, D, W](Tape& tp, std::size_t self) {
                    const Tensor& g = *tp.grad_if_any(self);
                    const Tensor& Sv = tp.value(seq);
                    const Tensor& Fv = tp.value(filters);
                    Tensor* gs = tp.grad_buffer(seq.id);
                    Tensor* gf = tp.grad_buffer(filters.id);
                    Tensor* gb = tp.grad_buffer(bias.id);
                    for (std::size_t i = 0; i < T; ++i) {
                      const double* window = Sv.data().data() + i * D;
                      for (std::size_t k = 0; k < K; ++k) {
                        const double gik = g.at(i, k);
                        if (gik == 0.0) continue;
                        if (gb) (*gb)[k] += gik;
                        if (gf) {
                          double* f = gf->data().data() + k * W;
                          for (std::size_t j = 0; j < W; ++j) f[j] += gik * window[j];
                        }
                        if (gs) {
                          const double* f = Fv.data().data() + k * W;
                          double* dw = gs->data().data() + i * D;
                          for (std::size_t j = 0; j < W; ++j) dw[j] += gik * f[j];
                        }
                      }
                    }
                  });
}

Var maxpool_over_time(Tape& t, Var x, std::size_t mask_len) {
  const Tensor& X = t.value(x);
  require(X.rank() == 2, "maxpool_over_time: expected a matrix, got " + X.shape_string());
  if (mask_len == 0) throw InvalidArgument("maxpool_over_time: mask_len must be >= 1");
  require(mask_len <= X.rows(), "maxpool_over_time: mask_len " + std::to_string(mask_len) +
                                    " exceeds " + std::to_string(X.rows()) + " rows");
  const std::size_t K = X.cols();
  Tensor out({K}, 0.0);
  std::vector<std::size_t> argmax(K, 0);
  for (std::size_t k = 0; k < K; ++k) {
    double best = X.at(0, k);
    for (std::size_t r = 1; r < mask_len; ++r) {
      if (X.at(r, k) > best) {
        best = X.at(r, k);
        argmax[k] = r;
      }
    }
    out[k] = best;
  }
  return t.record(std::move(out), {x}, [x, argmax](Tape& tp, std::size_t self) {
    const Tensor& g = *tp.grad_if_any(self);
    if (Tensor* gx = tp.grad_buffer(x.id)) {
      for (std::size_t k = 0; k < argmax.size(); ++k) gx->at(argmax[k], k) += g[k];
    }
  });
}

Var dense(Tape& t, Var x, Var w, Var b, Activation act) {
  const Tensor& W = t.value(w);
  const Tensor& B = t.value(b);
  require(B.rank() == 1 && W.rank() == 2 && B.size() == W.rows(),
          "dense: bias " + B.shape_string() + " does not match weights " + W.shape_string());
  return activate(t, add(t, matvec(t, w, x), b), act);
}

Var dropout(Tape& t, Var x, double rate, Rng& rng, bool training) {
  if (!(rate >= 0.0) || rate >= 1.0) {
    throw InvalidArgument("dropout: rate must be in [0, 1), got " + format_double(rate));
  }
  if (!training || rate == 0.0) return x;
  const Tensor& X = t.value(x);
  Tensor mask(X.shape(), 0.0);
  const double keep_scale = 1.0 / (1.0 - rate);
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = rng.uniform() >= rate ? keep_scale : 0.0;
  Tensor out = X;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
  return t.record(std::move(out), {x}, [x, mask = std::move(mask)](Tape& tp, std::size_t self) {
    const Tensor& g = *tp.grad_if_any(self);
    if (Tensor* gx = tp.grad_buffer(x.id)) {
      for (std::size_t i = 0; i < g.size(); ++i) (*gx)[i] += g[i] * mask[i];
    }
  });
}

Var softmax_cross_entropy(Tape& t, Var logits, std::size_t gold) {
  const Tensor& Z = t.value(logits);
  require(Z.rank() == 1 && Z.size() > 0, "softmax_cross_entropy: expected a vector of logits");
  if (gold >= Z.size()) {
    throw InvalidArgument("softmax_cross_entropy: gold index " + std::to_string(gold) +
                          " out of range for " + std::to_string(Z.size()) + " classes");
  }
  double mx = Z[0];
  for (double v : Z.data()) mx = std::max(mx, v);
  double z = 0.0;
  for (double v : Z.data()) z += std::exp(v - mx);
  const double loss = mx + std::log(z) - Z[gold];
  return t.record(Tensor::scalar(loss), {logits}, [logits, gold](Tape& tp, std::size_t self) {
    const double g = (*tp.grad_if_any(self))[0];
    Tensor p = softmax_values(tp.value(logits));
    if (Tensor* gz = tp.grad_buffer(logits.id)) {
      for (std::size_t i = 0; i < p.size(); ++i) {
        (*gz)[i] += g * (p[i] - (i == gold ? 1.0 : 0.0));
      }
    }
  });
}

LstmState lstm_cell_step(Tape& t, Var x, Var h_prev, Var c_prev, const LstmParams& p) {
  const Tensor& Wx = t.value(p.input_weights);
  const Tensor& Wh = t.value(p.recurrent_weights);
  const Tensor& b = t.value(p.bias);
  require(b.rank() == 1 && b.size() % 4 == 0 && b.size() > 0,
          "lstm_cell_step: bias must have 4H entries, got " + b.shape_string());
  const std::size_t H = b.size() / 4;
  require(Wx.rank() == 2 && Wx.rows() == 4 * H && Wx.cols() == t.value(x).size(),
          "lstm_cell_step: input weights " + Wx.shape_string() + " do not match input " +
              shape_of(t, x));
  require(Wh.rank() == 2 && Wh.rows() == 4 * H && Wh.cols() == H,
          "lstm_cell_step: recurrent weights " + Wh.shape_string() + " do not match H=" +
              std::to_string(H));
  require(t.value(h_prev).size() == H && t.value(c_prev).size() == H,
          "lstm_cell_step: state size does not match H=" + std::to_string(H));

  Var pre = add(t, add(t, matvec(t, p.input_weights, x), matvec(t, p.recurrent_weights, h_prev)),
                p.bias);
  Var i = activate(t, slice(t, pre, 0, H), Activation::Logistic);
  Var f = activate(t, slice(t, pre, H, H), Activation::Logistic);
  Var o = activate(t, slice(t, pre, 2 * H, H), Activation::Logistic);
  Var g = activate(t, slice(t, pre, 3 * H, H), Activation::Tanh);
  Var c = add(t, mul(t, f, c_prev), mul(t, i, g));
  Var h = mul(t, o, activate(t, c, Activation::Tanh));
  return {h, c};
}

Var bilstm_sequence(Tape& t, Var seq, const LstmParams& fwd, const LstmParams& bwd) {
  const Tensor& S = t.value(seq);
  require(S.rank() == 2 && S.rows() >= 1, "bilstm_sequence: expected a non-empty [L x D] sequence");
  const std::size_t L = S.rows();
  const std::size_t Hf = t.value(fwd.bias).size() / 4;
  const std::size_t Hb = t.value(bwd.bias).size() / 4;

  std::vector<Var> xs;
  xs.reserve(L);
  for (std::size_t r = 0; r < L; ++r) xs.push_back(row(t, seq, r));

  std::vector<Var> forward(L);
  LstmState st{t.constant(Tensor({Hf}, 0.0)), t.constant(Tensor({Hf}, 0.0))};
  for (std::size_t r = 0; r < L; ++r) {
    st = lstm_cell_step(t, xs[r], st.h, st.c, fwd);
    forward[r] = st.h;
  }
  std::vector<Var> backward(L);
  st = LstmState{t.constant(Tensor({Hb}, 0.0)), t.constant(Tensor({Hb}, 0.0))};
  for (std::size_t r = L; r-- > 0;) {
    st = lstm_cell_step(t, xs[r], st.h, st.c, bwd);
    backward[r] = st.h;
  }
  std::vector<Var> rows;
  rows.reserve(L);
  for (std::size_t r = 0; r < L; ++r) rows.push_back(concat(t, {forward[r], backward[r]}));
  return stack_rows(t, rows);
}

Attention attention_pool(Tape& t, Var states, Var scorer) {
  const Tensor& S = t.value(states);
  require(S.rank() == 2 && S.rows() >= 1, "attention_pool: expected a non-empty [L x S] matrix");
  require(t.value(scorer).rank() == 1 && t.value(scorer).size() == S.cols(),
          "attention_pool: scorer " + shape_of(t, scorer) + " does not match states " +
              S.shape_string());
  Var weights = softmax(t, matvec(t, states, scorer));
  Var context = vecmat(t, weights, states);
  return {context, weights};
}

}  // namespace depo::ad
