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

#ifndef DEPO_TAPE_HPP
#define DEPO_TAPE_HPP

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <vector>

#include "depo/tensor.hpp"

namespace depo::ad {

// Handle to a node on a Tape. Only meaningful for the tape that issued it.
struct Var {
  std::size_t id = 0;
};

// Records primitive applications in execution order. Node ids are therefore
// a topological order, and backward() walks them once in reverse.
//
// A tape belongs to a single forward/backward pass; it is not thread-safe.
class Tape {
 public:
  using Backward = std::function<void(Tape&, std::size_t self)>;

  // Leaf that never receives a gradient.
  Var constant(Tensor value);
  // Leaf whose gradient is accumulated by backward().
  Var parameter(Tensor value);

  // Appends an op result. The node requires a gradient iff any input does;
  // otherwise the backward closure is dropped.
  Var record(Tensor value, std::initializer_list<Var> inputs, Backward backward);
  Var record(Tensor value, const std::vector<Var>& inputs, Backward backward);

  const Tensor& value(Var v) const { return nodes_[v.id].value; }
  const Tensor& value(std::size_t id) const { return nodes_[id].value; }
  bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }

  // Gradient of the last backward() loss with respect to v. All zeros if v
  // did not influence the loss.
  Tensor grad(Var v) const;

  // Gradient buffer for accumulation inside backward closures; allocated on
  // first use. Returns nullptr for nodes that do not require a gradient.
  Tensor* grad_buffer(std::size_t id);
  const Tensor* grad_if_any(std::size_t id) const;

  // Seeds d(loss)/d(loss) = 1 and propagates. Throws InvalidArgument if the
  // loss is not a single element.
  void backward(Var loss);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    Backward backward;
    bool requires_grad = false;
  };
  std::vector<Node> nodes_;
};

}  // namespace depo::ad

#endif  // DEPO_TAPE_HPP
