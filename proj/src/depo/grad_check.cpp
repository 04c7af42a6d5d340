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

#include "depo/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "depo/common.hpp"

namespace depo::ad {
namespace {

double evaluate(const ScalarBuilder& f, const std::vector<Tensor>& params) {
  Tape tape;
  std::vector<Var> vars;
  vars.reserve(params.size());
  for (const Tensor& p : params) vars.push_back(tape.constant(p));
  const Tensor& out = tape.value(f(tape, vars));
  if (out.size() != 1) throw InvalidArgument("grad_check: function must return a scalar");
  if (!std::isfinite(out[0])) throw DataError("grad_check: function value is not finite");
  return out[0];
}

}  // namespace

GradCheckResult grad_check(const ScalarBuilder& f, const std::vector<Tensor>& params, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("grad_check: eps must be positive");

  Tape tape;
  std::vector<Var> vars;
  vars.reserve(params.size());
  for (const Tensor& p : params) vars.push_back(tape.parameter(p));
  Var out = f(tape, vars);
  if (!std::isfinite(tape.value(out)[0])) {
    throw DataError("grad_check: function value is not finite");
  }
  tape.backward(out);

  GradCheckResult result;
  std::vector<Tensor> probe = params;
  for (std::size_t p = 0; p < params.size(); ++p) {
    const Tensor analytic = tape.grad(vars[p]);
    for (std::size_t i = 0; i < params[p].size(); ++i) {
      const double orig = params[p][i];
      probe[p][i] = orig + eps;
      const double up = evaluate(f, probe);
      probe[p][i] = orig - eps;
      const double down = evaluate(f, probe);
      probe[p][i] = orig;
      const double numeric = (up - down) / (2.0 * eps);
      const double a = analytic[i];
      const double rel = std::abs(a - numeric) / std::max({1.0, std::abs(a), std::abs(numeric)});
      ++result.coordinates;
      if (rel > result.max_rel_error) {
        result.max_rel_error = rel;
        result.worst_param = p;
        result.worst_index = i;
      }
    }
  }
  return result;
}

}  // namespace depo::ad
