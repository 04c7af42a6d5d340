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

#ifndef DEPO_GRAD_CHECK_HPP
#define DEPO_GRAD_CHECK_HPP

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "depo/tape.hpp"

namespace depo::ad {

// Builds a scalar on the tape from parameter leaves. Must be deterministic:
// grad_check calls it once for the analytic pass and twice per coordinate.
using ScalarBuilder = std::function<Var(Tape&, std::span<const Var>)>;

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t worst_param = 0;
  std::size_t worst_index = 0;
  std::size_t coordinates = 0;
};

// Compares reverse-mode gradients against central differences
// (f(p+eps) - f(p-eps)) / (2 eps) coordinate by coordinate, using
// |a - n| / max(1, |a|, |n|). Throws DataError if f is non-finite anywhere.
GradCheckResult grad_check(const ScalarBuilder& f, const std::vector<Tensor>& params,
                           double eps = 1e-5);

}  // namespace depo::ad

#endif  // DEPO_GRAD_CHECK_HPP
