/*
 * Copyright 2026 The protohg Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef PROTOHG_GRADCHECK_HPP_
#define PROTOHG_GRADCHECK_HPP_

#include <functional>
#include <string>
#include <vector>

#include "protohg/autodiff.hpp"

namespace protohg {

struct GradCheckOptions {
  double eps = 1e-5;
  double tol = 1e-4;
  // Entries compared with |a - n| / max(|a|, |n|, floor).
  double floor = 1e-6;
  // Upper bound on checked entries per parameter; 0 checks all of them.
  std::size_t max_entries_per_param = 0;
  std::uint64_t seed = 7;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  std::string worst;  // "<param>[<flat index>]"
  std::size_t checked = 0;
  bool passed = true;
};

// Builds the scalar loss on a fresh tape. Must be deterministic.
using LossBuilder = std::function<Var(Tape&)>;

// Compares reverse-mode gradients of `loss` with central differences for
// every parameter in `params`.
GradCheckReport grad_check(ParameterSet& params, const LossBuilder& loss,
                           const GradCheckOptions& opts = {});
GradCheckReport grad_check(const std::vector<Parameter*>& params, const LossBuilder& loss,
                           const GradCheckOptions& opts = {});

}  // namespace protohg

#endif  // PROTOHG_GRADCHECK_HPP_
