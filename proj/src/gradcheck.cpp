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

#include "protohg/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace protohg {

GradCheckReport grad_check(ParameterSet& params, const LossBuilder& loss,
                           const GradCheckOptions& opts) {
  return grad_check(params.all(), loss, opts);
}

GradCheckReport grad_check(const std::vector<Parameter*>& params, const LossBuilder& loss,
                           const GradCheckOptions& opts) {
  for (Parameter* p : params) p->zero_grad();
  {
    Tape tape;
    Var l = loss(tape);
    tape.backward(l);
  }
  auto eval = [&] {
    Tape tape;
    return loss(tape).value()[0];
  };

  GradCheckReport rep;
  std::mt19937_64 rng(opts.seed);
  for (Parameter* p : params) {
    std::vector<std::size_t> idx(p->value.size());
    std::iota(idx.begin(), idx.end(), 0);
    if (opts.max_entries_per_param && idx.size() > opts.max_entries_per_param) {
      std::shuffle(idx.begin(), idx.end(), rng);
      idx.resize(opts.max_entries_per_param);
      std::sort(idx.begin(), idx.end());
    }
    for (std::size_t i : idx) {
      const double orig = p->value[i];
      p->value[i] = orig + opts.eps;
      const double up = eval();
      p->value[i] = orig - opts.eps;
      const double down = eval();
      p->value[i] = orig;
      const double numeric = (up - down) / (2.0 * opts.eps);
      const double analytic = p->grad[i];
      const double abs_err = std::fabs(analytic - numeric);
      const double rel =
          abs_err / std::max({std::fabs(analytic), std::fabs(numeric), opts.floor});
      ++rep.checked;
      rep.max_abs_error = std::max(rep.max_abs_error, abs_err);
      if (rel > rep.max_rel_error || rep.worst.empty()) {
        rep.max_rel_error = rel;
        rep.worst = p->name + "[" + std::to_string(i) + "]";
      }
    }
  }
  rep.passed = rep.max_rel_error <= opts.tol;
  return rep;
}

}  // namespace protohg
