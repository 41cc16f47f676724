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

#ifndef PROTOHG_OPTIM_HPP_
#define PROTOHG_OPTIM_HPP_

#include <vector>

#include "protohg/autodiff.hpp"

namespace protohg {

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  explicit Adam(ParameterSet& params, AdamOptions opts = {});

  // One update from the gradients currently held by the parameters.
  void step();
  void zero_grad() { params_.zero_grad(); }
  std::size_t steps() const { return t_; }
  AdamOptions& options() { return opts_; }

 private:
  ParameterSet& params_;
  AdamOptions opts_;
  std::vector<Tensor> m_, v_;
  std::size_t t_ = 0;
};

// Global L2 norm over all gradients.
double grad_norm(const ParameterSet& params);
// Rescales gradients so their global norm is at most max_norm. Returns the
// norm before clipping.
double clip_grad_norm(ParameterSet& params, double max_norm);

}  // namespace protohg

#endif  // PROTOHG_OPTIM_HPP_
