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

#include "protohg/optim.hpp"

#include <cmath>

namespace protohg {

Adam::Adam(ParameterSet& params, AdamOptions opts) : params_(params), opts_(opts) {
  for (const Parameter* p : params_.all()) {
    m_.push_back(Tensor::zeros(p->value.shape()));
    v_.push_back(Tensor::zeros(p->value.shape()));
  }
}

void Adam::step() {
  ++t_;
  const double bc1 = 1.0 - std::pow(opts_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(opts_.beta2, static_cast<double>(t_));
  auto all = params_.all();
  for (std::size_t k = 0; k < all.size(); ++k) {
    Parameter& p = *all[k];
    Tensor& m = m_[k];
    Tensor& v = v_[k];
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double g = p.grad[i];
      m[i] = opts_.beta1 * m[i] + (1.0 - opts_.beta1) * g;
      v[i] = opts_.beta2 * v[i] + (1.0 - opts_.beta2) * g * g;
      const double mh = m[i] / bc1;
      const double vh = v[i] / bc2;
      p.value[i] -= opts_.lr * mh / (std::sqrt(vh) + opts_.eps);
    }
  }
}

double grad_norm(const ParameterSet& params) {
  double sq = 0.0;
  for (const Parameter* p : params.all()) {
    for (double g : p->grad.vec()) sq += g * g;
  }
  return std::sqrt(sq);
}

double clip_grad_norm(ParameterSet& params, double max_norm) {
  const double norm = grad_norm(params);
  if (max_norm > 0.0 && norm > max_norm) {
    const double c = max_norm / norm;
    for (Parameter* p : params.all()) {
      for (std::size_t i = 0; i < p->grad.size(); ++i) p->grad[i] *= c;
    }
  }
  return norm;
}

}  // namespace protohg
