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

#include "protohg/hgconv.hpp"

#include <cmath>

#include "protohg/ops.hpp"

namespace protohg::hg {

Tensor weight_init(Shape shape, std::size_t fan_in, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  return Tensor::uniform(std::move(shape), -bound, bound, rng);
}

NodeRepr global_local_repr(const Var& h_prev, const Var& e_s, const Var& time, const Var& w_h,
                           const Var& w_t, NodeReprMode mode) {
  switch (mode) {
    case NodeReprMode::kLocalOnly:
      return {ops::linear(h_prev, w_h), Var{}};
    case NodeReprMode::kGlobalOnly:
      return {ops::expand(e_s, 0, h_prev.shape().at(0)), Var{}};
    case NodeReprMode::kGlobalLocal:
      break;
  }
  Var alpha = ops::sigmoid(ops::linear(time, w_t));
  Var local = ops::linear(h_prev, w_h);
  return {ops::gate_mix(alpha, local, e_s), alpha};
}

Var assign(const Var& e_n, const Var& prototypes) {
  return ops::softmax_last(ops::linear(e_n, prototypes, /*w_t=*/true));
}

Degrees degrees(const Tensor& s) {
  if (s.rank() != 3) throw ShapeError("degrees: expected (B, N, M), got " + shape_str(s.shape()));
  const std::size_t B = s.dim(0), N = s.dim(1), M = s.dim(2);
  Degrees d{Tensor({B, N}), Tensor({B, M})};
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t n = 0; n < N; ++n)
      for (std::size_t m = 0; m < M; ++m) {
        const double v = s[(b * N + n) * M + m];
        d.node[b * N + n] += v;
        d.edge[b * M + m] += v;
      }
  return d;
}

Var node_to_edge(const Var& x_e, const Var& s, const Var& w_e) {
  return ops::node_to_edge(x_e, s, w_e);
}

Var edge_to_node(const Var& h_e, const Var& s) { return ops::edge_to_node(h_e, s); }

Var napl_output(const Var& x_h, const Var& x_e, const Var& e_n, const Var& theta) {
  return ops::napl(ops::concat_last(x_h, x_e), e_n, theta);
}

Var dgc_adjacency(const Var& e_n) {
  return ops::softmax_last(ops::relu(ops::bmm(e_n, e_n, false, true)));
}

HypergraphStructure::HypergraphStructure(ParameterSet& params, const std::string& prefix,
                                         std::size_t state_dim, std::size_t time_dim,
                                         std::size_t node_dim, std::size_t prototypes,
                                         std::mt19937_64& rng) {
  if (prototypes == 0) throw std::invalid_argument("prototype bank needs M >= 1");
  w_h_ = &params.create(prefix + ".W_h", weight_init({state_dim, node_dim}, state_dim, rng));
  w_t_ = &params.create(prefix + ".W_T", weight_init({time_dim, node_dim}, time_dim, rng));
  p_ = &params.create(prefix + ".P", weight_init({prototypes, node_dim}, node_dim, rng));
}

NodeRepr HypergraphStructure::node_repr(Tape& tape, const Var& h_prev, const Var& e_s,
                                        const Var& time, NodeReprMode mode) const {
  return global_local_repr(h_prev, e_s, time, tape.param(*w_h_), tape.param(*w_t_), mode);
}

Var HypergraphStructure::assign(Tape& tape, const Var& e_n) const {
  return hg::assign(e_n, tape.param(*p_));
}

HGConv::HGConv(ParameterSet& params, const std::string& prefix, std::size_t in_dim,
               std::size_t hidden_dim, std::size_t node_dim, std::size_t out_dim, bool napl,
               std::mt19937_64& rng) {
  w_x_ = &params.create(prefix + ".W_x", weight_init({in_dim, hidden_dim}, in_dim, rng));
  w_e_ = &params.create(prefix + ".W_e", weight_init({hidden_dim, hidden_dim}, hidden_dim, rng));
  const std::size_t cat = 2 * hidden_dim;
  if (napl) {
    theta_ = &params.create(prefix + ".theta", weight_init({node_dim, cat, out_dim}, cat, rng));
  } else {
    w_o_ = &params.create(prefix + ".W_o", weight_init({cat, out_dim}, cat, rng));
  }
}

Var HGConv::forward(Tape& tape, const Var& x_in, const Var& e_n, const Var& s,
                    const ConvSettings& settings) const {
  Var x_e = ops::linear(x_in, tape.param(*w_x_));
  Var x_h;
  if (settings.dgc) {
    Var adj = dgc_adjacency(e_n);
    x_h = ops::relu(ops::bmm(adj, ops::linear(x_e, tape.param(*w_e_))));
  } else {
    Var h_e = node_to_edge(x_e, s, tape.param(*w_e_));
    x_h = edge_to_node(h_e, s);
  }
  if (theta_ && settings.napl) return napl_output(x_h, x_e, e_n, tape.param(*theta_));
  if (!w_o_) throw std::logic_error("HGConv built with NAPL cannot run without it");
  return ops::linear(ops::concat_last(x_h, x_e), tape.param(*w_o_));
}

Var hgconv(Tape& tape, const Var& x_in, const Var& h_prev, const Var& time, const Var& e_s,
           const HypergraphStructure& structure, const HGConv& conv,
           const ConvSettings& settings, HGConvTrace* trace) {
  NodeRepr repr = structure.node_repr(tape, h_prev, e_s, time, settings.repr);
  Var s = settings.dgc ? Var{} : structure.assign(tape, repr.e_n);
  Var out = conv.forward(tape, x_in, repr.e_n, s, settings);
  if (trace) {
    if (repr.alpha.valid()) trace->alpha = repr.alpha.value();
    trace->e_n = repr.e_n.value();
    if (s.valid()) trace->s = s.value();
  }
  return out;
}

}  // namespace protohg::hg
