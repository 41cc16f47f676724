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

#include "protohg/hggru.hpp"

#include "protohg/ops.hpp"

namespace protohg::gru {

HGGRUCell::HGGRUCell(ParameterSet& params, const std::string& prefix, const CellConfig& cfg,
                     std::mt19937_64& rng)
    : cfg_(cfg) {
  const std::size_t n_struct = cfg.share_prototypes ? 1 : 3;
  static const char* kGate[] = {"r", "u", "h"};
  for (std::size_t i = 0; i < n_struct; ++i) {
    const std::string name =
        cfg.share_prototypes ? prefix + ".struct" : prefix + ".struct_" + kGate[i];
    structures_.emplace_back(params, name, cfg.hidden_dim, cfg.time_dim, cfg.node_dim,
                             cfg.prototypes, rng);
  }
  const std::size_t in = cfg.in_dim + cfg.hidden_dim;
  reset_ = hg::HGConv(params, prefix + ".r", in, cfg.hidden_dim, cfg.node_dim, cfg.hidden_dim,
                      cfg.napl, rng);
  update_ = hg::HGConv(params, prefix + ".u", in, cfg.hidden_dim, cfg.node_dim, cfg.hidden_dim,
                       cfg.napl, rng);
  candidate_ = hg::HGConv(params, prefix + ".h", in, cfg.hidden_dim, cfg.node_dim,
                          cfg.hidden_dim, cfg.napl, rng);
}

const hg::HypergraphStructure& HGGRUCell::structure(std::size_t gate) const {
  return structures_.size() == 1 ? structures_.front() : structures_.at(gate);
}

Var HGGRUCell::step(Tape& tape, const Var& x, const Var& h_prev, const Var& time,
                    const Var& e_s, const hg::ConvSettings& settings, StepTrace* trace) const {
  struct Graph {
    Var e_n, s;
  };
  std::vector<Graph> graphs;
  for (std::size_t i = 0; i < structures_.size(); ++i) {
    auto repr = structures_[i].node_repr(tape, h_prev, e_s, time, settings.repr);
    Var s = settings.dgc ? Var{} : structures_[i].assign(tape, repr.e_n);
    if (trace && i == 0) {
      trace->alpha = repr.alpha.valid() ? repr.alpha.value() : Tensor();
      trace->s = s.valid() ? s.value() : Tensor();
    }
    graphs.push_back({repr.e_n, s});
  }
  const auto& g_r = graphs.front();
  const auto& g_u = graphs.size() > 1 ? graphs[1] : graphs.front();
  const auto& g_h = graphs.size() > 2 ? graphs[2] : graphs.front();

  Var xh = ops::concat_last(x, h_prev);
  Var r = ops::sigmoid(reset_.forward(tape, xh, g_r.e_n, g_r.s, settings));
  Var u = ops::sigmoid(update_.forward(tape, xh, g_u.e_n, g_u.s, settings));
  Var xrh = ops::concat_last(x, ops::mul(r, h_prev));
  Var cand = ops::tanh(candidate_.forward(tape, xrh, g_h.e_n, g_h.s, settings));
  return ops::add(ops::mul(u, h_prev), ops::mul(ops::one_minus(u), cand));
}

Encoding encode(Tape& tape, const HGGRUCell& cell, const Var& x, const Var& time,
                const Var& e_s, const hg::ConvSettings& settings,
                std::vector<StepTrace>* traces) {
  const auto& xs = x.shape();
  if (xs.size() != 4) throw ShapeError("encode: x must be (B, L, N, C), got " + shape_str(xs));
  const std::size_t B = xs[0], L = xs[1], N = xs[2];
  if (L == 0) throw ShapeError("encode: empty history");
  Var h = tape.constant(Tensor::zeros({B, N, cell.config().hidden_dim}));
  Encoding enc;
  for (std::size_t t = 0; t < L; ++t) {
    StepTrace st;
    h = cell.step(tape, ops::select(x, 1, t), h, ops::select(time, 1, t), e_s, settings,
                  traces ? &st : nullptr);
    if (traces) traces->push_back(std::move(st));
    enc.states.push_back(h);
  }
  enc.final_state = h;
  enc.trajectory = ops::stack(enc.states, 1);
  return enc;
}

}  // namespace protohg::gru
