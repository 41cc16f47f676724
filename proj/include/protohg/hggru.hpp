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

#ifndef PROTOHG_HGGRU_HPP_
#define PROTOHG_HGGRU_HPP_

#include <random>
#include <string>
#include <vector>

#include "protohg/hgconv.hpp"

namespace protohg::gru {

struct CellConfig {
  std::size_t in_dim = 3;
  std::size_t hidden_dim = 64;
  std::size_t time_dim = 24;
  std::size_t node_dim = 10;
  std::size_t prototypes = 6;
  bool share_prototypes = true;  // one W_h/W_T/P set for all three gates
  bool napl = true;
};

// Diagnostics captured from one cell step (first gate's structure).
struct StepTrace {
  Tensor alpha;  // (B, D_N), empty when the gate is not used
  Tensor s;      // (B, N, M), empty under the DGC ablation
};

// GRU cell whose reset, update and candidate transforms are hypergraph
// convolutions:
//   r  = sigmoid(HGConv([X || H_prev]; r))
//   u  = sigmoid(HGConv([X || H_prev]; u))
//   H~ = tanh(HGConv([X || r * H_prev]; h))
//   H  = u * H_prev + (1 - u) * H~
// The update gate multiplies the previous state, so u -> 1 freezes it.
class HGGRUCell {
 public:
  HGGRUCell() = default;
  HGGRUCell(ParameterSet& params, const std::string& prefix, const CellConfig& cfg,
            std::mt19937_64& rng);

  // x (B,N,C_in), h_prev (B,N,D), time (B,D_T), e_s (N,D_N).
  Var step(Tape& tape, const Var& x, const Var& h_prev, const Var& time, const Var& e_s,
           const hg::ConvSettings& settings, StepTrace* trace = nullptr) const;

  const CellConfig& config() const { return cfg_; }
  const hg::HypergraphStructure& structure(std::size_t gate = 0) const;
  const hg::HGConv& reset_conv() const { return reset_; }
  const hg::HGConv& update_conv() const { return update_; }
  const hg::HGConv& candidate_conv() const { return candidate_; }

 private:
  CellConfig cfg_;
  std::vector<hg::HypergraphStructure> structures_;
  hg::HGConv reset_, update_, candidate_;
};

struct Encoding {
  Var final_state;          // (B, N, D)
  Var trajectory;           // (B, L, N, D)
  std::vector<Var> states;  // L entries of (B, N, D)
};

// Unrolls the cell over the history axis from a zero state.
// x (B,L,N,C_in), time (B,L,D_T).
Encoding encode(Tape& tape, const HGGRUCell& cell, const Var& x, const Var& time,
                const Var& e_s, const hg::ConvSettings& settings,
                std::vector<StepTrace>* traces = nullptr);

}  // namespace protohg::gru

#endif  // PROTOHG_HGGRU_HPP_
