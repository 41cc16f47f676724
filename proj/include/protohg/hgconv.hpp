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

#ifndef PROTOHG_HGCONV_HPP_
#define PROTOHG_HGCONV_HPP_

// Prototype-guided hypergraph convolution.
//
// Per time step:
//   alpha = sigmoid(E^T W_T)                         gate, (B, D_N), shared over nodes
//   E^N   = alpha * (H_prev W_h) + (1 - alpha) * E^s  global-local node representation
//   S     = softmax(E^N P^T)                          soft incidence, rows on the simplex
//   He    = S^T (Dv^{-1/2} X^E) W_e                   node -> hyperedge
//   Xh    = ReLU(Dv^{-1/2} S De^{-1} He)              hyperedge -> node
//   Xo[i] = [Xh || X^E][i] (sum_d E^N[i,d] Theta[d])  node-adaptive output
// with Dv = diag(row sums of S) (identity under row-softmax) and
// De = diag(column sums of S). X^E is a bias-free linear embedding of the raw
// per-node input.

#include <random>
#include <string>

#include "protohg/autodiff.hpp"

namespace protohg::hg {

enum class NodeReprMode { kGlobalLocal, kLocalOnly, kGlobalOnly };

// Ablation switches that change the convolution itself.
struct ConvSettings {
  NodeReprMode repr = NodeReprMode::kGlobalLocal;
  bool dgc = false;   // pairwise adaptive graph instead of hyperedges
  bool napl = true;   // node-adaptive output weights
};

struct NodeRepr {
  Var e_n;    // (B, N, D_N)
  Var alpha;  // (B, D_N); invalid in kGlobalOnly mode
};

// h_prev (B,N,D), e_s (N,D_N), time (B,D_T), w_h (D,D_N), w_t (D_T,D_N).
NodeRepr global_local_repr(const Var& h_prev, const Var& e_s, const Var& time, const Var& w_h,
                           const Var& w_t, NodeReprMode mode = NodeReprMode::kGlobalLocal);

// S = softmax(E^N P^T): e_n (B,N,D_N), prototypes (M,D_N) -> (B,N,M).
Var assign(const Var& e_n, const Var& prototypes);

struct Degrees {
  Tensor node;  // (B, N) row sums of S
  Tensor edge;  // (B, M) column sums of S
};
Degrees degrees(const Tensor& s);

Var node_to_edge(const Var& x_e, const Var& s, const Var& w_e);
Var edge_to_node(const Var& h_e, const Var& s);
// [Xh || X^E] contracted against per-node weights generated from the pool.
Var napl_output(const Var& x_h, const Var& x_e, const Var& e_n, const Var& theta);

// Structure shared by the gates of one recurrent cell: W_h, W_T and the
// prototype bank P.
class HypergraphStructure {
 public:
  HypergraphStructure() = default;
  HypergraphStructure(ParameterSet& params, const std::string& prefix, std::size_t state_dim,
                      std::size_t time_dim, std::size_t node_dim, std::size_t prototypes,
                      std::mt19937_64& rng);

  NodeRepr node_repr(Tape& tape, const Var& h_prev, const Var& e_s, const Var& time,
                     NodeReprMode mode) const;
  Var assign(Tape& tape, const Var& e_n) const;

  Parameter& w_h() const { return *w_h_; }
  Parameter& w_t() const { return *w_t_; }
  Parameter& prototypes() const { return *p_; }

 private:
  Parameter* w_h_ = nullptr;
  Parameter* w_t_ = nullptr;
  Parameter* p_ = nullptr;
};

// One convolution (one GRU gate): input embedding W_x, hyperedge transform
// W_e, and either the weight pool Theta (D_N, 2D, D_out) or, with NAPL
// disabled, a shared output matrix (2D, D_out).
class HGConv {
 public:
  HGConv() = default;
  HGConv(ParameterSet& params, const std::string& prefix, std::size_t in_dim,
         std::size_t hidden_dim, std::size_t node_dim, std::size_t out_dim, bool napl,
         std::mt19937_64& rng);

  // x_in (B,N,D_in), e_n (B,N,D_N), s (B,N,M) -> (B,N,D_out). s is unused
  // when settings.dgc is set.
  Var forward(Tape& tape, const Var& x_in, const Var& e_n, const Var& s,
              const ConvSettings& settings) const;

  Parameter& w_x() const { return *w_x_; }
  Parameter& w_e() const { return *w_e_; }
  Parameter* theta() const { return theta_; }
  Parameter* w_o() const { return w_o_; }

 private:
  Parameter* w_x_ = nullptr;
  Parameter* w_e_ = nullptr;
  Parameter* theta_ = nullptr;
  Parameter* w_o_ = nullptr;
};

// Pairwise adaptive adjacency softmax(ReLU(E^N E^N^T)), (B, N, N).
Var dgc_adjacency(const Var& e_n);

// Full pipeline for a single convolution: node representation, assignment,
// two-stage propagation and node-adaptive output.
struct HGConvTrace {
  Tensor alpha, e_n, s;
};
Var hgconv(Tape& tape, const Var& x_in, const Var& h_prev, const Var& time, const Var& e_s,
           const HypergraphStructure& structure, const HGConv& conv,
           const ConvSettings& settings = {}, HGConvTrace* trace = nullptr);

// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
Tensor weight_init(Shape shape, std::size_t fan_in, std::mt19937_64& rng);

}  // namespace protohg::hg

#endif  // PROTOHG_HGCONV_HPP_
