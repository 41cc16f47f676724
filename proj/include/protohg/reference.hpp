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

#ifndef PROTOHG_REFERENCE_HPP_
#define PROTOHG_REFERENCE_HPP_

// Serial scalar-loop implementations of the forward equations. They share
// nothing with the kernels beyond the Tensor container and exist only as
// oracles for tests, the verify command and the benchmark.

#include <vector>

#include "protohg/tensor.hpp"

namespace protohg::reference {

// alpha = sigmoid(time W_T), time (B,D_T), W_T (D_T,D_N) -> (B,D_N)
Tensor gate(const Tensor& time, const Tensor& w_t);
// E^N = alpha * (H W_h) + (1 - alpha) * E^s -> (B,N,D_N)
Tensor node_repr(const Tensor& h_prev, const Tensor& e_s, const Tensor& time, const Tensor& w_h,
                 const Tensor& w_t);
// S = row softmax of E^N P^T -> (B,N,M)
Tensor assignment(const Tensor& e_n, const Tensor& prototypes);
// He = S^T Dv^{-1/2} X^E W_e -> (B,M,D)
Tensor node_to_edge(const Tensor& x_e, const Tensor& s, const Tensor& w_e);
// Xh = ReLU(Dv^{-1/2} S De^{-1} He) -> (B,N,D)
Tensor edge_to_node(const Tensor& he, const Tensor& s);
// out[n] = [Xh || X^E][n] (sum_d E^N[n,d] Theta[d]) -> (B,N,O)
Tensor napl(const Tensor& x_h, const Tensor& x_e, const Tensor& e_n, const Tensor& theta);
// A = row softmax of ReLU(E^N E^N^T) -> (B,N,N)
Tensor dgc_adjacency(const Tensor& e_n);

struct ConvWeights {
  Tensor w_x, w_e, theta;
};
struct StructureWeights {
  Tensor w_h, w_t, p;
};

// One hypergraph convolution: x_in (B,N,C), h_prev (B,N,D), time (B,D_T),
// e_s (N,D_N).
Tensor hgconv(const Tensor& x_in, const Tensor& h_prev, const Tensor& time, const Tensor& e_s,
              const StructureWeights& st, const ConvWeights& cw);

struct CellWeights {
  StructureWeights structure;
  ConvWeights r, u, h;
};

Tensor cell_step(const Tensor& x, const Tensor& h_prev, const Tensor& time, const Tensor& e_s,
                 const CellWeights& w);

struct TqaWeights {
  Tensor w_q, w_tp, w_k, w_v;
};

// et_f (B,H,D_T), et_p (B,L,D_T), h_p (B,L,N,D) -> (B,H,N,D). Optionally
// returns the weights (B,H,N,heads,L).
Tensor tqa(const Tensor& et_f, const Tensor& et_p, const Tensor& h_p, const TqaWeights& w,
           std::size_t heads, Tensor* weights = nullptr);

}  // namespace protohg::reference

#endif  // PROTOHG_REFERENCE_HPP_
