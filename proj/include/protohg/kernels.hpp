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

#ifndef PROTOHG_KERNELS_HPP_
#define PROTOHG_KERNELS_HPP_

// OpenMP-parallel forward/backward kernels on raw row-major buffers.
//
// Every parallel loop writes a disjoint slice of its output and performs any
// reduction serially inside one iteration, so results are bitwise identical
// for every thread count. Backward kernels accumulate (+=) into their
// gradient outputs.

#include <cstddef>

namespace protohg::kernels {

// Y[r,o] = sum_k X[r,k] W[k,o]; with w_t, W is stored (O,K).
void matmul(const double* x, const double* w, double* y, std::size_t rows, std::size_t k,
            std::size_t o, bool w_t);
void matmul_backward_input(const double* dy, const double* w, double* dx, std::size_t rows,
                           std::size_t k, std::size_t o, bool w_t);
void matmul_backward_weight(const double* x, const double* dy, double* dw, std::size_t rows,
                            std::size_t k, std::size_t o, bool w_t);

// Batched C[b] = op(A[b]) op(B[b]) with op = transpose when the flag is set.
// Logical shapes: op(A[b]) is (p,q), op(B[b]) is (q,r).
void bmm(const double* a, const double* b, double* c, std::size_t batch, std::size_t p,
         std::size_t q, std::size_t r, bool a_t, bool b_t);
void bmm_backward(const double* a, const double* b, const double* dc, double* da, double* db,
                  std::size_t batch, std::size_t p, std::size_t q, std::size_t r, bool a_t,
                  bool b_t);

void softmax_rows(const double* x, double* y, std::size_t rows, std::size_t cols);
void softmax_rows_backward(const double* y, const double* dy, double* dx, std::size_t rows,
                           std::size_t cols);

// Global-local node representation with a per-sample gate broadcast over
// nodes: out[b,n,:] = alpha[b,:] * local[b,n,:] + (1 - alpha[b,:]) * global[n,:].
struct GateMixDims {
  std::size_t batch, nodes, dim;
};
void gate_mix(const GateMixDims& d, const double* alpha, const double* local,
              const double* global, double* out);
void gate_mix_backward(const GateMixDims& d, const double* alpha, const double* local,
                       const double* global, const double* dout, double* dalpha,
                       double* dlocal, double* dglobal);

// Node -> hyperedge aggregation:
//   agg[b,m,:] = sum_n S[b,n,m] dv[b,n]^{-1/2} X[b,n,:],  dv[b,n] = sum_m S[b,n,m]
//   He[b] = agg[b] We
// agg is returned for reuse in the backward pass.
struct HyperDims {
  std::size_t batch, nodes, edges, dim;
};
void node_to_edge(const HyperDims& d, const double* x, const double* s, const double* we,
                  double* agg, double* he);
void node_to_edge_backward(const HyperDims& d, const double* x, const double* s,
                           const double* we, const double* agg, const double* dhe, double* dx,
                           double* ds, double* dwe);

// Hyperedge -> node propagation:
//   pre[b,n,:] = dv[b,n]^{-1/2} sum_m S[b,n,m] He[b,m,:] / de[b,m]
//   Xh = ReLU(pre),  de[b,m] = sum_n S[b,n,m]
// Throws std::domain_error when a hyperedge has no membership mass.
void edge_to_node(const HyperDims& d, const double* he, const double* s, double* pre,
                  double* xh);
void edge_to_node_backward(const HyperDims& d, const double* he, const double* s,
                           const double* pre, const double* dxh, double* dhe, double* ds);

// Node-adaptive output: out[b,n,o] = sum_d E[b,n,d] sum_k Z[b,n,k] Theta[d,k,o].
struct NaplDims {
  std::size_t batch, nodes, node_dim, in, out;
};
void napl(const NaplDims& d, const double* z, const double* e, const double* theta, double* out);
void napl_backward(const NaplDims& d, const double* z, const double* e, const double* theta,
                   const double* dout, double* dz, double* de, double* dtheta);

// Multi-head cross attention with node-agnostic queries.
//   q: (B,Hz,Dm)  k,v: (B,L,N,Dm)  ctx: (B,Hz,N,Dm)  weights: (B,Hz,N,heads,L)
struct AttentionDims {
  std::size_t batch, horizon, history, nodes, model_dim, heads;
};
void attention(const AttentionDims& d, const double* q, const double* k, const double* v,
               double* ctx, double* weights);
void attention_backward(const AttentionDims& d, const double* q, const double* k,
                        const double* v, const double* weights, const double* dctx, double* dq,
                        double* dk, double* dv);

}  // namespace protohg::kernels

#endif  // PROTOHG_KERNELS_HPP_
