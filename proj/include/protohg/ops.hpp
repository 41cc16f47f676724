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

#ifndef PROTOHG_OPS_HPP_
#define PROTOHG_OPS_HPP_

// Differentiable operations recorded on a Tape.

#include <vector>

#include "protohg/autodiff.hpp"
#include "protohg/kernels.hpp"

namespace protohg::ops {

// x: (..., K), w: (K, O), or (O, K) when w_t. Result (..., O).
Var linear(const Var& x, const Var& w, bool w_t = false);
// Batched matmul over rank-3 operands, see kernels::bmm.
Var bmm(const Var& a, const Var& b, bool a_t = false, bool b_t = false);

Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var scale(const Var& x, double c);
Var one_minus(const Var& x);
Var sigmoid(const Var& x);
Var tanh(const Var& x);
Var relu(const Var& x);
Var softmax_last(const Var& x);

Var concat_last(const Var& a, const Var& b);
// Inserts a new axis of length n at position axis (broadcast copy).
Var expand(const Var& x, std::size_t axis, std::size_t n);
Var reshape(const Var& x, Shape shape);
// Drops `axis` by picking index i.
Var select(const Var& x, std::size_t axis, std::size_t i);
// Stacks equally shaped tensors along a new `axis`.
Var stack(const std::vector<Var>& xs, std::size_t axis);
// Row lookup: table (V, D), result (idx.size(), D).
Var gather_rows(const Var& table, const std::vector<int>& idx);
// x: (..., C), y: (...). Returns x with channel c replaced by x[..., c] - y.
Var sub_channel(const Var& x, const Var& y, std::size_t c);

Var sum(const Var& x);
// sum_i x[i] * w[i] with w constant; a smooth probe loss for gradient checks.
Var weighted_sum(const Var& x, const Tensor& w);
// Mean |pred - target| over entries with mask != 0.
Var mae_loss(const Var& pred, const Tensor& target, const Tensor& mask);

// Domain kernels, see kernels.hpp for the exact formulas.
Var gate_mix(const Var& alpha, const Var& local, const Var& global);
Var node_to_edge(const Var& x, const Var& s, const Var& we);
Var edge_to_node(const Var& he, const Var& s);
Var napl(const Var& z, const Var& e, const Var& theta);
// q: (B,Hz,Dm), k/v: (B,L,N,Dm). Optionally copies out the attention
// weights (B,Hz,N,heads,L).
Var attention(const Var& q, const Var& k, const Var& v, std::size_t heads,
              Tensor* weights_out = nullptr);

}  // namespace protohg::ops

#endif  // PROTOHG_OPS_HPP_
