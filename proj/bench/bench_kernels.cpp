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

// OpenMP kernels against the serial scalar-loop reference. Pass
// --benchmark_filter to narrow; thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "protohg/kernels.hpp"
#include "protohg/reference.hpp"
#include "protohg/tensor.hpp"

namespace {

using protohg::Tensor;
namespace k = protohg::kernels;
namespace ref = protohg::reference;

constexpr std::size_t kBatch = 16, kEdges = 6, kDim = 64, kNodeDim = 10;

Tensor rnd(protohg::Shape s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return Tensor::uniform(std::move(s), -1.0, 1.0, rng);
}

Tensor simplex(std::size_t nodes, std::uint64_t seed) {
  Tensor s = rnd({kBatch, nodes, kEdges}, seed);
  std::vector<double> tmp(s.size());
  k::softmax_rows(s.data(), tmp.data(), kBatch * nodes, kEdges);
  s.vec() = tmp;
  return s;
}

void BM_NodeToEdgeKernel(benchmark::State& st) {
  const std::size_t n = st.range(0);
  Tensor x = rnd({kBatch, n, kDim}, 1), s = simplex(n, 2), we = rnd({kDim, kDim}, 3);
  std::vector<double> agg(kBatch * kEdges * kDim), he(agg.size());
  for (auto _ : st) {
    k::node_to_edge({kBatch, n, kEdges, kDim}, x.data(), s.data(), we.data(), agg.data(),
                    he.data());
    benchmark::DoNotOptimize(he.data());
  }
}

void BM_NodeToEdgeReference(benchmark::State& st) {
  const std::size_t n = st.range(0);
  Tensor x = rnd({kBatch, n, kDim}, 1), s = simplex(n, 2), we = rnd({kDim, kDim}, 3);
  for (auto _ : st) benchmark::DoNotOptimize(ref::node_to_edge(x, s, we));
}

void BM_EdgeToNodeKernel(benchmark::State& st) {
  const std::size_t n = st.range(0);
  Tensor he = rnd({kBatch, kEdges, kDim}, 4), s = simplex(n, 5);
  std::vector<double> pre(kBatch * n * kDim), xh(pre.size());
  for (auto _ : st) {
    k::edge_to_node({kBatch, n, kEdges, kDim}, he.data(), s.data(), pre.data(), xh.data());
    benchmark::DoNotOptimize(xh.data());
  }
}

void BM_EdgeToNodeReference(benchmark::State& st) {
  const std::size_t n = st.range(0);
  Tensor he = rnd({kBatch, kEdges, kDim}, 4), s = simplex(n, 5);
  for (auto _ : st) benchmark::DoNotOptimize(ref::edge_to_node(he, s));
}

void BM_NaplKernel(benchmark::State& st) {
  const std::size_t n = st.range(0);
  Tensor z = rnd({kBatch, n, 2 * kDim}, 6), e = rnd({kBatch, n, kNodeDim}, 7),
         th = rnd({kNodeDim, 2 * kDim, kDim}, 8);
  std::vector<double> out(kBatch * n * kDim);
  for (auto _ : st) {
    k::napl({kBatch, n, kNodeDim, 2 * kDim, kDim}, z.data(), e.data(), th.data(), out.data());
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_NaplReference(benchmark::State& st) {
  const std::size_t n = st.range(0);
  Tensor xh = rnd({kBatch, n, kDim}, 6), xe = rnd({kBatch, n, kDim}, 9),
         e = rnd({kBatch, n, kNodeDim}, 7), th = rnd({kNodeDim, 2 * kDim, kDim}, 8);
  for (auto _ : st) benchmark::DoNotOptimize(ref::napl(xh, xe, e, th));
}

void BM_AttentionKernel(benchmark::State& st) {
  const std::size_t n = st.range(0), L = 12, H = 12, heads = 4;
  Tensor q = rnd({kBatch, H, kDim}, 10), kk = rnd({kBatch, L, n, kDim}, 11),
         v = rnd({kBatch, L, n, kDim}, 12);
  std::vector<double> ctx(kBatch * H * n * kDim), w(kBatch * H * n * heads * L);
  for (auto _ : st) {
    k::attention({kBatch, H, L, n, kDim, heads}, q.data(), kk.data(), v.data(), ctx.data(),
                 w.data());
    benchmark::DoNotOptimize(ctx.data());
  }
}

void BM_MatmulKernel(benchmark::State& st) {
  const std::size_t rows = st.range(0) * kBatch;
  Tensor x = rnd({rows, kDim}, 13), w = rnd({kDim, kDim}, 14);
  std::vector<double> y(rows * kDim);
  for (auto _ : st) {
    k::matmul(x.data(), w.data(), y.data(), rows, kDim, kDim, false);
    benchmark::DoNotOptimize(y.data());
  }
}

}  // namespace

BENCHMARK(BM_NodeToEdgeKernel)->Arg(170)->Arg(307);
BENCHMARK(BM_NodeToEdgeReference)->Arg(170)->Arg(307);
BENCHMARK(BM_EdgeToNodeKernel)->Arg(170)->Arg(307);
BENCHMARK(BM_EdgeToNodeReference)->Arg(170)->Arg(307);
BENCHMARK(BM_NaplKernel)->Arg(170)->Arg(307);
BENCHMARK(BM_NaplReference)->Arg(170)->Arg(307);
BENCHMARK(BM_AttentionKernel)->Arg(170)->Arg(307);
BENCHMARK(BM_MatmulKernel)->Arg(170)->Arg(307);

BENCHMARK_MAIN();
