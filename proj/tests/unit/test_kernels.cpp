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

#include <gtest/gtest.h>
#include <omp.h>

#include "protohg/kernels.hpp"
#include "support.hpp"

namespace protohg {
namespace {

using testing::rnd;

TEST(Kernels, MatmulMatchesNaiveLoop) {
  std::mt19937_64 rng(1);
  const std::size_t R = 7, K = 5, O = 3;
  Tensor x = rnd({R, K}, rng), w = rnd({K, O}, rng), wt({O, K});
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t o = 0; o < O; ++o) wt[o * K + k] = w[k * O + o];
  Tensor y({R, O}), y2({R, O});
  kernels::matmul(x.data(), w.data(), y.data(), R, K, O, false);
  kernels::matmul(x.data(), wt.data(), y2.data(), R, K, O, true);
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t o = 0; o < O; ++o) {
      double acc = 0;
      for (std::size_t k = 0; k < K; ++k) acc += x[r * K + k] * w[k * O + o];
      EXPECT_NEAR(y[r * O + o], acc, 1e-12);
      EXPECT_NEAR(y2[r * O + o], acc, 1e-12);
    }
}

TEST(Kernels, EmptyHyperedgeIsRejected) {
  // Node-to-hyperedge masses of zero make D_e singular.
  Tensor s({1, 2, 2}, std::vector<double>{1, 0, 1, 0});
  Tensor he({1, 2, 1}, std::vector<double>{1, 1});
  Tensor pre({1, 2, 1}), xh({1, 2, 1});
  EXPECT_THROW(kernels::edge_to_node({1, 2, 2, 1}, he.data(), s.data(), pre.data(), xh.data()),
               std::domain_error);
}

// Forward and backward of the full model are bitwise identical for any
// thread count.
TEST(Kernels, ThreadCountDoesNotChangeResults) {
  auto run = [](int threads) {
    omp_set_num_threads(threads);
    auto mc = testing::tiny_model(2);
    mc.nodes = 5;
    mc.hidden = 8;
    model::Forecaster m(mc, 3);
    auto batch = testing::synthetic_batch(5, 3, 2, {0, 4, 9, 11});
    Tape t;
    auto out = m.forward(t, batch);
    t.backward(ops::mae_loss(out.forecast, batch.y, batch.y_mask));
    std::vector<double> all = out.forecast.value().vec();
    for (auto* p : m.params().all()) all.insert(all.end(), p->grad.vec().begin(), p->grad.vec().end());
    return all;
  };
  const int saved = omp_get_max_threads();
  const auto one = run(1);
  const auto four = run(4);
  omp_set_num_threads(saved);
  ASSERT_EQ(one.size(), four.size());
  for (std::size_t i = 0; i < one.size(); ++i) ASSERT_EQ(one[i], four[i]) << i;
}

}  // namespace
}  // namespace protohg
