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

#include <cmath>

#include "protohg/gradcheck.hpp"
#include "protohg/hgconv.hpp"
#include "protohg/ops.hpp"
#include "protohg/reference.hpp"
#include "support.hpp"

namespace protohg::hg {
namespace {

using testing::eval;
using testing::rnd;

double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void expect_close(const Tensor& a, const Tensor& b, double tol) {
  ASSERT_EQ(a.shape(), b.shape());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], tol) << "at " << i;
}

TEST(Gate, SaturatesToLocalOrGlobal) {
  std::mt19937_64 rng(1);
  Tensor h = rnd({1, 3, 2}, rng), es = rnd({3, 2}, rng), wh = rnd({2, 2}, rng);
  for (double w : {60.0, -60.0}) {
    Tensor time({1, 1}, 1.0), wt({1, 2}, w);
    Tensor e = eval([&](Tape& t) {
      return global_local_repr(t.constant(h), t.constant(es), t.constant(time), t.constant(wh),
                               t.constant(wt))
          .e_n;
    });
    Tensor local = eval([&](Tape& t) { return ops::linear(t.constant(h), t.constant(wh)); });
    for (std::size_t n = 0; n < 3; ++n)
      for (std::size_t d = 0; d < 2; ++d)
        EXPECT_NEAR(e[n * 2 + d], w > 0 ? local[n * 2 + d] : es[n * 2 + d], 1e-12);
  }
}

TEST(Gate, FixedPointWhenLocalEqualsGlobal) {
  std::mt19937_64 rng(2);
  Tensor es = rnd({3, 2}, rng), wt = rnd({2, 2}, rng), time = rnd({1, 2}, rng);
  Tensor h({1, 3, 2});
  h.vec().assign(es.vec().begin(), es.vec().end());
  Tensor eye({2, 2}, std::vector<double>{1, 0, 0, 1});
  Tensor e = eval([&](Tape& t) {
    return global_local_repr(t.constant(h), t.constant(es), t.constant(time), t.constant(eye),
                             t.constant(wt))
        .e_n;
  });
  for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(e[i], es[i], 1e-15);
}

TEST(Gate, MatchesScalarLoop) {
  std::mt19937_64 rng(3);
  Tensor h = rnd({2, 4, 3}, rng), es = rnd({4, 2}, rng), time = rnd({2, 5}, rng),
         wh = rnd({3, 2}, rng), wt = rnd({5, 2}, rng);
  Tensor e = eval([&](Tape& t) {
    return global_local_repr(t.constant(h), t.constant(es), t.constant(time), t.constant(wh),
                             t.constant(wt))
        .e_n;
  });
  for (std::size_t b = 0; b < 2; ++b)
    for (std::size_t d = 0; d < 2; ++d) {
      double z = 0;
      for (std::size_t k = 0; k < 5; ++k) z += time[b * 5 + k] * wt[k * 2 + d];
      const double a = sig(z);
      for (std::size_t n = 0; n < 4; ++n) {
        double loc = 0;
        for (std::size_t k = 0; k < 3; ++k) loc += h[(b * 4 + n) * 3 + k] * wh[k * 2 + d];
        EXPECT_NEAR(e[(b * 4 + n) * 2 + d], a * loc + (1 - a) * es[n * 2 + d], 1e-12);
      }
    }
}

TEST(Assignment, SimplexRowsAndDegenerateBanks) {
  std::mt19937_64 rng(4);
  Tensor en = rnd({2, 5, 3}, rng, 3.0);
  Tensor one = rnd({1, 3}, rng);
  Tensor s1 = eval([&](Tape& t) { return assign(t.constant(en), t.constant(one)); });
  for (double v : s1.vec()) EXPECT_EQ(v, 1.0);  // M = 1
  Tensor p({3, 3});
  for (std::size_t m = 0; m < 3; ++m)
    for (std::size_t d = 0; d < 3; ++d) p[m * 3 + d] = one[d];
  Tensor s3 = eval([&](Tape& t) { return assign(t.constant(en), t.constant(p)); });
  for (double v : s3.vec()) EXPECT_NEAR(v, 1.0 / 3.0, 1e-15);  // identical prototypes
  Tensor zero_en({1, 2, 3});
  Tensor sz = eval([&](Tape& t) { return assign(t.constant(zero_en), t.constant(rnd({4, 3}, rng))); });
  for (double v : sz.vec()) EXPECT_EQ(v, 0.25);
  Tensor sr = eval([&](Tape& t) { return assign(t.constant(en), t.constant(rnd({4, 3}, rng))); });
  auto deg = degrees(sr);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_NEAR(deg.node[i], 1.0, 1e-12);
  for (std::size_t b = 0; b < 2; ++b) {
    double tot = 0;
    for (std::size_t m = 0; m < 4; ++m) tot += deg.edge[b * 4 + m];
    EXPECT_NEAR(tot, 5.0, 1e-12);
  }
  for (double v : sr.vec()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Propagation, NodeToEdgeExamples) {
  // One hyperedge holding every node with S = 1 sums the embedded inputs.
  Tensor x({1, 3, 2}, std::vector<double>{1, 2, 3, 4, 5, 6});
  Tensor s({1, 3, 1}, 1.0), eye({2, 2}, std::vector<double>{1, 0, 0, 1});
  Tensor he = eval([&](Tape& t) {
    return node_to_edge(t.constant(x), t.constant(s), t.constant(eye));
  });
  EXPECT_EQ(he.vec(), (std::vector<double>{9, 12}));
  // Hard assignment: each node feeds only its own edge.
  Tensor hard({1, 3, 2}, std::vector<double>{1, 0, 0, 1, 1, 0});
  Tensor he2 = eval([&](Tape& t) {
    return node_to_edge(t.constant(x), t.constant(hard), t.constant(eye));
  });
  EXPECT_EQ(he2.vec(), (std::vector<double>{6, 8, 3, 4}));
}

TEST(Propagation, EdgeToNodeExamples) {
  Tensor s({1, 2, 2}, std::vector<double>{0.5, 0.5, 0.5, 0.5});
  Tensor he({1, 2, 1}, std::vector<double>{2, 4});
  // De = (1, 1), so every node receives 0.5*2 + 0.5*4.
  Tensor xh = eval([&](Tape& t) { return edge_to_node(t.constant(he), t.constant(s)); });
  EXPECT_EQ(xh.vec(), (std::vector<double>{3, 3}));
  Tensor neg({1, 2, 1}, std::vector<double>{-2, -4});
  Tensor z = eval([&](Tape& t) { return edge_to_node(t.constant(neg), t.constant(s)); });
  EXPECT_EQ(z.vec(), (std::vector<double>{0, 0}));
  Tensor empty_edge({1, 2, 2}, std::vector<double>{1, 0, 1, 0});
  Tape t;
  EXPECT_THROW(edge_to_node(t.constant(he), t.constant(empty_edge)), std::domain_error);
}

TEST(Propagation, MatchesReferenceOnRandomInputs) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    Tensor x = rnd({2, 6, 3}, rng), we = rnd({3, 3}, rng), logits = rnd({2, 6, 4}, rng, 2.0);
    Tensor s = eval([&](Tape& t) { return ops::softmax_last(t.constant(logits)); });
    Tensor he = eval([&](Tape& t) {
      return node_to_edge(t.constant(x), t.constant(s), t.constant(we));
    });
    expect_close(he, reference::node_to_edge(x, s, we), 1e-12);
    Tensor xh = eval([&](Tape& t) { return edge_to_node(t.constant(he), t.constant(s)); });
    expect_close(xh, reference::edge_to_node(he, s), 1e-12);
  }
}

TEST(Napl, ZeroPoolAndOneHotSelection) {
  std::mt19937_64 rng(6);
  Tensor xh = rnd({1, 2, 2}, rng), xe = rnd({1, 2, 2}, rng);
  Tensor theta({2, 4, 3});
  Tensor en({1, 2, 2}, std::vector<double>{1, 0, 0, 1});
  Tensor z = eval([&](Tape& t) {
    return napl_output(t.constant(xh), t.constant(xe), t.constant(en), t.constant(theta));
  });
  for (double v : z.vec()) EXPECT_EQ(v, 0.0);
  theta = rnd({2, 4, 3}, rng);
  Tensor o = eval([&](Tape& t) {
    return napl_output(t.constant(xh), t.constant(xe), t.constant(en), t.constant(theta));
  });
  // Node n has E^N = e_n, so its weights are exactly Theta[n].
  for (std::size_t n = 0; n < 2; ++n)
    for (std::size_t c = 0; c < 3; ++c) {
      double want = 0;
      for (std::size_t k = 0; k < 4; ++k) {
        const double zk = k < 2 ? xh[n * 2 + k] : xe[n * 2 + k - 2];
        want += zk * theta[(n * 4 + k) * 3 + c];
      }
      EXPECT_NEAR(o[n * 3 + c], want, 1e-14);
    }
}

TEST(Napl, PerNodeLoopOracle) {
  std::mt19937_64 rng(7);
  const std::size_t N = 3, D = 2, DN = 2, DO = 2;
  Tensor xh = rnd({1, N, D}, rng), xe = rnd({1, N, D}, rng), en = rnd({1, N, DN}, rng),
         theta = rnd({DN, 2 * D, DO}, rng);
  Tensor o = eval([&](Tape& t) {
    return napl_output(t.constant(xh), t.constant(xe), t.constant(en), t.constant(theta));
  });
  for (std::size_t n = 0; n < N; ++n) {
    // Materialize the node's (2D, D_out) weight, then multiply.
    std::vector<double> w(2 * D * DO, 0.0);
    for (std::size_t d = 0; d < DN; ++d)
      for (std::size_t i = 0; i < w.size(); ++i) w[i] += en[n * DN + d] * theta[d * w.size() + i];
    for (std::size_t c = 0; c < DO; ++c) {
      double want = 0;
      for (std::size_t k = 0; k < 2 * D; ++k)
        want += (k < D ? xh[n * D + k] : xe[n * D + k - D]) * w[k * DO + c];
      EXPECT_NEAR(o[n * DO + c], want, 1e-14);
    }
  }
}

struct ConvFixture {
  ParameterSet ps;
  HypergraphStructure st;
  HGConv conv;
  Tensor x, h, time, es;
  ConvFixture(std::size_t N, std::size_t M, std::size_t D, bool napl = true,
              std::uint64_t seed = 8) {
    std::mt19937_64 rng(seed);
    st = HypergraphStructure(ps, "s", D, 3, 2, M, rng);
    conv = HGConv(ps, "c", 2, D, 2, D, napl, rng);
    x = rnd({2, N, 2}, rng);
    h = rnd({2, N, D}, rng);
    time = rnd({2, 3}, rng);
    es = rnd({N, 2}, rng);
  }
  Var run(Tape& t, const ConvSettings& cs = {}, HGConvTrace* tr = nullptr,
          const Tensor* es_override = nullptr) const {
    return hgconv(t, t.constant(x), t.constant(h), t.constant(time),
                  t.constant(es_override ? *es_override : es), st, conv, cs, tr);
  }
  reference::StructureWeights sw() const {
    return {st.w_h().value, st.w_t().value, st.prototypes().value};
  }
  reference::ConvWeights cw() const {
    return {conv.w_x().value, conv.w_e().value, conv.theta()->value};
  }
};

TEST(HGConv, ComposedMatchesReference) {
  for (std::uint64_t seed : {8, 9, 10}) {
    ConvFixture f(4, 2, 3, true, seed);
    Tensor got = eval([&](Tape& t) { return f.run(t); });
    expect_close(got, reference::hgconv(f.x, f.h, f.time, f.es, f.sw(), f.cw()), 1e-12);
  }
}

TEST(HGConv, SinglePrototypeIsGlobalMeanPooling) {
  ConvFixture f(4, 1, 3);
  HGConvTrace tr;
  Tensor got = eval([&](Tape& t) { return f.run(t, {}, &tr); });
  for (double v : tr.s.vec()) EXPECT_EQ(v, 1.0);
  // With one hyperedge every node sees ReLU(mean_n X^E W_e) as its propagated part.
  Tensor xe = eval([&](Tape& t) { return ops::linear(t.constant(f.x), t.constant(f.conv.w_x().value)); });
  Tensor xe_w = eval([&](Tape& t) { return ops::linear(t.constant(xe), t.constant(f.conv.w_e().value)); });
  Tensor xh = eval([&](Tape& t) {
    Var he = node_to_edge(t.constant(xe), t.constant(tr.s), t.constant(f.conv.w_e().value));
    return edge_to_node(he, t.constant(tr.s));
  });
  for (std::size_t b = 0; b < 2; ++b)
    for (std::size_t d = 0; d < 3; ++d) {
      double mean = 0;
      for (std::size_t n = 0; n < 4; ++n) mean += xe_w[(b * 4 + n) * 3 + d];
      mean /= 4.0;
      for (std::size_t n = 0; n < 4; ++n)
        EXPECT_NEAR(xh[(b * 4 + n) * 3 + d], std::max(0.0, mean), 1e-12);
    }
  EXPECT_EQ(got.shape(), (Shape{2, 4, 3}));
}

TEST(HGConv, PermutationEquivariant) {
  ConvFixture f(5, 3, 3);
  const std::vector<std::size_t> perm{3, 0, 4, 1, 2};
  auto permute = [&](const Tensor& t, bool batched) {
    Tensor out(t.shape());
    const std::size_t B = batched ? t.dim(0) : 1, N = perm.size(), C = t.size() / (B * N);
    for (std::size_t b = 0; b < B; ++b)
      for (std::size_t n = 0; n < N; ++n)
        for (std::size_t c = 0; c < C; ++c)
          out[(b * N + n) * C + c] = t[(b * N + perm[n]) * C + c];
    return out;
  };
  Tensor base = eval([&](Tape& t) { return f.run(t); });
  ConvFixture g(5, 3, 3);
  g.x = permute(f.x, true);
  g.h = permute(f.h, true);
  g.es = permute(f.es, false);
  Tensor moved = eval([&](Tape& t) { return g.run(t); });
  expect_close(moved, permute(base, true), 1e-12);
}

TEST(HGConv, AblationSettings) {
  ConvFixture f(4, 2, 3);
  HGConvTrace tr;
  ConvSettings global;
  global.repr = NodeReprMode::kGlobalOnly;
  eval([&](Tape& t) { return f.run(t, global, &tr); });
  // E^N = E^s for every sample, so both batch rows share S.
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(tr.s[i], tr.s[8 + i]);
  EXPECT_EQ(tr.alpha.size(), 0u);
  ConvSettings dgc;
  dgc.dgc = true;
  HGConvTrace td;
  Tensor out = eval([&](Tape& t) { return f.run(t, dgc, &td); });
  EXPECT_EQ(td.s.size(), 0u);
  EXPECT_EQ(out.shape(), (Shape{2, 4, 3}));
  Tensor adj = eval([&](Tape& t) { return dgc_adjacency(t.constant(td.e_n)); });
  expect_close(adj, reference::dgc_adjacency(td.e_n), 1e-12);
  for (std::size_t r = 0; r < 8; ++r) {
    double s = 0;
    for (std::size_t c = 0; c < 4; ++c) s += adj[r * 4 + c];
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
  ConvFixture plain(4, 2, 3, false);
  ConvSettings off;
  off.napl = false;
  EXPECT_EQ(eval([&](Tape& t) { return plain.run(t, off); }).shape(), (Shape{2, 4, 3}));
  EXPECT_THROW(eval([&](Tape& t) { return f.run(t, off); }), std::logic_error);
  std::mt19937_64 rng(1);
  EXPECT_THROW(HypergraphStructure(f.ps, "z", 3, 3, 2, 0, rng), std::invalid_argument);
}

TEST(HGConv, GradientsMatchFiniteDifferences) {
  for (int mode = 0; mode < 3; ++mode) {
    ConvFixture f(4, 2, 3, true, 11 + mode);
    ParameterSet extra;
    auto& es = extra.create("es", f.es);
    std::mt19937_64 rng(5);
    const Tensor probe = rnd({2, 4, 3}, rng);
    ConvSettings cs;
    if (mode == 1) cs.dgc = true;
    if (mode == 2) cs.repr = NodeReprMode::kLocalOnly;
    std::vector<Parameter*> ps = f.ps.all();
    ps.push_back(&es);
    auto report = grad_check(ps, [&](Tape& t) {
      Var out = hgconv(t, t.constant(f.x), t.constant(f.h), t.constant(f.time), t.param(es), f.st,
                       f.conv, cs);
      return ops::weighted_sum(out, probe);
    });
    EXPECT_TRUE(report.passed) << "mode " << mode << " worst " << report.worst << " "
                               << report.max_rel_error;
  }
}

}  // namespace
}  // namespace protohg::hg
