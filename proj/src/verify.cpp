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

#include "protohg/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "protohg/data.hpp"
#include "protohg/gradcheck.hpp"
#include "protohg/hgconv.hpp"
#include "protohg/hggru.hpp"
#include "protohg/model.hpp"
#include "protohg/ops.hpp"
#include "protohg/reference.hpp"

namespace protohg::verify {

namespace {

using Rng = std::mt19937_64;

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

Tensor rand_t(Shape s, Rng& rng, double scale = 1.0) {
  return Tensor::uniform(std::move(s), -scale, scale, rng);
}

// Random instance sizes, all <= 6.
struct Dims {
  std::size_t B, N, M, D, C, Dt, Dn, L, H, heads;
};

Dims random_dims(Rng& rng) {
  Dims d{};
  d.B = pick(rng, 1, 3);
  d.N = pick(rng, 1, 6);
  d.M = pick(rng, 1, 6);
  d.D = pick(rng, 1, 6);
  d.C = pick(rng, 1, 4);
  d.Dt = pick(rng, 1, 6);
  d.Dn = pick(rng, 1, 6);
  d.L = pick(rng, 1, 6);
  d.H = pick(rng, 1, 6);
  std::vector<std::size_t> divs;
  for (std::size_t h = 1; h <= d.D; ++h)
    if (d.D % h == 0) divs.push_back(h);
  d.heads = divs[pick(rng, 0, divs.size() - 1)];
  return d;
}

CheckResult make(const std::string& group, const std::string& name, double metric, double tol,
                 const std::string& detail = {}) {
  return {group, name, metric <= tol, metric, tol, detail};
}

std::string count_detail(std::size_t n) { return std::to_string(n) + " instances"; }

Tensor run1(const std::function<Var(Tape&)>& f) {
  Tape t;
  return f(t).value();
}

}  // namespace

Implementations Implementations::library() {
  Implementations im;
  im.node_repr = [](const Tensor& h, const Tensor& es, const Tensor& time, const Tensor& wh,
                    const Tensor& wt) {
    return run1([&](Tape& t) {
      return hg::global_local_repr(t.constant(h), t.constant(es), t.constant(time),
                                   t.constant(wh), t.constant(wt))
          .e_n;
    });
  };
  im.assignment = [](const Tensor& e, const Tensor& p) {
    return run1([&](Tape& t) { return hg::assign(t.constant(e), t.constant(p)); });
  };
  im.node_to_edge = [](const Tensor& x, const Tensor& s, const Tensor& w) {
    return run1(
        [&](Tape& t) { return hg::node_to_edge(t.constant(x), t.constant(s), t.constant(w)); });
  };
  im.edge_to_node = [](const Tensor& he, const Tensor& s) {
    return run1([&](Tape& t) { return hg::edge_to_node(t.constant(he), t.constant(s)); });
  };
  im.napl = [](const Tensor& xh, const Tensor& xe, const Tensor& e, const Tensor& th) {
    return run1([&](Tape& t) {
      return hg::napl_output(t.constant(xh), t.constant(xe), t.constant(e), t.constant(th));
    });
  };
  return im;
}

std::vector<CheckResult> oracle_checks(const Options& opts, const Implementations& impl) {
  Rng rng(opts.seed);
  double e_repr = 0, e_assign = 0, e_n2e = 0, e_e2n = 0, e_napl = 0, e_cell = 0, e_tqa = 0,
         e_dgc = 0, e_tqa_w = 0;
  for (std::size_t it = 0; it < opts.instances; ++it) {
    const Dims d = random_dims(rng);
    // Eq. chain pieces on independent random inputs.
    Tensor h = rand_t({d.B, d.N, d.D}, rng), es = rand_t({d.N, d.Dn}, rng);
    Tensor time = rand_t({d.B, d.Dt}, rng), wh = rand_t({d.D, d.Dn}, rng);
    Tensor wt = rand_t({d.Dt, d.Dn}, rng), p = rand_t({d.M, d.Dn}, rng, 2.0);
    const Tensor en_ref = reference::node_repr(h, es, time, wh, wt);
    e_repr = std::max(e_repr, max_abs_diff(impl.node_repr(h, es, time, wh, wt), en_ref));
    const Tensor s_ref = reference::assignment(en_ref, p);
    e_assign = std::max(e_assign, max_abs_diff(impl.assignment(en_ref, p), s_ref));
    Tensor xe = rand_t({d.B, d.N, d.D}, rng), we = rand_t({d.D, d.D}, rng);
    const Tensor he_ref = reference::node_to_edge(xe, s_ref, we);
    e_n2e = std::max(e_n2e, max_abs_diff(impl.node_to_edge(xe, s_ref, we), he_ref));
    const Tensor xh_ref = reference::edge_to_node(he_ref, s_ref);
    e_e2n = std::max(e_e2n, max_abs_diff(impl.edge_to_node(he_ref, s_ref), xh_ref));
    Tensor theta = rand_t({d.Dn, 2 * d.D, d.C}, rng);
    e_napl = std::max(e_napl, max_abs_diff(impl.napl(xh_ref, xe, en_ref, theta),
                                           reference::napl(xh_ref, xe, en_ref, theta)));
    e_dgc = std::max(e_dgc, max_abs_diff(run1([&](Tape& t) {
                                           return hg::dgc_adjacency(t.constant(en_ref));
                                         }),
                                         reference::dgc_adjacency(en_ref)));

    // One HGGRU step with library parameters read back by name.
    {
      ParameterSet ps;
      gru::CellConfig cc;
      cc.in_dim = d.C;
      cc.hidden_dim = d.D;
      cc.time_dim = d.Dt;
      cc.node_dim = d.Dn;
      cc.prototypes = d.M;
      gru::HGGRUCell cell(ps, "cell", cc, rng);
      Tensor x = rand_t({d.B, d.N, d.C}, rng);
      Tensor got = run1([&](Tape& t) {
        return cell.step(t, t.constant(x), t.constant(h), t.constant(time), t.constant(es), {});
      });
      reference::CellWeights w;
      w.structure = {ps.get("cell.struct.W_h").value, ps.get("cell.struct.W_T").value,
                     ps.get("cell.struct.P").value};
      for (auto [gate, dst] : {std::pair{"r", &w.r}, {"u", &w.u}, {"h", &w.h}}) {
        const std::string pre = std::string("cell.") + gate;
        *dst = {ps.get(pre + ".W_x").value, ps.get(pre + ".W_e").value,
                ps.get(pre + ".theta").value};
      }
      e_cell = std::max(e_cell, max_abs_diff(got, reference::cell_step(x, h, time, es, w)));
    }

    // Temporal query attention.
    {
      ParameterSet ps;
      model::TemporalQueryAttention tqa(ps, "tqa", d.Dt, d.D, d.heads, rng);
      Tensor ef = rand_t({d.B, d.H, d.Dt}, rng), ep = rand_t({d.B, d.L, d.Dt}, rng);
      Tensor hp = rand_t({d.B, d.L, d.N, d.D}, rng);
      Tensor wts, wts_ref;
      Tensor got = run1([&](Tape& t) {
        return tqa.forward(t, t.constant(ef), t.constant(ep), t.constant(hp), true, &wts);
      });
      reference::TqaWeights w{ps.get("tqa.W_Q").value, ps.get("tqa.W_tp").value,
                              ps.get("tqa.W_K").value, ps.get("tqa.W_V").value};
      e_tqa = std::max(e_tqa, max_abs_diff(got, reference::tqa(ef, ep, hp, w, d.heads, &wts_ref)));
      e_tqa_w = std::max(e_tqa_w, max_abs_diff(wts, wts_ref));
    }
  }
  const auto n = count_detail(opts.instances);
  const double tol = opts.oracle_tol;
  return {make("oracle", "global-local node representation", e_repr, tol, n),
          make("oracle", "prototype assignment", e_assign, tol, n),
          make("oracle", "node-to-hyperedge aggregation", e_n2e, tol, n),
          make("oracle", "hyperedge-to-node propagation", e_e2n, tol, n),
          make("oracle", "node-adaptive output", e_napl, tol, n),
          make("oracle", "pairwise adjacency (dgc)", e_dgc, tol, n),
          make("oracle", "hggru cell step", e_cell, tol, n),
          make("oracle", "temporal query attention", e_tqa, tol, n),
          make("oracle", "temporal query attention weights", e_tqa_w, tol, n)};
}

namespace {

Parameter& as_param(ParameterSet& ps, const std::string& name, Tensor t) {
  return ps.create(name, std::move(t));
}

CheckResult grad_result(const std::string& name, const GradCheckReport& r, double tol) {
  std::ostringstream os;
  os << r.checked << " entries, worst " << r.worst;
  return make("gradient", name, r.max_rel_error, tol, os.str());
}

data::Batch tiny_batch(std::size_t N, std::size_t L, std::size_t H, std::size_t B) {
  auto syn = data::generate_synthetic(N, 120, 11);
  auto c = std::make_shared<const data::RawCorpus>(syn.corpus);
  auto idx = std::make_shared<const data::TimeIndices>(data::compute_time_indices(*c));
  auto w = data::make_windows(c, idx, L, H);
  const auto norm = data::fit_normalizer(w);
  std::vector<std::size_t> which;
  for (std::size_t i = 0; i < B; ++i) which.push_back(i * 7);
  return data::make_batch(w, which, norm);
}

}  // namespace

std::vector<CheckResult> gradient_checks(const Options& opts) {
  std::vector<CheckResult> out;
  GradCheckOptions go;
  go.tol = opts.gradient_tol;
  Rng rng(opts.seed + 1);

  {  // Bias-free linear layer: exactly linear, so differences are exact.
    ParameterSet ps;
    auto& x = as_param(ps, "x", rand_t({3, 4}, rng));
    auto& w = as_param(ps, "w", rand_t({4, 2}, rng));
    const Tensor probe = rand_t({3, 2}, rng);
    GradCheckOptions lo = go;
    lo.tol = 1e-8;
    auto r = grad_check(ps, [&](Tape& t) {
      return ops::weighted_sum(ops::linear(t.param(x), t.param(w)), probe);
    }, lo);
    out.push_back(grad_result("linear layer", r, lo.tol));
  }

  const std::size_t B = 2, N = 4, C = 3, D = 4, Dt = 3, Dn = 3, M = 2;
  struct Variant {
    const char* name;
    hg::ConvSettings settings;
  };
  hg::ConvSettings full, local, global, dgc, shared;
  local.repr = hg::NodeReprMode::kLocalOnly;
  global.repr = hg::NodeReprMode::kGlobalOnly;
  dgc.dgc = true;
  shared.napl = false;
  for (const auto& v : {Variant{"hgconv", full}, Variant{"hgconv local_only", local},
                        Variant{"hgconv global_only", global}, Variant{"hgconv dgc", dgc},
                        Variant{"hgconv shared W_o", shared}}) {
    ParameterSet ps;
    hg::HypergraphStructure st(ps, "st", D, Dt, Dn, M, rng);
    hg::HGConv conv(ps, "conv", C, D, Dn, D, v.settings.napl, rng);
    auto& x = as_param(ps, "x", rand_t({B, N, C}, rng));
    auto& h = as_param(ps, "h", rand_t({B, N, D}, rng));
    auto& time = as_param(ps, "time", rand_t({B, Dt}, rng));
    auto& es = as_param(ps, "e_s", rand_t({N, Dn}, rng));
    const Tensor probe = rand_t({B, N, D}, rng);
    auto r = grad_check(ps, [&](Tape& t) {
      return ops::weighted_sum(hg::hgconv(t, t.param(x), t.param(h), t.param(time),
                                          t.param(es), st, conv, v.settings),
                               probe);
    }, go);
    out.push_back(grad_result(v.name, r, go.tol));
  }

  {  // One HGGRU step, unshared structures.
    for (bool share : {true, false}) {
      ParameterSet ps;
      gru::CellConfig cc{C, D, Dt, Dn, M, share, true};
      gru::HGGRUCell cell(ps, "cell", cc, rng);
      auto& x = as_param(ps, "x", rand_t({B, N, C}, rng));
      auto& h = as_param(ps, "h", rand_t({B, N, D}, rng));
      auto& time = as_param(ps, "time", rand_t({B, Dt}, rng));
      auto& es = as_param(ps, "e_s", rand_t({N, Dn}, rng));
      const Tensor probe = rand_t({B, N, D}, rng);
      auto r = grad_check(ps, [&](Tape& t) {
        return ops::weighted_sum(
            cell.step(t, t.param(x), t.param(h), t.param(time), t.param(es), {}), probe);
      }, go);
      out.push_back(grad_result(share ? "hggru step" : "hggru step, per-gate structure", r,
                                go.tol));
    }
  }

  {  // Temporal query attention.
    ParameterSet ps;
    const std::size_t L = 3, H = 2;
    model::TemporalQueryAttention tqa(ps, "tqa", Dt, D, 2, rng);
    auto& ef = as_param(ps, "e_f", rand_t({B, H, Dt}, rng));
    auto& ep = as_param(ps, "e_p", rand_t({B, L, Dt}, rng));
    auto& hp = as_param(ps, "h_p", rand_t({B, L, N, D}, rng));
    const Tensor probe = rand_t({B, H, N, D}, rng);
    auto r = grad_check(ps, [&](Tape& t) {
      return ops::weighted_sum(tqa.forward(t, t.param(ef), t.param(ep), t.param(hp)), probe);
    }, go);
    out.push_back(grad_result("temporal query attention", r, go.tol));
  }

  // Full model, tiny config.
  for (const std::string variant : {"full", "no_te", "no_napl", "no_res_dgc"}) {
    for (std::size_t blocks : {1, 2}) {
      if (variant != "full" && blocks == 2) continue;
      model::ModelConfig mc;
      mc.nodes = N;
      mc.hidden = D;
      mc.time_dim = Dt;
      mc.node_dim = Dn;
      mc.prototypes = M;
      mc.blocks = blocks;
      mc.heads = 2;
      mc.history = 3;
      mc.horizon = 2;
      mc.ablation = model::Ablation::from_variant(variant);
      model::Forecaster m(mc, opts.seed);
      const auto batch = tiny_batch(N, mc.history, mc.horizon, B);
      const Tensor probe = rand_t({B, mc.horizon, N}, rng);
      auto r = grad_check(m.params(), [&](Tape& t) {
        return ops::weighted_sum(m.forward(t, batch).forecast, probe);
      }, go);
      std::string name = "model " + variant + ", " + std::to_string(blocks) + " block";
      out.push_back(grad_result(name + (blocks > 1 ? "s" : ""), r, go.tol));
    }
  }
  return out;
}

std::vector<CheckResult> invariant_checks(const Options& opts) {
  std::vector<CheckResult> out;
  Rng rng(opts.seed + 2);
  double simplex = 0, degree = 0, attn = 0, adj = 0;
  std::size_t min_s = 0;
  for (std::size_t it = 0; it < opts.instances; ++it) {
    const Dims d = random_dims(rng);
    Tensor e = rand_t({d.B, d.N, d.Dn}, rng, 3.0), p = rand_t({d.M, d.Dn}, rng, 3.0);
    const Tensor s = run1([&](Tape& t) { return hg::assign(t.constant(e), t.constant(p)); });
    for (std::size_t r = 0; r < d.B * d.N; ++r) {
      double z = 0;
      for (std::size_t m = 0; m < d.M; ++m) {
        z += s[r * d.M + m];
        if (s[r * d.M + m] < 0) ++min_s;
      }
      simplex = std::max(simplex, std::fabs(z - 1.0));
    }
    const auto deg = hg::degrees(s);
    for (std::size_t b = 0; b < d.B; ++b) {
      double z = 0;
      for (std::size_t m = 0; m < d.M; ++m) z += deg.edge[b * d.M + m];
      degree = std::max(degree, std::fabs(z - static_cast<double>(d.N)));
    }
    const Tensor a = run1([&](Tape& t) { return hg::dgc_adjacency(t.constant(e)); });
    for (std::size_t r = 0; r < d.B * d.N; ++r) {
      double z = 0;
      for (std::size_t j = 0; j < d.N; ++j) z += a[r * d.N + j];
      adj = std::max(adj, std::fabs(z - 1.0));
    }
    Tensor w;
    run1([&](Tape& t) {
      return ops::attention(t.constant(rand_t({d.B, d.H, d.D}, rng, 3.0)),
                            t.constant(rand_t({d.B, d.L, d.N, d.D}, rng, 3.0)),
                            t.constant(rand_t({d.B, d.L, d.N, d.D}, rng)), d.heads, &w);
    });
    for (std::size_t r = 0; r < w.size() / d.L; ++r) {
      double z = 0;
      for (std::size_t l = 0; l < d.L; ++l) z += w[r * d.L + l];
      attn = std::max(attn, std::fabs(z - 1.0));
    }
  }
  const auto n = count_detail(opts.instances);
  out.push_back(make("invariant", "assignment rows on the simplex",
                     simplex + (min_s ? 1.0 : 0.0), 1e-6, n));
  out.push_back(make("invariant", "hyperedge degrees sum to N", degree, 1e-5, n));
  out.push_back(make("invariant", "attention rows sum to 1", attn, 1e-6, n));
  out.push_back(make("invariant", "pairwise adjacency rows sum to 1", adj, 1e-6, n));

  // Residual telescoping and exact forecast summation.
  {
    model::ModelConfig mc;
    mc.nodes = 5;
    mc.hidden = 4;
    mc.time_dim = 3;
    mc.node_dim = 3;
    mc.prototypes = 3;
    mc.blocks = 3;
    mc.heads = 2;
    mc.history = 4;
    mc.horizon = 3;
    model::Forecaster m(mc, opts.seed);
    const auto batch = tiny_batch(mc.nodes, mc.history, mc.horizon, 2);
    Tape t;
    auto fb = m.forward(t, batch);
    Tensor sum = fb.block_forecasts[0].value();
    for (std::size_t i = 1; i < fb.block_forecasts.size(); ++i) {
      const Tensor& bi = fb.block_forecasts[i].value();
      for (std::size_t k = 0; k < sum.size(); ++k) sum[k] = sum[k] + bi[k];
    }
    std::size_t mismatches = 0;
    for (std::size_t k = 0; k < sum.size(); ++k) mismatches += sum[k] != fb.forecast.value()[k];
    out.push_back(make("invariant", "forecast equals the sum of block forecasts",
                       static_cast<double>(mismatches), 0.0, "exact"));
    mismatches = 0;
    for (std::size_t i = 0; i + 1 < fb.block_inputs.size(); ++i) {
      const Tensor& xi = fb.block_inputs[i].value();
      const Tensor& xn = fb.block_inputs[i + 1].value();
      const Tensor& bc = fb.block_backcasts[i].value();
      for (std::size_t r = 0; r < bc.size(); ++r) {
        mismatches += xn[r * 3] != xi[r * 3] - bc[r];
        mismatches += xn[r * 3 + 1] != xi[r * 3 + 1];
        mismatches += xn[r * 3 + 2] != xi[r * 3 + 2];
      }
    }
    out.push_back(make("invariant", "block inputs telescope by backcast",
                       static_cast<double>(mismatches), 0.0, "exact"));
  }

  // Horizon slots decode independently: permuting (context, time, init)
  // permutes the output exactly.
  {
    ParameterSet ps;
    const std::size_t B = 2, H = 4, N = 3, D = 4, Dt = 3;
    gru::CellConfig cc{D, D, Dt, 3, 2, true, true};
    gru::HGGRUCell cell(ps, "dec", cc, rng);
    Tensor ctx = rand_t({B, H, N, D}, rng), init = rand_t({H, D}, rng);
    Tensor tf = rand_t({B, H, Dt}, rng), es = rand_t({N, 3}, rng);
    const std::vector<std::size_t> perm = {2, 0, 3, 1};
    auto permute = [&](const Tensor& src, bool batched) {
      Tensor dst(src.shape());
      const std::size_t inner = src.size() / (batched ? B * H : H);
      const std::size_t outer = batched ? B : 1;
      for (std::size_t b = 0; b < outer; ++b)
        for (std::size_t h = 0; h < H; ++h)
          std::copy_n(src.data() + (b * H + perm[h]) * inner, inner,
                      dst.data() + (b * H + h) * inner);
      return dst;
    };
    auto decode = [&](const Tensor& c, const Tensor& i, const Tensor& f) {
      return run1([&](Tape& t) {
        return model::parallel_decode(t, cell, t.constant(c), t.constant(i), t.constant(f),
                                      t.constant(es), {});
      });
    };
    const Tensor base = decode(ctx, init, tf);
    const Tensor permuted = decode(permute(ctx, true), permute(init, false), permute(tf, true));
    std::size_t mismatches = 0;
    const Tensor expect = permute(base, true);
    for (std::size_t k = 0; k < expect.size(); ++k) mismatches += expect[k] != permuted[k];
    // Perturbing one slot leaves the others untouched.
    Tensor ctx2 = ctx;
    for (std::size_t b = 0; b < B; ++b)
      for (std::size_t k = 0; k < N * D; ++k) ctx2[(b * H + 1) * N * D + k] += 1.0;
    const Tensor pert = decode(ctx2, init, tf);
    for (std::size_t b = 0; b < B; ++b)
      for (std::size_t h = 0; h < H; ++h) {
        if (h == 1) continue;
        for (std::size_t k = 0; k < N * D; ++k) {
          const std::size_t i = (b * H + h) * N * D + k;
          mismatches += pert[i] != base[i];
        }
      }
    out.push_back(make("invariant", "horizon slots decode independently",
                       static_cast<double>(mismatches), 0.0, "exact"));
  }

  // Node permutation equivariance of the hypergraph convolution.
  {
    double err = 0;
    for (std::size_t it = 0; it < 20; ++it) {
      const Dims d = random_dims(rng);
      ParameterSet ps;
      hg::HypergraphStructure st(ps, "st", d.D, d.Dt, d.Dn, d.M, rng);
      hg::HGConv conv(ps, "conv", d.C, d.D, d.Dn, d.D, true, rng);
      Tensor x = rand_t({d.B, d.N, d.C}, rng), h = rand_t({d.B, d.N, d.D}, rng);
      Tensor time = rand_t({d.B, d.Dt}, rng), es = rand_t({d.N, d.Dn}, rng);
      std::vector<std::size_t> perm(d.N);
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      auto permute_nodes = [&](const Tensor& src, bool batched) {
        Tensor dst(src.shape());
        const std::size_t outer = batched ? d.B : 1;
        const std::size_t inner = src.size() / (outer * d.N);
        for (std::size_t b = 0; b < outer; ++b)
          for (std::size_t n = 0; n < d.N; ++n)
            std::copy_n(src.data() + (b * d.N + perm[n]) * inner, inner,
                        dst.data() + (b * d.N + n) * inner);
        return dst;
      };
      auto conv_out = [&](const Tensor& xx, const Tensor& hh, const Tensor& ee) {
        return run1([&](Tape& t) {
          return hg::hgconv(t, t.constant(xx), t.constant(hh), t.constant(time),
                            t.constant(ee), st, conv, {});
        });
      };
      const Tensor base = conv_out(x, h, es);
      const Tensor pr = conv_out(permute_nodes(x, true), permute_nodes(h, true),
                                 permute_nodes(es, false));
      err = std::max(err, max_abs_diff(permute_nodes(base, true), pr));
    }
    out.push_back(make("invariant", "hgconv is node-permutation equivariant", err, 1e-6,
                       "20 instances"));
  }

  // One prototype: every node joins the single hyperedge with weight 1, so
  // Xh[n] = ReLU(mean_n(X^E) W_e) for all n.
  {
    double err = 0;
    for (std::size_t it = 0; it < 20; ++it) {
      Dims d = random_dims(rng);
      Tensor e = rand_t({d.B, d.N, d.Dn}, rng), p = rand_t({1, d.Dn}, rng);
      Tensor xe = rand_t({d.B, d.N, d.D}, rng), we = rand_t({d.D, d.D}, rng);
      const Tensor xh = run1([&](Tape& t) {
        Var s = hg::assign(t.constant(e), t.constant(p));
        return hg::edge_to_node(hg::node_to_edge(t.constant(xe), s, t.constant(we)), s);
      });
      for (std::size_t b = 0; b < d.B; ++b)
        for (std::size_t o = 0; o < d.D; ++o) {
          double acc = 0;
          for (std::size_t n = 0; n < d.N; ++n)
            for (std::size_t k = 0; k < d.D; ++k)
              acc += xe[(b * d.N + n) * d.D + k] * we[k * d.D + o];
          const double expect = std::max(0.0, acc / static_cast<double>(d.N));
          for (std::size_t n = 0; n < d.N; ++n)
            err = std::max(err, std::fabs(xh[(b * d.N + n) * d.D + o] - expect));
        }
    }
    out.push_back(make("invariant", "single prototype collapses to the mean message", err,
                       1e-9, "20 instances"));
  }
  return out;
}

std::vector<CheckResult> run_all(const Options& opts) {
  auto all = oracle_checks(opts);
  auto g = gradient_checks(opts);
  auto i = invariant_checks(opts);
  all.insert(all.end(), g.begin(), g.end());
  all.insert(all.end(), i.begin(), i.end());
  return all;
}

bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
}

}  // namespace protohg::verify
