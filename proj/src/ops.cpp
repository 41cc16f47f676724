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

#include "protohg/ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace protohg::ops {

namespace {

double* grad_ptr(Tape& t, const Var& v) {
  return t.requires_grad(v) ? t.grad_buffer(v).data() : nullptr;
}

void require_same(const Var& a, const Var& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(what) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                     shape_str(b.shape()));
  }
}

void require_rank(const Var& v, std::size_t rank, const char* what) {
  if (v.shape().size() != rank) {
    throw ShapeError(std::string(what) + ": expected rank " + std::to_string(rank) + ", got " +
                     shape_str(v.shape()));
  }
}

// Splits a shape around `axis` into (outer, axis, inner) extents.
struct AxisSplit {
  std::size_t outer = 1, mid = 1, inner = 1;
};

AxisSplit split_at(const Shape& s, std::size_t axis) {
  AxisSplit r;
  for (std::size_t i = 0; i < axis; ++i) r.outer *= s[i];
  r.mid = axis < s.size() ? s[axis] : 1;
  for (std::size_t i = axis + 1; i < s.size(); ++i) r.inner *= s[i];
  return r;
}

}  // namespace

Var linear(const Var& x, const Var& w, bool w_t) {
  const Shape& xs = x.shape();
  const Shape& ws = w.shape();
  if (xs.empty() || ws.size() != 2) throw ShapeError("linear: bad operand ranks");
  const std::size_t K = xs.back();
  const std::size_t wk = w_t ? ws[1] : ws[0];
  const std::size_t O = w_t ? ws[0] : ws[1];
  if (K != wk) {
    throw ShapeError("linear: input " + shape_str(xs) + " incompatible with weight " +
                     shape_str(ws));
  }
  const std::size_t rows = x.value().size() / K;
  Shape ys = xs;
  ys.back() = O;
  Tensor y(ys);
  kernels::matmul(x.value().data(), w.value().data(), y.data(), rows, K, O, w_t);
  return x.tape->push(std::move(y), {x, w}, [x, w, rows, K, O, w_t](Tape& t, const Tensor& g) {
    if (double* dx = grad_ptr(t, x)) {
      kernels::matmul_backward_input(g.data(), t.value(w).data(), dx, rows, K, O, w_t);
    }
    if (double* dw = grad_ptr(t, w)) {
      kernels::matmul_backward_weight(t.value(x).data(), g.data(), dw, rows, K, O, w_t);
    }
  });
}

Var bmm(const Var& a, const Var& b, bool a_t, bool b_t) {
  require_rank(a, 3, "bmm");
  require_rank(b, 3, "bmm");
  const auto& as = a.shape();
  const auto& bs = b.shape();
  const std::size_t batch = as[0];
  const std::size_t p = a_t ? as[2] : as[1];
  const std::size_t q = a_t ? as[1] : as[2];
  const std::size_t bq = b_t ? bs[2] : bs[1];
  const std::size_t r = b_t ? bs[1] : bs[2];
  if (bs[0] != batch || bq != q) {
    throw ShapeError("bmm: " + shape_str(as) + " x " + shape_str(bs));
  }
  Tensor c({batch, p, r});
  kernels::bmm(a.value().data(), b.value().data(), c.data(), batch, p, q, r, a_t, b_t);
  return a.tape->push(std::move(c), {a, b},
                      [a, b, batch, p, q, r, a_t, b_t](Tape& t, const Tensor& g) {
                        kernels::bmm_backward(t.value(a).data(), t.value(b).data(), g.data(),
                                              grad_ptr(t, a), grad_ptr(t, b), batch, p, q, r,
                                              a_t, b_t);
                      });
}

Var add(const Var& a, const Var& b) {
  require_same(a, b, "add");
  Tensor y = a.value();
  y += b.value();
  return a.tape->push(std::move(y), {a, b}, [a, b](Tape& t, const Tensor& g) {
    t.accumulate(a, g);
    t.accumulate(b, g);
  });
}

Var sub(const Var& a, const Var& b) {
  require_same(a, b, "sub");
  Tensor y = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] -= bv[i];
  return a.tape->push(std::move(y), {a, b}, [a, b](Tape& t, const Tensor& g) {
    t.accumulate(a, g);
    if (double* db = grad_ptr(t, b)) {
      for (std::size_t i = 0; i < g.size(); ++i) db[i] -= g[i];
    }
  });
}

Var mul(const Var& a, const Var& b) {
  require_same(a, b, "mul");
  Tensor y = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] *= bv[i];
  return a.tape->push(std::move(y), {a, b}, [a, b](Tape& t, const Tensor& g) {
    if (double* da = grad_ptr(t, a)) {
      const Tensor& bv = t.value(b);
      for (std::size_t i = 0; i < g.size(); ++i) da[i] += g[i] * bv[i];
    }
    if (double* db = grad_ptr(t, b)) {
      const Tensor& av = t.value(a);
      for (std::size_t i = 0; i < g.size(); ++i) db[i] += g[i] * av[i];
    }
  });
}

Var scale(const Var& x, double c) {
  Tensor y = x.value();
  for (auto& v : y.vec()) v *= c;
  return x.tape->push(std::move(y), {x}, [x, c](Tape& t, const Tensor& g) {
    double* dx = t.grad_buffer(x).data();
    for (std::size_t i = 0; i < g.size(); ++i) dx[i] += c * g[i];
  });
}

Var one_minus(const Var& x) {
  Tensor y = x.value();
  for (auto& v : y.vec()) v = 1.0 - v;
  return x.tape->push(std::move(y), {x}, [x](Tape& t, const Tensor& g) {
    double* dx = t.grad_buffer(x).data();
    for (std::size_t i = 0; i < g.size(); ++i) dx[i] -= g[i];
  });
}

namespace {

// Elementwise op whose derivative is expressed through its output.
template <typename F, typename DF>
Var pointwise(const Var& x, F f, DF dfdy) {
  Tensor y = x.value();
  for (auto& v : y.vec()) v = f(v);
  Tape& tape = *x.tape;
  const int out_id = static_cast<int>(tape.size());
  return tape.push(std::move(y), {x}, [x, out_id, dfdy](Tape& t, const Tensor& g) {
    const Tensor& yv = t.value(Var{&t, out_id});
    double* dx = t.grad_buffer(x).data();
    for (std::size_t i = 0; i < g.size(); ++i) dx[i] += g[i] * dfdy(yv[i]);
  });
}

}  // namespace

Var sigmoid(const Var& x) {
  return pointwise(
      x, [](double v) { return 1.0 / (1.0 + std::exp(-v)); },
      [](double y) { return y * (1.0 - y); });
}

Var tanh(const Var& x) {
  return pointwise(
      x, [](double v) { return std::tanh(v); }, [](double y) { return 1.0 - y * y; });
}

Var relu(const Var& x) {
  return pointwise(
      x, [](double v) { return v > 0.0 ? v : 0.0; },
      [](double y) { return y > 0.0 ? 1.0 : 0.0; });
}

Var softmax_last(const Var& x) {
  const std::size_t cols = x.shape().back();
  const std::size_t rows = x.value().size() / cols;
  Tensor y(x.shape());
  kernels::softmax_rows(x.value().data(), y.data(), rows, cols);
  Tape& tape = *x.tape;
  const int out_id = static_cast<int>(tape.size());
  return tape.push(std::move(y), {x}, [x, out_id, rows, cols](Tape& t, const Tensor& g) {
    kernels::softmax_rows_backward(t.value(Var{&t, out_id}).data(), g.data(),
                                   t.grad_buffer(x).data(), rows, cols);
  });
}

Var concat_last(const Var& a, const Var& b) {
  const Shape& as = a.shape();
  const Shape& bs = b.shape();
  if (as.size() != bs.size() || !std::equal(as.begin(), as.end() - 1, bs.begin())) {
    throw ShapeError("concat_last: " + shape_str(as) + " vs " + shape_str(bs));
  }
  const std::size_t ca = as.back(), cb = bs.back();
  const std::size_t rows = a.value().size() / ca;
  Shape ys = as;
  ys.back() = ca + cb;
  Tensor y(ys);
  const double* ad = a.value().data();
  const double* bd = b.value().data();
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy(ad + r * ca, ad + (r + 1) * ca, y.data() + r * (ca + cb));
    std::copy(bd + r * cb, bd + (r + 1) * cb, y.data() + r * (ca + cb) + ca);
  }
  return a.tape->push(std::move(y), {a, b}, [a, b, rows, ca, cb](Tape& t, const Tensor& g) {
    if (double* da = grad_ptr(t, a)) {
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t j = 0; j < ca; ++j) da[r * ca + j] += g[r * (ca + cb) + j];
    }
    if (double* db = grad_ptr(t, b)) {
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t j = 0; j < cb; ++j) db[r * cb + j] += g[r * (ca + cb) + ca + j];
    }
  });
}

Var expand(const Var& x, std::size_t axis, std::size_t n) {
  const Shape& xs = x.shape();
  if (axis > xs.size()) throw ShapeError("expand: axis out of range");
  Shape ys = xs;
  ys.insert(ys.begin() + static_cast<std::ptrdiff_t>(axis), n);
  const auto sp = split_at(ys, axis);
  Tensor y(ys);
  const double* xd = x.value().data();
  for (std::size_t o = 0; o < sp.outer; ++o)
    for (std::size_t m = 0; m < n; ++m)
      std::copy(xd + o * sp.inner, xd + (o + 1) * sp.inner,
                y.data() + (o * n + m) * sp.inner);
  return x.tape->push(std::move(y), {x}, [x, sp, n](Tape& t, const Tensor& g) {
    double* dx = t.grad_buffer(x).data();
    for (std::size_t o = 0; o < sp.outer; ++o)
      for (std::size_t m = 0; m < n; ++m)
        for (std::size_t i = 0; i < sp.inner; ++i)
          dx[o * sp.inner + i] += g[(o * n + m) * sp.inner + i];
  });
}

Var reshape(const Var& x, Shape shape) {
  Tensor y = x.value().reshaped(std::move(shape));
  return x.tape->push(std::move(y), {x}, [x](Tape& t, const Tensor& g) {
    double* dx = t.grad_buffer(x).data();
    for (std::size_t i = 0; i < g.size(); ++i) dx[i] += g[i];
  });
}

Var select(const Var& x, std::size_t axis, std::size_t i) {
  const Shape& xs = x.shape();
  if (axis >= xs.size() || i >= xs[axis]) throw ShapeError("select: index out of range");
  const auto sp = split_at(xs, axis);
  Shape ys = xs;
  ys.erase(ys.begin() + static_cast<std::ptrdiff_t>(axis));
  Tensor y(ys);
  const double* xd = x.value().data();
  for (std::size_t o = 0; o < sp.outer; ++o) {
    const double* src = xd + (o * sp.mid + i) * sp.inner;
    std::copy(src, src + sp.inner, y.data() + o * sp.inner);
  }
  return x.tape->push(std::move(y), {x}, [x, sp, i](Tape& t, const Tensor& g) {
    double* dx = t.grad_buffer(x).data();
    for (std::size_t o = 0; o < sp.outer; ++o)
      for (std::size_t k = 0; k < sp.inner; ++k)
        dx[(o * sp.mid + i) * sp.inner + k] += g[o * sp.inner + k];
  });
}

Var stack(const std::vector<Var>& xs, std::size_t axis) {
  if (xs.empty()) throw ShapeError("stack: empty input");
  const Shape& s0 = xs.front().shape();
  for (const auto& v : xs) require_same(v, xs.front(), "stack");
  Shape ys = s0;
  ys.insert(ys.begin() + static_cast<std::ptrdiff_t>(axis), xs.size());
  const auto sp = split_at(ys, axis);
  Tensor y(ys);
  for (std::size_t m = 0; m < xs.size(); ++m) {
    const double* src = xs[m].value().data();
    for (std::size_t o = 0; o < sp.outer; ++o)
      std::copy(src + o * sp.inner, src + (o + 1) * sp.inner,
                y.data() + (o * sp.mid + m) * sp.inner);
  }
  return xs.front().tape->push(std::move(y), xs, [xs, sp](Tape& t, const Tensor& g) {
    for (std::size_t m = 0; m < xs.size(); ++m) {
      double* dx = grad_ptr(t, xs[m]);
      if (!dx) continue;
      for (std::size_t o = 0; o < sp.outer; ++o)
        for (std::size_t k = 0; k < sp.inner; ++k)
          dx[o * sp.inner + k] += g[(o * sp.mid + m) * sp.inner + k];
    }
  });
}

Var gather_rows(const Var& table, const std::vector<int>& idx) {
  require_rank(table, 2, "gather_rows");
  const std::size_t V = table.shape()[0], D = table.shape()[1];
  for (int i : idx) {
    if (i < 0 || static_cast<std::size_t>(i) >= V) {
      throw std::out_of_range("embedding index " + std::to_string(i) + " outside table of " +
                              std::to_string(V) + " rows");
    }
  }
  Tensor y({idx.size(), D});
  const double* td = table.value().data();
  for (std::size_t r = 0; r < idx.size(); ++r)
    std::copy(td + idx[r] * D, td + (idx[r] + 1) * D, y.data() + r * D);
  return table.tape->push(std::move(y), {table}, [table, idx, D](Tape& t, const Tensor& g) {
    double* dt = t.grad_buffer(table).data();
    for (std::size_t r = 0; r < idx.size(); ++r)
      for (std::size_t j = 0; j < D; ++j) dt[idx[r] * D + j] += g[r * D + j];
  });
}

Var sub_channel(const Var& x, const Var& y, std::size_t c) {
  const Shape& xs = x.shape();
  const std::size_t C = xs.back();
  Shape expect(xs.begin(), xs.end() - 1);
  if (c >= C || y.shape() != expect) {
    throw ShapeError("sub_channel: " + shape_str(xs) + " vs " + shape_str(y.shape()));
  }
  Tensor out = x.value();
  const double* yd = y.value().data();
  const std::size_t rows = out.size() / C;
  for (std::size_t r = 0; r < rows; ++r) out[r * C + c] -= yd[r];
  return x.tape->push(std::move(out), {x, y}, [x, y, c, C, rows](Tape& t, const Tensor& g) {
    t.accumulate(x, g);
    if (double* dy = grad_ptr(t, y)) {
      for (std::size_t r = 0; r < rows; ++r) dy[r] -= g[r * C + c];
    }
  });
}

Var sum(const Var& x) {
  double s = 0.0;
  for (double v : x.value().vec()) s += v;
  return x.tape->push(Tensor({1}, s), {x}, [x](Tape& t, const Tensor& g) {
    double* dx = t.grad_buffer(x).data();
    const std::size_t n = t.value(x).size();
    for (std::size_t i = 0; i < n; ++i) dx[i] += g[0];
  });
}

Var weighted_sum(const Var& x, const Tensor& w) {
  if (w.size() != x.value().size()) throw ShapeError("weighted_sum: size mismatch");
  double s = 0.0;
  const Tensor& xv = x.value();
  for (std::size_t i = 0; i < xv.size(); ++i) s += xv[i] * w[i];
  return x.tape->push(Tensor({1}, s), {x}, [x, w](Tape& t, const Tensor& g) {
    double* dx = t.grad_buffer(x).data();
    for (std::size_t i = 0; i < w.size(); ++i) dx[i] += g[0] * w[i];
  });
}

Var mae_loss(const Var& pred, const Tensor& target, const Tensor& mask) {
  const Tensor& p = pred.value();
  if (p.shape() != target.shape() || p.shape() != mask.shape()) {
    throw ShapeError("mae_loss: pred " + shape_str(p.shape()) + ", target " +
                     shape_str(target.shape()) + ", mask " + shape_str(mask.shape()));
  }
  double count = 0.0, acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (mask[i] == 0.0) continue;
    count += 1.0;
    acc += std::abs(p[i] - target[i]);
  }
  if (count == 0.0) throw std::invalid_argument("mae_loss: mask selects no entries");
  return pred.tape->push(
      Tensor({1}, acc / count), {pred}, [pred, target, mask, count](Tape& t, const Tensor& g) {
        const Tensor& p = t.value(pred);
        double* dp = t.grad_buffer(pred).data();
        for (std::size_t i = 0; i < p.size(); ++i) {
          if (mask[i] == 0.0) continue;
          const double diff = p[i] - target[i];
          const double sgn = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
          dp[i] += g[0] * sgn / count;
        }
      });
}

Var gate_mix(const Var& alpha, const Var& local, const Var& global) {
  require_rank(alpha, 2, "gate_mix alpha");
  require_rank(local, 3, "gate_mix local");
  require_rank(global, 2, "gate_mix global");
  const kernels::GateMixDims d{local.shape()[0], local.shape()[1], local.shape()[2]};
  if (alpha.shape() != Shape{d.batch, d.dim} || global.shape() != Shape{d.nodes, d.dim}) {
    throw ShapeError("gate_mix: alpha " + shape_str(alpha.shape()) + ", local " +
                     shape_str(local.shape()) + ", global " + shape_str(global.shape()));
  }
  Tensor out(local.shape());
  kernels::gate_mix(d, alpha.value().data(), local.value().data(), global.value().data(),
                    out.data());
  return alpha.tape->push(std::move(out), {alpha, local, global},
                          [alpha, local, global, d](Tape& t, const Tensor& g) {
                            kernels::gate_mix_backward(
                                d, t.value(alpha).data(), t.value(local).data(),
                                t.value(global).data(), g.data(), grad_ptr(t, alpha),
                                grad_ptr(t, local), grad_ptr(t, global));
                          });
}

Var node_to_edge(const Var& x, const Var& s, const Var& we) {
  require_rank(x, 3, "node_to_edge x");
  require_rank(s, 3, "node_to_edge S");
  const kernels::HyperDims d{x.shape()[0], x.shape()[1], s.shape()[2], x.shape()[2]};
  if (s.shape()[0] != d.batch || s.shape()[1] != d.nodes || we.shape() != Shape{d.dim, d.dim}) {
    throw ShapeError("node_to_edge: x " + shape_str(x.shape()) + ", S " + shape_str(s.shape()) +
                     ", W_e " + shape_str(we.shape()));
  }
  Tensor agg({d.batch, d.edges, d.dim});
  Tensor he({d.batch, d.edges, d.dim});
  kernels::node_to_edge(d, x.value().data(), s.value().data(), we.value().data(), agg.data(),
                        he.data());
  return x.tape->push(std::move(he), {x, s, we},
                      [x, s, we, d, agg = std::move(agg)](Tape& t, const Tensor& g) {
                        kernels::node_to_edge_backward(d, t.value(x).data(), t.value(s).data(),
                                                       t.value(we).data(), agg.data(), g.data(),
                                                       grad_ptr(t, x), grad_ptr(t, s),
                                                       grad_ptr(t, we));
                      });
}

Var edge_to_node(const Var& he, const Var& s) {
  require_rank(he, 3, "edge_to_node He");
  require_rank(s, 3, "edge_to_node S");
  const kernels::HyperDims d{s.shape()[0], s.shape()[1], s.shape()[2], he.shape()[2]};
  if (he.shape()[0] != d.batch || he.shape()[1] != d.edges) {
    throw ShapeError("edge_to_node: He " + shape_str(he.shape()) + ", S " +
                     shape_str(s.shape()));
  }
  Tensor pre({d.batch, d.nodes, d.dim});
  Tensor xh({d.batch, d.nodes, d.dim});
  kernels::edge_to_node(d, he.value().data(), s.value().data(), pre.data(), xh.data());
  return he.tape->push(std::move(xh), {he, s},
                       [he, s, d, pre = std::move(pre)](Tape& t, const Tensor& g) {
                         kernels::edge_to_node_backward(d, t.value(he).data(),
                                                        t.value(s).data(), pre.data(), g.data(),
                                                        grad_ptr(t, he), grad_ptr(t, s));
                       });
}

Var napl(const Var& z, const Var& e, const Var& theta) {
  require_rank(z, 3, "napl Z");
  require_rank(e, 3, "napl E");
  require_rank(theta, 3, "napl Theta");
  const kernels::NaplDims d{z.shape()[0], z.shape()[1], e.shape()[2], z.shape()[2],
                            theta.shape()[2]};
  if (e.shape()[0] != d.batch || e.shape()[1] != d.nodes || theta.shape()[0] != d.node_dim ||
      theta.shape()[1] != d.in) {
    throw ShapeError("napl: concat width " + std::to_string(d.in) + " / node repr " +
                     shape_str(e.shape()) + " incompatible with weight pool " +
                     shape_str(theta.shape()));
  }
  Tensor out({d.batch, d.nodes, d.out});
  kernels::napl(d, z.value().data(), e.value().data(), theta.value().data(), out.data());
  return z.tape->push(std::move(out), {z, e, theta}, [z, e, theta, d](Tape& t, const Tensor& g) {
    kernels::napl_backward(d, t.value(z).data(), t.value(e).data(), t.value(theta).data(),
                           g.data(), grad_ptr(t, z), grad_ptr(t, e), grad_ptr(t, theta));
  });
}

Var attention(const Var& q, const Var& k, const Var& v, std::size_t heads, Tensor* weights_out) {
  require_rank(q, 3, "attention Q");
  require_rank(k, 4, "attention K");
  require_same(k, v, "attention K/V");
  const auto& ks = k.shape();
  const kernels::AttentionDims d{q.shape()[0], q.shape()[1], ks[1], ks[2], ks[3], heads};
  if (ks[0] != d.batch || q.shape()[2] != d.model_dim) {
    throw ShapeError("attention: Q " + shape_str(q.shape()) + ", K " + shape_str(ks));
  }
  Tensor ctx({d.batch, d.horizon, d.nodes, d.model_dim});
  Tensor w({d.batch, d.horizon, d.nodes, heads, d.history});
  kernels::attention(d, q.value().data(), k.value().data(), v.value().data(), ctx.data(),
                     w.data());
  if (weights_out) *weights_out = w;
  return q.tape->push(std::move(ctx), {q, k, v},
                      [q, k, v, d, w = std::move(w)](Tape& t, const Tensor& g) {
                        kernels::attention_backward(d, t.value(q).data(), t.value(k).data(),
                                                    t.value(v).data(), w.data(), g.data(),
                                                    grad_ptr(t, q), grad_ptr(t, k),
                                                    grad_ptr(t, v));
                      });
}

}  // namespace protohg::ops
