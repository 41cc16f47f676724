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

#include "protohg/reference.hpp"

#include <cmath>
#include <stdexcept>

namespace protohg::reference {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Row-major index helpers.
inline std::size_t i2(std::size_t a, std::size_t b, std::size_t nb) { return a * nb + b; }
inline std::size_t i3(std::size_t a, std::size_t b, std::size_t c, std::size_t nb,
                      std::size_t nc) {
  return (a * nb + b) * nc + c;
}

void softmax_inplace(std::vector<double>& row) {
  double mx = row[0];
  for (double v : row) mx = v > mx ? v : mx;
  double z = 0.0;
  for (double& v : row) {
    v = std::exp(v - mx);
    z += v;
  }
  for (double& v : row) v /= z;
}

// (B,N,K) x (K,O)
Tensor project(const Tensor& x, const Tensor& w) {
  const std::size_t K = w.dim(0), O = w.dim(1);
  if (x.shape().back() != K) throw ShapeError("reference::project");
  const std::size_t rows = x.size() / K;
  Shape s = x.shape();
  s.back() = O;
  Tensor y(s);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t o = 0; o < O; ++o) {
      double acc = 0.0;
      for (std::size_t k = 0; k < K; ++k) acc += x[r * K + k] * w[k * O + o];
      y[r * O + o] = acc;
    }
  return y;
}

Tensor cat_last(const Tensor& a, const Tensor& b) {
  const std::size_t ca = a.shape().back(), cb = b.shape().back();
  const std::size_t rows = a.size() / ca;
  Shape s = a.shape();
  s.back() = ca + cb;
  Tensor y(s);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < ca; ++c) y[r * (ca + cb) + c] = a[r * ca + c];
    for (std::size_t c = 0; c < cb; ++c) y[r * (ca + cb) + ca + c] = b[r * cb + c];
  }
  return y;
}

}  // namespace

Tensor gate(const Tensor& time, const Tensor& w_t) {
  const std::size_t B = time.dim(0), T = time.dim(1), Dn = w_t.dim(1);
  Tensor a({B, Dn});
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t d = 0; d < Dn; ++d) {
      double z = 0.0;
      for (std::size_t t = 0; t < T; ++t) z += time[i2(b, t, T)] * w_t[i2(t, d, Dn)];
      a[i2(b, d, Dn)] = sigmoid(z);
    }
  return a;
}

Tensor node_repr(const Tensor& h_prev, const Tensor& e_s, const Tensor& time, const Tensor& w_h,
                 const Tensor& w_t) {
  const std::size_t B = h_prev.dim(0), N = h_prev.dim(1), D = h_prev.dim(2);
  const std::size_t Dn = w_h.dim(1);
  const Tensor a = gate(time, w_t);
  Tensor e({B, N, Dn});
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t n = 0; n < N; ++n)
      for (std::size_t d = 0; d < Dn; ++d) {
        double local = 0.0;
        for (std::size_t k = 0; k < D; ++k) local += h_prev[i3(b, n, k, N, D)] * w_h[i2(k, d, Dn)];
        const double al = a[i2(b, d, Dn)];
        e[i3(b, n, d, N, Dn)] = al * local + (1.0 - al) * e_s[i2(n, d, Dn)];
      }
  return e;
}

Tensor assignment(const Tensor& e_n, const Tensor& prototypes) {
  const std::size_t B = e_n.dim(0), N = e_n.dim(1), Dn = e_n.dim(2), M = prototypes.dim(0);
  Tensor s({B, N, M});
  std::vector<double> row(M);
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t n = 0; n < N; ++n) {
      for (std::size_t m = 0; m < M; ++m) {
        double z = 0.0;
        for (std::size_t d = 0; d < Dn; ++d) z += e_n[i3(b, n, d, N, Dn)] * prototypes[i2(m, d, Dn)];
        row[m] = z;
      }
      softmax_inplace(row);
      for (std::size_t m = 0; m < M; ++m) s[i3(b, n, m, N, M)] = row[m];
    }
  return s;
}

Tensor node_to_edge(const Tensor& x_e, const Tensor& s, const Tensor& w_e) {
  const std::size_t B = s.dim(0), N = s.dim(1), M = s.dim(2), D = x_e.dim(2);
  const std::size_t O = w_e.dim(1);
  Tensor he({B, M, O});
  for (std::size_t b = 0; b < B; ++b) {
    std::vector<double> dv(N, 0.0);
    for (std::size_t n = 0; n < N; ++n)
      for (std::size_t m = 0; m < M; ++m) dv[n] += s[i3(b, n, m, N, M)];
    for (std::size_t m = 0; m < M; ++m)
      for (std::size_t o = 0; o < O; ++o) {
        double acc = 0.0;
        for (std::size_t n = 0; n < N; ++n) {
          const double coef = s[i3(b, n, m, N, M)] / std::sqrt(dv[n]);
          for (std::size_t k = 0; k < D; ++k) acc += coef * x_e[i3(b, n, k, N, D)] * w_e[i2(k, o, O)];
        }
        he[i3(b, m, o, M, O)] = acc;
      }
  }
  return he;
}

Tensor edge_to_node(const Tensor& he, const Tensor& s) {
  const std::size_t B = s.dim(0), N = s.dim(1), M = s.dim(2), D = he.dim(2);
  Tensor xh({B, N, D});
  for (std::size_t b = 0; b < B; ++b) {
    std::vector<double> dv(N, 0.0), de(M, 0.0);
    for (std::size_t n = 0; n < N; ++n)
      for (std::size_t m = 0; m < M; ++m) {
        dv[n] += s[i3(b, n, m, N, M)];
        de[m] += s[i3(b, n, m, N, M)];
      }
    for (std::size_t m = 0; m < M; ++m) {
      if (!(de[m] > 0.0)) throw std::domain_error("reference: empty hyperedge");
    }
    for (std::size_t n = 0; n < N; ++n)
      for (std::size_t d = 0; d < D; ++d) {
        double acc = 0.0;
        for (std::size_t m = 0; m < M; ++m) acc += s[i3(b, n, m, N, M)] * he[i3(b, m, d, M, D)] / de[m];
        const double v = acc / std::sqrt(dv[n]);
        xh[i3(b, n, d, N, D)] = v > 0.0 ? v : 0.0;
      }
  }
  return xh;
}

Tensor napl(const Tensor& x_h, const Tensor& x_e, const Tensor& e_n, const Tensor& theta) {
  const Tensor z = cat_last(x_h, x_e);
  const std::size_t B = z.dim(0), N = z.dim(1), K = z.dim(2);
  const std::size_t Dn = theta.dim(0), O = theta.dim(2);
  if (theta.dim(1) != K || e_n.dim(2) != Dn) throw ShapeError("reference::napl");
  Tensor out({B, N, O});
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t n = 0; n < N; ++n) {
      // Per-node weight W_o[n] = sum_d E^N[n,d] Theta[d], (K,O).
      std::vector<double> w(K * O, 0.0);
      for (std::size_t d = 0; d < Dn; ++d) {
        const double e = e_n[i3(b, n, d, N, Dn)];
        for (std::size_t k = 0; k < K; ++k)
          for (std::size_t o = 0; o < O; ++o) w[k * O + o] += e * theta[i3(d, k, o, K, O)];
      }
      for (std::size_t o = 0; o < O; ++o) {
        double acc = 0.0;
        for (std::size_t k = 0; k < K; ++k) acc += z[i3(b, n, k, N, K)] * w[k * O + o];
        out[i3(b, n, o, N, O)] = acc;
      }
    }
  return out;
}

Tensor dgc_adjacency(const Tensor& e_n) {
  const std::size_t B = e_n.dim(0), N = e_n.dim(1), Dn = e_n.dim(2);
  Tensor a({B, N, N});
  std::vector<double> row(N);
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t j = 0; j < N; ++j) {
        double z = 0.0;
        for (std::size_t d = 0; d < Dn; ++d) z += e_n[i3(b, i, d, N, Dn)] * e_n[i3(b, j, d, N, Dn)];
        row[j] = z > 0.0 ? z : 0.0;
      }
      softmax_inplace(row);
      for (std::size_t j = 0; j < N; ++j) a[i3(b, i, j, N, N)] = row[j];
    }
  return a;
}

Tensor hgconv(const Tensor& x_in, const Tensor& h_prev, const Tensor& time, const Tensor& e_s,
              const StructureWeights& st, const ConvWeights& cw) {
  const Tensor e_n = node_repr(h_prev, e_s, time, st.w_h, st.w_t);
  const Tensor s = assignment(e_n, st.p);
  const Tensor x_e = project(x_in, cw.w_x);
  const Tensor xh = edge_to_node(node_to_edge(x_e, s, cw.w_e), s);
  return napl(xh, x_e, e_n, cw.theta);
}

Tensor cell_step(const Tensor& x, const Tensor& h_prev, const Tensor& time, const Tensor& e_s,
                 const CellWeights& w) {
  const Tensor xh = cat_last(x, h_prev);
  Tensor r = hgconv(xh, h_prev, time, e_s, w.structure, w.r);
  Tensor u = hgconv(xh, h_prev, time, e_s, w.structure, w.u);
  for (std::size_t i = 0; i < r.size(); ++i) {
    r[i] = sigmoid(r[i]);
    u[i] = sigmoid(u[i]);
  }
  Tensor rh = h_prev;
  for (std::size_t i = 0; i < rh.size(); ++i) rh[i] *= r[i];
  Tensor c = hgconv(cat_last(x, rh), h_prev, time, e_s, w.structure, w.h);
  Tensor out(h_prev.shape());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = u[i] * h_prev[i] + (1.0 - u[i]) * std::tanh(c[i]);
  }
  return out;
}

Tensor tqa(const Tensor& et_f, const Tensor& et_p, const Tensor& h_p, const TqaWeights& w,
           std::size_t heads, Tensor* weights) {
  const std::size_t B = h_p.dim(0), L = h_p.dim(1), N = h_p.dim(2), D = h_p.dim(3);
  const std::size_t H = et_f.dim(1);
  if (D % heads != 0) throw ShapeError("reference::tqa heads");
  const std::size_t dh = D / heads;
  const Tensor q = project(et_f, w.w_q);   // (B,H,D)
  const Tensor tp = project(et_p, w.w_tp); // (B,L,D)
  Tensor mod(h_p.shape());
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t l = 0; l < L; ++l)
      for (std::size_t n = 0; n < N; ++n)
        for (std::size_t d = 0; d < D; ++d) {
          const std::size_t idx = ((b * L + l) * N + n) * D + d;
          mod[idx] = tp[i3(b, l, d, L, D)] * h_p[idx];
        }
  const Tensor k = project(mod, w.w_k);
  const Tensor v = project(mod, w.w_v);
  Tensor ctx({B, H, N, D});
  if (weights) *weights = Tensor({B, H, N, heads, L});
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  std::vector<double> row(L);
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t h = 0; h < H; ++h)
      for (std::size_t n = 0; n < N; ++n)
        for (std::size_t hd = 0; hd < heads; ++hd) {
          for (std::size_t l = 0; l < L; ++l) {
            double z = 0.0;
            for (std::size_t j = 0; j < dh; ++j) {
              const std::size_t d = hd * dh + j;
              z += q[i3(b, h, d, H, D)] * k[((b * L + l) * N + n) * D + d];
            }
            row[l] = z * scale;
          }
          softmax_inplace(row);
          for (std::size_t j = 0; j < dh; ++j) {
            const std::size_t d = hd * dh + j;
            double acc = 0.0;
            for (std::size_t l = 0; l < L; ++l) acc += row[l] * v[((b * L + l) * N + n) * D + d];
            ctx[((b * H + h) * N + n) * D + d] = acc;
          }
          if (weights) {
            for (std::size_t l = 0; l < L; ++l) {
              (*weights)[(((b * H + h) * N + n) * heads + hd) * L + l] = row[l];
            }
          }
        }
  return ctx;
}

}  // namespace protohg::reference
