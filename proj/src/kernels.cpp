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

#include "protohg/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace protohg::kernels {

using std::size_t;

void matmul(const double* x, const double* w, double* y, size_t rows, size_t k, size_t o,
            bool w_t) {
#pragma omp parallel for schedule(static)
  for (size_t r = 0; r < rows; ++r) {
    const double* xr = x + r * k;
    double* yr = y + r * o;
    std::fill(yr, yr + o, 0.0);
    if (w_t) {
      for (size_t j = 0; j < o; ++j) {
        const double* wj = w + j * k;
        double acc = 0.0;
        for (size_t i = 0; i < k; ++i) acc += xr[i] * wj[i];
        yr[j] = acc;
      }
    } else {
      for (size_t i = 0; i < k; ++i) {
        const double xi = xr[i];
        const double* wi = w + i * o;
        for (size_t j = 0; j < o; ++j) yr[j] += xi * wi[j];
      }
    }
  }
}

void matmul_backward_input(const double* dy, const double* w, double* dx, size_t rows, size_t k,
                           size_t o, bool w_t) {
#pragma omp parallel for schedule(static)
  for (size_t r = 0; r < rows; ++r) {
    const double* dyr = dy + r * o;
    double* dxr = dx + r * k;
    if (w_t) {
      for (size_t j = 0; j < o; ++j) {
        const double g = dyr[j];
        const double* wj = w + j * k;
        for (size_t i = 0; i < k; ++i) dxr[i] += g * wj[i];
      }
    } else {
      for (size_t i = 0; i < k; ++i) {
        const double* wi = w + i * o;
        double acc = 0.0;
        for (size_t j = 0; j < o; ++j) acc += dyr[j] * wi[j];
        dxr[i] += acc;
      }
    }
  }
}

void matmul_backward_weight(const double* x, const double* dy, double* dw, size_t rows,
                            size_t k, size_t o, bool w_t) {
#pragma omp parallel for schedule(static)
  for (size_t i = 0; i < k; ++i) {
    for (size_t r = 0; r < rows; ++r) {
      const double xi = x[r * k + i];
      if (xi == 0.0) continue;
      const double* dyr = dy + r * o;
      if (w_t) {
        for (size_t j = 0; j < o; ++j) dw[j * k + i] += xi * dyr[j];
      } else {
        double* dwi = dw + i * o;
        for (size_t j = 0; j < o; ++j) dwi[j] += xi * dyr[j];
      }
    }
  }
}

namespace {

inline double op_at(const double* m, size_t i, size_t j, size_t rows, size_t cols, bool t) {
  // logical (rows, cols); stored transposed as (cols, rows) when t
  return t ? m[j * rows + i] : m[i * cols + j];
}

inline double& op_ref(double* m, size_t i, size_t j, size_t rows, size_t cols, bool t) {
  return t ? m[j * rows + i] : m[i * cols + j];
}

}  // namespace

void bmm(const double* a, const double* b, double* c, size_t batch, size_t p, size_t q,
         size_t r, bool a_t, bool b_t) {
#pragma omp parallel for schedule(static)
  for (size_t bi = 0; bi < batch; ++bi) {
    const double* ab = a + bi * p * q;
    const double* bb = b + bi * q * r;
    double* cb = c + bi * p * r;
    for (size_t i = 0; i < p; ++i) {
      for (size_t l = 0; l < r; ++l) {
        double acc = 0.0;
        for (size_t j = 0; j < q; ++j) {
          acc += op_at(ab, i, j, p, q, a_t) * op_at(bb, j, l, q, r, b_t);
        }
        cb[i * r + l] = acc;
      }
    }
  }
}

void bmm_backward(const double* a, const double* b, const double* dc, double* da, double* db,
                  size_t batch, size_t p, size_t q, size_t r, bool a_t, bool b_t) {
#pragma omp parallel for schedule(static)
  for (size_t bi = 0; bi < batch; ++bi) {
    const double* ab = a + bi * p * q;
    const double* bb = b + bi * q * r;
    const double* dcb = dc + bi * p * r;
    if (da) {
      double* dab = da + bi * p * q;
      for (size_t i = 0; i < p; ++i) {
        for (size_t j = 0; j < q; ++j) {
          double acc = 0.0;
          for (size_t l = 0; l < r; ++l) acc += dcb[i * r + l] * op_at(bb, j, l, q, r, b_t);
          op_ref(dab, i, j, p, q, a_t) += acc;
        }
      }
    }
    if (db) {
      double* dbb = db + bi * q * r;
      for (size_t j = 0; j < q; ++j) {
        for (size_t l = 0; l < r; ++l) {
          double acc = 0.0;
          for (size_t i = 0; i < p; ++i) acc += op_at(ab, i, j, p, q, a_t) * dcb[i * r + l];
          op_ref(dbb, j, l, q, r, b_t) += acc;
        }
      }
    }
  }
}

void softmax_rows(const double* x, double* y, size_t rows, size_t cols) {
#pragma omp parallel for schedule(static)
  for (size_t i = 0; i < rows; ++i) {
    const double* xi = x + i * cols;
    double* yi = y + i * cols;
    const double mx = *std::max_element(xi, xi + cols);
    double sum = 0.0;
    for (size_t j = 0; j < cols; ++j) {
      yi[j] = std::exp(xi[j] - mx);
      sum += yi[j];
    }
    for (size_t j = 0; j < cols; ++j) yi[j] /= sum;
  }
}

void softmax_rows_backward(const double* y, const double* dy, double* dx, size_t rows,
                           size_t cols) {
#pragma omp parallel for schedule(static)
  for (size_t i = 0; i < rows; ++i) {
    const double* yi = y + i * cols;
    const double* dyi = dy + i * cols;
    double dot = 0.0;
    for (size_t j = 0; j < cols; ++j) dot += yi[j] * dyi[j];
    for (size_t j = 0; j < cols; ++j) dx[i * cols + j] += yi[j] * (dyi[j] - dot);
  }
}

void gate_mix(const GateMixDims& d, const double* alpha, const double* local,
              const double* global, double* out) {
#pragma omp parallel for collapse(2) schedule(static)
  for (size_t b = 0; b < d.batch; ++b) {
    for (size_t n = 0; n < d.nodes; ++n) {
      const double* a = alpha + b * d.dim;
      const double* l = local + (b * d.nodes + n) * d.dim;
      const double* g = global + n * d.dim;
      double* o = out + (b * d.nodes + n) * d.dim;
      for (size_t j = 0; j < d.dim; ++j) o[j] = a[j] * l[j] + (1.0 - a[j]) * g[j];
    }
  }
}

void gate_mix_backward(const GateMixDims& d, const double* alpha, const double* local,
                       const double* global, const double* dout, double* dalpha,
                       double* dlocal, double* dglobal) {
  if (dalpha || dlocal) {
#pragma omp parallel for schedule(static)
    for (size_t b = 0; b < d.batch; ++b) {
      const double* a = alpha + b * d.dim;
      for (size_t n = 0; n < d.nodes; ++n) {
        const size_t row = (b * d.nodes + n) * d.dim;
        for (size_t j = 0; j < d.dim; ++j) {
          const double g = dout[row + j];
          if (dalpha) dalpha[b * d.dim + j] += g * (local[row + j] - global[n * d.dim + j]);
          if (dlocal) dlocal[row + j] += g * a[j];
        }
      }
    }
  }
  if (dglobal) {
#pragma omp parallel for schedule(static)
    for (size_t n = 0; n < d.nodes; ++n) {
      for (size_t b = 0; b < d.batch; ++b) {
        const size_t row = (b * d.nodes + n) * d.dim;
        for (size_t j = 0; j < d.dim; ++j) {
          dglobal[n * d.dim + j] += dout[row + j] * (1.0 - alpha[b * d.dim + j]);
        }
      }
    }
  }
}

void node_to_edge(const HyperDims& d, const double* x, const double* s, const double* we,
                  double* agg, double* he) {
  const size_t N = d.nodes, M = d.edges, D = d.dim;
#pragma omp parallel for schedule(static)
  for (size_t b = 0; b < d.batch; ++b) {
    const double* xb = x + b * N * D;
    const double* sb = s + b * N * M;
    double* ab = agg + b * M * D;
    std::fill(ab, ab + M * D, 0.0);
    for (size_t n = 0; n < N; ++n) {
      double dv = 0.0;
      for (size_t m = 0; m < M; ++m) dv += sb[n * M + m];
      const double inv_sqrt = 1.0 / std::sqrt(dv);
      for (size_t m = 0; m < M; ++m) {
        const double w = sb[n * M + m] * inv_sqrt;
        for (size_t j = 0; j < D; ++j) ab[m * D + j] += w * xb[n * D + j];
      }
    }
  }
  matmul(agg, we, he, d.batch * M, D, D, false);
}

void node_to_edge_backward(const HyperDims& d, const double* x, const double* s,
                           const double* we, const double* agg, const double* dhe, double* dx,
                           double* ds, double* dwe) {
  const size_t N = d.nodes, M = d.edges, D = d.dim;
  if (dwe) matmul_backward_weight(agg, dhe, dwe, d.batch * M, D, D, false);
  if (!dx && !ds) return;
#pragma omp parallel for schedule(static)
  for (size_t b = 0; b < d.batch; ++b) {
    std::vector<double> dagg(M * D, 0.0);
    matmul_backward_input(dhe + b * M * D, we, dagg.data(), M, D, D, false);
    const double* xb = x + b * N * D;
    const double* sb = s + b * N * M;
    for (size_t n = 0; n < N; ++n) {
      double dv = 0.0;
      for (size_t m = 0; m < M; ++m) dv += sb[n * M + m];
      const double inv_sqrt = 1.0 / std::sqrt(dv);
      double degree_term = 0.0;
      for (size_t m = 0; m < M; ++m) {
        const double snm = sb[n * M + m];
        double dot = 0.0;
        for (size_t j = 0; j < D; ++j) {
          dot += xb[n * D + j] * dagg[m * D + j];
          if (dx) dx[(b * N + n) * D + j] += snm * inv_sqrt * dagg[m * D + j];
        }
        if (ds) ds[(b * N + n) * M + m] += inv_sqrt * dot;
        degree_term += snm * dot;
      }
      if (ds) {
        const double ddv = -0.5 * degree_term * inv_sqrt / dv;
        for (size_t m = 0; m < M; ++m) ds[(b * N + n) * M + m] += ddv;
      }
    }
  }
}

namespace {

std::vector<double> edge_degrees(const HyperDims& d, const double* s) {
  const size_t N = d.nodes, M = d.edges;
  std::vector<double> de(d.batch * M, 0.0);
#pragma omp parallel for schedule(static)
  for (size_t b = 0; b < d.batch; ++b) {
    for (size_t n = 0; n < N; ++n) {
      for (size_t m = 0; m < M; ++m) de[b * M + m] += s[(b * N + n) * M + m];
    }
  }
  for (double v : de) {
    if (!(v > 0.0)) throw std::domain_error("hyperedge with zero membership mass");
  }
  return de;
}

}  // namespace

void edge_to_node(const HyperDims& d, const double* he, const double* s, double* pre,
                  double* xh) {
  const size_t N = d.nodes, M = d.edges, D = d.dim;
  const auto de = edge_degrees(d, s);
#pragma omp parallel for collapse(2) schedule(static)
  for (size_t b = 0; b < d.batch; ++b) {
    for (size_t n = 0; n < N; ++n) {
      const double* sn = s + (b * N + n) * M;
      double dv = 0.0;
      for (size_t m = 0; m < M; ++m) dv += sn[m];
      const double inv_sqrt = 1.0 / std::sqrt(dv);
      double* p = pre + (b * N + n) * D;
      std::fill(p, p + D, 0.0);
      for (size_t m = 0; m < M; ++m) {
        const double w = sn[m] / de[b * M + m];
        const double* hm = he + (b * M + m) * D;
        for (size_t j = 0; j < D; ++j) p[j] += w * hm[j];
      }
      double* o = xh + (b * N + n) * D;
      for (size_t j = 0; j < D; ++j) {
        p[j] *= inv_sqrt;
        o[j] = p[j] > 0.0 ? p[j] : 0.0;
      }
    }
  }
}

void edge_to_node_backward(const HyperDims& d, const double* he, const double* s,
                           const double* pre, const double* dxh, double* dhe, double* ds) {
  const size_t N = d.nodes, M = d.edges, D = d.dim;
  const auto de = edge_degrees(d, s);
#pragma omp parallel for schedule(static)
  for (size_t b = 0; b < d.batch; ++b) {
    std::vector<double> g(N * D);
    std::vector<double> inv_sqrt(N);
    for (size_t n = 0; n < N; ++n) {
      double dv = 0.0;
      for (size_t m = 0; m < M; ++m) dv += s[(b * N + n) * M + m];
      inv_sqrt[n] = 1.0 / std::sqrt(dv);
      for (size_t j = 0; j < D; ++j) {
        const size_t idx = (b * N + n) * D + j;
        g[n * D + j] = pre[idx] > 0.0 ? dxh[idx] : 0.0;
      }
    }
    std::vector<double> dde(M, 0.0);
    for (size_t n = 0; n < N; ++n) {
      const double* sn = s + (b * N + n) * M;
      const double* gn = g.data() + n * D;
      double pre_dot_g = 0.0;
      for (size_t j = 0; j < D; ++j) pre_dot_g += pre[(b * N + n) * D + j] * gn[j];
      // dv^{-1/2} factor: d/d dv of dv^{-1/2} q = -1/2 dv^{-1} pre
      const double ddv = -0.5 * inv_sqrt[n] * inv_sqrt[n] * pre_dot_g;
      for (size_t m = 0; m < M; ++m) {
        const double* hm = he + (b * M + m) * D;
        double q = 0.0;
        for (size_t j = 0; j < D; ++j) q += hm[j] * gn[j];
        const double inv_de = 1.0 / de[b * M + m];
        if (dhe) {
          const double w = sn[m] * inv_sqrt[n] * inv_de;
          double* dhm = dhe + (b * M + m) * D;
          for (size_t j = 0; j < D; ++j) dhm[j] += w * gn[j];
        }
        if (ds) {
          ds[(b * N + n) * M + m] += inv_sqrt[n] * q * inv_de + ddv;
          dde[m] -= inv_sqrt[n] * sn[m] * q * inv_de * inv_de;
        }
      }
    }
    if (ds) {
      for (size_t n = 0; n < N; ++n) {
        for (size_t m = 0; m < M; ++m) ds[(b * N + n) * M + m] += dde[m];
      }
    }
  }
}

void napl(const NaplDims& d, const double* z, const double* e, const double* theta,
          double* out) {
  const size_t rows = d.batch * d.nodes;
  const size_t K = d.in, O = d.out, Dn = d.node_dim;
#pragma omp parallel for schedule(static)
  for (size_t r = 0; r < rows; ++r) {
    const double* zr = z + r * K;
    const double* er = e + r * Dn;
    double* o = out + r * O;
    std::fill(o, o + O, 0.0);
    for (size_t dd = 0; dd < Dn; ++dd) {
      const double ed = er[dd];
      const double* th = theta + dd * K * O;
      for (size_t k = 0; k < K; ++k) {
        const double w = ed * zr[k];
        const double* thk = th + k * O;
        for (size_t j = 0; j < O; ++j) o[j] += w * thk[j];
      }
    }
  }
}

void napl_backward(const NaplDims& d, const double* z, const double* e, const double* theta,
                   const double* dout, double* dz, double* de, double* dtheta) {
  const size_t rows = d.batch * d.nodes;
  const size_t K = d.in, O = d.out, Dn = d.node_dim;
  if (dz || de) {
#pragma omp parallel for schedule(static)
    for (size_t r = 0; r < rows; ++r) {
      const double* zr = z + r * K;
      const double* er = e + r * Dn;
      const double* g = dout + r * O;
      for (size_t dd = 0; dd < Dn; ++dd) {
        const double* th = theta + dd * K * O;
        double de_acc = 0.0;
        for (size_t k = 0; k < K; ++k) {
          double t = 0.0;
          const double* thk = th + k * O;
          for (size_t j = 0; j < O; ++j) t += thk[j] * g[j];
          if (dz) dz[r * K + k] += er[dd] * t;
          de_acc += zr[k] * t;
        }
        if (de) de[r * Dn + dd] += de_acc;
      }
    }
  }
  if (dtheta) {
#pragma omp parallel for collapse(2) schedule(static)
    for (size_t dd = 0; dd < Dn; ++dd) {
      for (size_t k = 0; k < K; ++k) {
        double* dth = dtheta + (dd * K + k) * O;
        for (size_t r = 0; r < rows; ++r) {
          const double w = e[r * Dn + dd] * z[r * K + k];
          if (w == 0.0) continue;
          const double* g = dout + r * O;
          for (size_t j = 0; j < O; ++j) dth[j] += w * g[j];
        }
      }
    }
  }
}

void attention(const AttentionDims& d, const double* q, const double* k, const double* v,
               double* ctx, double* weights) {
  if (d.heads == 0 || d.model_dim % d.heads != 0) {
    throw std::invalid_argument("attention: model_dim must be divisible by heads");
  }
  const size_t Hz = d.horizon, L = d.history, N = d.nodes, Dm = d.model_dim;
  const size_t dh = Dm / d.heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
#pragma omp parallel for collapse(2) schedule(static)
  for (size_t b = 0; b < d.batch; ++b) {
    for (size_t h = 0; h < Hz; ++h) {
      const double* qh = q + (b * Hz + h) * Dm;
      std::vector<double> score(L);
      for (size_t n = 0; n < N; ++n) {
        double* c = ctx + ((b * Hz + h) * N + n) * Dm;
        std::fill(c, c + Dm, 0.0);
        for (size_t head = 0; head < d.heads; ++head) {
          const size_t off = head * dh;
          for (size_t l = 0; l < L; ++l) {
            const double* kl = k + ((b * L + l) * N + n) * Dm + off;
            double acc = 0.0;
            for (size_t j = 0; j < dh; ++j) acc += qh[off + j] * kl[j];
            score[l] = acc * scale;
          }
          const double mx = *std::max_element(score.begin(), score.end());
          double sum = 0.0;
          for (auto& sc : score) {
            sc = std::exp(sc - mx);
            sum += sc;
          }
          double* w = weights + (((b * Hz + h) * N + n) * d.heads + head) * L;
          for (size_t l = 0; l < L; ++l) {
            w[l] = score[l] / sum;
            const double* vl = v + ((b * L + l) * N + n) * Dm + off;
            for (size_t j = 0; j < dh; ++j) c[off + j] += w[l] * vl[j];
          }
        }
      }
    }
  }
}

void attention_backward(const AttentionDims& d, const double* q, const double* k,
                        const double* v, const double* weights, const double* dctx, double* dq,
                        double* dk, double* dv) {
  const size_t Hz = d.horizon, L = d.history, N = d.nodes, Dm = d.model_dim;
  const size_t dh = Dm / d.heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
#pragma omp parallel for schedule(static)
  for (size_t b = 0; b < d.batch; ++b) {
    std::vector<double> dw(L), dscore(L);
    for (size_t h = 0; h < Hz; ++h) {
      const double* qh = q + (b * Hz + h) * Dm;
      for (size_t n = 0; n < N; ++n) {
        const double* gc = dctx + ((b * Hz + h) * N + n) * Dm;
        for (size_t head = 0; head < d.heads; ++head) {
          const size_t off = head * dh;
          const double* w = weights + (((b * Hz + h) * N + n) * d.heads + head) * L;
          double wdw = 0.0;
          for (size_t l = 0; l < L; ++l) {
            const size_t row = ((b * L + l) * N + n) * Dm + off;
            double acc = 0.0;
            for (size_t j = 0; j < dh; ++j) {
              acc += gc[off + j] * v[row + j];
              if (dv) dv[row + j] += w[l] * gc[off + j];
            }
            dw[l] = acc;
            wdw += w[l] * acc;
          }
          for (size_t l = 0; l < L; ++l) dscore[l] = w[l] * (dw[l] - wdw) * scale;
          for (size_t l = 0; l < L; ++l) {
            const size_t row = ((b * L + l) * N + n) * Dm + off;
            for (size_t j = 0; j < dh; ++j) {
              if (dq) dq[(b * Hz + h) * Dm + off + j] += dscore[l] * k[row + j];
              if (dk) dk[row + j] += dscore[l] * qh[off + j];
            }
          }
        }
      }
    }
  }
}

}  // namespace protohg::kernels
