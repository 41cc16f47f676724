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

#include "protohg/metrics.hpp"

#include <cmath>

namespace protohg {

MetricAccumulator::MetricAccumulator(std::size_t horizon, double mape_threshold)
    : threshold_(mape_threshold), per_h_(horizon) {}

void MetricAccumulator::add(const Tensor& pred, const Tensor& target, const Tensor& mask) {
  if (!pred.same_shape(target)) {
    throw ShapeError("metrics: pred " + shape_str(pred.shape()) + " vs target " +
                     shape_str(target.shape()));
  }
  if (mask.size() && !mask.same_shape(target)) throw ShapeError("metrics: mask shape");
  std::size_t H = per_h_.size(), inner = 1;
  if (H) {
    if (pred.rank() != 3 || pred.dim(1) != H) {
      throw ShapeError("metrics: expected (B," + std::to_string(H) + ",N), got " +
                       shape_str(pred.shape()));
    }
    inner = pred.dim(2);
  }
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (mask.size() && mask[i] == 0.0) continue;
    const double e = pred[i] - target[i];
    const double a = std::fabs(e);
    Sums* dst[2] = {&total_, H ? &per_h_[(i / inner) % H] : nullptr};
    for (Sums* s : dst) {
      if (!s) continue;
      s->abs += a;
      s->sq += e * e;
      ++s->n;
      if (std::fabs(target[i]) >= threshold_) {
        s->ape += a / std::fabs(target[i]);
        ++s->n_ape;
      }
    }
  }
}

HorizonMetrics MetricAccumulator::finish(const Sums& s) {
  HorizonMetrics m;
  const double n = static_cast<double>(s.n);
  m.mae = s.abs / n;
  m.rmse = std::sqrt(s.sq / n);
  m.mape = s.n_ape ? 100.0 * s.ape / static_cast<double>(s.n_ape) : 0.0;
  return m;
}

MetricReport MetricAccumulator::report() const {
  if (total_.n == 0) throw MetricError("metrics: no unmasked entries");
  if (total_.n_ape == 0) {
    throw MetricError("metrics: every target is below the MAPE threshold " +
                      std::to_string(threshold_));
  }
  MetricReport r;
  const auto t = finish(total_);
  r.mae = t.mae;
  r.rmse = t.rmse;
  r.mape = t.mape;
  r.count = total_.n;
  for (const auto& s : per_h_) r.per_horizon.push_back(s.n ? finish(s) : HorizonMetrics{});
  return r;
}

MetricReport compute_metrics(const Tensor& pred, const Tensor& target, const Tensor& mask,
                             double mape_threshold) {
  MetricAccumulator acc(0, mape_threshold);
  acc.add(pred, target, mask);
  return acc.report();
}

}  // namespace protohg
