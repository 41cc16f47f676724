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

#ifndef PROTOHG_METRICS_HPP_
#define PROTOHG_METRICS_HPP_

#include <stdexcept>
#include <vector>

#include "protohg/tensor.hpp"

namespace protohg {

class MetricError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct HorizonMetrics {
  double mae = 0.0;
  double rmse = 0.0;
  double mape = 0.0;  // percent
};

struct MetricReport {
  double mae = 0.0;
  double rmse = 0.0;
  double mape = 0.0;  // percent
  std::size_t count = 0;
  std::vector<HorizonMetrics> per_horizon;  // empty unless inputs are (B,H,N)
};

// Targets with |y| below this are left out of MAPE (flow units).
inline constexpr double kMapeThreshold = 1.0;

// Streaming accumulator so evaluation can run batch by batch.
class MetricAccumulator {
 public:
  explicit MetricAccumulator(std::size_t horizon = 0, double mape_threshold = kMapeThreshold);

  // pred/target/mask share a shape. With a nonzero horizon they must be
  // (B, horizon, N); otherwise any shape is accepted. Mask may be empty.
  void add(const Tensor& pred, const Tensor& target, const Tensor& mask = {});
  // Throws MetricError when nothing was accumulated or every target fell
  // below the MAPE threshold.
  MetricReport report() const;

 private:
  struct Sums {
    double abs = 0.0, sq = 0.0, ape = 0.0;
    std::size_t n = 0, n_ape = 0;
  };
  static HorizonMetrics finish(const Sums& s);

  double threshold_;
  Sums total_;
  std::vector<Sums> per_h_;
};

MetricReport compute_metrics(const Tensor& pred, const Tensor& target, const Tensor& mask = {},
                             double mape_threshold = kMapeThreshold);

}  // namespace protohg

#endif  // PROTOHG_METRICS_HPP_
