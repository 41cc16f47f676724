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

#ifndef PROTOHG_TRAIN_HPP_
#define PROTOHG_TRAIN_HPP_

#include <array>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "protohg/data.hpp"
#include "protohg/metrics.hpp"
#include "protohg/model.hpp"

namespace protohg::train {

class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainConfig {
  double lr = 1e-3;
  std::size_t batch_size = 64;
  std::size_t max_epochs = 100;
  std::size_t patience = 15;
  std::uint64_t seed = 42;
  double clip_norm = 5.0;
  // Stop after the epoch during which this many seconds elapsed; 0 = no limit.
  double time_budget_seconds = 0.0;
  // Truncate every epoch after this many batches; 0 = full epochs.
  std::size_t max_batches_per_epoch = 0;

  void validate() const;
};

// A loaded corpus with its windows, splits and normalizer.
struct PreparedData {
  std::shared_ptr<const data::RawCorpus> corpus;
  std::shared_ptr<const data::TimeIndices> indices;
  data::Splits splits;
  data::Normalizer norm;
};

PreparedData prepare(data::RawCorpus corpus, std::size_t history, std::size_t horizon,
                     std::array<double, 3> ratios = {6.0, 2.0, 2.0});

struct HistoryRecord {
  std::size_t epoch = 0;
  std::string split;  // "train" | "val"
  double loss = 0.0;  // normalized-scale MAE
  double mae = 0.0, rmse = 0.0, mape = 0.0;
  double wall_time = 0.0;  // seconds since training started
};

struct TrainResult {
  std::vector<HistoryRecord> history;
  std::vector<double> batch_losses;
  std::size_t best_epoch = 0;
  double best_val_mae = std::numeric_limits<double>::infinity();
  std::size_t epochs_run = 0;
  bool early_stopped = false;
  bool budget_exhausted = false;
};

using RecordSink = std::function<void(const HistoryRecord&)>;

// Adam on the masked MAE loss with early stopping on validation MAE. The
// best parameters are restored into the model before returning.
TrainResult fit(model::Forecaster& model, const PreparedData& data, const TrainConfig& cfg,
                const RecordSink& sink = {});

// Metrics on the denormalized scale with a per-horizon breakdown.
MetricReport evaluate(const model::Forecaster& model, const data::WindowSet& windows,
                      const data::Normalizer& norm, std::size_t batch_size = 64);
// Normalized-scale MAE loss of one batch.
double batch_loss(const model::Forecaster& model, const data::Batch& batch);

// Repeats the last observed reading for every horizon step.
MetricReport last_value_baseline(const data::WindowSet& windows);
// Mean reading per (time-of-day slot, node) over the steps spanned by the
// training windows. Slots never seen fall back to the node mean.
Tensor tod_average_table(const data::WindowSet& train);
MetricReport tod_average_baseline(const data::WindowSet& train, const data::WindowSet& eval);

std::map<std::string, Tensor> snapshot(const ParameterSet& params);
void restore(ParameterSet& params, const std::map<std::string, Tensor>& snap);

}  // namespace protohg::train

#endif  // PROTOHG_TRAIN_HPP_
