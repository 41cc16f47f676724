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

#include "protohg/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "protohg/ops.hpp"
#include "protohg/optim.hpp"

namespace protohg::train {

void TrainConfig::validate() const {
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw std::invalid_argument("lr must be >= 0");
  if (batch_size == 0) throw std::invalid_argument("batch_size must be positive");
  if (max_epochs == 0) throw std::invalid_argument("max_epochs must be positive");
  if (!(clip_norm >= 0.0)) throw std::invalid_argument("clip_norm must be >= 0");
  if (!(time_budget_seconds >= 0.0)) {
    throw std::invalid_argument("time_budget_seconds must be >= 0");
  }
}

PreparedData prepare(data::RawCorpus corpus, std::size_t history, std::size_t horizon,
                     std::array<double, 3> ratios) {
  PreparedData out;
  auto c = std::make_shared<const data::RawCorpus>(std::move(corpus));
  auto idx = std::make_shared<const data::TimeIndices>(data::compute_time_indices(*c));
  out.corpus = c;
  out.indices = idx;
  auto windows = data::make_windows(c, idx, history, horizon);
  out.splits = data::split(windows, ratios);
  if (out.splits.train.empty() || out.splits.val.empty() || out.splits.test.empty()) {
    throw data::DataError("corpus too short: a split has no windows");
  }
  out.norm = data::fit_normalizer(out.splits.train);
  return out;
}

namespace {

std::vector<std::size_t> iota_vec(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

template <typename Fn>
void for_each_batch(std::span<const std::size_t> order, std::size_t batch_size, Fn&& fn) {
  for (std::size_t b = 0; b < order.size(); b += batch_size) {
    const std::size_t e = std::min(order.size(), b + batch_size);
    fn(order.subspan(b, e - b));
  }
}

}  // namespace

double batch_loss(const model::Forecaster& model, const data::Batch& batch) {
  Tape tape;
  auto out = model.forward(tape, batch);
  return ops::mae_loss(out.forecast, batch.y, batch.y_mask).value()[0];
}

MetricReport evaluate(const model::Forecaster& model, const data::WindowSet& windows,
                      const data::Normalizer& norm, std::size_t batch_size) {
  MetricAccumulator acc(windows.horizon());
  const auto order = iota_vec(windows.size());
  for_each_batch(order, batch_size, [&](std::span<const std::size_t> which) {
    auto batch = data::make_batch(windows, which, norm);
    acc.add(norm.denormalize(model.predict(batch)), norm.denormalize(batch.y), batch.y_mask);
  });
  return acc.report();
}

std::map<std::string, Tensor> snapshot(const ParameterSet& params) {
  std::map<std::string, Tensor> out;
  for (const Parameter* p : params.all()) out[p->name] = p->value;
  return out;
}

void restore(ParameterSet& params, const std::map<std::string, Tensor>& snap) {
  for (Parameter* p : params.all()) {
    auto it = snap.find(p->name);
    if (it == snap.end()) throw std::runtime_error("snapshot is missing " + p->name);
    if (!it->second.same_shape(p->value)) {
      throw ShapeError("snapshot shape mismatch for " + p->name);
    }
    p->value = it->second;
  }
}

TrainResult fit(model::Forecaster& model, const PreparedData& data, const TrainConfig& cfg,
                const RecordSink& sink) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  ParameterSet& params = model.params();
  Adam opt(params, AdamOptions{cfg.lr});
  std::mt19937_64 rng(cfg.seed);
  const auto& train = data.splits.train;
  const auto& norm = data.norm;

  TrainResult res;
  auto best = snapshot(params);
  std::size_t bad_epochs = 0;
  auto emit = [&](HistoryRecord r) {
    if (sink) sink(r);
    res.history.push_back(std::move(r));
  };

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    auto order = iota_vec(train.size());
    std::shuffle(order.begin(), order.end(), rng);
    if (cfg.max_batches_per_epoch) {
      order.resize(std::min(order.size(), cfg.max_batches_per_epoch * cfg.batch_size));
    }
    MetricAccumulator train_acc(train.horizon());
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for_each_batch(order, cfg.batch_size, [&](std::span<const std::size_t> which) {
      auto batch = data::make_batch(train, which, norm);
      opt.zero_grad();
      Tape tape;
      auto out = model.forward(tape, batch);
      Var loss = ops::mae_loss(out.forecast, batch.y, batch.y_mask);
      const double lv = loss.value()[0];
      if (!std::isfinite(lv)) {
        throw DivergenceError("loss is " + std::to_string(lv) + " at epoch " +
                              std::to_string(epoch) + ", batch " + std::to_string(batches + 1));
      }
      tape.backward(loss);
      clip_grad_norm(params, cfg.clip_norm);
      opt.step();
      train_acc.add(norm.denormalize(out.forecast.value()), norm.denormalize(batch.y),
                    batch.y_mask);
      res.batch_losses.push_back(lv);
      loss_sum += lv;
      ++batches;
    });

    const auto tr = train_acc.report();
    emit({epoch, "train", loss_sum / static_cast<double>(batches), tr.mae, tr.rmse, tr.mape,
          elapsed()});
    const auto va = evaluate(model, data.splits.val, norm, cfg.batch_size);
    emit({epoch, "val", va.mae / norm.std, va.mae, va.rmse, va.mape, elapsed()});
    res.epochs_run = epoch;

    if (va.mae < res.best_val_mae) {
      res.best_val_mae = va.mae;
      res.best_epoch = epoch;
      best = snapshot(params);
      bad_epochs = 0;
    } else if (++bad_epochs > cfg.patience) {
      res.early_stopped = true;
      break;
    }
    if (cfg.time_budget_seconds > 0.0 && elapsed() >= cfg.time_budget_seconds) {
      res.budget_exhausted = true;
      break;
    }
  }
  restore(params, best);
  return res;
}

MetricReport last_value_baseline(const data::WindowSet& windows) {
  const auto& c = windows.corpus();
  const std::size_t L = windows.history(), H = windows.horizon(), N = windows.nodes();
  MetricAccumulator acc(H);
  for (std::size_t s : windows.starts()) {
    Tensor pred({1, H, N}), y({1, H, N}), mask({1, H, N});
    for (std::size_t h = 0; h < H; ++h) {
      for (std::size_t n = 0; n < N; ++n) {
        pred[h * N + n] = c.flow(s + L - 1, n);
        y[h * N + n] = c.flow(s + L + h, n);
        mask[h * N + n] = c.observed[(s + L + h) * N + n];
      }
    }
    acc.add(pred, y, mask);
  }
  return acc.report();
}

Tensor tod_average_table(const data::WindowSet& train) {
  if (train.empty()) throw data::DataError("tod average needs training windows");
  const auto& c = train.corpus();
  const auto& idx = train.indices();
  const std::size_t N = train.nodes();
  const std::size_t slots = static_cast<std::size_t>(idx.slots_per_day);
  const std::size_t first = train.starts().front();
  const std::size_t last = train.starts().back() + train.history() + train.horizon();
  std::vector<double> sum(slots * N, 0.0), node_sum(N, 0.0);
  std::vector<std::size_t> cnt(slots * N, 0), node_cnt(N, 0);
  for (std::size_t t = first; t < last; ++t) {
    const std::size_t slot = static_cast<std::size_t>(idx.tod[t]);
    for (std::size_t n = 0; n < N; ++n) {
      if (!c.observed[t * N + n]) continue;
      sum[slot * N + n] += c.flow(t, n);
      ++cnt[slot * N + n];
      node_sum[n] += c.flow(t, n);
      ++node_cnt[n];
    }
  }
  Tensor table({slots, N});
  for (std::size_t s = 0; s < slots; ++s) {
    for (std::size_t n = 0; n < N; ++n) {
      const std::size_t k = s * N + n;
      table[k] = cnt[k] ? sum[k] / static_cast<double>(cnt[k])
                        : (node_cnt[n] ? node_sum[n] / static_cast<double>(node_cnt[n]) : 0.0);
    }
  }
  return table;
}

MetricReport tod_average_baseline(const data::WindowSet& train, const data::WindowSet& eval) {
  const Tensor table = tod_average_table(train);
  const auto& c = eval.corpus();
  const auto& idx = eval.indices();
  const std::size_t L = eval.history(), H = eval.horizon(), N = eval.nodes();
  MetricAccumulator acc(H);
  for (std::size_t s : eval.starts()) {
    Tensor pred({1, H, N}), y({1, H, N}), mask({1, H, N});
    for (std::size_t h = 0; h < H; ++h) {
      const std::size_t t = s + L + h;
      const std::size_t slot = static_cast<std::size_t>(idx.tod[t]);
      for (std::size_t n = 0; n < N; ++n) {
        pred[h * N + n] = table[slot * N + n];
        y[h * N + n] = c.flow(t, n);
        mask[h * N + n] = c.observed[t * N + n];
      }
    }
    acc.add(pred, y, mask);
  }
  return acc.report();
}

}  // namespace protohg::train
