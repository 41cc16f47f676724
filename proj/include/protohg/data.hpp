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

#ifndef PROTOHG_DATA_HPP_
#define PROTOHG_DATA_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "protohg/tensor.hpp"

namespace protohg::data {

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Wall-clock start of a corpus, minute resolution. Parsed from
// "YYYY-MM-DD HH:MM" (a 'T' separator is accepted too).
struct CivilTime {
  int year = 2024, month = 1, day = 1, hour = 0, minute = 0;

  static CivilTime parse(const std::string& text);
  std::string str() const;
  // 0 = Monday ... 6 = Sunday
  int weekday() const;
};

struct RawCorpus {
  Tensor values;                      // (T, N, C_raw); channel 0 is traffic flow
  std::vector<std::uint8_t> observed;  // (T, N) 0 where channel 0 was imputed
  CivilTime start;
  int period_minutes = 5;

  std::size_t steps() const { return values.rank() ? values.dim(0) : 0; }
  std::size_t nodes() const { return values.rank() > 1 ? values.dim(1) : 0; }
  std::size_t channels() const { return values.rank() > 2 ? values.dim(2) : 0; }
  double flow(std::size_t t, std::size_t n) const {
    return values[(t * nodes() + n) * channels()];
  }
};

// key=value descriptor pointing at a dense tensor file.
struct Descriptor {
  std::size_t nodes = 0;
  std::size_t timesteps = 0;
  std::size_t channels = 1;
  int period_minutes = 5;
  std::string start = "2024-01-01 00:00";
  std::filesystem::path values_path;  // relative paths resolve against the descriptor
  std::string dtype = "float32";      // float32 | float64 | csv
  std::filesystem::path groups_path;  // optional node-group labels (synthetic data)

  static Descriptor read(const std::filesystem::path& path);
  void write(const std::filesystem::path& path) const;
};

struct LoadOptions {
  // Fraction of missing channel-0 readings above which loading fails.
  double max_nan_fraction = 0.05;
};

// Loads a corpus through its descriptor. Missing readings (NaN) are linearly
// interpolated per node along time when their fraction is below the limit.
RawCorpus load_pems(const std::filesystem::path& descriptor_path,
                    const LoadOptions& opts = {});
RawCorpus load_pems(const Descriptor& desc, const std::filesystem::path& base_dir,
                    const LoadOptions& opts = {});
std::vector<int> load_groups(const std::filesystem::path& descriptor_path);

// In-place interpolation of NaNs in a (T, N, C) tensor; returns the number of
// NaNs found. Throws when the fraction exceeds the limit or a series is empty.
std::size_t impute_missing(Tensor& values, std::vector<std::uint8_t>& observed,
                           double max_nan_fraction);

struct TimeIndices {
  std::vector<int> tod;
  std::vector<int> dow;
  int slots_per_day = 288;
};

int slots_per_day(int period_minutes);
TimeIndices compute_time_indices(const RawCorpus& corpus);

struct Normalizer {
  double mean = 0.0;
  double std = 1.0;

  double normalize(double v) const { return (v - mean) / std; }
  double denormalize(double v) const { return v * std + mean; }
  Tensor normalize(const Tensor& t) const;
  Tensor denormalize(const Tensor& t) const;
};

// One training sample, materialized.
struct TrafficWindow {
  std::size_t start = 0;  // first history step in the corpus
  Tensor x;               // (L, N, 3): [flow, tod / slots, dow / 7]
  Tensor y;               // (H, N) flow targets
  Tensor y_mask;          // (H, N) 1 where the target was observed
  std::vector<int> tod_past, dow_past, tod_future, dow_future;
};

// Stride-1 windows over a shared corpus. Windows are materialized on demand
// so full-size corpora do not need L+H copies of every reading.
class WindowSet {
 public:
  WindowSet() = default;
  WindowSet(std::shared_ptr<const RawCorpus> corpus, std::shared_ptr<const TimeIndices> idx,
            std::vector<std::size_t> starts, std::size_t history, std::size_t horizon);

  std::size_t size() const { return starts_.size(); }
  bool empty() const { return starts_.empty(); }
  std::size_t history() const { return history_; }
  std::size_t horizon() const { return horizon_; }
  std::size_t nodes() const { return corpus_ ? corpus_->nodes() : 0; }
  const std::vector<std::size_t>& starts() const { return starts_; }
  const RawCorpus& corpus() const { return *corpus_; }
  const TimeIndices& indices() const { return *indices_; }

  // Flow channels are normalized when a normalizer is given, raw otherwise.
  TrafficWindow at(std::size_t i, const Normalizer* norm = nullptr) const;
  WindowSet slice(std::size_t begin, std::size_t end) const;

 private:
  std::shared_ptr<const RawCorpus> corpus_;
  std::shared_ptr<const TimeIndices> indices_;
  std::vector<std::size_t> starts_;
  std::size_t history_ = 0;
  std::size_t horizon_ = 0;
};

WindowSet make_windows(const RawCorpus& corpus, const TimeIndices& indices, std::size_t history,
                       std::size_t horizon);
WindowSet make_windows(std::shared_ptr<const RawCorpus> corpus,
                       std::shared_ptr<const TimeIndices> indices, std::size_t history,
                       std::size_t horizon);

struct Splits {
  WindowSet train, val, test;
};

// Chronological split over window start indices: floor(r0 W), floor(r1 W),
// remainder.
Splits split(const WindowSet& windows, std::array<double, 3> ratios = {6.0, 2.0, 2.0});
std::array<std::size_t, 3> split_sizes(std::size_t count, std::array<double, 3> ratios);

// z-score statistics of channel 0 over the distinct observed steps covered by
// the training windows' history blocks.
Normalizer fit_normalizer(const WindowSet& train);
Normalizer fit_normalizer(std::span<const double> values);

// Stacked batch of windows, flow channels normalized.
struct Batch {
  Tensor x;       // (B, L, N, 3)
  Tensor y;       // (B, H, N)
  Tensor y_mask;  // (B, H, N)
  std::vector<int> tod_past, dow_past;      // B*L, row-major
  std::vector<int> tod_future, dow_future;  // B*H
  std::vector<std::size_t> starts;

  std::size_t size() const { return x.rank() ? x.dim(0) : 0; }
};

Batch make_batch(const WindowSet& windows, std::span<const std::size_t> which,
                 const Normalizer& norm);
Batch stack_windows(std::span<const TrafficWindow> windows);

// Desk-scale corpus: each node follows its group's daily and weekly profile,
// a slowly drifting group-level AR(1) disturbance and white noise.
struct PatternSpec {
  std::size_t groups = 2;
  double base = 200.0;
  double daily_amplitude = 80.0;
  double weekly_amplitude = 20.0;
  double drift_std = 4.0;    // AR(1) innovation std, shared within a group
  double drift_coef = 0.98;  // AR(1) coefficient
  double noise_std = 5.0;    // per-node white noise
  int period_minutes = 5;
  std::string start = "2024-01-01 00:00";  // a Monday
};

struct SyntheticCorpus {
  RawCorpus corpus;
  std::vector<int> groups;  // node -> group label
};

SyntheticCorpus generate_synthetic(std::size_t nodes, std::size_t steps, std::uint64_t seed,
                                   const PatternSpec& spec = {});

// Writes `<dir>/<name>.desc`, a float64 tensor file and the group labels.
// Returns the descriptor path.
std::filesystem::path write_dataset(const std::filesystem::path& dir, const std::string& name,
                                    const RawCorpus& corpus,
                                    const std::vector<int>& groups = {});

}  // namespace protohg::data

#endif  // PROTOHG_DATA_HPP_
