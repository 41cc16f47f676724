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

#ifndef PROTOHG_CONFIG_HPP_
#define PROTOHG_CONFIG_HPP_

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "protohg/model.hpp"
#include "protohg/train.hpp"

namespace protohg {

// Raised for malformed or unknown configuration; the CLI maps it to exit 2.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : std::runtime_error(key.empty() ? what : "config key '" + key + "': " + what), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct SyntheticConfig {
  std::size_t nodes = 6;
  std::size_t steps = 600;
  std::size_t groups = 2;
  std::uint64_t seed = 7;
  double noise_std = 5.0;
  double drift_std = 4.0;
  // Two-hourly samples: 600 steps then span 50 days, so every calendar
  // slot recurs in the training split.
  int period_minutes = 120;
};

struct RunConfig {
  // Dataset descriptor; empty selects the built-in synthetic corpus.
  std::string dataset;
  SyntheticConfig synthetic;
  std::size_t history = 12;
  std::size_t horizon = 12;
  std::array<double, 3> split = {6.0, 2.0, 2.0};
  double max_nan_fraction = 0.05;

  model::ModelConfig model;  // nodes is filled in from the data
  std::size_t order = 2;     // number of concatenated NAPL input blocks
  std::string variant = "full";
  train::TrainConfig train;

  std::uint64_t seed = 42;
  int threads = 0;  // 0 keeps the OpenMP default
  std::string out_dir = "runs";
  std::string tag = "run";
  std::string run_dir;  // explicit run directory, overrides out_dir/tag

  // Model config with the ablation flags of `variant` applied.
  model::ModelConfig resolved_model(std::size_t nodes, int slots_per_day) const;
};

nlohmann::json to_json(const RunConfig& cfg);
// Every key must be known; unknown or mistyped keys raise ConfigError.
RunConfig from_json(const nlohmann::json& j);

// "section.key=value". The value is parsed as JSON, falling back to a string.
void apply_override(nlohmann::json& j, const std::string& assignment);

// Defaults, then the file (if any), then overrides, in that order.
RunConfig load_config(const std::filesystem::path& path,
                      const std::vector<std::string>& overrides = {});

}  // namespace protohg

#endif  // PROTOHG_CONFIG_HPP_
