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

#ifndef PROTOHG_CHECKPOINT_HPP_
#define PROTOHG_CHECKPOINT_HPP_

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "protohg/autodiff.hpp"
#include "protohg/data.hpp"

namespace protohg {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Single JSON document: every parameter keyed by module path, the resolved
// run config and the normalizer statistics.
struct Checkpoint {
  nlohmann::json config;
  data::Normalizer norm;
  std::size_t nodes = 0;
  int slots_per_day = 288;
  std::map<std::string, Tensor> params;

  nlohmann::json to_json() const;
  static Checkpoint from_json(const nlohmann::json& j);

  void save(const std::filesystem::path& path) const;  // atomic
  static Checkpoint load(const std::filesystem::path& path);

  // Copies stored values into `set`; names and shapes must match exactly.
  void apply(ParameterSet& set) const;
  static std::map<std::string, Tensor> collect(const ParameterSet& set);
};

nlohmann::json tensor_to_json(const Tensor& t);
Tensor tensor_from_json(const nlohmann::json& j);

}  // namespace protohg

#endif  // PROTOHG_CHECKPOINT_HPP_
