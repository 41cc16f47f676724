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

#include "protohg/checkpoint.hpp"

#include "protohg/io.hpp"

namespace protohg {

using nlohmann::json;

json tensor_to_json(const Tensor& t) { return json{{"shape", t.shape()}, {"data", t.vec()}}; }

Tensor tensor_from_json(const json& j) {
  auto shape = j.at("shape").get<Shape>();
  auto values = j.at("data").get<std::vector<double>>();
  if (values.size() != numel(shape)) {
    throw CheckpointError("tensor data has " + std::to_string(values.size()) +
                          " values for shape " + shape_str(shape));
  }
  return Tensor(std::move(shape), std::move(values));
}

json Checkpoint::to_json() const {
  json p = json::object();
  for (const auto& [name, t] : params) p[name] = tensor_to_json(t);
  return json{{"format", "protohg-checkpoint"},
              {"version", 1},
              {"config", config},
              {"normalizer", {{"mean", norm.mean}, {"std", norm.std}}},
              {"nodes", nodes},
              {"slots_per_day", slots_per_day},
              {"params", p}};
}

Checkpoint Checkpoint::from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != "protohg-checkpoint") {
      throw CheckpointError("not a protohg checkpoint");
    }
    Checkpoint c;
    c.config = j.at("config");
    c.norm.mean = j.at("normalizer").at("mean").get<double>();
    c.norm.std = j.at("normalizer").at("std").get<double>();
    c.nodes = j.at("nodes").get<std::size_t>();
    c.slots_per_day = j.at("slots_per_day").get<int>();
    for (auto it = j.at("params").begin(); it != j.at("params").end(); ++it) {
      c.params[it.key()] = tensor_from_json(it.value());
    }
    return c;
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("malformed checkpoint: ") + e.what());
  }
}

void Checkpoint::save(const std::filesystem::path& path) const {
  io::atomic_write(path, to_json().dump());
}

Checkpoint Checkpoint::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw CheckpointError("checkpoint not found: " + path.string());
  }
  json j = json::parse(io::read_file(path), nullptr, false);
  if (j.is_discarded()) throw CheckpointError("checkpoint is not valid JSON: " + path.string());
  return from_json(j);
}

void Checkpoint::apply(ParameterSet& set) const {
  std::size_t matched = 0;
  for (Parameter* p : set.all()) {
    auto it = params.find(p->name);
    if (it == params.end()) throw CheckpointError("checkpoint lacks parameter " + p->name);
    if (!it->second.same_shape(p->value)) {
      throw CheckpointError("parameter " + p->name + " has shape " +
                            shape_str(it->second.shape()) + " in the checkpoint, model expects " +
                            shape_str(p->value.shape()));
    }
    p->value = it->second;
    ++matched;
  }
  if (matched != params.size()) {
    throw CheckpointError("checkpoint holds parameters the model does not have");
  }
}

std::map<std::string, Tensor> Checkpoint::collect(const ParameterSet& set) {
  std::map<std::string, Tensor> out;
  for (const Parameter* p : set.all()) out[p->name] = p->value;
  return out;
}

}  // namespace protohg
