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

#include "protohg/config.hpp"

#include <fstream>

#include "protohg/io.hpp"

namespace protohg {

using nlohmann::json;

model::ModelConfig RunConfig::resolved_model(std::size_t nodes, int slots_per_day) const {
  model::ModelConfig m = model;
  m.nodes = nodes;
  m.history = history;
  m.horizon = horizon;
  m.slots_per_day = slots_per_day;
  const auto v = model::Ablation::from_variant(variant);
  m.ablation.no_res |= v.no_res;
  m.ablation.local_only |= v.local_only;
  m.ablation.global_only |= v.global_only;
  m.ablation.dgc |= v.dgc;
  m.ablation.no_te |= v.no_te;
  m.ablation.no_napl |= v.no_napl;
  m.validate();
  return m;
}

json to_json(const RunConfig& c) {
  const auto& m = c.model;
  const auto& a = m.ablation;
  const auto& t = c.train;
  return json{
      {"data",
       {{"dataset", c.dataset},
        {"history", c.history},
        {"horizon", c.horizon},
        {"split", c.split},
        {"max_nan_fraction", c.max_nan_fraction}}},
      {"synthetic",
       {{"nodes", c.synthetic.nodes},
        {"steps", c.synthetic.steps},
        {"groups", c.synthetic.groups},
        {"seed", c.synthetic.seed},
        {"noise_std", c.synthetic.noise_std},
        {"drift_std", c.synthetic.drift_std},
        {"period_minutes", c.synthetic.period_minutes}}},
      {"model",
       {{"M", m.prototypes},
        {"D", m.hidden},
        {"D_T", m.time_dim},
        {"D_N", m.node_dim},
        {"blocks", m.blocks},
        {"heads", m.heads},
        {"k", c.order},
        {"share_prototypes", m.share_prototypes},
        {"share_embeddings", m.share_embeddings}}},
      {"ablation",
       {{"variant", c.variant},
        {"no_res", a.no_res},
        {"local_only", a.local_only},
        {"global_only", a.global_only},
        {"dgc", a.dgc},
        {"no_te", a.no_te},
        {"no_napl", a.no_napl}}},
      {"train",
       {{"lr", t.lr},
        {"batch_size", t.batch_size},
        {"max_epochs", t.max_epochs},
        {"patience", t.patience},
        {"clip_norm", t.clip_norm},
        {"time_budget_seconds", t.time_budget_seconds},
        {"max_batches_per_epoch", t.max_batches_per_epoch}}},
      {"run",
       {{"seed", c.seed},
        {"threads", c.threads},
        {"out_dir", c.out_dir},
        {"tag", c.tag},
        {"run_dir", c.run_dir}}},
  };
}

namespace {

template <typename T>
T field(const json& j, const std::string& section, const std::string& key) {
  const std::string path = section + "." + key;
  const json& v = j.at(section).at(key);
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) throw ConfigError(path, "expected a boolean");
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) throw ConfigError(path, "expected a string");
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) throw ConfigError(path, "expected a number");
  } else if constexpr (std::is_unsigned_v<T>) {
    if (!v.is_number_unsigned()) throw ConfigError(path, "expected a non-negative integer");
  } else {
    if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
  }
  return v.get<T>();
}

// Checks `src` only contains keys present in `schema` and copies it in.
void merge_checked(json& dst, const json& src, const std::string& prefix) {
  if (!src.is_object()) throw ConfigError(prefix, "expected an object");
  for (auto it = src.begin(); it != src.end(); ++it) {
    const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!dst.contains(it.key())) throw ConfigError(path, "unknown key");
    json& slot = dst[it.key()];
    if (slot.is_object()) {
      merge_checked(slot, it.value(), path);
    } else {
      slot = it.value();
    }
  }
}

}  // namespace

RunConfig from_json(const json& in) {
  json j = to_json(RunConfig{});
  merge_checked(j, in, "");
  RunConfig c;
  c.dataset = field<std::string>(j, "data", "dataset");
  c.history = field<std::size_t>(j, "data", "history");
  c.horizon = field<std::size_t>(j, "data", "horizon");
  const json& sp = j["data"]["split"];
  if (!sp.is_array() || sp.size() != 3) throw ConfigError("data.split", "expected 3 ratios");
  for (std::size_t i = 0; i < 3; ++i) {
    if (!sp[i].is_number() || !(sp[i].get<double>() > 0.0)) {
      throw ConfigError("data.split", "ratios must be positive numbers");
    }
    c.split[i] = sp[i].get<double>();
  }
  c.max_nan_fraction = field<double>(j, "data", "max_nan_fraction");

  c.synthetic.nodes = field<std::size_t>(j, "synthetic", "nodes");
  c.synthetic.steps = field<std::size_t>(j, "synthetic", "steps");
  c.synthetic.groups = field<std::size_t>(j, "synthetic", "groups");
  c.synthetic.seed = field<std::uint64_t>(j, "synthetic", "seed");
  c.synthetic.noise_std = field<double>(j, "synthetic", "noise_std");
  c.synthetic.drift_std = field<double>(j, "synthetic", "drift_std");
  c.synthetic.period_minutes = field<int>(j, "synthetic", "period_minutes");
  if (c.synthetic.period_minutes <= 0 || 1440 % c.synthetic.period_minutes != 0) {
    throw ConfigError("synthetic.period_minutes", "must divide 1440");
  }

  auto& m = c.model;
  m.prototypes = field<std::size_t>(j, "model", "M");
  m.hidden = field<std::size_t>(j, "model", "D");
  m.time_dim = field<std::size_t>(j, "model", "D_T");
  m.node_dim = field<std::size_t>(j, "model", "D_N");
  m.blocks = field<std::size_t>(j, "model", "blocks");
  m.heads = field<std::size_t>(j, "model", "heads");
  c.order = field<std::size_t>(j, "model", "k");
  m.share_prototypes = field<bool>(j, "model", "share_prototypes");
  m.share_embeddings = field<bool>(j, "model", "share_embeddings");

  c.variant = field<std::string>(j, "ablation", "variant");
  m.ablation.no_res = field<bool>(j, "ablation", "no_res");
  m.ablation.local_only = field<bool>(j, "ablation", "local_only");
  m.ablation.global_only = field<bool>(j, "ablation", "global_only");
  m.ablation.dgc = field<bool>(j, "ablation", "dgc");
  m.ablation.no_te = field<bool>(j, "ablation", "no_te");
  m.ablation.no_napl = field<bool>(j, "ablation", "no_napl");

  auto& t = c.train;
  t.lr = field<double>(j, "train", "lr");
  t.batch_size = field<std::size_t>(j, "train", "batch_size");
  t.max_epochs = field<std::size_t>(j, "train", "max_epochs");
  t.patience = field<std::size_t>(j, "train", "patience");
  t.clip_norm = field<double>(j, "train", "clip_norm");
  t.time_budget_seconds = field<double>(j, "train", "time_budget_seconds");
  t.max_batches_per_epoch = field<std::size_t>(j, "train", "max_batches_per_epoch");

  c.seed = field<std::uint64_t>(j, "run", "seed");
  c.threads = field<int>(j, "run", "threads");
  c.out_dir = field<std::string>(j, "run", "out_dir");
  c.tag = field<std::string>(j, "run", "tag");
  c.run_dir = field<std::string>(j, "run", "run_dir");
  t.seed = c.seed;

  // Semantic checks, each naming its key.
  auto positive = [](std::size_t v, const char* key) {
    if (v == 0) throw ConfigError(key, "must be positive");
  };
  positive(c.history, "data.history");
  positive(c.horizon, "data.horizon");
  positive(m.prototypes, "model.M");
  positive(m.hidden, "model.D");
  positive(m.time_dim, "model.D_T");
  positive(m.node_dim, "model.D_N");
  positive(m.blocks, "model.blocks");
  positive(m.heads, "model.heads");
  positive(t.batch_size, "train.batch_size");
  positive(t.max_epochs, "train.max_epochs");
  positive(c.synthetic.nodes, "synthetic.nodes");
  positive(c.synthetic.groups, "synthetic.groups");
  if (m.hidden % m.heads != 0) throw ConfigError("model.heads", "must divide model.D");
  if (c.order != 2) {
    throw ConfigError("model.k", "only k = 2 ([X_h || X_E]) is supported");
  }
  if (t.lr < 0.0) throw ConfigError("train.lr", "must be >= 0");
  if (c.max_nan_fraction < 0.0 || c.max_nan_fraction > 1.0) {
    throw ConfigError("data.max_nan_fraction", "must lie in [0, 1]");
  }
  if (c.threads < 0) throw ConfigError("run.threads", "must be >= 0");
  try {
    model::Ablation::from_variant(c.variant);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("ablation.variant", e.what());
  }
  try {
    m.ablation.validate();
    if (c.variant != "full") c.resolved_model(1, 288).ablation.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("ablation", e.what());
  }
  return c;
}

void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("", "override '" + assignment + "' is not key=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  json* node = &j;
  std::size_t pos = 0;
  while (true) {
    const auto dot = key.find('.', pos);
    const std::string part = key.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    if (!node->contains(part)) (*node)[part] = json::object();
    node = &(*node)[part];
    if (!node->is_object()) throw ConfigError(key, "not a section");
    pos = dot + 1;
  }
}

RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  json j = json::object();
  if (!path.empty()) {
    std::string text;
    try {
      text = io::read_file(path);
    } catch (const std::exception& e) {
      throw ConfigError("", "cannot read config " + path.string() + ": " + e.what());
    }
    j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ConfigError("", "config " + path.string() + " is not valid JSON");
    if (!j.is_object()) throw ConfigError("", "config root must be an object");
  }
  for (const auto& o : overrides) apply_override(j, o);
  return from_json(j);
}

}  // namespace protohg
