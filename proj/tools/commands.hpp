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

#ifndef PROTOHG_TOOLS_COMMANDS_HPP_
#define PROTOHG_TOOLS_COMMANDS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace protohg::cli {

enum ExitCode : int { kOk = 0, kRuntimeError = 1, kConfigError = 2 };

struct CommonArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;  // key=value
};

int cmd_train(const CommonArgs& args);
int cmd_ablate(const CommonArgs& args, const std::string& variant);
int cmd_eval(const std::string& checkpoint, const std::string& dataset, const std::string& split,
             const std::string& out);
int cmd_export_embeddings(const std::string& checkpoint, const std::string& out);
int cmd_synth(const CommonArgs& args, const std::string& out_dir, const std::string& name);
int cmd_verify(std::size_t instances, std::uint64_t seed);

}  // namespace protohg::cli

#endif  // PROTOHG_TOOLS_COMMANDS_HPP_
