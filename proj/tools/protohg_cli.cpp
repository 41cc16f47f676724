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

#include <CLI11.hpp>

#include <iostream>

#include "commands.hpp"
#include "protohg/config.hpp"
#include "protohg/model.hpp"

namespace cli = protohg::cli;

int main(int argc, char** argv) {
  CLI::App app{"protohg: prototype-guided hypergraph traffic forecaster"};
  app.require_subcommand(1);

  cli::CommonArgs common;
  std::uint64_t seed = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "JSON config file");
    sub->add_option("--seed", seed, "random seed (overrides run.seed)");
    sub->add_option("--set", common.overrides, "override, e.g. --set model.M=8")
        ->take_all()
        ->allow_extra_args(false);
  };

  auto* train = app.add_subcommand("train", "train a model and write a run directory");
  add_common(train);

  std::string variant;
  auto* ablate = app.add_subcommand("ablate", "train one ablation variant");
  add_common(ablate);
  ablate->add_option("--variant", variant, "no_res, no_res_local, no_res_global, no_res_dgc, "
                                           "no_te or no_napl")
      ->required();

  std::string checkpoint, dataset, split = "test", out;
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  eval->add_option("checkpoint", checkpoint, "checkpoint.json")->required();
  eval->add_option("--dataset", dataset, "dataset descriptor (default: training dataset)");
  eval->add_option("--split", split, "train, val or test")
      ->check(CLI::IsMember({"train", "val", "test"}));
  eval->add_option("--out", out, "also write the report as JSON");

  auto* exp = app.add_subcommand("export-embeddings", "write spatial embeddings as CSV");
  exp->add_option("checkpoint", checkpoint, "checkpoint.json")->required();
  exp->add_option("--out", out, "output file (default: stdout)");

  std::string synth_dir = "data", synth_name = "synthetic";
  auto* synth = app.add_subcommand("synth", "write the synthetic corpus as a dataset");
  add_common(synth);
  synth->add_option("--out", synth_dir, "output directory");
  synth->add_option("--name", synth_name, "dataset name");

  std::size_t instances = 100;
  std::uint64_t verify_seed = 2024;
  auto* verify = app.add_subcommand("verify", "run oracle, gradient and invariant checks");
  verify->add_option("--instances", instances, "random instances per oracle check");
  verify->add_option("--seed", verify_seed, "seed for the random instances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? cli::kOk : cli::kConfigError;
  }

  for (auto* sub : {train, ablate, synth}) {
    if (sub->parsed() && sub->count("--seed")) common.seed = seed;
  }
  try {
    if (train->parsed()) return cli::cmd_train(common);
    if (ablate->parsed()) return cli::cmd_ablate(common, variant);
    if (eval->parsed()) return cli::cmd_eval(checkpoint, dataset, split, out);
    if (exp->parsed()) return cli::cmd_export_embeddings(checkpoint, out);
    if (synth->parsed()) return cli::cmd_synth(common, synth_dir, synth_name);
    if (verify->parsed()) return cli::cmd_verify(instances, verify_seed);
  } catch (const protohg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return cli::kConfigError;
  } catch (const protohg::ShapeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kRuntimeError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return cli::kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kRuntimeError;
  }
  return cli::kRuntimeError;
}
