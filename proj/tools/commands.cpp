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

#include "commands.hpp"

#include <iomanip>
#include <iostream>

#include "protohg/io.hpp"
#include "protohg/run.hpp"
#include "protohg/verify.hpp"

namespace protohg::cli {

namespace {

RunConfig resolve(const CommonArgs& args) {
  auto overrides = args.overrides;
  if (args.seed) overrides.push_back("run.seed=" + std::to_string(*args.seed));
  return load_config(args.config, overrides);
}

int train_with(const RunConfig& cfg) {
  auto out = run::train_run(cfg, &std::cerr);
  std::cout << "run directory: " << out.run_dir.string() << "\n"
            << "best epoch " << out.result.best_epoch << ", val MAE " << out.val.mae << "\n"
            << "test: " << run::format_report(out.test) << "baselines (test MAE): last value "
            << out.last_value.mae << ", time-of-day average " << out.tod_average.mae << "\n";
  return kOk;
}

}  // namespace

int cmd_train(const CommonArgs& args) { return train_with(resolve(args)); }

int cmd_ablate(const CommonArgs& args, const std::string& variant) {
  // Validate the name up front so the message lists the choices.
  model::Ablation::from_variant(variant);
  if (variant == "full") {
    throw std::invalid_argument("ablate needs a variant other than 'full'");
  }
  auto a = args;
  a.overrides.push_back("ablation.variant=" + variant);
  auto cfg = resolve(a);
  if (cfg.tag == "run") cfg.tag = variant;
  return train_with(cfg);
}

int cmd_eval(const std::string& checkpoint, const std::string& dataset, const std::string& split,
             const std::string& out) {
  auto report = run::evaluate_checkpoint(checkpoint, dataset, split);
  std::cout << "split " << split << "\n" << run::format_report(report);
  if (!out.empty()) {
    auto j = run::report_to_json(report);
    j["split"] = split;
    io::atomic_write(out, j.dump(2) + "\n");
  }
  return kOk;
}

int cmd_export_embeddings(const std::string& checkpoint, const std::string& out) {
  auto r = run::restore(checkpoint);
  const std::string csv = run::embeddings_csv(*r.model);
  if (out.empty()) {
    std::cout << csv;
  } else {
    io::atomic_write(out, csv);
  }
  return kOk;
}

int cmd_synth(const CommonArgs& args, const std::string& out_dir, const std::string& name) {
  const auto cfg = resolve(args);
  auto syn = data::generate_synthetic(cfg.synthetic.nodes, cfg.synthetic.steps,
                                      cfg.synthetic.seed, run::pattern_spec(cfg.synthetic));
  const auto desc = data::write_dataset(out_dir, name, syn.corpus, syn.groups);
  std::cout << desc.string() << "\n";
  return kOk;
}

int cmd_verify(std::size_t instances, std::uint64_t seed) {
  verify::Options opts;
  opts.instances = instances;
  opts.seed = seed;
  const auto results = verify::run_all(opts);
  std::size_t failed = 0;
  for (const auto& r : results) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << std::left << std::setw(10) << r.group
              << std::setw(48) << r.name << " max err " << std::scientific << std::setprecision(2)
              << r.metric << " (tol " << r.tolerance << ")" << std::defaultfloat;
    if (!r.detail.empty()) std::cout << "  " << r.detail;
    std::cout << "\n";
    failed += !r.passed;
  }
  std::cout << results.size() - failed << "/" << results.size() << " checks passed\n";
  return failed ? kRuntimeError : kOk;
}

}  // namespace protohg::cli
