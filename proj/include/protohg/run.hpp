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

#ifndef PROTOHG_RUN_HPP_
#define PROTOHG_RUN_HPP_

// End-to-end pipelines behind the command-line tool.

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "protohg/checkpoint.hpp"
#include "protohg/config.hpp"
#include "protohg/metrics.hpp"
#include "protohg/model.hpp"
#include "protohg/train.hpp"

namespace protohg::run {

struct LoadedData {
  data::RawCorpus corpus;
  std::vector<int> groups;  // empty unless the dataset carries labels
};

// The configured dataset, or the built-in synthetic corpus when none is set.
LoadedData load_data(const RunConfig& cfg);
data::PatternSpec pattern_spec(const SyntheticConfig& s);

nlohmann::json report_to_json(const MetricReport& r);
nlohmann::json record_to_json(const train::HistoryRecord& r);

struct TrainOutcome {
  std::filesystem::path run_dir;
  train::TrainResult result;
  MetricReport val, test;
  MetricReport last_value, tod_average;  // naive baselines on the test split
};

// Trains and writes config.json, history.jsonl, checkpoint.json,
// metrics.json and embeddings.csv into a fresh run directory. Progress
// lines go to `log` when given.
TrainOutcome train_run(const RunConfig& cfg, std::ostream* log = nullptr);

// Creates runs/<timestamp>-<tag> (or the configured run_dir).
std::filesystem::path make_run_dir(const RunConfig& cfg);

// A model rebuilt from a checkpoint.
struct Restored {
  Checkpoint ckpt;
  RunConfig cfg;
  std::unique_ptr<model::Forecaster> model;
};
Restored restore(const std::filesystem::path& checkpoint_path);

// Evaluates a checkpoint on one split of `dataset` (the training dataset
// when empty). Throws DataError when node counts differ.
MetricReport evaluate_checkpoint(const std::filesystem::path& checkpoint_path,
                                 const std::string& dataset, const std::string& split);

// node_id followed by the D_N embedding values, round-trip precision.
std::string embeddings_csv(const model::Forecaster& model);

// Text table: headline metrics then one row per horizon step.
std::string format_report(const MetricReport& r);

}  // namespace protohg::run

#endif  // PROTOHG_RUN_HPP_
