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

#include "protohg/run.hpp"

#include <omp.h>

#include <chrono>
#include <ctime>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "protohg/io.hpp"

namespace protohg::run {

namespace fs = std::filesystem;
using nlohmann::json;

data::PatternSpec pattern_spec(const SyntheticConfig& s) {
  data::PatternSpec p;
  p.groups = s.groups;
  p.noise_std = s.noise_std;
  p.drift_std = s.drift_std;
  p.period_minutes = s.period_minutes;
  return p;
}

LoadedData load_data(const RunConfig& cfg) {
  LoadedData out;
  if (cfg.dataset.empty()) {
    auto syn = data::generate_synthetic(cfg.synthetic.nodes, cfg.synthetic.steps,
                                        cfg.synthetic.seed, pattern_spec(cfg.synthetic));
    out.corpus = std::move(syn.corpus);
    out.groups = std::move(syn.groups);
    return out;
  }
  data::LoadOptions lo;
  lo.max_nan_fraction = cfg.max_nan_fraction;
  out.corpus = data::load_pems(cfg.dataset, lo);
  out.groups = data::load_groups(cfg.dataset);
  return out;
}

json report_to_json(const MetricReport& r) {
  json ph = json::array();
  for (const auto& h : r.per_horizon) ph.push_back({{"mae", h.mae}, {"rmse", h.rmse}, {"mape", h.mape}});
  return {{"mae", r.mae}, {"rmse", r.rmse}, {"mape", r.mape}, {"count", r.count},
          {"per_horizon", ph}};
}

json record_to_json(const train::HistoryRecord& r) {
  return {{"epoch", r.epoch}, {"split", r.split},   {"loss", r.loss},
          {"mae", r.mae},     {"rmse", r.rmse},     {"mape", r.mape},
          {"wall_time", r.wall_time}};
}

fs::path make_run_dir(const RunConfig& cfg) {
  fs::path dir;
  if (!cfg.run_dir.empty()) {
    dir = cfg.run_dir;
  } else {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    localtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y%m%d-%H%M%S") << "-" << cfg.tag;
    dir = fs::path(cfg.out_dir) / os.str();
    for (int k = 1; fs::exists(dir); ++k) {
      dir = fs::path(cfg.out_dir) / (os.str() + "-" + std::to_string(k));
    }
  }
  fs::create_directories(dir);
  return dir;
}

std::string embeddings_csv(const model::Forecaster& model) {
  const Tensor& t = model.spatial().table().value;
  const std::size_t N = t.dim(0), Dn = t.dim(1);
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  os << "node_id";
  for (std::size_t d = 0; d < Dn; ++d) os << ",e" << d;
  os << '\n';
  for (std::size_t n = 0; n < N; ++n) {
    os << n;
    for (std::size_t d = 0; d < Dn; ++d) os << ',' << t[n * Dn + d];
    os << '\n';
  }
  return os.str();
}

std::string format_report(const MetricReport& r) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << "MAE " << r.mae << "  RMSE " << r.rmse << "  MAPE " << r.mape << "%  (n=" << r.count
     << ")\n";
  if (!r.per_horizon.empty()) {
    os << "step        MAE       RMSE    MAPE(%)\n";
    for (std::size_t h = 0; h < r.per_horizon.size(); ++h) {
      const auto& m = r.per_horizon[h];
      os << std::setw(4) << h + 1 << std::setw(11) << m.mae << std::setw(11) << m.rmse
         << std::setw(11) << m.mape << '\n';
    }
  }
  return os.str();
}

TrainOutcome train_run(const RunConfig& cfg, std::ostream* log) {
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
  auto loaded = load_data(cfg);
  const int spd = data::slots_per_day(loaded.corpus.period_minutes);
  const std::size_t nodes = loaded.corpus.nodes();
  const auto mc = cfg.resolved_model(nodes, spd);
  auto prepared = train::prepare(std::move(loaded.corpus), cfg.history, cfg.horizon, cfg.split);
  model::Forecaster model(mc, cfg.seed);

  TrainOutcome out;
  out.run_dir = make_run_dir(cfg);
  const json snapshot = to_json(cfg);
  io::atomic_write(out.run_dir / "config.json", snapshot.dump(2) + "\n");

  std::string history;
  auto sink = [&](const train::HistoryRecord& r) {
    history += record_to_json(r).dump() + "\n";
    io::atomic_write(out.run_dir / "history.jsonl", history);
    if (log) {
      *log << "epoch " << r.epoch << " " << r.split << " loss " << r.loss << " mae " << r.mae
           << " rmse " << r.rmse << " mape " << r.mape << "\n";
      log->flush();
    }
  };
  out.result = train::fit(model, prepared, cfg.train, sink);

  Checkpoint ck;
  ck.config = snapshot;
  ck.norm = prepared.norm;
  ck.nodes = nodes;
  ck.slots_per_day = spd;
  ck.params = Checkpoint::collect(model.params());
  ck.save(out.run_dir / "checkpoint.json");

  out.val = train::evaluate(model, prepared.splits.val, prepared.norm, cfg.train.batch_size);
  out.test = train::evaluate(model, prepared.splits.test, prepared.norm, cfg.train.batch_size);
  out.last_value = train::last_value_baseline(prepared.splits.test);
  out.tod_average = train::tod_average_baseline(prepared.splits.train, prepared.splits.test);
  json metrics = {{"best_epoch", out.result.best_epoch},
                  {"epochs_run", out.result.epochs_run},
                  {"early_stopped", out.result.early_stopped},
                  {"val", report_to_json(out.val)},
                  {"test", report_to_json(out.test)},
                  {"baselines",
                   {{"last_value", report_to_json(out.last_value)},
                    {"tod_average", report_to_json(out.tod_average)}}}};
  io::atomic_write(out.run_dir / "metrics.json", metrics.dump(2) + "\n");
  io::atomic_write(out.run_dir / "embeddings.csv", embeddings_csv(model));
  return out;
}

Restored restore(const fs::path& checkpoint_path) {
  Restored r;
  r.ckpt = Checkpoint::load(checkpoint_path);
  r.cfg = from_json(r.ckpt.config);
  const auto mc = r.cfg.resolved_model(r.ckpt.nodes, r.ckpt.slots_per_day);
  r.model = std::make_unique<model::Forecaster>(mc, r.cfg.seed);
  r.ckpt.apply(r.model->params());
  return r;
}

MetricReport evaluate_checkpoint(const fs::path& checkpoint_path, const std::string& dataset,
                                 const std::string& split) {
  if (split != "train" && split != "val" && split != "test") {
    throw ConfigError("split", "expected train, val or test, got '" + split + "'");
  }
  auto r = restore(checkpoint_path);
  RunConfig cfg = r.cfg;
  if (!dataset.empty()) cfg.dataset = dataset;
  auto loaded = load_data(cfg);
  if (loaded.corpus.nodes() != r.ckpt.nodes) {
    throw data::DataError("node count mismatch: dataset has N=" +
                          std::to_string(loaded.corpus.nodes()) +
                          " but the checkpoint was trained with N=" +
                          std::to_string(r.ckpt.nodes));
  }
  if (data::slots_per_day(loaded.corpus.period_minutes) != r.ckpt.slots_per_day) {
    throw data::DataError("sampling period differs from the checkpoint's");
  }
  auto prepared = train::prepare(std::move(loaded.corpus), cfg.history, cfg.horizon, cfg.split);
  const auto& windows = split == "train" ? prepared.splits.train
                        : split == "val" ? prepared.splits.val
                                         : prepared.splits.test;
  return train::evaluate(*r.model, windows, r.ckpt.norm, cfg.train.batch_size);
}

}  // namespace protohg::run
