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

#include "protohg/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "protohg/ops.hpp"

namespace protohg::model {

void Ablation::validate() const {
  if (local_only && global_only) {
    throw std::invalid_argument("ablation flags local_only and global_only are exclusive");
  }
}

hg::ConvSettings Ablation::conv_settings() const {
  hg::ConvSettings s;
  s.repr = local_only    ? hg::NodeReprMode::kLocalOnly
           : global_only ? hg::NodeReprMode::kGlobalOnly
                         : hg::NodeReprMode::kGlobalLocal;
  s.dgc = dgc;
  s.napl = !no_napl;
  return s;
}

const std::vector<std::string>& Ablation::variant_names() {
  static const std::vector<std::string> names = {"no_res",     "no_res_local", "no_res_global",
                                                 "no_res_dgc", "no_te",        "no_napl"};
  return names;
}

Ablation Ablation::from_variant(const std::string& name) {
  Ablation a;
  if (name == "full") return a;
  if (name == "no_res") {
    a.no_res = true;
  } else if (name == "no_res_local") {
    a.no_res = a.local_only = true;
  } else if (name == "no_res_global") {
    a.no_res = a.global_only = true;
  } else if (name == "no_res_dgc") {
    a.no_res = a.dgc = true;
  } else if (name == "no_te") {
    a.no_te = true;
  } else if (name == "no_napl") {
    a.no_napl = true;
  } else {
    std::string valid;
    for (const auto& n : variant_names()) valid += (valid.empty() ? "" : ", ") + n;
    throw std::invalid_argument("unknown ablation variant '" + name + "'; valid: " + valid);
  }
  return a;
}

void ModelConfig::validate() const {
  ablation.validate();
  auto positive = [](std::size_t v, const char* what) {
    if (v == 0) throw std::invalid_argument(std::string(what) + " must be positive");
  };
  positive(nodes, "nodes");
  positive(hidden, "hidden");
  positive(time_dim, "time_dim");
  positive(node_dim, "node_dim");
  positive(prototypes, "prototypes");
  positive(blocks, "blocks");
  positive(heads, "heads");
  positive(history, "history");
  positive(horizon, "horizon");
  if (hidden % heads != 0) throw std::invalid_argument("hidden must be divisible by heads");
  if (slots_per_day <= 0) throw std::invalid_argument("slots_per_day must be positive");
}

TemporalQueryAttention::TemporalQueryAttention(ParameterSet& params, const std::string& prefix,
                                               std::size_t time_dim, std::size_t hidden,
                                               std::size_t heads, std::mt19937_64& rng)
    : heads_(heads) {
  w_q_ = &params.create(prefix + ".W_Q", hg::weight_init({time_dim, hidden}, time_dim, rng));
  w_tp_ = &params.create(prefix + ".W_tp", hg::weight_init({time_dim, hidden}, time_dim, rng));
  w_k_ = &params.create(prefix + ".W_K", hg::weight_init({hidden, hidden}, hidden, rng));
  w_v_ = &params.create(prefix + ".W_V", hg::weight_init({hidden, hidden}, hidden, rng));
}

Var TemporalQueryAttention::forward(Tape& tape, const Var& et_future, const Var& et_past,
                                    const Var& h_p, bool time_modulation,
                                    Tensor* weights) const {
  const std::size_t N = h_p.shape().at(2);
  Var q = ops::linear(et_future, tape.param(*w_q_));
  Var mem = h_p;
  if (time_modulation) {
    Var tp = ops::linear(et_past, tape.param(*w_tp_));  // (B,L,D)
    mem = ops::mul(ops::expand(tp, 2, N), h_p);
  }
  Var k = ops::linear(mem, tape.param(*w_k_));
  Var v = ops::linear(mem, tape.param(*w_v_));
  return ops::attention(q, k, v, heads_, weights);
}

Var parallel_decode(Tape& tape, const gru::HGGRUCell& cell, const Var& context,
                    const Var& init, const Var& future_time, const Var& e_s,
                    const hg::ConvSettings& settings) {
  const auto& cs = context.shape();
  if (cs.size() != 4) throw ShapeError("parallel_decode: context must be (B,H,N,D)");
  const std::size_t B = cs[0], H = cs[1], N = cs[2], D = cs[3];
  if (init.shape() != Shape{H, D}) {
    throw ShapeError("parallel_decode: init " + shape_str(init.shape()) + " vs context " +
                     shape_str(cs));
  }
  Var x = ops::reshape(context, {B * H, N, D});
  Var h0 = ops::reshape(ops::expand(ops::expand(init, 1, N), 0, B), {B * H, N, D});
  Var t = ops::reshape(future_time, {B * H, future_time.shape().at(2)});
  Var out = cell.step(tape, x, h0, t, e_s, settings);
  return ops::reshape(out, {B, H, N, D});
}

ResidualBlock::ResidualBlock(ParameterSet& params, const std::string& prefix,
                             const ModelConfig& cfg, std::mt19937_64& rng) {
  gru::CellConfig enc;
  enc.in_dim = cfg.in_channels;
  enc.hidden_dim = cfg.hidden;
  enc.time_dim = cfg.time_dim;
  enc.node_dim = cfg.node_dim;
  enc.prototypes = cfg.prototypes;
  enc.share_prototypes = cfg.share_prototypes;
  enc.napl = !cfg.ablation.no_napl;
  encoder_ = gru::HGGRUCell(params, prefix + ".enc", enc, rng);
  tqa_ = TemporalQueryAttention(params, prefix + ".tqa", cfg.time_dim, cfg.hidden, cfg.heads,
                                rng);
  gru::CellConfig dec = enc;
  dec.in_dim = cfg.hidden;
  decoder_ = gru::HGGRUCell(params, prefix + ".dec", dec, rng);
  dec_init_ = &params.create(prefix + ".dec_init",
                             hg::weight_init({cfg.horizon, cfg.hidden}, cfg.hidden, rng));
  forecast_head_ =
      &params.create(prefix + ".head.forecast", hg::weight_init({cfg.hidden, 1}, cfg.hidden, rng));
  backcast_head_ =
      &params.create(prefix + ".head.backcast", hg::weight_init({cfg.hidden, 1}, cfg.hidden, rng));
}

BlockOutput ResidualBlock::forward(Tape& tape, const Var& x, const Var& et_past,
                                   const Var& et_future, const Var& e_s, const ModelConfig& cfg,
                                   BlockTrace* trace) const {
  const auto settings = cfg.ablation.conv_settings();
  const auto& xs = x.shape();
  const std::size_t B = xs[0], L = xs[1], N = xs[2];
  auto enc = gru::encode(tape, encoder_, x, et_past, e_s, settings,
                         trace ? &trace->encoder_steps : nullptr);
  Var ctx = tqa_.forward(tape, et_future, et_past, enc.trajectory, !cfg.ablation.no_te,
                         trace ? &trace->attention : nullptr);
  Var dec = parallel_decode(tape, decoder_, ctx, tape.param(*dec_init_), et_future, e_s,
                            settings);
  BlockOutput out;
  out.trajectory = enc.trajectory;
  out.decoded = dec;
  out.forecast =
      ops::reshape(ops::linear(dec, tape.param(*forecast_head_)), {B, cfg.horizon, N});
  out.backcast =
      ops::reshape(ops::linear(enc.trajectory, tape.param(*backcast_head_)), {B, L, N});
  return out;
}

Forecaster::Forecaster(const ModelConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
  cfg_.validate();
  std::mt19937_64 rng(seed);
  const std::size_t n_blocks = cfg_.effective_blocks();
  const std::size_t n_embed = cfg_.share_embeddings ? 1 : n_blocks;
  for (std::size_t i = 0; i < n_embed; ++i) {
    const std::string prefix = cfg_.share_embeddings ? "embed" : "block" + std::to_string(i) + ".embed";
    temporal_.emplace_back(params_, prefix, cfg_.slots_per_day, cfg_.time_dim, rng);
    spatial_.emplace_back(params_, prefix + ".spatial", cfg_.nodes, cfg_.node_dim, rng);
  }
  for (std::size_t i = 0; i < n_blocks; ++i) {
    blocks_.emplace_back(params_, "block" + std::to_string(i), cfg_, rng);
  }
}

const embed::TemporalEmbedding& Forecaster::temporal(std::size_t block) const {
  return temporal_.size() == 1 ? temporal_.front() : temporal_.at(block);
}

Var Forecaster::time_features(Tape& tape, const std::vector<int>& tod,
                              const std::vector<int>& dow, std::size_t batch, std::size_t len,
                              std::size_t block) const {
  if (cfg_.ablation.no_te) return tape.constant(Tensor::zeros({batch, len, cfg_.time_dim}));
  return ops::reshape(temporal(block).combined(tape, tod, dow), {batch, len, cfg_.time_dim});
}

ForecastBundle Forecaster::forward(Tape& tape, const data::Batch& batch,
                                   ForwardTrace* trace) const {
  const auto& xs = batch.x.shape();
  if (xs.size() != 4 || xs[1] != cfg_.history || xs[2] != cfg_.nodes ||
      xs[3] != cfg_.in_channels) {
    throw ShapeError("forecaster expects (B, " + std::to_string(cfg_.history) + ", " +
                     std::to_string(cfg_.nodes) + ", " + std::to_string(cfg_.in_channels) +
                     "), got " + shape_str(xs));
  }
  const std::size_t B = xs[0];
  ForecastBundle out;
  Var x = tape.constant(batch.x);
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const std::size_t emb = cfg_.share_embeddings ? 0 : i;
    Var et_past = time_features(tape, batch.tod_past, batch.dow_past, B, cfg_.history, emb);
    Var et_future =
        time_features(tape, batch.tod_future, batch.dow_future, B, cfg_.horizon, emb);
    Var e_s = spatial_.at(emb).all(tape);
    BlockTrace bt;
    out.block_inputs.push_back(x);
    auto res = blocks_[i].forward(tape, x, et_past, et_future, e_s, cfg_, trace ? &bt : nullptr);
    if (trace) trace->blocks.push_back(std::move(bt));
    out.block_forecasts.push_back(res.forecast);
    out.block_backcasts.push_back(res.backcast);
    out.forecast = out.forecast.valid() ? ops::add(out.forecast, res.forecast) : res.forecast;
    if (i + 1 < blocks_.size()) x = ops::sub_channel(x, res.backcast, 0);
  }
  return out;
}

Tensor Forecaster::predict(const data::Batch& batch) const {
  Tape tape;
  return forward(tape, batch).forecast.value();
}

}  // namespace protohg::model
