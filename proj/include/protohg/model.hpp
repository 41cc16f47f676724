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

#ifndef PROTOHG_MODEL_HPP_
#define PROTOHG_MODEL_HPP_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "protohg/data.hpp"
#include "protohg/embeddings.hpp"
#include "protohg/hggru.hpp"

namespace protohg::model {

// Structural ablations. At most one of local_only / global_only.
struct Ablation {
  bool no_res = false;       // single block
  bool local_only = false;   // E^N := H_prev W_h
  bool global_only = false;  // E^N := E^s
  bool dgc = false;          // pairwise adaptive graph instead of hyperedges
  bool no_te = false;        // time embeddings replaced by zeros
  bool no_napl = false;      // one shared output matrix per gate

  void validate() const;
  hg::ConvSettings conv_settings() const;

  // "full", "no_res", "no_res_local", "no_res_global", "no_res_dgc", "no_te",
  // "no_napl"
  static Ablation from_variant(const std::string& name);
  static const std::vector<std::string>& variant_names();
};

struct ModelConfig {
  std::size_t nodes = 0;
  std::size_t in_channels = 3;
  std::size_t hidden = 64;      // D
  std::size_t time_dim = 24;    // D_T
  std::size_t node_dim = 10;    // D_N
  std::size_t prototypes = 6;   // M
  std::size_t blocks = 2;
  std::size_t heads = 4;
  std::size_t history = 12;     // L
  std::size_t horizon = 12;     // H
  int slots_per_day = 288;
  bool share_prototypes = true;
  bool share_embeddings = true;
  Ablation ablation;

  std::size_t effective_blocks() const { return ablation.no_res ? 1 : blocks; }
  void validate() const;
};

// Cross attention from future time embeddings (queries, shared by all
// nodes) to time-modulated encoder states:
//   Q = E^T_f W_Q,  K = ((E^T_p W_tp) * H_p) W_K,  V = ((E^T_p W_tp) * H_p) W_V
// followed by scaled dot-product attention over the history axis.
class TemporalQueryAttention {
 public:
  TemporalQueryAttention() = default;
  TemporalQueryAttention(ParameterSet& params, const std::string& prefix, std::size_t time_dim,
                         std::size_t hidden, std::size_t heads, std::mt19937_64& rng);

  // et_future (B,H,D_T), et_past (B,L,D_T), h_p (B,L,N,D) -> (B,H,N,D).
  // Without time modulation K and V are projected from H_p directly.
  Var forward(Tape& tape, const Var& et_future, const Var& et_past, const Var& h_p,
              bool time_modulation = true, Tensor* weights = nullptr) const;

  std::size_t heads() const { return heads_; }

 private:
  Parameter *w_q_ = nullptr, *w_tp_ = nullptr, *w_k_ = nullptr, *w_v_ = nullptr;
  std::size_t heads_ = 1;
};

// Runs one decoder cell step per horizon slot, all slots folded into the
// batch axis. context (B,H,N,D), init (H,D), future_time (B,H,D_T).
Var parallel_decode(Tape& tape, const gru::HGGRUCell& cell, const Var& context,
                    const Var& init, const Var& future_time, const Var& e_s,
                    const hg::ConvSettings& settings);

struct BlockTrace {
  std::vector<gru::StepTrace> encoder_steps;
  Tensor attention;  // (B,H,N,heads,L)
};

struct BlockOutput {
  Var forecast;    // (B,H,N)
  Var backcast;    // (B,L,N)
  Var trajectory;  // (B,L,N,D)
  Var decoded;     // (B,H,N,D)
};

class ResidualBlock {
 public:
  ResidualBlock() = default;
  ResidualBlock(ParameterSet& params, const std::string& prefix, const ModelConfig& cfg,
                std::mt19937_64& rng);

  BlockOutput forward(Tape& tape, const Var& x, const Var& et_past, const Var& et_future,
                      const Var& e_s, const ModelConfig& cfg, BlockTrace* trace = nullptr) const;

  Parameter& forecast_head() const { return *forecast_head_; }
  Parameter& backcast_head() const { return *backcast_head_; }
  const gru::HGGRUCell& encoder() const { return encoder_; }
  const gru::HGGRUCell& decoder() const { return decoder_; }
  const TemporalQueryAttention& tqa() const { return tqa_; }
  Parameter& decoder_init() const { return *dec_init_; }

 private:
  gru::HGGRUCell encoder_;
  TemporalQueryAttention tqa_;
  gru::HGGRUCell decoder_;
  Parameter* dec_init_ = nullptr;
  Parameter* forecast_head_ = nullptr;
  Parameter* backcast_head_ = nullptr;
};

struct ForecastBundle {
  Var forecast;                      // (B,H,N), sum of block forecasts
  std::vector<Var> block_forecasts;  // (B,H,N) each
  std::vector<Var> block_backcasts;  // (B,L,N) each
  std::vector<Var> block_inputs;     // (B,L,N,C) each
};

struct ForwardTrace {
  std::vector<BlockTrace> blocks;
};

class Forecaster {
 public:
  Forecaster(const ModelConfig& cfg, std::uint64_t seed);
  Forecaster(const Forecaster&) = delete;
  Forecaster& operator=(const Forecaster&) = delete;

  ForecastBundle forward(Tape& tape, const data::Batch& batch,
                         ForwardTrace* trace = nullptr) const;
  // Forward pass without keeping the tape; returns (B,H,N).
  Tensor predict(const data::Batch& batch) const;

  const ModelConfig& config() const { return cfg_; }
  ParameterSet& params() { return params_; }
  const ParameterSet& params() const { return params_; }
  const std::vector<ResidualBlock>& blocks() const { return blocks_; }
  const embed::SpatialEmbedding& spatial() const { return spatial_.front(); }
  const embed::TemporalEmbedding& temporal(std::size_t block = 0) const;

  // Time features E^d * E^w for a batch, (B, len, D_T); zeros under no_te.
  Var time_features(Tape& tape, const std::vector<int>& tod, const std::vector<int>& dow,
                    std::size_t batch, std::size_t len, std::size_t block = 0) const;

 private:
  ModelConfig cfg_;
  ParameterSet params_;
  std::vector<embed::TemporalEmbedding> temporal_;
  std::vector<embed::SpatialEmbedding> spatial_;
  std::vector<ResidualBlock> blocks_;
};

}  // namespace protohg::model

#endif  // PROTOHG_MODEL_HPP_
