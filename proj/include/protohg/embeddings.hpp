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

#ifndef PROTOHG_EMBEDDINGS_HPP_
#define PROTOHG_EMBEDDINGS_HPP_

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "protohg/autodiff.hpp"

namespace protohg::embed {

// Time-of-day and day-of-week lookup tables. A lookup is the one-hot
// encoding followed by a bias-free linear map, i.e. a row selection.
class TemporalEmbedding {
 public:
  TemporalEmbedding() = default;
  TemporalEmbedding(ParameterSet& params, const std::string& prefix, int slots_per_day,
                    std::size_t dim, std::mt19937_64& rng);

  // (E^d, E^w), each (len, D_T). Throws std::out_of_range on a bad index.
  std::pair<Var, Var> lookup(Tape& tape, const std::vector<int>& tod,
                             const std::vector<int>& dow) const;
  // E^d ⊙ E^w, (len, D_T).
  Var combined(Tape& tape, const std::vector<int>& tod, const std::vector<int>& dow) const;

  std::size_t dim() const;
  int slots_per_day() const;
  Parameter& tod_table() const { return *tod_; }
  Parameter& dow_table() const { return *dow_; }

 private:
  Parameter* tod_ = nullptr;
  Parameter* dow_ = nullptr;
};

// Elementwise product of two equally shaped time embeddings.
Var combined_time(const Var& e_tod, const Var& e_dow);

// Learnable per-node embedding E^s (N, D_N).
class SpatialEmbedding {
 public:
  SpatialEmbedding() = default;
  SpatialEmbedding(ParameterSet& params, const std::string& name, std::size_t nodes,
                   std::size_t dim, std::mt19937_64& rng);

  Var all(Tape& tape) const { return tape.param(*table_); }
  Var rows(Tape& tape, const std::vector<int>& ids) const;

  std::size_t nodes() const { return table_->value.dim(0); }
  std::size_t dim() const { return table_->value.dim(1); }
  Parameter& table() const { return *table_; }

 private:
  Parameter* table_ = nullptr;
};

// Uniform in [-1/sqrt(cols), 1/sqrt(cols)].
Tensor embedding_init(std::size_t rows, std::size_t cols, std::mt19937_64& rng);

}  // namespace protohg::embed

#endif  // PROTOHG_EMBEDDINGS_HPP_
