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

#include "protohg/embeddings.hpp"

#include <cmath>

#include "protohg/ops.hpp"

namespace protohg::embed {

Tensor embedding_init(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
  return Tensor::uniform({rows, cols}, -bound, bound, rng);
}

TemporalEmbedding::TemporalEmbedding(ParameterSet& params, const std::string& prefix,
                                     int slots_per_day, std::size_t dim, std::mt19937_64& rng) {
  tod_ = &params.create(prefix + ".tod", embedding_init(static_cast<std::size_t>(slots_per_day),
                                                        dim, rng));
  dow_ = &params.create(prefix + ".dow", embedding_init(7, dim, rng));
}

std::pair<Var, Var> TemporalEmbedding::lookup(Tape& tape, const std::vector<int>& tod,
                                              const std::vector<int>& dow) const {
  return {ops::gather_rows(tape.param(*tod_), tod), ops::gather_rows(tape.param(*dow_), dow)};
}

Var TemporalEmbedding::combined(Tape& tape, const std::vector<int>& tod,
                                const std::vector<int>& dow) const {
  auto [ed, ew] = lookup(tape, tod, dow);
  return combined_time(ed, ew);
}

std::size_t TemporalEmbedding::dim() const { return tod_->value.dim(1); }
int TemporalEmbedding::slots_per_day() const { return static_cast<int>(tod_->value.dim(0)); }

Var combined_time(const Var& e_tod, const Var& e_dow) { return ops::mul(e_tod, e_dow); }

SpatialEmbedding::SpatialEmbedding(ParameterSet& params, const std::string& name,
                                   std::size_t nodes, std::size_t dim, std::mt19937_64& rng) {
  table_ = &params.create(name, embedding_init(nodes, dim, rng));
}

Var SpatialEmbedding::rows(Tape& tape, const std::vector<int>& ids) const {
  return ops::gather_rows(tape.param(*table_), ids);
}

}  // namespace protohg::embed
