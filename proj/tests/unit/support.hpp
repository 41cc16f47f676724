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

#ifndef PROTOHG_TESTS_SUPPORT_HPP_
#define PROTOHG_TESTS_SUPPORT_HPP_

#include <unistd.h>

#include <filesystem>
#include <random>
#include <string>

#include "protohg/data.hpp"
#include "protohg/gradcheck.hpp"
#include "protohg/model.hpp"
#include "protohg/ops.hpp"

namespace protohg::testing {

inline Tensor rnd(Shape s, std::mt19937_64& rng, double scale = 1.0) {
  return Tensor::uniform(std::move(s), -scale, scale, rng);
}

inline Tensor eval(const std::function<Var(Tape&)>& f) {
  Tape t;
  return f(t).value();
}

inline model::ModelConfig tiny_model(std::size_t blocks = 1) {
  model::ModelConfig mc;
  mc.nodes = 4;
  mc.hidden = 4;
  mc.time_dim = 3;
  mc.node_dim = 3;
  mc.prototypes = 2;
  mc.blocks = blocks;
  mc.heads = 2;
  mc.history = 3;
  mc.horizon = 2;
  return mc;
}

// Windows over a short synthetic corpus with 5-minute sampling.
inline data::Batch synthetic_batch(std::size_t nodes, std::size_t L, std::size_t H,
                                   std::vector<std::size_t> which, std::uint64_t seed = 3) {
  auto syn = data::generate_synthetic(nodes, 200, seed);
  auto c = std::make_shared<const data::RawCorpus>(syn.corpus);
  auto idx = std::make_shared<const data::TimeIndices>(data::compute_time_indices(*c));
  auto w = data::make_windows(c, idx, L, H);
  return data::make_batch(w, which, data::fit_normalizer(w));
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() /
           ("protohg_test_" + std::to_string(::getpid()) + "_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace protohg::testing

#endif  // PROTOHG_TESTS_SUPPORT_HPP_
