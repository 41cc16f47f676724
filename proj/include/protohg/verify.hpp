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

#ifndef PROTOHG_VERIFY_HPP_
#define PROTOHG_VERIFY_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "protohg/tensor.hpp"

namespace protohg::verify {

struct CheckResult {
  std::string group;  // "oracle" | "gradient" | "invariant"
  std::string name;
  bool passed = false;
  double metric = 0.0;     // max error observed
  double tolerance = 0.0;
  std::string detail;
};

// Forward implementations checked against the scalar-loop oracles. The
// defaults call the library; tests swap in broken versions to confirm the
// suite notices.
struct Implementations {
  // (h_prev, e_s, time, W_h, W_T) -> E^N
  std::function<Tensor(const Tensor&, const Tensor&, const Tensor&, const Tensor&, const Tensor&)>
      node_repr;
  // (E^N, P) -> S
  std::function<Tensor(const Tensor&, const Tensor&)> assignment;
  // (X^E, S, W_e) -> He
  std::function<Tensor(const Tensor&, const Tensor&, const Tensor&)> node_to_edge;
  // (He, S) -> Xh
  std::function<Tensor(const Tensor&, const Tensor&)> edge_to_node;
  // (Xh, X^E, E^N, Theta) -> out
  std::function<Tensor(const Tensor&, const Tensor&, const Tensor&, const Tensor&)> napl;

  static Implementations library();
};

struct Options {
  std::size_t instances = 100;
  std::uint64_t seed = 2024;
  double oracle_tol = 1e-6;
  double gradient_tol = 1e-4;
};

std::vector<CheckResult> oracle_checks(const Options& opts,
                                       const Implementations& impl = Implementations::library());
std::vector<CheckResult> gradient_checks(const Options& opts);
std::vector<CheckResult> invariant_checks(const Options& opts);
std::vector<CheckResult> run_all(const Options& opts);

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace protohg::verify

#endif  // PROTOHG_VERIFY_HPP_
