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

#ifndef PROTOHG_TESTS_FRACTION_HPP_
#define PROTOHG_TESTS_FRACTION_HPP_

// Exact rational arithmetic for small metric fixtures.

#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace protohg::testing {

struct Fraction {
  std::int64_t num = 0, den = 1;

  Fraction() = default;
  Fraction(std::int64_t n, std::int64_t d = 1) : num(n), den(d) {  // NOLINT
    if (d == 0) throw std::domain_error("zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(std::llabs(num), den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }
  Fraction operator+(const Fraction& o) const { return {num * o.den + o.num * den, den * o.den}; }
  Fraction operator*(const Fraction& o) const { return {num * o.num, den * o.den}; }
  Fraction operator/(const Fraction& o) const { return {num * o.den, den * o.num}; }
  bool operator==(const Fraction& o) const { return num == o.num && den == o.den; }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

struct ExactMetrics {
  Fraction mae, mse, mape;  // mape in percent
};

// Integer-valued predictions and targets, no mask.
inline ExactMetrics exact_metrics(const std::vector<std::int64_t>& pred,
                                  const std::vector<std::int64_t>& target,
                                  std::int64_t threshold = 1) {
  Fraction abs, sq, ape;
  std::int64_t n_ape = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const std::int64_t e = pred[i] - target[i];
    abs = abs + Fraction(std::llabs(e));
    sq = sq + Fraction(e * e);
    if (std::llabs(target[i]) >= threshold) {
      ape = ape + Fraction(std::llabs(e), std::llabs(target[i]));
      ++n_ape;
    }
  }
  const auto n = static_cast<std::int64_t>(pred.size());
  return {abs / Fraction(n), sq / Fraction(n), ape * Fraction(100) / Fraction(n_ape)};
}

}  // namespace protohg::testing

#endif  // PROTOHG_TESTS_FRACTION_HPP_
