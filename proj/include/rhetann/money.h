// Copyright 2026 The RhetAnn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RHETANN_MONEY_H_
#define RHETANN_MONEY_H_

#include <compare>
#include <cstdint>
#include <string>

namespace rhetann {

// Currency held as an exact integer count of nano-dollars. Cost arithmetic
// stays in integers so linear scalings (e.g. a 10x price) are exact.
class Money {
 public:
  constexpr Money() = default;

  static constexpr Money FromNanos(std::int64_t nanos) { return Money(nanos); }
  static Money FromDollars(double dollars);

  constexpr std::int64_t nanos() const { return nanos_; }
  double dollars() const { return static_cast<double>(nanos_) / 1e9; }

  // "$90000.00"; rounds half away from zero at the cent.
  std::string ToString() const;

  constexpr Money operator+(Money o) const { return Money(nanos_ + o.nanos_); }
  constexpr Money& operator+=(Money o) {
    nanos_ += o.nanos_;
    return *this;
  }
  constexpr Money operator*(std::int64_t k) const { return Money(nanos_ * k); }
  constexpr auto operator<=>(const Money&) const = default;

 private:
  constexpr explicit Money(std::int64_t nanos) : nanos_(nanos) {}
  std::int64_t nanos_ = 0;
};

// Price per 1,000 tokens in integer micro-dollars, so that the cost of n
// tokens is exactly n * micros_per_1k nano-dollars.
struct TokenPrice {
  std::int64_t micros_per_1k = 0;

  static TokenPrice FromDollarsPer1K(double dollars);
  double dollars_per_1k() const { return static_cast<double>(micros_per_1k) / 1e6; }
  Money Cost(std::int64_t tokens) const {
    return Money::FromNanos(tokens * micros_per_1k);
  }
  bool operator==(const TokenPrice&) const = default;
};

}  // namespace rhetann

#endif  // RHETANN_MONEY_H_
