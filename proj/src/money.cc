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

#include "rhetann/money.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace rhetann {

Money Money::FromDollars(double dollars) {
  return Money(static_cast<std::int64_t>(std::llround(dollars * 1e9)));
}

TokenPrice TokenPrice::FromDollarsPer1K(double dollars) {
  return TokenPrice{static_cast<std::int64_t>(std::llround(dollars * 1e6))};
}

std::string Money::ToString() const {
  const bool negative = nanos_ < 0;
  const std::int64_t abs_nanos = negative ? -nanos_ : nanos_;
  const std::int64_t cents = (abs_nanos + 5'000'000) / 10'000'000;
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%s$%lld.%02lld", negative ? "-" : "",
                static_cast<long long>(cents / 100),
                static_cast<long long>(cents % 100));
  return buf;
}

}  // namespace rhetann
