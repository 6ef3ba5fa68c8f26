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

#ifndef RHETANN_TESTS_TESTING_ORACLES_H_
#define RHETANN_TESTS_TESTING_ORACLES_H_

// Brute-force reference implementations used only by tests. They share no
// code with the library beyond the plain data types.

#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "rhetann/agreement.h"
#include "rhetann/parse_tree.h"

namespace rhetann::testing {

// Nominal alpha by explicit enumeration of ordered value pairs:
// 1 - D_o / D_e, with D_o over within-unit pairs weighted by 1/(m_u - 1) and
// D_e over every pair of pairable values in the pooled list. Labels compare
// as sets.
std::optional<double> BruteAlpha(const std::vector<AgreementUnit>& units);

// |A ∩ B| / |A ∪ B| through std::set_intersection / std::set_union.
double NaiveJaccardIndex(const std::set<std::string>& a, const std::set<std::string>& b);
std::optional<double> NaiveJaccard(const std::vector<AgreementUnit>& units, bool pooled);
std::optional<double> NaiveExact(const std::vector<AgreementUnit>& units);

struct UnitShape {
  std::size_t annotators = 3;
  std::size_t units = 10;
  std::size_t properties = 4;
  double p_absent = 0.1;
  double p_apply = 0.3;
};

// Random multi-label units over properties "p0".."p{n-1}".
std::vector<AgreementUnit> RandomUnits(std::mt19937_64& rng, const UnitShape& shape);
// Every present annotator of a unit shares one random set.
std::vector<AgreementUnit> RandomUnanimousUnits(std::mt19937_64& rng, const UnitShape& shape);

// Random constituency tree. Labels are drawn from a small tag set; tokens may
// contain punctuation but never whitespace or parentheses.
TreeNode RandomTree(std::mt19937_64& rng, int max_depth = 6, int max_children = 4);

// Bracketed text. A null `noise` gives exactly one space between siblings;
// otherwise whitespace runs of random length and kind are used.
std::string PrintTree(const TreeNode& node, std::mt19937_64* noise = nullptr);

// Leaves in order, by explicit stack traversal.
std::vector<std::string> Leaves(const TreeNode& node);

// Deepest node whose leaf span contains [begin, end), found by scoring every
// node path.
NodePath BruteCoveringNode(const TreeNode& root, std::size_t begin, std::size_t end);

// Inserts or deletes parentheses until the counts of '(' and ')' differ.
std::string Unbalance(const std::string& text, std::mt19937_64& rng);

}  // namespace rhetann::testing

#endif  // RHETANN_TESTS_TESTING_ORACLES_H_
