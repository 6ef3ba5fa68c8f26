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

#include "testing/oracles.h"

#include <algorithm>
#include <iterator>
#include <utility>

namespace rhetann::testing {

namespace {

std::vector<std::set<std::string>> PresentValues(const AgreementUnit& u) {
  std::vector<std::set<std::string>> out;
  for (const auto& v : u.values) {
    if (v) out.emplace_back(v->begin(), v->end());
  }
  return out;
}

}  // namespace

std::optional<double> BruteAlpha(const std::vector<AgreementUnit>& units) {
  std::vector<std::vector<std::set<std::string>>> pairable;
  for (const AgreementUnit& u : units) {
    auto values = PresentValues(u);
    if (values.size() >= 2) pairable.push_back(std::move(values));
  }
  if (pairable.empty()) return std::nullopt;

  double n = 0.0;
  double within = 0.0;
  std::vector<const std::set<std::string>*> pooled;
  for (const auto& values : pairable) {
    const double m = static_cast<double>(values.size());
    n += m;
    for (std::size_t i = 0; i < values.size(); ++i) {
      pooled.push_back(&values[i]);
      for (std::size_t j = 0; j < values.size(); ++j) {
        if (i != j && values[i] != values[j]) within += 1.0 / (m - 1.0);
      }
    }
  }
  double across = 0.0;
  for (std::size_t a = 0; a < pooled.size(); ++a) {
    for (std::size_t b = 0; b < pooled.size(); ++b) {
      if (a != b && *pooled[a] != *pooled[b]) across += 1.0;
    }
  }
  if (across == 0.0) return std::nullopt;
  const double d_o = within / n;
  const double d_e = across / (n * (n - 1.0));
  return 1.0 - d_o / d_e;
}

double NaiveJaccardIndex(const std::set<std::string>& a, const std::set<std::string>& b) {
  std::vector<std::string> inter;
  std::vector<std::string> uni;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(inter));
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(uni));
  if (uni.empty()) return 1.0;
  return static_cast<double>(inter.size()) / static_cast<double>(uni.size());
}

std::optional<double> NaiveJaccard(const std::vector<AgreementUnit>& units, bool pooled) {
  std::vector<double> unit_means;
  std::vector<double> all_pairs;
  for (const AgreementUnit& u : units) {
    const auto values = PresentValues(u);
    if (values.size() < 2) continue;
    std::vector<double> scores;
    for (std::size_t i = 0; i < values.size(); ++i) {
      for (std::size_t j = i + 1; j < values.size(); ++j) {
        scores.push_back(NaiveJaccardIndex(values[i], values[j]));
      }
    }
    double sum = 0.0;
    for (double s : scores) sum += s;
    unit_means.push_back(sum / static_cast<double>(scores.size()));
    all_pairs.insert(all_pairs.end(), scores.begin(), scores.end());
  }
  const std::vector<double>& xs = pooled ? all_pairs : unit_means;
  if (xs.empty()) return std::nullopt;
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

std::optional<double> NaiveExact(const std::vector<AgreementUnit>& units) {
  std::size_t eligible = 0;
  std::size_t agreed = 0;
  for (const AgreementUnit& u : units) {
    const auto values = PresentValues(u);
    if (values.size() < 2) continue;
    ++eligible;
    const std::set<std::set<std::string>> distinct(values.begin(), values.end());
    if (distinct.size() == 1) ++agreed;
  }
  if (eligible == 0) return std::nullopt;
  return static_cast<double>(agreed) / static_cast<double>(eligible);
}

namespace {

PropertySet RandomSet(std::mt19937_64& rng, std::size_t properties, double p_apply) {
  std::bernoulli_distribution apply(p_apply);
  PropertySet s;
  for (std::size_t p = 0; p < properties; ++p) {
    if (apply(rng)) s.insert("p" + std::to_string(p));
  }
  return s;
}

}  // namespace

std::vector<AgreementUnit> RandomUnits(std::mt19937_64& rng, const UnitShape& shape) {
  std::bernoulli_distribution absent(shape.p_absent);
  std::vector<AgreementUnit> units;
  for (std::size_t u = 0; u < shape.units; ++u) {
    AgreementUnit unit;
    unit.sentence_id = "u" + std::to_string(u);
    for (std::size_t a = 0; a < shape.annotators; ++a) {
      if (absent(rng)) {
        unit.values.push_back(std::nullopt);
      } else {
        unit.values.push_back(RandomSet(rng, shape.properties, shape.p_apply));
      }
    }
    units.push_back(std::move(unit));
  }
  return units;
}

std::vector<AgreementUnit> RandomUnanimousUnits(std::mt19937_64& rng, const UnitShape& shape) {
  std::bernoulli_distribution absent(shape.p_absent);
  std::vector<AgreementUnit> units;
  for (std::size_t u = 0; u < shape.units; ++u) {
    AgreementUnit unit;
    unit.sentence_id = "u" + std::to_string(u);
    const PropertySet shared = RandomSet(rng, shape.properties, shape.p_apply);
    for (std::size_t a = 0; a < shape.annotators; ++a) {
      // Keep at least two values so every unit is pairable.
      if (a >= 2 && absent(rng)) {
        unit.values.push_back(std::nullopt);
      } else {
        unit.values.push_back(shared);
      }
    }
    units.push_back(std::move(unit));
  }
  return units;
}

namespace {

const char* const kPhrasal[] = {"S", "NP", "VP", "PP", "SBAR", "ADJP", "ADVP", "NP-SBJ", "WHNP"};
const char* const kTags[] = {"DT", "NN", "NNS", "VBZ", "VBD", "IN", "JJ", "RB", ".", ",", "PRP$",
                             "-NONE-"};
const char* const kWords[] = {"the",  "cat", "sat",   "on", "mat", "It's", "U.S.", "don't",
                              "3.14", ",",   ".",     "--", "a-b", "é",    "``",   "''",
                              "$",    "%",   "co-op", "x"};

template <std::size_t N>
std::string Pick(std::mt19937_64& rng, const char* const (&table)[N]) {
  return table[std::uniform_int_distribution<std::size_t>(0, N - 1)(rng)];
}

TreeNode RandomNode(std::mt19937_64& rng, int depth, int max_depth, int max_children) {
  std::bernoulli_distribution stop(depth >= max_depth ? 1.0 : 0.35);
  if (depth > 0 && stop(rng)) {
    TreeNode leaf;
    leaf.label = Pick(rng, kTags);
    leaf.token = Pick(rng, kWords);
    return leaf;
  }
  TreeNode node;
  node.label = Pick(rng, kPhrasal);
  const int n = std::uniform_int_distribution<int>(1, max_children)(rng);
  for (int i = 0; i < n; ++i) {
    node.children.push_back(RandomNode(rng, depth + 1, max_depth, max_children));
  }
  return node;
}

std::string Gap(std::mt19937_64* noise) {
  if (noise == nullptr) return " ";
  static const char kSpace[] = {' ', '\t', '\n', '\r'};
  std::string out;
  const int n = std::uniform_int_distribution<int>(1, 3)(*noise);
  for (int i = 0; i < n; ++i) {
    out.push_back(kSpace[std::uniform_int_distribution<int>(0, 3)(*noise)]);
  }
  return out;
}

void Print(const TreeNode& node, std::mt19937_64* noise, std::string* out) {
  out->push_back('(');
  out->append(node.label);
  if (node.token) {
    out->append(Gap(noise));
    out->append(*node.token);
  } else {
    for (const TreeNode& child : node.children) {
      out->append(Gap(noise));
      Print(child, noise, out);
    }
  }
  out->push_back(')');
}

}  // namespace

TreeNode RandomTree(std::mt19937_64& rng, int max_depth, int max_children) {
  return RandomNode(rng, 0, max_depth, max_children);
}

std::string PrintTree(const TreeNode& node, std::mt19937_64* noise) {
  std::string out;
  if (noise != nullptr) out += Gap(noise);
  Print(node, noise, &out);
  if (noise != nullptr) out += Gap(noise);
  return out;
}

std::vector<std::string> Leaves(const TreeNode& node) {
  std::vector<std::string> out;
  std::vector<const TreeNode*> stack{&node};
  while (!stack.empty()) {
    const TreeNode* n = stack.back();
    stack.pop_back();
    if (n->token) {
      out.push_back(*n->token);
      continue;
    }
    for (auto it = n->children.rbegin(); it != n->children.rend(); ++it) stack.push_back(&*it);
  }
  return out;
}

NodePath BruteCoveringNode(const TreeNode& root, std::size_t begin, std::size_t end) {
  struct Candidate {
    NodePath path;
    std::size_t lo;
    std::size_t hi;
  };
  std::vector<Candidate> all;
  // Spans from leaf counts of every earlier sibling subtree.
  std::vector<std::pair<const TreeNode*, Candidate>> todo{{&root, {{}, 0, Leaves(root).size()}}};
  while (!todo.empty()) {
    auto [node, c] = todo.back();
    todo.pop_back();
    all.push_back(c);
    std::size_t offset = c.lo;
    for (std::size_t i = 0; i < node->children.size(); ++i) {
      const std::size_t width = Leaves(node->children[i]).size();
      Candidate child{c.path, offset, offset + width};
      child.path.indices.push_back(i);
      todo.push_back({&node->children[i], child});
      offset += width;
    }
  }
  const Candidate* best = nullptr;
  for (const Candidate& c : all) {
    if (c.lo <= begin && end <= c.hi &&
        (best == nullptr || c.path.indices.size() > best->path.indices.size())) {
      best = &c;
    }
  }
  return best->path;
}

std::string Unbalance(const std::string& text, std::mt19937_64& rng) {
  std::string s = text;
  auto balance = [](const std::string& t) {
    long d = 0;
    for (char c : t) d += c == '(' ? 1 : c == ')' ? -1 : 0;
    return d;
  };
  std::bernoulli_distribution insert(0.5);
  do {
    if (insert(rng) || s.empty()) {
      const std::size_t at = std::uniform_int_distribution<std::size_t>(0, s.size())(rng);
      s.insert(s.begin() + static_cast<std::ptrdiff_t>(at), insert(rng) ? '(' : ')');
    } else {
      std::vector<std::size_t> parens;
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '(' || s[i] == ')') parens.push_back(i);
      }
      if (parens.empty()) continue;
      const std::size_t pick =
          parens[std::uniform_int_distribution<std::size_t>(0, parens.size() - 1)(rng)];
      s.erase(pick, 1);
    }
  } while (balance(s) == 0);
  return s;
}

}  // namespace rhetann::testing
