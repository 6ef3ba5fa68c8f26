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

#include "rhetann/parse_tree.h"

#include <gtest/gtest.h>

#include <random>

#include "testing/oracles.h"

namespace rhetann {
namespace {

constexpr const char* kSentence =
    "(S (NP (PRP It)) (VP (VBZ is) (ADVP (RB now)) (ADJP (RB solidly) (JJ mainstream))) (. .))";

TEST(ParseTreeTest, ParsesAndResolves) {
  const ParseTree t = ParseBracketed(kSentence);
  EXPECT_EQ(t.root().label, "S");
  EXPECT_EQ(t.tokens(), (std::vector<std::string>{"It", "is", "now", "solidly", "mainstream", "."}));
  ASSERT_NE(t.Resolve({{1, 2}}), nullptr);
  EXPECT_EQ(t.Resolve({{1, 2}})->label, "ADJP");
  EXPECT_EQ(t.Resolve({{1, 9}}), nullptr);
  EXPECT_EQ(t.Span({{1}}), (TokenSpan{1, 5}));
  EXPECT_EQ(t.Fragment({{1}}), "is now solidly mainstream");
  EXPECT_EQ(t.Fragment({}), "It is now solidly mainstream .");
  EXPECT_THROW(t.Span({{7}}), Error);
}

TEST(ParseTreeTest, EmptyRootLabelAndWhitespace) {
  const ParseTree t = ParseBracketed("  ( (S\n\t(NP (NN x))\r\n (VP (VB y))))  ");
  EXPECT_EQ(t.root().label, "");
  EXPECT_EQ(t.root().children.size(), 1u);
  EXPECT_EQ(SerializeBracketed(t), "( (S (NP (NN x)) (VP (VB y))))");
}

TEST(ParseTreeTest, KeepsPunctuationTokensVerbatim) {
  const ParseTree t = ParseBracketed("(S (`` ``) (NP (NNP U.S.)) (, ,) ('' ''))");
  EXPECT_EQ(t.tokens(), (std::vector<std::string>{"``", "U.S.", ",", "''"}));
}

TEST(ParseTreeTest, StructuredErrors) {
  struct Case {
    const char* text;
    TreeErrorKind kind;
  };
  const Case cases[] = {
      {"", TreeErrorKind::kUnbalanced},
      {"(S (NP (NN x))", TreeErrorKind::kUnbalanced},
      {"(S (NP (NN x))))", TreeErrorKind::kUnbalanced},
      {"(S ())", TreeErrorKind::kEmptyConstituent},
      {"(S (NN x)) (S (NN y))", TreeErrorKind::kTrailingGarbage},
      {"S (NN x)", TreeErrorKind::kUnexpectedToken},
  };
  for (const Case& c : cases) {
    try {
      ParseBracketed(c.text);
      ADD_FAILURE() << "accepted: " << c.text;
    } catch (const TreeParseError& e) {
      EXPECT_EQ(e.kind(), c.kind) << c.text << ": " << e.what();
      EXPECT_EQ(e.code(), ErrorCode::kData);
    }
  }
}

TEST(ParseTreeTest, DepthLimitIsAnErrorNotACrash) {
  std::string deep;
  for (std::size_t i = 0; i < kMaxTreeDepth + 10; ++i) deep += "(X ";
  deep += "(NN x)";
  for (std::size_t i = 0; i < kMaxTreeDepth + 10; ++i) deep += ")";
  try {
    ParseBracketed(deep);
    FAIL();
  } catch (const TreeParseError& e) {
    EXPECT_EQ(e.kind(), TreeErrorKind::kTooDeep);
  }
}

TEST(ParseTreeTest, SmallestCoveringNodeExamples) {
  const ParseTree t = ParseBracketed(kSentence);
  EXPECT_EQ(t.SmallestCoveringNode({3, 5}), (NodePath{{1, 2}}));
  EXPECT_EQ(t.SmallestCoveringNode({2, 3}), (NodePath{{1, 1, 0}}));
  EXPECT_EQ(t.SmallestCoveringNode({0, 6}), (NodePath{}));
  EXPECT_EQ(t.SmallestCoveringNode({1, 3}), (NodePath{{1}}));
  EXPECT_THROW(t.SmallestCoveringNode({4, 9}), Error);
}

TEST(ParseTreeTest, FormatNodePath) {
  EXPECT_EQ(FormatNodePath({}), "[]");
  EXPECT_EQ(FormatNodePath({{0, 2}}), "[0,2]");
}

// Property: any balanced tree printed with arbitrary whitespace parses back to
// the same structure, and canonical serialization is a fixed point.
TEST(ParseTreePropertyTest, RoundTripRandomTrees) {
  std::mt19937_64 rng(20261014);
  for (int i = 0; i < 500; ++i) {
    const TreeNode tree = testing::RandomTree(rng);
    const std::string noisy = testing::PrintTree(tree, &rng);
    const ParseTree parsed = ParseBracketed(noisy);
    ASSERT_EQ(parsed.root(), tree) << noisy;
    EXPECT_EQ(SerializeBracketed(parsed), testing::PrintTree(tree));
    EXPECT_EQ(parsed.tokens(), testing::Leaves(tree));
    EXPECT_EQ(ParseBracketed(SerializeBracketed(parsed)), parsed);
  }
}

// Property: every non-empty leaf range has the covering node found by
// exhaustive search, and that node's fragment contains the range's tokens.
TEST(ParseTreePropertyTest, CoveringNodeMatchesExhaustiveSearch) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    const ParseTree t(testing::RandomTree(rng));
    const std::size_t n = t.leaf_count();
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t e = b + 1; e <= n; ++e) {
        const NodePath got = t.SmallestCoveringNode({b, e});
        ASSERT_EQ(got, testing::BruteCoveringNode(t.root(), b, e))
            << SerializeBracketed(t) << " [" << b << "," << e << ")";
        const TokenSpan span = t.Span(got);
        EXPECT_LE(span.begin, b);
        EXPECT_GE(span.end, e);
      }
    }
  }
}

TEST(ParseTreePropertyTest, AllPathsResolve) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    const ParseTree t(testing::RandomTree(rng));
    std::size_t leaves = 0;
    for (const NodePath& p : t.AllPaths()) {
      const TreeNode* node = t.Resolve(p);
      ASSERT_NE(node, nullptr);
      if (node->is_leaf()) ++leaves;
    }
    EXPECT_EQ(leaves, t.leaf_count());
  }
}

TEST(ParseTreePropertyTest, UnbalancedInputsYieldStructuredErrors) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 500; ++i) {
    const std::string bad = testing::Unbalance(testing::PrintTree(testing::RandomTree(rng)), rng);
    EXPECT_THROW(ParseBracketed(bad), TreeParseError) << bad;
  }
}

}  // namespace
}  // namespace rhetann
