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

#ifndef RHETANN_PARSE_TREE_H_
#define RHETANN_PARSE_TREE_H_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rhetann/error.h"

namespace rhetann {

// A constituency node. Preterminals carry a token and no children; every
// other node has at least one child.
struct TreeNode {
  std::string label;
  std::vector<TreeNode> children;
  std::optional<std::string> token;

  bool is_leaf() const { return token.has_value(); }
  bool operator==(const TreeNode&) const = default;
};

// Child-index path from the root. The empty path is the root itself.
struct NodePath {
  std::vector<std::size_t> indices;

  bool operator==(const NodePath&) const = default;
  bool operator<(const NodePath& o) const { return indices < o.indices; }
};

std::string FormatNodePath(const NodePath& path);  // "[0,2]"

// Half-open leaf interval [begin, end).
struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool operator==(const TokenSpan&) const = default;
};

enum class TreeErrorKind {
  kUnbalanced,
  kEmptyConstituent,
  kTrailingGarbage,
  kUnexpectedToken,
  kTooDeep,
};

const char* TreeErrorKindName(TreeErrorKind kind);

// Parse failure with the byte offset where it was detected.
class TreeParseError : public Error {
 public:
  TreeParseError(TreeErrorKind kind, std::size_t offset, const std::string& what);

  TreeErrorKind kind() const { return kind_; }
  std::size_t offset() const { return offset_; }

 private:
  TreeErrorKind kind_;
  std::size_t offset_;
};

inline constexpr std::size_t kMaxTreeDepth = 4096;

class ParseTree {
 public:
  ParseTree() = default;
  explicit ParseTree(TreeNode root, std::string sentence_id = "");

  const TreeNode& root() const { return root_; }
  const std::string& sentence_id() const { return sentence_id_; }
  void set_sentence_id(std::string id) { sentence_id_ = std::move(id); }

  const std::vector<std::string>& tokens() const { return tokens_; }
  std::size_t leaf_count() const { return tokens_.size(); }

  // nullptr when the path does not resolve.
  const TreeNode* Resolve(const NodePath& path) const;
  // Leaf span of the node at `path`; throws NotFound for a dangling path.
  TokenSpan Span(const NodePath& path) const;

  // Leaf tokens under the node, single-space joined.
  std::string Fragment(const NodePath& path) const;

  // Deepest node whose span contains `range`.
  NodePath SmallestCoveringNode(TokenSpan range) const;

  // Every node path in preorder.
  std::vector<NodePath> AllPaths() const;

  bool operator==(const ParseTree& o) const { return root_ == o.root_; }

 private:
  TreeNode root_;
  std::string sentence_id_;
  std::vector<std::string> tokens_;
};

// Parses one Penn-style bracketed tree, e.g. "(S (NP (DT The)) (VP (VBZ x)))".
// The outermost label may be empty as in "( (S ...))". Labels and tokens are
// kept byte-for-byte; anything but whitespace separates nothing.
ParseTree ParseBracketed(std::string_view text);

// Canonical single-line rendering: one space between siblings.
std::string SerializeBracketed(const TreeNode& node);
inline std::string SerializeBracketed(const ParseTree& tree) {
  return SerializeBracketed(tree.root());
}

}  // namespace rhetann

#endif  // RHETANN_PARSE_TREE_H_
