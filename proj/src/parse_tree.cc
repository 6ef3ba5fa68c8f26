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

#include <cctype>
#include <sstream>

namespace rhetann {

const char* TreeErrorKindName(TreeErrorKind kind) {
  switch (kind) {
    case TreeErrorKind::kUnbalanced:
      return "unbalanced_brackets";
    case TreeErrorKind::kEmptyConstituent:
      return "empty_constituent";
    case TreeErrorKind::kTrailingGarbage:
      return "trailing_garbage";
    case TreeErrorKind::kUnexpectedToken:
      return "unexpected_token";
    case TreeErrorKind::kTooDeep:
      return "too_deep";
  }
  return "unknown";
}

namespace {

std::string DescribeTreeError(TreeErrorKind kind, std::size_t offset,
                              const std::string& what) {
  std::ostringstream os;
  os << TreeErrorKindName(kind) << " at byte " << offset << ": " << what;
  return os.str();
}

}  // namespace

TreeParseError::TreeParseError(TreeErrorKind kind, std::size_t offset,
                               const std::string& what)
    : Error(ErrorCode::kData, DescribeTreeError(kind, offset, what)),
      kind_(kind),
      offset_(offset) {}

std::string FormatNodePath(const NodePath& path) {
  std::string out = "[";
  for (std::size_t i = 0; i < path.indices.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(path.indices[i]);
  }
  return out + "]";
}

namespace {

void CollectTokens(const TreeNode& node, std::vector<std::string>* out) {
  if (node.is_leaf()) {
    out->push_back(*node.token);
    return;
  }
  for (const TreeNode& c : node.children) CollectTokens(c, out);
}

std::size_t CountLeaves(const TreeNode& node) {
  if (node.is_leaf()) return 1;
  std::size_t n = 0;
  for (const TreeNode& c : node.children) n += CountLeaves(c);
  return n;
}

void CollectPaths(const TreeNode& node, NodePath* current,
                  std::vector<NodePath>* out) {
  out->push_back(*current);
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    current->indices.push_back(i);
    CollectPaths(node.children[i], current, out);
    current->indices.pop_back();
  }
}

void AppendBracketed(const TreeNode& node, std::string* out) {
  out->push_back('(');
  out->append(node.label);
  if (node.is_leaf()) {
    out->push_back(' ');
    out->append(*node.token);
  } else {
    for (const TreeNode& c : node.children) {
      out->push_back(' ');
      AppendBracketed(c, out);
    }
  }
  out->push_back(')');
}

}  // namespace

ParseTree::ParseTree(TreeNode root, std::string sentence_id)
    : root_(std::move(root)), sentence_id_(std::move(sentence_id)) {
  CollectTokens(root_, &tokens_);
}

const TreeNode* ParseTree::Resolve(const NodePath& path) const {
  const TreeNode* node = &root_;
  for (std::size_t idx : path.indices) {
    if (idx >= node->children.size()) return nullptr;
    node = &node->children[idx];
  }
  return node;
}

TokenSpan ParseTree::Span(const NodePath& path) const {
  const TreeNode* node = &root_;
  std::size_t begin = 0;
  for (std::size_t idx : path.indices) {
    if (idx >= node->children.size()) {
      throw NotFound("dangling node path " + FormatNodePath(path));
    }
    for (std::size_t i = 0; i < idx; ++i) begin += CountLeaves(node->children[i]);
    node = &node->children[idx];
  }
  return TokenSpan{begin, begin + CountLeaves(*node)};
}

std::string ParseTree::Fragment(const NodePath& path) const {
  const TokenSpan span = Span(path);
  std::string out;
  for (std::size_t i = span.begin; i < span.end; ++i) {
    if (i > span.begin) out.push_back(' ');
    out += tokens_[i];
  }
  return out;
}

NodePath ParseTree::SmallestCoveringNode(TokenSpan range) const {
  if (range.begin >= range.end || range.end > leaf_count()) {
    std::ostringstream os;
    os << "token range [" << range.begin << "," << range.end
       << ") out of bounds for " << leaf_count() << " leaves";
    throw InvalidArgument(os.str());
  }
  NodePath path;
  const TreeNode* node = &root_;
  std::size_t node_begin = 0;
  // Spans nest, so at most one child can contain the range.
  for (;;) {
    bool descended = false;
    std::size_t child_begin = node_begin;
    for (std::size_t i = 0; i < node->children.size(); ++i) {
      const std::size_t child_end = child_begin + CountLeaves(node->children[i]);
      if (child_begin <= range.begin && range.end <= child_end) {
        path.indices.push_back(i);
        node = &node->children[i];
        node_begin = child_begin;
        descended = true;
        break;
      }
      child_begin = child_end;
    }
    if (!descended) return path;
  }
}

std::vector<NodePath> ParseTree::AllPaths() const {
  std::vector<NodePath> out;
  NodePath current;
  CollectPaths(root_, &current, &out);
  return out;
}

std::string SerializeBracketed(const TreeNode& node) {
  std::string out;
  AppendBracketed(node, &out);
  return out;
}

namespace {

class BracketParser {
 public:
  explicit BracketParser(std::string_view text) : text_(text) {}

  TreeNode Parse() {
    SkipSpace();
    if (AtEnd()) {
      throw TreeParseError(TreeErrorKind::kUnbalanced, pos_, "empty input");
    }
    if (Peek() != '(') {
      throw TreeParseError(TreeErrorKind::kUnexpectedToken, pos_,
                           "expected '('");
    }
    std::vector<Frame> stack;
    std::optional<TreeNode> done;
    while (!done) {
      SkipSpace();
      if (AtEnd()) {
        throw TreeParseError(TreeErrorKind::kUnbalanced, pos_,
                             "missing ')' at end of input");
      }
      const char c = Peek();
      if (c == '(') {
        if (stack.size() >= kMaxTreeDepth) {
          throw TreeParseError(TreeErrorKind::kTooDeep, pos_,
                               "nesting exceeds maximum depth");
        }
        if (!stack.empty() && stack.back().node.token) {
          throw TreeParseError(TreeErrorKind::kUnexpectedToken, pos_,
                               "constituent after a leaf token");
        }
        Frame f;
        f.open = pos_;
        ++pos_;
        SkipSpace();
        if (!AtEnd() && IsAtomChar(Peek())) f.node.label = ReadAtom();
        stack.push_back(std::move(f));
      } else if (c == ')') {
        if (stack.empty()) {
          throw TreeParseError(TreeErrorKind::kUnbalanced, pos_,
                               "unmatched ')'");
        }
        Frame& top = stack.back();
        if (!top.node.token && top.node.children.empty()) {
          throw TreeParseError(TreeErrorKind::kEmptyConstituent, top.open,
                               "constituent has neither token nor children");
        }
        ++pos_;
        TreeNode node = std::move(top.node);
        stack.pop_back();
        if (stack.empty()) {
          done = std::move(node);
        } else {
          stack.back().node.children.push_back(std::move(node));
        }
      } else {
        // Atom inside a constituent: a leaf token.
        Frame& top = stack.back();
        if (top.node.token || !top.node.children.empty()) {
          throw TreeParseError(TreeErrorKind::kUnexpectedToken, pos_,
                               "bare token where a constituent was expected");
        }
        top.node.token = ReadAtom();
      }
    }
    SkipSpace();
    if (!AtEnd()) {
      if (Peek() == ')') {
        throw TreeParseError(TreeErrorKind::kUnbalanced, pos_, "unmatched ')'");
      }
      throw TreeParseError(TreeErrorKind::kTrailingGarbage, pos_,
                           "input continues after the tree");
    }
    return std::move(*done);
  }

 private:
  struct Frame {
    TreeNode node;
    std::size_t open = 0;
  };

  static bool IsSpace(char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
  }
  static bool IsAtomChar(char c) { return c != '(' && c != ')' && !IsSpace(c); }

  bool AtEnd() const { return pos_ >= text_.size(); }
  char Peek() const { return text_[pos_]; }
  void SkipSpace() {
    while (!AtEnd() && IsSpace(Peek())) ++pos_;
  }
  std::string ReadAtom() {
    const std::size_t start = pos_;
    while (!AtEnd() && IsAtomChar(Peek())) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

ParseTree ParseBracketed(std::string_view text) {
  return ParseTree(BracketParser(text).Parse());
}

}  // namespace rhetann
