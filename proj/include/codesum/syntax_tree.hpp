#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "codesum/lexer.hpp"

namespace codesum {

/// A parse-tree node. `name` is only set on declarations and type
/// references, the nodes that identifier fusion renders as `Type_name`.
struct SyntaxNode {
  std::string type;
  std::string name;
  Span span;
  std::vector<SyntaxNode> children;
};

namespace detail {

inline void render_into(const SyntaxNode& node, bool fuse, TokenSequence& out) {
  if (fuse && !node.name.empty()) {
    out.push(node.type + "_" + node.name, node.span);
  } else {
    out.push(node.type, node.span);
  }
  for (const SyntaxNode& child : node.children) render_into(child, fuse, out);
}

}  // namespace detail

/// Pre-order node-type sequence of a forest.
inline TokenSequence render_preorder(const std::vector<SyntaxNode>& roots, bool fuse_identifiers) {
  TokenSequence out;
  out.origin = TokenOrigin::AstSerialized;
  for (const SyntaxNode& root : roots) detail::render_into(root, fuse_identifiers, out);
  return out;
}

inline std::size_t count_nodes(const SyntaxNode& node) {
  std::size_t total = 1;
  for (const SyntaxNode& child : node.children) total += count_nodes(child);
  return total;
}

}  // namespace codesum
