#pragma once

#include <cstdint>
#include <vector>

#include "forge/graph.hpp"

namespace forge {

/// Rooted tree given by parent pointers; the root is its own parent.
class RootedTree {
 public:
  RootedTree() = default;

  /// Validates: exactly one root, acyclic, connected.
  static RootedTree from_parents(std::vector<Vertex> parent);

  /// Orient a tree graph away from `root`. Throws GraphError if `tree` is
  /// not a tree.
  static RootedTree from_graph(const Graph& tree, Vertex root = 0);

  int order() const noexcept { return static_cast<int>(parent_.size()); }
  Vertex root() const noexcept { return root_; }
  Vertex parent(Vertex v) const noexcept { return parent_[v]; }
  const std::vector<Vertex>& parents() const noexcept { return parent_; }
  const std::vector<Vertex>& children(Vertex v) const noexcept { return children_[v]; }
  int depth(Vertex v) const noexcept { return depth_[v]; }
  /// Vertices in BFS order from the root (children in increasing id).
  const std::vector<Vertex>& bfs_order() const noexcept { return bfs_order_; }
  int max_degree() const noexcept;

  Graph as_graph() const;

 private:
  std::vector<Vertex> parent_;
  std::vector<std::vector<Vertex>> children_;
  std::vector<int> depth_;
  std::vector<Vertex> bfs_order_;
  Vertex root_ = 0;
};

/// Random tree on n vertices with every degree at most max_degree: vertex
/// i > 0 attaches to a uniformly chosen earlier vertex with spare degree.
/// Rejects (n, max_degree) combinations for which no tree exists.
RootedTree random_bounded_degree_tree(int n, int max_degree, std::uint64_t seed);

}  // namespace forge
