#include "forge/tree.hpp"

#include <algorithm>
#include <string>

#include "forge/errors.hpp"
#include "forge/rng.hpp"

namespace forge {

RootedTree RootedTree::from_parents(std::vector<Vertex> parent) {
  const int n = static_cast<int>(parent.size());
  if (n == 0) throw GraphError("tree must have at least one vertex");
  RootedTree t;
  t.root_ = -1;
  t.children_.assign(static_cast<std::size_t>(n), {});
  for (Vertex v = 0; v < n; ++v) {
    if (parent[v] < 0 || parent[v] >= n) throw GraphError("parent of " + std::to_string(v) + " out of range");
    if (parent[v] == v) {
      if (t.root_ != -1) throw GraphError("tree has more than one root");
      t.root_ = v;
    } else {
      t.children_[parent[v]].push_back(v);
    }
  }
  if (t.root_ == -1) throw GraphError("tree has no root");
  t.parent_ = std::move(parent);
  t.depth_.assign(static_cast<std::size_t>(n), -1);
  t.bfs_order_.push_back(t.root_);
  t.depth_[t.root_] = 0;
  for (std::size_t head = 0; head < t.bfs_order_.size(); ++head) {
    Vertex u = t.bfs_order_[head];
    for (Vertex c : t.children_[u]) {
      t.depth_[c] = t.depth_[u] + 1;
      t.bfs_order_.push_back(c);
    }
  }
  if (static_cast<int>(t.bfs_order_.size()) != n) throw GraphError("parent pointers contain a cycle");
  return t;
}

RootedTree RootedTree::from_graph(const Graph& tree, Vertex root) {
  const int n = tree.order();
  if (n == 0) throw GraphError("tree must have at least one vertex");
  if (static_cast<int>(tree.size()) != n - 1 || !is_connected(tree)) throw GraphError("graph is not a tree");
  if (root < 0 || root >= n) throw GraphError("root out of range");
  std::vector<Vertex> parent(static_cast<std::size_t>(n), -1);
  parent[root] = root;
  std::vector<Vertex> queue{root};
  for (std::size_t head = 0; head < queue.size(); ++head) {
    Vertex u = queue[head];
    for (Vertex w : tree.neighbors(u)) {
      if (parent[w] == -1) {
        parent[w] = u;
        queue.push_back(w);
      }
    }
  }
  return from_parents(std::move(parent));
}

int RootedTree::max_degree() const noexcept {
  int best = 0;
  for (Vertex v = 0; v < order(); ++v) {
    int deg = static_cast<int>(children_[v].size()) + (v == root_ ? 0 : 1);
    best = std::max(best, deg);
  }
  return best;
}

Graph RootedTree::as_graph() const {
  std::vector<Edge> edges;
  for (Vertex v = 0; v < order(); ++v) {
    if (v != root_) edges.push_back(make_edge(v, parent_[v]));
  }
  return Graph::from_unique_edges(order(), std::move(edges));
}

RootedTree random_bounded_degree_tree(int n, int max_degree, std::uint64_t seed) {
  if (n < 1) throw PreconditionError("random tree: n must be >= 1");
  if (n > 2 && max_degree < 2) throw PreconditionError("random tree: no tree on n > 2 vertices has max degree < 2");
  if (n == 2 && max_degree < 1) throw PreconditionError("random tree: an edge needs max degree >= 1");
  Rng rng(seed);
  std::vector<Vertex> parent(static_cast<std::size_t>(n));
  std::vector<int> degree(static_cast<std::size_t>(n), 0);
  std::vector<Vertex> open;  // vertices with spare degree
  parent[0] = 0;
  open.push_back(0);
  for (Vertex v = 1; v < n; ++v) {
    std::size_t pick = rng.uniform(open.size());
    Vertex p = open[pick];
    parent[v] = p;
    ++degree[p];
    ++degree[v];
    if (degree[p] >= max_degree) {
      open.erase(open.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    if (degree[v] < max_degree) open.push_back(v);
  }
  return RootedTree::from_parents(std::move(parent));
}

}  // namespace forge
