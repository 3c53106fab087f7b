#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace forge {

using Vertex = int;

/// Sorted, duplicate-free list of vertex ids.
using VertexSet = std::vector<Vertex>;

/// Canonical undirected edge, u < v.
struct Edge {
  Vertex u = 0;
  Vertex v = 0;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

inline Edge make_edge(Vertex a, Vertex b) noexcept { return a < b ? Edge{a, b} : Edge{b, a}; }

/// Immutable undirected simple graph on vertices 0..n-1.
///
/// Storage is CSR (sorted neighbor rows) plus the canonical sorted edge
/// list; every edge has a stable index into edges(). Graphs whose order is
/// at most dense_cap() additionally keep a bit-row adjacency matrix, which
/// makes has_edge O(1). All derived graphs are new values.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int n);

  /// Validating constructor: rejects loops, duplicate edges and
  /// out-of-range endpoints with GraphError.
  static Graph from_edges(int n, std::span<const Edge> edges);

  /// Trusted constructor for internally generated, already canonical
  /// (u < v), duplicate-free edges in any order.
  static Graph from_unique_edges(int n, std::vector<Edge> edges);

  int order() const noexcept { return n_; }
  std::size_t size() const noexcept { return edges_.size(); }

  std::span<const Vertex> neighbors(Vertex v) const noexcept {
    return {adj_.data() + offsets_[v], adj_.data() + offsets_[v + 1]};
  }
  int degree(Vertex v) const noexcept { return static_cast<int>(offsets_[v + 1] - offsets_[v]); }
  int max_degree() const noexcept;

  bool has_edge(Vertex u, Vertex v) const noexcept;
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::optional<std::size_t> edge_index(Vertex u, Vertex v) const noexcept;

  bool has_dense_rows() const noexcept { return !dense_.empty(); }
  /// Bit-row of v (valid only if has_dense_rows()).
  std::span<const std::uint64_t> dense_row(Vertex v) const noexcept {
    return {dense_.data() + static_cast<std::size_t>(v) * words_, words_};
  }

  friend bool operator==(const Graph& a, const Graph& b) noexcept {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

  static std::size_t dense_cap() noexcept;
  static void set_dense_cap(std::size_t cap) noexcept;

 private:
  void build(std::vector<Edge> edges);

  int n_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<Vertex> adj_;
  std::vector<std::size_t> slot_edge_;
  std::vector<Edge> edges_;
  std::vector<std::uint64_t> dense_;
  std::size_t words_ = 0;
};

/// Result of deleting vertices: the relabeled graph plus, for each new id,
/// the id it had in the source graph.
struct InducedSubgraph {
  Graph graph;
  std::vector<Vertex> original;
};

/// G[keep] with vertices relabeled 0..|keep|-1 in the order of `keep`.
InducedSubgraph induced_subgraph(const Graph& g, std::span<const Vertex> keep);

/// uv is an edge iff 1 <= dist_G(u,v) <= k. k must be >= 1.
Graph power(const Graph& g, int k);

/// All vertices adjacent to some vertex of X (may intersect X).
VertexSet neighborhood(const Graph& g, std::span<const Vertex> x);

/// BFS distances from `source`; unreachable vertices get -1.
std::vector<int> bfs_distances(const Graph& g, Vertex source, int max_depth = std::numeric_limits<int>::max());

inline constexpr int kInfiniteGirth = std::numeric_limits<int>::max();

/// Length of a shortest cycle, or kInfiniteGirth for forests.
int girth(const Graph& g);

/// True iff g has a cycle of length <= bound.
bool has_cycle_at_most(const Graph& g, int bound);

/// A shortest cycle of length <= bound (vertex list in cycle order), if any.
/// Among shortest cycles the one found from the lowest BFS root is returned.
std::optional<std::vector<Vertex>> shortest_cycle(const Graph& g, int bound = kInfiniteGirth);

/// Number of edges with one end in X and the other in Y (X, Y disjoint).
std::int64_t edges_between(const Graph& g, std::span<const Vertex> x, std::span<const Vertex> y);

/// Number of edges with both ends in U.
std::int64_t edges_inside(const Graph& g, std::span<const Vertex> u);

bool is_connected(const Graph& g);

/// Consecutive vertices adjacent, all vertices distinct.
bool is_path(const Graph& g, std::span<const Vertex> path);

/// Commonly used small graphs.
namespace graphs {
Graph path(int n);
Graph cycle(int n);
Graph complete(int n);
Graph star(int leaves);
Graph complete_bipartite(int a, int b);
Graph petersen();
Graph empty(int n);
Graph disjoint_union(const Graph& a, const Graph& b);
}  // namespace graphs

/// Edge coloring aligned with a host graph's edge order: colors[i] is the
/// color of host.edges()[i], in 0..s-1.
struct Coloring {
  int s = 0;
  std::vector<int> colors;

  int color_of(const Graph& host, Vertex u, Vertex v) const;
  friend bool operator==(const Coloring&, const Coloring&) = default;
};

}  // namespace forge
