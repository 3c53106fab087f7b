#include "forge/graph.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <queue>
#include <string>

#include "forge/errors.hpp"

namespace forge {

namespace {

std::atomic<std::size_t> g_dense_cap{4096};

}  // namespace

std::size_t Graph::dense_cap() noexcept { return g_dense_cap.load(std::memory_order_relaxed); }
void Graph::set_dense_cap(std::size_t cap) noexcept { g_dense_cap.store(cap, std::memory_order_relaxed); }

Graph::Graph(int n) {
  if (n < 0) throw GraphError("negative vertex count");
  n_ = n;
  build({});
}

Graph Graph::from_edges(int n, std::span<const Edge> edges) {
  if (n < 0) throw GraphError("negative vertex count");
  std::vector<Edge> canon;
  canon.reserve(edges.size());
  for (const Edge& e : edges) {
    if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n) {
      throw GraphError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ") out of range");
    }
    if (e.u == e.v) throw GraphError("loop at vertex " + std::to_string(e.u));
    canon.push_back(make_edge(e.u, e.v));
  }
  std::sort(canon.begin(), canon.end());
  if (auto dup = std::adjacent_find(canon.begin(), canon.end()); dup != canon.end()) {
    throw GraphError("duplicate edge (" + std::to_string(dup->u) + "," + std::to_string(dup->v) + ")");
  }
  Graph g;
  g.n_ = n;
  g.build(std::move(canon));
  return g;
}

Graph Graph::from_unique_edges(int n, std::vector<Edge> edges) {
  std::sort(edges.begin(), edges.end());
  Graph g;
  g.n_ = n;
  g.build(std::move(edges));
  return g;
}

void Graph::build(std::vector<Edge> edges) {
  edges_ = std::move(edges);
  offsets_.assign(static_cast<std::size_t>(n_) + 1, 0);
  for (const Edge& e : edges_) {
    ++offsets_[e.u + 1];
    ++offsets_[e.v + 1];
  }
  for (int v = 0; v < n_; ++v) offsets_[v + 1] += offsets_[v];
  adj_.assign(offsets_[n_], 0);
  slot_edge_.assign(offsets_[n_], 0);
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  // Edges are sorted by (u, v); filling in edge order leaves every row sorted
  // because row w receives first its smaller neighbors (as v-side, in
  // increasing u) and then its larger ones (as u-side, in increasing v).
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    adj_[fill[e.v]] = e.u;
    slot_edge_[fill[e.v]++] = i;
  }
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    adj_[fill[e.u]] = e.v;
    slot_edge_[fill[e.u]++] = i;
  }
  dense_.clear();
  words_ = 0;
  if (n_ > 0 && static_cast<std::size_t>(n_) <= dense_cap()) {
    words_ = (static_cast<std::size_t>(n_) + 63) / 64;
    dense_.assign(words_ * static_cast<std::size_t>(n_), 0);
    for (const Edge& e : edges_) {
      dense_[static_cast<std::size_t>(e.u) * words_ + (e.v >> 6)] |= 1ULL << (e.v & 63);
      dense_[static_cast<std::size_t>(e.v) * words_ + (e.u >> 6)] |= 1ULL << (e.u & 63);
    }
  }
}

int Graph::max_degree() const noexcept {
  int best = 0;
  for (int v = 0; v < n_; ++v) best = std::max(best, degree(v));
  return best;
}

bool Graph::has_edge(Vertex u, Vertex v) const noexcept {
  if (u < 0 || v < 0 || u >= n_ || v >= n_ || u == v) return false;
  if (!dense_.empty()) {
    return (dense_[static_cast<std::size_t>(u) * words_ + (v >> 6)] >> (v & 63)) & 1ULL;
  }
  auto row = neighbors(u);
  return std::binary_search(row.begin(), row.end(), v);
}

std::optional<std::size_t> Graph::edge_index(Vertex u, Vertex v) const noexcept {
  if (u < 0 || v < 0 || u >= n_ || v >= n_ || u == v) return std::nullopt;
  auto row = neighbors(u);
  auto it = std::lower_bound(row.begin(), row.end(), v);
  if (it == row.end() || *it != v) return std::nullopt;
  return slot_edge_[offsets_[u] + static_cast<std::size_t>(it - row.begin())];
}

InducedSubgraph induced_subgraph(const Graph& g, std::span<const Vertex> keep) {
  std::vector<Vertex> relabel(static_cast<std::size_t>(g.order()), -1);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (keep[i] < 0 || keep[i] >= g.order() || relabel[keep[i]] != -1) {
      throw GraphError("induced_subgraph: invalid or repeated vertex");
    }
    relabel[keep[i]] = static_cast<Vertex>(i);
  }
  std::vector<Edge> edges;
  for (const Edge& e : g.edges()) {
    if (relabel[e.u] >= 0 && relabel[e.v] >= 0) edges.push_back(make_edge(relabel[e.u], relabel[e.v]));
  }
  return {Graph::from_unique_edges(static_cast<int>(keep.size()), std::move(edges)),
          std::vector<Vertex>(keep.begin(), keep.end())};
}

std::vector<int> bfs_distances(const Graph& g, Vertex source, int max_depth) {
  std::vector<int> dist(static_cast<std::size_t>(g.order()), -1);
  std::vector<Vertex> queue{source};
  dist[source] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    Vertex u = queue[head];
    if (dist[u] >= max_depth) continue;
    for (Vertex w : g.neighbors(u)) {
      if (dist[w] < 0) {
        dist[w] = dist[u] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

Graph power(const Graph& g, int k) {
  if (k < 1) throw PreconditionError("power: k must be >= 1");
  if (k == 1) return g;
  std::vector<Edge> edges;
  std::vector<int> dist(static_cast<std::size_t>(g.order()), -1);
  std::vector<Vertex> queue;
  for (Vertex s = 0; s < g.order(); ++s) {
    queue.assign(1, s);
    dist[s] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      Vertex u = queue[head];
      if (dist[u] == k) continue;
      for (Vertex w : g.neighbors(u)) {
        if (dist[w] < 0) {
          dist[w] = dist[u] + 1;
          queue.push_back(w);
        }
      }
    }
    for (Vertex w : queue) {
      if (w > s) edges.push_back({s, w});
      dist[w] = -1;
    }
  }
  return Graph::from_unique_edges(g.order(), std::move(edges));
}

VertexSet neighborhood(const Graph& g, std::span<const Vertex> x) {
  std::vector<char> mark(static_cast<std::size_t>(g.order()), 0);
  for (Vertex v : x) {
    for (Vertex w : g.neighbors(v)) mark[w] = 1;
  }
  VertexSet out;
  for (Vertex v = 0; v < g.order(); ++v) {
    if (mark[v]) out.push_back(v);
  }
  return out;
}

namespace {

// Shortest cycle through BFS from every root. Returns length and, when
// requested, the cycle itself. `bound` prunes the BFS depth.
int shortest_cycle_impl(const Graph& g, int bound, std::vector<Vertex>* cycle) {
  const int n = g.order();
  int best = kInfiniteGirth;
  std::vector<int> dist(static_cast<std::size_t>(n), -1);
  std::vector<Vertex> parent(static_cast<std::size_t>(n), -1);
  std::vector<Vertex> queue;
  for (Vertex s = 0; s < n; ++s) {
    int limit = std::min(best - 1, bound);
    if (limit < 3) break;
    queue.assign(1, s);
    dist[s] = 0;
    parent[s] = -1;
    int found = kInfiniteGirth;
    Vertex cu = -1, cw = -1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      Vertex u = queue[head];
      if (2 * dist[u] + 1 > limit || 2 * dist[u] + 1 >= found) break;
      for (Vertex w : g.neighbors(u)) {
        if (dist[w] < 0) {
          dist[w] = dist[u] + 1;
          parent[w] = u;
          queue.push_back(w);
        } else if (w != parent[u]) {
          int len = dist[u] + dist[w] + 1;
          if (len <= limit && len < found) {
            found = len;
            cu = u;
            cw = w;
          }
        }
      }
    }
    if (found < best) {
      best = found;
      if (cycle != nullptr) {
        std::vector<Vertex> left, right;
        for (Vertex v = cu; v != -1; v = parent[v]) left.push_back(v);
        for (Vertex v = cw; v != -1; v = parent[v]) right.push_back(v);
        // left: cu..s, right: cw..s; cycle = s..cu then cw..(child of s)
        cycle->assign(left.rbegin(), left.rend());
        for (std::size_t i = 0; i + 1 < right.size(); ++i) cycle->push_back(right[i]);
      }
    }
    for (Vertex v : queue) {
      dist[v] = -1;
      parent[v] = -1;
    }
  }
  return best;
}

}  // namespace

int girth(const Graph& g) { return shortest_cycle_impl(g, kInfiniteGirth, nullptr); }

bool has_cycle_at_most(const Graph& g, int bound) {
  return shortest_cycle_impl(g, bound, nullptr) <= bound;
}

std::optional<std::vector<Vertex>> shortest_cycle(const Graph& g, int bound) {
  std::vector<Vertex> cycle;
  int len = shortest_cycle_impl(g, bound, &cycle);
  if (len > bound) return std::nullopt;
  return cycle;
}

std::int64_t edges_between(const Graph& g, std::span<const Vertex> x, std::span<const Vertex> y) {
  std::vector<char> in_y(static_cast<std::size_t>(g.order()), 0);
  for (Vertex v : y) in_y[v] = 1;
  std::int64_t count = 0;
  for (Vertex u : x) {
    for (Vertex w : g.neighbors(u)) count += in_y[w];
  }
  return count;
}

std::int64_t edges_inside(const Graph& g, std::span<const Vertex> u) {
  std::vector<char> in_u(static_cast<std::size_t>(g.order()), 0);
  for (Vertex v : u) in_u[v] = 1;
  std::int64_t count = 0;
  for (Vertex v : u) {
    for (Vertex w : g.neighbors(v)) {
      if (w > v) count += in_u[w];
    }
  }
  return count;
}

bool is_connected(const Graph& g) {
  if (g.order() == 0) return true;
  auto dist = bfs_distances(g, 0);
  return std::none_of(dist.begin(), dist.end(), [](int d) { return d < 0; });
}

bool is_path(const Graph& g, std::span<const Vertex> path) {
  std::vector<char> seen(static_cast<std::size_t>(g.order()), 0);
  for (std::size_t i = 0; i < path.size(); ++i) {
    Vertex v = path[i];
    if (v < 0 || v >= g.order() || seen[v]) return false;
    seen[v] = 1;
    if (i > 0 && !g.has_edge(path[i - 1], v)) return false;
  }
  return true;
}

int Coloring::color_of(const Graph& host, Vertex u, Vertex v) const {
  auto idx = host.edge_index(u, v);
  if (!idx) throw PreconditionError("color_of: not an edge of the host");
  return colors[*idx];
}

namespace graphs {

Graph path(int n) {
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
  return Graph::from_unique_edges(n, std::move(edges));
}

Graph cycle(int n) {
  if (n < 3) throw GraphError("cycle needs at least 3 vertices");
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
  edges.push_back({0, n - 1});
  return Graph::from_unique_edges(n, std::move(edges));
}

Graph complete(int n) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) edges.push_back({i, j});
  }
  return Graph::from_unique_edges(n, std::move(edges));
}

Graph star(int leaves) {
  std::vector<Edge> edges;
  for (int i = 1; i <= leaves; ++i) edges.push_back({0, i});
  return Graph::from_unique_edges(leaves + 1, std::move(edges));
}

Graph complete_bipartite(int a, int b) {
  std::vector<Edge> edges;
  for (int i = 0; i < a; ++i) {
    for (int j = 0; j < b; ++j) edges.push_back({i, a + j});
  }
  return Graph::from_unique_edges(a + b, std::move(edges));
}

Graph petersen() {
  std::vector<Edge> edges;
  for (int i = 0; i < 5; ++i) {
    edges.push_back(make_edge(i, (i + 1) % 5));
    edges.push_back(make_edge(i, i + 5));
    edges.push_back(make_edge(5 + i, 5 + (i + 2) % 5));
  }
  return Graph::from_edges(10, edges);
}

Graph empty(int n) { return Graph(n); }

Graph disjoint_union(const Graph& a, const Graph& b) {
  std::vector<Edge> edges(a.edges().begin(), a.edges().end());
  for (const Edge& e : b.edges()) edges.push_back({e.u + a.order(), e.v + a.order()});
  return Graph::from_unique_edges(a.order() + b.order(), std::move(edges));
}

}  // namespace graphs

}  // namespace forge
