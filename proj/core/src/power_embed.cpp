#include "forge/power_embed.hpp"

#include <algorithm>
#include <limits>

#include "forge/errors.hpp"

namespace forge {

VertexSet descendants_within(const RootedTree& t, Vertex v, int i) {
  if (v < 0 || v >= t.order()) throw PreconditionError("descendants_within: vertex out of range");
  if (i < 0) throw PreconditionError("descendants_within: i must be >= 0");
  VertexSet out{v};
  std::vector<Vertex> frontier{v};
  for (int d = 0; d < i && !frontier.empty(); ++d) {
    std::vector<Vertex> next;
    for (Vertex u : frontier)
      for (Vertex c : t.children(u)) next.push_back(c);
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  std::sort(out.begin(), out.end());
  return out;
}

int AuxTree::delta() const noexcept { return std::max(2, base.max_degree()); }

AuxTree auxiliary_tree(const RootedTree& t, int k) {
  if (k < 1) throw PreconditionError("auxiliary_tree: k must be >= 1");
  if (t.order() == 0) throw PreconditionError("auxiliary_tree: empty tree");
  AuxTree a;
  a.base = t;
  a.k = k;
  a.aux_of.assign(static_cast<std::size_t>(t.order()), -1);
  a.vertex_map.push_back(-1);
  for (Vertex v : t.bfs_order()) {
    if (t.depth(v) % (2 * k) == 0) {
      a.aux_of[v] = static_cast<Vertex>(a.vertex_map.size());
      a.vertex_map.push_back(v);
    }
  }
  const auto m = a.vertex_map.size();
  std::vector<Vertex> parent(m, 0);
  a.dplus.resize(m);
  a.dminus.resize(m);
  a.block_of.assign(static_cast<std::size_t>(t.order()), -1);
  for (std::size_t x = 1; x < m; ++x) {
    const Vertex v = a.vertex_map[x];
    if (v != t.root()) {
      Vertex up = v;
      for (int s = 0; s < 2 * k; ++s) up = t.parent(up);
      parent[x] = a.aux_of[up];
    }
    a.dplus[x] = descendants_within(t, v, k - 1);
    VertexSet all = descendants_within(t, v, 2 * k - 1);
    std::set_difference(all.begin(), all.end(), a.dplus[x].begin(), a.dplus[x].end(), std::back_inserter(a.dminus[x]));
    for (Vertex u : all) a.block_of[u] = static_cast<Vertex>(x);
  }
  a.aux = RootedTree::from_parents(std::move(parent));
  return a;
}

nlohmann::json to_json(const AuxTree& a) {
  nlohmann::json j;
  j["k"] = a.k;
  j["root"] = a.base.root();
  j["vertices"] = a.vertex_map;
  nlohmann::json edges = nlohmann::json::array();
  nlohmann::json dplus = nlohmann::json::object(), dminus = nlohmann::json::object();
  for (std::size_t x = 1; x < a.vertex_map.size(); ++x) {
    edges.push_back({a.vertex_map[a.aux.parent(static_cast<Vertex>(x))], a.vertex_map[x]});
    const std::string key = std::to_string(a.vertex_map[x]);
    dplus[key] = a.dplus[x];
    dminus[key] = a.dminus[x];
  }
  j["edges"] = std::move(edges);
  j["dplus"] = std::move(dplus);
  j["dminus"] = std::move(dminus);
  return j;
}

std::vector<std::string> aux_tree_violations(const AuxTree& a) {
  std::vector<std::string> out;
  const RootedTree& t = a.base;
  const int n = t.order();
  const int m = a.aux.order();
  if (m > n + 1) out.push_back("|V(T')| > n+1");
  std::int64_t bound = 1;
  for (int i = 0; i < 2 * a.k; ++i) bound = std::min<std::int64_t>(bound * a.delta(), std::int64_t{1} << 40);
  if (a.aux.max_degree() > bound) out.push_back("max degree of T' exceeds Delta^{2k}");
  for (Vertex x = 1; x < m; ++x) {
    const Vertex v = a.vertex_map[x];
    if (t.depth(v) % (2 * a.k) != 0) out.push_back("T' vertex " + std::to_string(v) + " has depth not divisible by 2k");
    const Vertex px = a.aux.parent(x);
    if (px == 0) {
      if (v != t.root()) out.push_back("only x_0 may hang from x*");
      continue;
    }
    const Vertex pv = a.vertex_map[px];
    VertexSet reach = descendants_within(t, pv, 2 * a.k);
    if (!std::binary_search(reach.begin(), reach.end(), v)) {
      out.push_back("T' edge " + std::to_string(pv) + "-" + std::to_string(v) + " breaks the D^{2k} rule");
    }
  }
  if (a.aux.parent(0) != 0 || (m > 1 && a.aux.parent(1) != 0)) out.push_back("x* must be the root with child x_0");
  std::vector<int> hits(static_cast<std::size_t>(n), 0);
  for (Vertex x = 1; x < m; ++x) {
    for (Vertex u : a.dplus[x]) ++hits[u];
    for (Vertex u : a.dminus[x]) ++hits[u];
  }
  for (Vertex u = 0; u < n; ++u) {
    if (hits[u] != 1) {
      out.push_back("vertex " + std::to_string(u) + " lies in " + std::to_string(hits[u]) + " D^{2k-1} blocks");
      break;
    }
  }
  return out;
}

std::int64_t power_embed_r0(int delta, int k) {
  std::int64_t r = 1;
  for (int i = 0; i < 4 * k; ++i) {
    if (r > std::numeric_limits<std::int64_t>::max() / std::max(delta, 1)) return std::numeric_limits<std::int64_t>::max();
    r *= std::max(delta, 1);
  }
  return r;
}

namespace {

void verify_power(const RootedTree& t, int k, const Graph& host, const Embedding& phi, const char* stage) {
  if (!verify_embedding(power(t.as_graph(), k), host, phi)) {
    throw StageFailure(stage, "lifted map is not an embedding of T^k");
  }
}

}  // namespace

LiftResult embed_power_via_blowup(const AuxTree& a, const Graph& j, const Embedding& et_prime, const Graph& host,
                                  const BlowUpMap& map, const LiftOptions& options) {
  LiftResult out;
  if (!verify_embedding(a.aux.as_graph(), j, et_prime)) {
    throw PreconditionError("power-embed: supplied map is not an embedding of T' into J");
  }
  if (map.links.size() != j.size() || static_cast<int>(map.clique_of.size()) != j.order()) {
    throw PreconditionError("power-embed: blow-up map does not match J");
  }
  const std::int64_t r0 = power_embed_r0(a.delta(), a.k);
  std::vector<char> used(static_cast<std::size_t>(host.order()), 0);
  out.phi.map.assign(static_cast<std::size_t>(a.base.order()), -1);

  // Room check first, so that a shortfall is reported before any placement.
  for (Vertex x = 1; x < a.aux.order(); ++x) {
    const Vertex jx = et_prime.map[x];
    const Vertex jy = et_prime.map[a.aux.parent(x)];
    const auto& link = map.links[*j.edge_index(jx, jy)];
    const std::int64_t r = static_cast<std::int64_t>(std::min(link.side_u.size(), link.side_v.size()));
    if (r < r0) {
      const std::string what = "K_{r,r} between the cliques of J vertices " + std::to_string(jx) + " and " +
                               std::to_string(jy) + " has r = " + std::to_string(r) +
                               " < Delta^{4k} = " + std::to_string(r0);
      if (!options.desk) throw PreconditionError("power-embed: " + what);
      out.warnings.push_back(what);
      break;
    }
  }

  auto take = [&](Vertex jv, std::vector<int> slots, Vertex t_vertex) {
    std::sort(slots.begin(), slots.end());
    const auto& clique = map.clique_of[jv];
    for (int s : slots) {
      const Vertex w = clique.at(static_cast<std::size_t>(s));
      if (!used[w]) {
        used[w] = 1;
        out.phi.map[t_vertex] = w;
        return;
      }
    }
    throw CapacityError("power-embed: clique K(" + std::to_string(jv) + ") has no free vertex on its K_{r,r} side for T vertex " +
                        std::to_string(t_vertex) + " (side size " + std::to_string(slots.size()) + ")");
  };

  for (Vertex x : a.aux.bfs_order()) {
    if (x == 0) continue;
    const Vertex jx = et_prime.map[x];
    const Vertex jy = et_prime.map[a.aux.parent(x)];
    const auto& link = map.links[*j.edge_index(jx, jy)];
    const bool x_is_u = link.base.u == jx;
    const auto& side_x = x_is_u ? link.side_u : link.side_v;
    const auto& side_y = x_is_u ? link.side_v : link.side_u;
    for (Vertex u : a.dplus[x]) take(jy, side_y, u);
    for (Vertex u : a.dminus[x]) take(jx, side_x, u);
  }
  verify_power(a.base, a.k, host, out.phi, "power-embed");
  return out;
}

LiftResult greedy_power_embed_base(const RootedTree& t, int k, const Graph& g, const Embedding& et, const BlowUp& b,
                                   const LiftOptions& options) {
  LiftResult out;
  if (!verify_embedding(t.as_graph(), g, et)) throw PreconditionError("base lift: supplied map is not an embedding of T into G");
  const int ell = b.map.clique_size;
  std::int64_t need = 1;
  for (int i = 0; i < k; ++i) need = std::min<std::int64_t>(need * t.max_degree(), std::int64_t{1} << 40);
  if (ell < need + 1) {
    const std::string what = "l = " + std::to_string(ell) + " < Delta^k + 1 = " + std::to_string(need + 1);
    if (!options.desk) throw PreconditionError("base lift: " + what);
    out.warnings.push_back(what);
  }
  const Graph tk = power(t.as_graph(), k);
  out.phi.map.assign(static_cast<std::size_t>(t.order()), -1);
  for (Vertex v : t.bfs_order()) {
    const auto& clique = b.map.clique_of.at(static_cast<std::size_t>(et.map[v]));
    Vertex pick = -1;
    for (Vertex w : clique) {
      bool ok = true;
      for (Vertex u : tk.neighbors(v)) {
        const Vertex wu = out.phi.map[u];
        if (wu >= 0 && !b.graph.has_edge(w, wu)) {
          ok = false;
          break;
        }
      }
      if (ok) {
        pick = w;
        break;
      }
    }
    if (pick < 0) {
      throw CapacityError("base lift: no vertex of C(" + std::to_string(et.map[v]) + ") is adjacent to all placed neighbours of " +
                          std::to_string(v));
    }
    out.phi.map[v] = pick;
  }
  verify_power(t, k, b.graph, out.phi, "base lift");
  return out;
}

}  // namespace forge
