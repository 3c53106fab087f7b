#include "forge/embed.hpp"

#include <algorithm>

#include "forge/errors.hpp"

namespace forge {

nlohmann::json to_json(const Embedding& e) { return {{"map", e.map}}; }

Embedding embedding_from_json(const nlohmann::json& j) { return Embedding{j.at("map").get<std::vector<Vertex>>()}; }

bool verify_embedding(const Graph& pattern, const Graph& host, const Embedding& m) {
  if (static_cast<int>(m.map.size()) != pattern.order()) return false;
  std::vector<char> used(static_cast<std::size_t>(host.order()), 0);
  for (Vertex w : m.map) {
    if (w < 0 || w >= host.order() || used[w]) return false;
    used[w] = 1;
  }
  for (const Edge& e : pattern.edges()) {
    if (!host.has_edge(m.map[e.u], m.map[e.v])) return false;
  }
  return true;
}

namespace {

class TreeSearch {
 public:
  TreeSearch(const RootedTree& tree, const Graph& host, std::int64_t budget)
      : tree_(tree), host_(host), budget_(budget),
        image_(static_cast<std::size_t>(tree.order()), -1),
        owner_(static_cast<std::size_t>(host.order()), -1),
        pending_(static_cast<std::size_t>(tree.order()), 0) {
    for (Vertex v = 0; v < tree.order(); ++v) pending_[v] = static_cast<int>(tree.children(v).size());
  }

  TreeEmbedResult run() {
    TreeEmbedResult out;
    const bool ok = place(0);
    out.nodes = nodes_;
    if (ok) {
      out.embedding = Embedding{image_};
    } else {
      out.exhausted = out_of_budget_;
    }
    return out;
  }

 private:
  int free_neighbors(Vertex w) const {
    int c = 0;
    for (Vertex x : host_.neighbors(w)) c += owner_[x] < 0;
    return c;
  }

  std::vector<Vertex> candidates(Vertex v) const {
    const int need = static_cast<int>(tree_.children(v).size());
    std::vector<std::pair<int, Vertex>> c;
    if (v == tree_.root()) {
      for (Vertex w = 0; w < host_.order(); ++w) {
        if (host_.degree(w) >= need) c.emplace_back(host_.degree(w), w);
      }
    } else {
      for (Vertex w : host_.neighbors(image_[tree_.parent(v)])) {
        if (owner_[w] >= 0) continue;
        // w itself is about to be used, so it does not count against others.
        const int r = free_neighbors(w);
        if (r >= need) c.emplace_back(r, w);
      }
    }
    std::sort(c.begin(), c.end());
    std::vector<Vertex> out;
    out.reserve(c.size());
    for (const auto& [r, w] : c) out.push_back(w);
    return out;
  }

  // Every placed vertex must keep enough unused host neighbours for its
  // unplaced children. Only images adjacent to w can have lost one.
  bool room_left(Vertex w) const {
    for (Vertex x : host_.neighbors(w)) {
      const Vertex u = owner_[x];
      if (u >= 0 && pending_[u] > 0 && free_neighbors(x) < pending_[u]) return false;
    }
    return true;
  }

  bool place(std::size_t i) {
    const auto& order = tree_.bfs_order();
    if (i == order.size()) return true;
    const Vertex v = order[i];
    for (Vertex w : candidates(v)) {
      if (budget_ >= 0 && nodes_ >= budget_) {
        out_of_budget_ = true;
        return false;
      }
      ++nodes_;
      image_[v] = w;
      owner_[w] = v;
      if (v != tree_.root()) --pending_[tree_.parent(v)];
      if (room_left(w) && place(i + 1)) return true;
      if (v != tree_.root()) ++pending_[tree_.parent(v)];
      owner_[w] = -1;
      image_[v] = -1;
      if (out_of_budget_) return false;
    }
    return false;
  }

  const RootedTree& tree_;
  const Graph& host_;
  std::int64_t budget_;
  std::int64_t nodes_ = 0;
  bool out_of_budget_ = false;
  std::vector<Vertex> image_;
  std::vector<Vertex> owner_;
  std::vector<int> pending_;
};

}  // namespace

TreeEmbedResult embed_tree(const RootedTree& tree, const Graph& host, std::int64_t budget) {
  if (tree.order() > host.order()) {
    throw PreconditionError("embed_tree: pattern has " + std::to_string(tree.order()) + " vertices, host only " +
                            std::to_string(host.order()));
  }
  if (tree.order() == 0) return {Embedding{}, false, 0};
  return TreeSearch(tree, host, budget).run();
}

}  // namespace forge
