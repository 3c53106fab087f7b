#include "forge/blowup.hpp"

#include <algorithm>
#include <numeric>

#include "forge/errors.hpp"
#include "forge/rng.hpp"

namespace forge {

namespace {

BlowUpMap make_cliques(const Graph& base, int ell, std::vector<Edge>& edges) {
  BlowUpMap map;
  map.clique_size = ell;
  map.clique_of.resize(static_cast<std::size_t>(base.order()));
  for (Vertex v = 0; v < base.order(); ++v) {
    auto& clique = map.clique_of[v];
    for (int i = 0; i < ell; ++i) clique.push_back(v * ell + i);
    for (int i = 0; i < ell; ++i) {
      for (int j = i + 1; j < ell; ++j) edges.push_back({clique[i], clique[j]});
    }
  }
  return map;
}

std::vector<int> identity(int n) {
  std::vector<int> out(static_cast<std::size_t>(n));
  std::iota(out.begin(), out.end(), 0);
  return out;
}

}  // namespace

BlowUp sheared_blowup(const Graph& base, int ell, Placement matching) {
  if (ell < 1) throw PreconditionError("sheared_blowup: l must be >= 1");
  std::vector<Edge> edges;
  BlowUpMap map = make_cliques(base, ell, edges);
  Rng rng(matching.seed);
  for (const Edge& e : base.edges()) {
    BlowUpMap::Link link{e, identity(ell), {}, {}};
    if (matching.kind == Placement::Kind::kSeeded) rng.shuffle(std::span<int>(link.matching));
    for (int i = 0; i < ell; ++i) {
      for (int j = 0; j < ell; ++j) {
        if (link.matching[i] != j) edges.push_back(make_edge(map.vertex(e.u, i), map.vertex(e.v, j)));
      }
    }
    map.links.push_back(std::move(link));
  }
  return {Graph::from_unique_edges(base.order() * ell, std::move(edges)), std::move(map)};
}

BlowUp complete_blowup(const Graph& base, int ell) {
  if (ell < 1) throw PreconditionError("complete_blowup: l must be >= 1");
  return lr_blowup(base, ell, ell);
}

BlowUp lr_blowup(const Graph& base, int ell, int r, Placement placement) {
  if (r < 1) throw PreconditionError("lr_blowup: r must be >= 1");
  if (ell < r) throw PreconditionError("lr_blowup: l must be >= r");
  std::vector<Edge> edges;
  BlowUpMap map = make_cliques(base, ell, edges);
  Rng rng(placement.seed);
  auto pick_side = [&] {
    std::vector<int> slots = identity(ell);
    if (placement.kind == Placement::Kind::kSeeded) rng.shuffle(std::span<int>(slots));
    slots.resize(static_cast<std::size_t>(r));
    std::sort(slots.begin(), slots.end());
    return slots;
  };
  for (const Edge& e : base.edges()) {
    BlowUpMap::Link link{e, {}, pick_side(), pick_side()};
    for (int i : link.side_u) {
      for (int j : link.side_v) edges.push_back(make_edge(map.vertex(e.u, i), map.vertex(e.v, j)));
    }
    map.links.push_back(std::move(link));
  }
  return {Graph::from_unique_edges(base.order() * ell, std::move(edges)), std::move(map)};
}

}  // namespace forge
