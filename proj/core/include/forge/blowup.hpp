#pragma once

#include <cstdint>
#include <vector>

#include "forge/graph.hpp"

namespace forge {

/// How a blow-up picks the arbitrary structure the construction leaves open:
/// the removed perfect matching (sheared blow-ups) or the K_{r,r} sides
/// ((l,r)-blow-ups).
struct Placement {
  enum class Kind { kIndexAligned, kSeeded };
  Kind kind = Kind::kIndexAligned;
  std::uint64_t seed = 0;

  static Placement index_aligned() { return {}; }
  static Placement seeded(std::uint64_t seed) { return {Kind::kSeeded, seed}; }
};

/// Correspondence between a base graph and one of its blow-ups.
///
/// Vertex `slot` of the clique of base vertex v is blow-up vertex
/// v * clique_size + slot. For every base edge (in base edge order) `links`
/// records the slots involved between the two cliques: for sheared blow-ups
/// `matching[i]` is the slot of C(v) matched (and hence non-adjacent) to
/// slot i of C(u); for (l,r)-blow-ups `side_u`/`side_v` are the r slots
/// spanning the K_{r,r}.
struct BlowUpMap {
  struct Link {
    Edge base;
    std::vector<int> matching;
    std::vector<int> side_u;
    std::vector<int> side_v;
  };

  int clique_size = 0;
  std::vector<std::vector<Vertex>> clique_of;
  std::vector<Link> links;

  Vertex vertex(Vertex base, int slot) const noexcept { return base * clique_size + slot; }
  Vertex owner(Vertex blown) const noexcept { return blown / clique_size; }
  int slot(Vertex blown) const noexcept { return blown % clique_size; }
};

struct BlowUp {
  Graph graph;
  BlowUpMap map;
};

/// H{l}: l-cliques, complete bipartite minus a perfect matching across each
/// base edge. Default matching pairs equal slots.
BlowUp sheared_blowup(const Graph& base, int ell, Placement matching = {});

/// H(l): l-cliques, complete bipartite across each base edge.
BlowUp complete_blowup(const Graph& base, int ell);

/// (l,r)-blow-up: l-cliques plus one K_{r,r} per base edge. Default sides are
/// the lowest r slots of each clique. Requires l >= r >= 1.
BlowUp lr_blowup(const Graph& base, int ell, int r, Placement placement = {});

}  // namespace forge
