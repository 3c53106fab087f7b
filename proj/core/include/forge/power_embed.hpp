#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "forge/blowup.hpp"
#include "forge/embed.hpp"
#include "forge/tree.hpp"

namespace forge {

/// D^i(v): descendants of v within distance i, v included. Sorted.
VertexSet descendants_within(const RootedTree& t, Vertex v, int i);

/// The auxiliary tree T' of a rooted tree T for power k.
///
/// T' has a special root x* (aux id 0) plus one vertex per T vertex whose
/// depth is a multiple of 2k (aux ids 1.. in T's BFS order, so aux id 1 is
/// the root x_0 of T). A vertex's T' parent is its ancestor at distance 2k,
/// or x* for x_0. For every aux vertex x != x*, dplus[x] = D^{k-1}(x) and
/// dminus[x] = D^{2k-1}(x) minus D^{k-1}(x); together these partition V(T).
struct AuxTree {
  RootedTree base;
  int k = 1;
  RootedTree aux;
  std::vector<Vertex> vertex_map;  // aux id -> T vertex, -1 for x*
  std::vector<Vertex> aux_of;      // T vertex -> aux id, -1 if not in T'
  std::vector<VertexSet> dplus;
  std::vector<VertexSet> dminus;
  std::vector<Vertex> block_of;  // T vertex -> aux id x with v in D^{2k-1}(x)

  /// max(2, Delta(T)): the lift room bound Delta^{4k} is stated for Delta >= 2.
  int delta() const noexcept;
};

AuxTree auxiliary_tree(const RootedTree& t, int k);

/// T vertex ids for the T' vertices and edges; x* is written as -1.
nlohmann::json to_json(const AuxTree& a);

/// Structural invariants: size and degree bounds, the 2k-ancestor edge
/// rule, and the partition of V(T) by the D^{2k-1} blocks. Returns the
/// violated ones (empty when all hold).
std::vector<std::string> aux_tree_violations(const AuxTree& a);

/// Delta^{4k}, saturating at INT64_MAX.
std::int64_t power_embed_r0(int delta, int k);

struct LiftOptions {
  /// Run below the required clique or biclique size, checking room at
  /// runtime and recording a warning instead of rejecting the input.
  bool desk = false;
};

struct LiftResult {
  Embedding phi;
  std::vector<std::string> warnings;
};

/// Lift an embedding of T' into J to an embedding of T^k into an
/// (l,r)-blow-up J' of J.
///
/// `map.clique_of[v]` lists the clique K(v) of J vertex v as host vertices
/// (it may be empty for vertices the lift never uses); `map.links` follow
/// j.edges() order and give the K_{r,r} sides as positions in those lists.
/// D+(x) goes to the x+-side and D-(x) to the x-side of K(x,x+), each at
/// the lowest free position. Throws CapacityError naming the clique if room
/// runs out (possible only below r >= Delta^{4k}), and StageFailure if the
/// result does not verify against power(T, k).
LiftResult embed_power_via_blowup(const AuxTree& a, const Graph& j, const Embedding& et_prime, const Graph& host,
                                  const BlowUpMap& map, const LiftOptions& options = {});

/// Lift an embedding of T into G to an embedding of T^k into the sheared
/// blow-up B = G^k{l}: T's vertices in BFS order each take the lowest slot
/// of C(eT(v)) adjacent to every earlier placed T^k-neighbour. Requires
/// l >= Delta^k + 1 unless desk.
LiftResult greedy_power_embed_base(const RootedTree& t, int k, const Graph& g, const Embedding& et, const BlowUp& b,
                                   const LiftOptions& options = {});

}  // namespace forge
