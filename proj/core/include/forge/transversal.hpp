#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "forge/embed.hpp"
#include "forge/graph.hpp"
#include "forge/rational.hpp"

namespace forge {

using Path = std::vector<Vertex>;

/// Classes V_1..V_l for a path whose i-th vertex (1-based) lies in V_j with
/// j = i mod l (V_l when l divides i).
struct TransversalSpec {
  std::vector<VertexSet> classes;
  Rational gamma{1, 2};
  std::int64_t target_length = 0;

  int ell() const noexcept { return static_cast<int>(classes.size()); }
  /// d_0 = 2 + 4 / (gamma (l + 1)).
  Rational d0() const;
};

struct TransversalResult {
  std::optional<Path> path;
  bool exhausted = false;
  std::int64_t nodes = 0;
  bool found() const noexcept { return path.has_value(); }
};

/// Depth-first search with backtracking for a path of the target length
/// following the class pattern. Candidates for the next vertex are ordered
/// by ascending number of unused neighbours in the class after theirs, then
/// id. Throws PreconditionError on empty or overlapping classes.
TransversalResult find_transversal_path(const Graph& g, const TransversalSpec& spec,
                                        std::int64_t budget = kUnboundedBudget);

/// True iff `path` is a path in g and follows the class pattern.
bool is_transversal(const Graph& g, const TransversalSpec& spec, const Path& path);

struct SegmentedPath {
  Path path;
  int ell = 1;
  std::vector<Path> segments;
};

/// Consecutive blocks of l vertices. Throws PreconditionError unless l >= 1
/// divides |P|.
SegmentedPath split_path(const Path& p, int ell);

/// H' on segment indices: Q_i Q_j is an edge iff g has an edge between them.
Graph quotient_graph(const Graph& g, const SegmentedPath& s);

nlohmann::json to_json(const SegmentedPath& s);

}  // namespace forge
