#pragma once

#include <cstdint>
#include <optional>

#include <nlohmann/json.hpp>

#include "forge/graph.hpp"
#include "forge/tree.hpp"

namespace forge {

/// Injective map from pattern vertices to host vertices.
struct Embedding {
  std::vector<Vertex> map;
  friend bool operator==(const Embedding&, const Embedding&) = default;
};

nlohmann::json to_json(const Embedding& e);
Embedding embedding_from_json(const nlohmann::json& j);

/// True iff `m` is total on the pattern, injective, in range, and maps
/// every pattern edge onto a host edge.
bool verify_embedding(const Graph& pattern, const Graph& host, const Embedding& m);

inline constexpr std::int64_t kUnboundedBudget = -1;

struct TreeEmbedResult {
  std::optional<Embedding> embedding;
  /// True when the node budget ran out before the search finished. A
  /// finished search without an embedding means none exists.
  bool exhausted = false;
  std::int64_t nodes = 0;
  bool found() const noexcept { return embedding.has_value(); }
};

/// Complete backtracking search for a copy of `tree` in `host`. Tree
/// vertices are placed in BFS order; candidates are ordered by ascending
/// number of unused host neighbours, then id. `budget` counts placements
/// tried (kUnboundedBudget for none). Throws PreconditionError if the tree
/// has more vertices than the host.
TreeEmbedResult embed_tree(const RootedTree& tree, const Graph& host, std::int64_t budget = kUnboundedBudget);

}  // namespace forge
