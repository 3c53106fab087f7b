#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "forge/errors.hpp"
#include "forge/graph.hpp"
#include "forge/pseudorandom.hpp"

namespace forge {

/// G(n, p): each pair u < v, in lexicographic order, is an edge iff the next
/// uniform draw is below p.
Graph sample_gnp(int n, double p, std::uint64_t seed);

/// Result of deleting vertices from a graph. `graph` is relabeled; `kept[i]`
/// is the source id of new vertex i; `removed` lists source ids in deletion
/// order.
struct Pruned {
  Graph graph;
  std::vector<Vertex> kept;
  std::vector<Vertex> removed;
};

/// Repeatedly delete the lowest-indexed vertex of a shortest cycle of length
/// at most `bound` until none is left.
Pruned strip_short_cycles(const Graph& g, int bound);

/// Delete highest-degree vertices (ties: lowest index) until target_n remain.
Pruned trim_to_degree(const Graph& g, int target_n);

/// 2 * exp(-eps^2 * mu / 3). Requires 0 < eps <= 3/2 and mu >= 0.
double chernoff_bound(double eps, double mu);

/// First moment of the number of cycles of length 3..bound in G(m, p).
double expected_short_cycles(int m, double p, int bound);

struct AttemptTrace {
  std::uint64_t seed = 0;
  std::int64_t edges_sampled = 0;
  int short_cycles_found = 0;
  int removed_for_cycles = 0;
  int survivors = 0;
  int trimmed_for_degree = 0;
  int max_degree = 0;
  bool structural_pass = false;
  std::string jumbled_verdict = "skipped";
  bool accepted = false;
  std::string note;
};

struct GenTrace {
  std::uint64_t seed = 0;
  PnParams params;
  int attempts = 0;
  double expected_short_cycles = 0;
  double edge_count_tail = 0;  // Chernoff bound on |e - E[e]| > E[e]/2
  std::vector<std::string> warnings;
  std::vector<AttemptTrace> per_attempt;
};

nlohmann::json to_json(const GenTrace& trace);

struct GenOptions {
  int delta = 2;  // used only for the goodness precondition
  int k = 1;
  bool desk = false;  // allow violating the asymptotic hypotheses, logging a warning
  int max_retries = 32;
  /// Mode for condition (iv). Its verdict is logged; with
  /// `require_jumbled` a failure also triggers a retry.
  CheckMode jumbled = CheckMode::sampled();
  bool require_jumbled = false;
};

class GenerationError : public StageFailure {
 public:
  GenerationError(const std::string& what, GenTrace trace)
      : StageFailure("generate", what), trace_(std::move(trace)) {}
  const GenTrace& trace() const noexcept { return trace_; }

 private:
  GenTrace trace_;
};

struct Generated {
  Graph graph;
  GenTrace trace;
};

/// Sample G(3N, c/N), strip cycles of length <= 2l, require N survivors,
/// trim to N by degree, certify. Each attempt uses a seed derived from
/// (seed, attempt index).
Generated generate_pn(const PnParams& params, std::uint64_t seed, const GenOptions& options = {});

}  // namespace forge
