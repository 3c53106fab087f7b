#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "forge/errors.hpp"
#include "forge/graph.hpp"
#include "forge/pseudorandom.hpp"
#include "forge/rational.hpp"

namespace forge {

/// kAuto tries the min-degree certificate, then exact enumeration if the
/// subset count fits `budget`, then the greedy heuristic. kExact throws
/// CapacityError above the budget.
struct ExpansionMode {
  enum class Kind { kAuto, kExact, kHeuristic };
  Kind kind = Kind::kAuto;
  std::int64_t budget = 20'000'000;  // subsets enumerated
  int size_cap = 18;                 // largest |X| for exact violating-set search

  static ExpansionMode exact(std::int64_t budget = 20'000'000) { return {Kind::kExact, budget, 18}; }
  static ExpansionMode heuristic() { return {Kind::kHeuristic, 0, 18}; }
};

/// Number of subsets of an m-set with 1..s elements, saturating at `limit`+1.
std::int64_t subset_count(std::int64_t m, std::int64_t s, std::int64_t limit);

/// (n,a,b)-expanding: |N(X)| >= b|X| for every X with 1 <= |X| <= a(n-1).
/// Verdicts: pass (exact or certificate), fail with witness, unknown
/// (heuristic found nothing).
CertReport is_expanding(const Graph& g, std::int64_t n, const Rational& a, const Rational& b,
                        const ExpansionMode& mode = {});

struct ViolatingSet {
  std::optional<VertexSet> set;
  bool exact = false;  // false: "none found" does not mean "none exists"
  /// Exact search only: whether some violating set has size <= expansion_cap.
  bool small_violation = false;
};

/// Largest X with 1 <= |X| <= size_cap and |N(X)| < D|X| (ties:
/// lexicographically least sorted vertex list). `expansion_cap` additionally
/// reports whether a violating set of size at most that exists.
ViolatingSet find_violating_set(const Graph& g, const Rational& d, std::int64_t size_cap,
                                const ExpansionMode& mode = {}, std::int64_t expansion_cap = 0);

struct DecompParams {
  Rational f{2};
  Rational d{1};
  int ell = 2;
  Rational eta{1};
  std::int64_t n = 1;

  /// A = (l-1)(D+1)(eta+f) + eta
  Rational big_a() const { return Rational(ell - 1) * (d + Rational(1)) * (eta + f) + eta; }
};

struct DecompResult {
  enum class Kind { kExpander, kSeparatedSets };
  Kind kind = Kind::kExpander;
  VertexSet z;
  std::vector<VertexSet> parts;
  int rounds = 0;
  bool heuristic = false;  // some violating-set search was not exhaustive
  CertReport certification;
  std::vector<std::string> transcript;
  std::vector<std::string> violations;  // desk-mode hypothesis failures

  bool certified() const noexcept { return certification.verdict == Verdict::kPass; }
};

nlohmann::json to_json(const DecompResult& result);
DecompResult decomp_result_from_json(const nlohmann::json& j);

/// Re-check a decomposition: Expander(Z) via is_expanding on G[Z],
/// SeparatedSets via sizes >= eta*n and no edges between parts.
CertReport certify_decomposition(const Graph& g, const DecompParams& params, const DecompResult& result,
                                 const ExpansionMode& mode = {});

struct DecompOptions {
  ExpansionMode mode;
  bool desk = false;  // record hypothesis failures instead of throwing
};

/// Either a non-empty Z with G[Z] (n,f,D)-expanding, or V_1..V_l with
/// |V_i| >= eta*n and no edges between them.
DecompResult decompose_alternatives(const Graph& g, const DecompParams& params, const DecompOptions& options = {});

/// The separated-sets outcome for bijumbled input: a pair of large disjoint
/// sets without edges, which refutes bijumbledness.
class ContradictionError : public StageFailure {
 public:
  ContradictionError(const std::string& what, Witness witness)
      : StageFailure("expansion", what), witness_(std::move(witness)) {}
  const Witness& witness() const noexcept { return witness_; }

 private:
  Witness witness_;
};

struct ExpandingSubgraph {
  VertexSet z;
  Rational eta;
  DecompResult decomposition;
  std::vector<std::string> violations;
};

/// Runs the decomposition with l = 2 and eta = 2*theta*a/c on a graph assumed
/// (c/(an), theta)-bijumbled. Requires c >= 4(D+2)theta and a >= 2(D+1)f
/// unless desk mode is set.
ExpandingSubgraph expanding_subgraph_from_bijumbled(const Graph& g, const Rational& f, const Rational& d,
                                                    const Rational& c, const Rational& a, const Rational& theta,
                                                    std::int64_t n, const DecompOptions& options = {});

}  // namespace forge
