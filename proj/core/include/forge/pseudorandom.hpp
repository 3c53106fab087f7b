#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "forge/graph.hpp"
#include "forge/rational.hpp"

namespace forge {

enum class Verdict { kPass, kFail, kUnknown };

/// How a property is checked. Exact mode enumerates every relevant set and
/// refuses graphs above `exact_cap` vertices; sampled mode draws `trials`
/// random instances from `seed`.
struct CheckMode {
  enum class Kind { kExact, kSampled };
  Kind kind = Kind::kExact;
  std::int64_t trials = 10000;
  std::uint64_t seed = 0;
  int exact_cap = 16;

  static CheckMode exact(int cap = 16) { return {Kind::kExact, 0, 0, cap}; }
  static CheckMode sampled(std::int64_t trials = 10000, std::uint64_t seed = 0) {
    return {Kind::kSampled, trials, seed, 16};
  }
};

struct Witness {
  VertexSet x;
  VertexSet y;
  friend bool operator==(const Witness&, const Witness&) = default;
};

/// Outcome of a certifier. A failing report always carries a witness that
/// reproduces the violation when re-evaluated on its own.
struct CertReport {
  Verdict verdict = Verdict::kPass;
  std::string mode;  // "exact", "sampled", "heuristic", "certificate"
  std::optional<Witness> witness;
  std::int64_t pairs_checked = 0;
  std::string detail;

  bool passed() const noexcept { return verdict == Verdict::kPass; }
};

std::string to_string(Verdict v);
nlohmann::json to_json(const CertReport& report);
CertReport cert_report_from_json(const nlohmann::json& j);

/// |e(X,Y) - p|X||Y|| <= theta*sqrt(|X||Y|) over all disjoint X, Y with
/// 1 <= |X| <= |Y| <= p*N*|X|, N = |V(G)|. The exact witness is the violating
/// pair with least X (as a vertex bitmask), then least Y.
CertReport is_bijumbled(const Graph& g, const Rational& p, const Rational& theta, const CheckMode& mode = {});

/// Re-evaluate one (X, Y) pair against the bijumbledness bound.
bool pair_within_bound(const Graph& g, std::span<const Vertex> x, std::span<const Vertex> y, const Rational& p,
                       const Rational& theta);

/// |e(U) - p*|U|(|U|-1)/2|.
double edge_density_deviation(const Graph& g, std::span<const Vertex> u, const Rational& p);

/// Checks |e(U) - p*binom(|U|,2)| <= theta*|U| for every non-empty U (exact)
/// or for sampled U. Witness is reported in `x`.
CertReport satisfies_prop_jumbled(const Graph& g, const Rational& p, const Rational& theta,
                                  const CheckMode& mode = {});

/// Every pair of disjoint sets with |X|, |Y| > threshold spans an edge.
/// Exact mode only (up to mode.exact_cap vertices, at most 63).
CertReport disjoint_sets_have_edge(const Graph& g, const Rational& threshold, const CheckMode& mode = {});

/// Parameters of the class P_n(a,b,c,l,theta): graphs on N = a*n vertices,
/// p = c/(a*n).
struct PnParams {
  Rational a{3};
  Rational b{1};
  Rational c{1};
  Rational ell{1};
  Rational theta{1};
  std::int64_t n = 1;

  Rational big_n() const { return a * Rational(n); }
  Rational p() const { return c / big_n(); }
};

nlohmann::json to_json(const PnParams& params);
PnParams pn_params_from_json(const nlohmann::json& j);

struct MembershipReport {
  static constexpr int kConditions = 4;
  /// Per condition: |V| = an, max degree <= b, girth > 2l, bijumbled. An
  /// unset entry was not evaluated.
  std::array<std::optional<bool>, kConditions> holds;
  int first_failure = 0;  // 1-based, 0 when everything evaluated passed
  CertReport jumbled;
  std::string detail;

  bool passed() const noexcept { return first_failure == 0; }
  bool structural_passed() const noexcept {
    return holds[0].value_or(false) && holds[1].value_or(false) && holds[2].value_or(false);
  }
};

nlohmann::json to_json(const MembershipReport& report);

/// Checks the four conditions. `check_jumbled = false` skips condition (iv).
MembershipReport class_membership(const Graph& g, const PnParams& params, const CheckMode& mode = {},
                                  bool check_jumbled = true);

struct GoodTuple {
  Rational a{3};
  Rational b{1};
  Rational c{1};
  Rational ell{1};
  Rational theta{1};
  int delta = 2;
  int k = 1;
};

struct GoodTupleReport {
  std::array<bool, 4> holds{};  // a >= 3, c >= theta*l, b >= 9c, l >= 21*delta^(2k)
  bool good() const noexcept { return holds[0] && holds[1] && holds[2] && holds[3]; }
  int first_failure() const noexcept;
};

GoodTupleReport is_good_tuple(const GoodTuple& t);

/// 4 * x^(2 - 1/(2k)).
double kst_edge_bound(std::int64_t x, int k);

/// Exact test of edges <= 4 * x^(2 - 1/(2k)).
bool within_kst_bound(std::int64_t edges, std::int64_t x, int k);

/// Search for s left and t right vertices, all mutually adjacent across.
/// rows[i] is a bit row over the right side. Returns left and right index
/// lists (lexicographically least left choice).
std::optional<std::pair<std::vector<int>, std::vector<int>>> find_biclique(
    std::span<const std::vector<std::uint64_t>> rows, int right_size, int s, int t);

/// Checks that the bipartite graph between `left` and `right` either contains
/// K_{2k,2k} or has at most 4x^(2-1/(2k)) edges. Sides must be equal-sized and
/// disjoint.
CertReport kst_check(const Graph& g, std::span<const Vertex> left, std::span<const Vertex> right, int k);

}  // namespace forge
