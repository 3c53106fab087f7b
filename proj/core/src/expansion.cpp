#include "forge/expansion.hpp"

#include <algorithm>
#include <bit>

namespace forge {

namespace {

using Bits = std::vector<std::uint64_t>;

std::vector<Bits> adjacency_bits(const Graph& g) {
  const std::size_t words = (static_cast<std::size_t>(g.order()) + 63) / 64;
  std::vector<Bits> rows(static_cast<std::size_t>(g.order()), Bits(words, 0));
  for (const Edge& e : g.edges()) {
    rows[e.u][e.v / 64] |= std::uint64_t{1} << (e.v % 64);
    rows[e.v][e.u / 64] |= std::uint64_t{1} << (e.u % 64);
  }
  return rows;
}

int popcount(const Bits& b) {
  int c = 0;
  for (auto w : b) c += std::popcount(w);
  return c;
}

// |N| < d * size, exactly.
bool violates(std::int64_t neighbors, std::int64_t size, const Rational& d) {
  return static_cast<__int128>(neighbors) * d.den() < static_cast<__int128>(d.num()) * size;
}

std::int64_t floor_nonneg(const Rational& r) { return r < Rational(0) ? 0 : r.floor(); }

// Depth-first enumeration of all subsets of size 1..max_size in
// lexicographic order of their sorted vertex lists.
class SubsetWalk {
 public:
  SubsetWalk(const Graph& g, int max_size) : rows_(adjacency_bits(g)), max_size_(max_size) {
    const std::size_t words = (static_cast<std::size_t>(g.order()) + 63) / 64;
    unions_.assign(static_cast<std::size_t>(max_size + 1), Bits(words, 0));
  }

  // visit(chosen, neighbor_count) returns false to stop.
  template <class Visit>
  void run(Visit&& visit) {
    stopped_ = false;
    chosen_.clear();
    recurse(0, visit);
  }

 private:
  template <class Visit>
  void recurse(int start, Visit& visit) {
    const int depth = static_cast<int>(chosen_.size());
    const int m = static_cast<int>(rows_.size());
    for (int v = start; v < m && !stopped_; ++v) {
      const Bits& prev = unions_[depth];
      Bits& cur = unions_[depth + 1];
      for (std::size_t w = 0; w < cur.size(); ++w) cur[w] = prev[w] | rows_[v][w];
      chosen_.push_back(v);
      if (!visit(static_cast<const VertexSet&>(chosen_), popcount(cur))) {
        stopped_ = true;
      } else if (depth + 1 < max_size_) {
        recurse(v + 1, visit);
      }
      chosen_.pop_back();
    }
  }

  std::vector<Bits> rows_;
  int max_size_;
  std::vector<Bits> unions_;
  VertexSet chosen_;
  bool stopped_ = false;
};

// Greedy growth from every seed vertex (ascending degree): repeatedly add the
// vertex that keeps |N(X)| smallest. Calls found(X, |N(X)|) on each prefix.
template <class Found>
void greedy_growth(const Graph& g, int max_size, Found&& found) {
  const int m = g.order();
  if (m == 0 || max_size < 1) return;
  const auto rows = adjacency_bits(g);
  std::vector<Vertex> seeds(static_cast<std::size_t>(m));
  for (Vertex v = 0; v < m; ++v) seeds[v] = v;
  std::stable_sort(seeds.begin(), seeds.end(), [&](Vertex a, Vertex b) { return g.degree(a) < g.degree(b); });
  Bits uni;
  Bits trial;
  std::vector<char> in_x(static_cast<std::size_t>(m));
  for (Vertex seed : seeds) {
    std::fill(in_x.begin(), in_x.end(), 0);
    VertexSet x{seed};
    in_x[seed] = 1;
    uni = rows[seed];
    found(x, popcount(uni));
    while (static_cast<int>(x.size()) < max_size) {
      Vertex best = -1;
      int best_count = 0;
      auto consider = [&](Vertex w) {
        trial.resize(uni.size());
        for (std::size_t i = 0; i < uni.size(); ++i) trial[i] = uni[i] | rows[w][i];
        int c = popcount(trial);
        if (best == -1 || c < best_count) {
          best = w;
          best_count = c;
        }
      };
      for (Vertex v : x) {
        for (Vertex w : g.neighbors(v)) {
          if (!in_x[w]) consider(w);
        }
      }
      if (best == -1) {
        for (Vertex w = 0; w < m; ++w) {
          if (!in_x[w]) consider(w);
        }
      }
      if (best == -1) break;
      in_x[best] = 1;
      x.push_back(best);
      for (std::size_t i = 0; i < uni.size(); ++i) uni[i] |= rows[best][i];
      found(x, best_count);
    }
  }
}

VertexSet sorted(VertexSet s) {
  std::sort(s.begin(), s.end());
  return s;
}

VertexSet relabel(const VertexSet& local, const std::vector<Vertex>& original) {
  VertexSet out;
  out.reserve(local.size());
  for (Vertex v : local) out.push_back(original[v]);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::int64_t subset_count(std::int64_t m, std::int64_t s, std::int64_t limit) {
  std::int64_t total = 0;
  __int128 binom = 1;
  for (std::int64_t i = 1; i <= std::min(s, m); ++i) {
    binom = binom * (m - i + 1) / i;
    total += static_cast<std::int64_t>(std::min<__int128>(binom, limit + 1));
    if (total > limit) return limit + 1;
  }
  return total;
}

CertReport is_expanding(const Graph& g, std::int64_t n, const Rational& a, const Rational& b,
                        const ExpansionMode& mode) {
  CertReport report;
  const std::int64_t s_max = std::min<std::int64_t>(floor_nonneg(a * Rational(n - 1)), g.order());
  if (s_max < 1 || g.order() == 0) {
    report.mode = "exact";
    report.detail = "no admissible sets";
    return report;
  }
  if (mode.kind == ExpansionMode::Kind::kAuto) {
    int min_degree = g.order() == 0 ? 0 : g.degree(0);
    for (Vertex v = 0; v < g.order(); ++v) min_degree = std::min(min_degree, g.degree(v));
    if (!violates(min_degree, s_max, b)) {
      report.mode = "certificate";
      report.detail = "min degree " + std::to_string(min_degree) + " >= b*a(n-1)";
      return report;
    }
  }
  const std::int64_t count = subset_count(g.order(), s_max, mode.budget);
  const bool exact = mode.kind == ExpansionMode::Kind::kExact ||
                     (mode.kind == ExpansionMode::Kind::kAuto && count <= mode.budget);
  if (exact) {
    if (count > mode.budget) {
      throw CapacityError("is_expanding: more than " + std::to_string(mode.budget) + " subsets to enumerate");
    }
    report.mode = "exact";
    SubsetWalk walk(g, static_cast<int>(s_max));
    walk.run([&](const VertexSet& x, int neighbors) {
      ++report.pairs_checked;
      if (violates(neighbors, static_cast<std::int64_t>(x.size()), b)) {
        report.verdict = Verdict::kFail;
        report.witness = Witness{x, {}};
        return false;
      }
      return true;
    });
    return report;
  }
  report.mode = "heuristic";
  std::optional<VertexSet> best;
  greedy_growth(g, static_cast<int>(s_max), [&](const VertexSet& x, int neighbors) {
    ++report.pairs_checked;
    if (!best && violates(neighbors, static_cast<std::int64_t>(x.size()), b)) best = sorted(x);
  });
  if (best) {
    report.verdict = Verdict::kFail;
    report.witness = Witness{*best, {}};
  } else {
    report.verdict = Verdict::kUnknown;
    report.detail = "no violating set found by greedy search";
  }
  return report;
}

ViolatingSet find_violating_set(const Graph& g, const Rational& d, std::int64_t size_cap, const ExpansionMode& mode,
                                std::int64_t expansion_cap) {
  ViolatingSet out;
  size_cap = std::min<std::int64_t>(size_cap, g.order());
  if (size_cap < 1) {
    out.exact = true;
    return out;
  }
  const std::int64_t count = subset_count(g.order(), size_cap, mode.budget);
  const bool exact = mode.kind != ExpansionMode::Kind::kHeuristic && size_cap <= mode.size_cap &&
                     count <= mode.budget;
  if (mode.kind == ExpansionMode::Kind::kExact && !exact) {
    throw CapacityError("find_violating_set: exact search exceeds the configured cap");
  }
  auto consider = [&](const VertexSet& x, int neighbors) {
    const auto size = static_cast<std::int64_t>(x.size());
    if (!violates(neighbors, size, d)) return;
    if (size <= expansion_cap) out.small_violation = true;
    if (!out.set || size > static_cast<std::int64_t>(out.set->size())) {
      out.set = sorted(x);
    } else if (size == static_cast<std::int64_t>(out.set->size())) {
      VertexSet s = sorted(x);
      if (s < *out.set) out.set = std::move(s);
    }
  };
  if (exact) {
    out.exact = true;
    SubsetWalk walk(g, static_cast<int>(size_cap));
    walk.run([&](const VertexSet& x, int neighbors) {
      consider(x, neighbors);
      return true;
    });
  } else {
    greedy_growth(g, static_cast<int>(size_cap), consider);
  }
  if (out.set) {
    // Soundness check on every returned set.
    if (!violates(static_cast<std::int64_t>(neighborhood(g, *out.set).size()),
                  static_cast<std::int64_t>(out.set->size()), d)) {
      throw StageFailure("find_violating_set", "internal error: returned set does not violate expansion");
    }
  }
  return out;
}

nlohmann::json to_json(const DecompResult& r) {
  nlohmann::json j;
  j["kind"] = r.kind == DecompResult::Kind::kExpander ? "expander" : "separated_sets";
  j["z"] = r.z;
  j["parts"] = r.parts;
  j["rounds"] = r.rounds;
  j["heuristic"] = r.heuristic;
  j["certification"] = to_json(r.certification);
  j["transcript"] = r.transcript;
  j["violations"] = r.violations;
  return j;
}

DecompResult decomp_result_from_json(const nlohmann::json& j) {
  DecompResult r;
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "expander") {
    r.kind = DecompResult::Kind::kExpander;
  } else if (kind == "separated_sets") {
    r.kind = DecompResult::Kind::kSeparatedSets;
  } else {
    throw Error("unknown decomposition kind '" + kind + "'");
  }
  r.z = j.at("z").get<VertexSet>();
  r.parts = j.at("parts").get<std::vector<VertexSet>>();
  r.rounds = j.at("rounds").get<int>();
  r.heuristic = j.at("heuristic").get<bool>();
  r.certification = cert_report_from_json(j.at("certification"));
  r.transcript = j.at("transcript").get<std::vector<std::string>>();
  r.violations = j.at("violations").get<std::vector<std::string>>();
  return r;
}

CertReport certify_decomposition(const Graph& g, const DecompParams& params, const DecompResult& result,
                                 const ExpansionMode& mode) {
  if (result.kind == DecompResult::Kind::kExpander) {
    if (result.z.empty()) {
      CertReport r;
      r.verdict = Verdict::kFail;
      r.mode = "exact";
      r.witness = Witness{};
      r.detail = "expander set is empty";
      return r;
    }
    for (Vertex v : result.z) {
      if (v < 0 || v >= g.order()) throw PreconditionError("certify_decomposition: vertex out of range");
    }
    InducedSubgraph sub = induced_subgraph(g, result.z);
    CertReport r = is_expanding(sub.graph, params.n, params.f, params.d, mode);
    if (r.witness) r.witness->x = relabel(r.witness->x, sub.original);
    return r;
  }
  CertReport r;
  r.mode = "exact";
  std::vector<int> part_of(static_cast<std::size_t>(g.order()), -1);
  const Rational need = params.eta * Rational(params.n);
  for (std::size_t i = 0; i < result.parts.size(); ++i) {
    if (Rational(static_cast<std::int64_t>(result.parts[i].size())) < need) {
      r.verdict = Verdict::kFail;
      r.witness = Witness{result.parts[i], {}};
      r.detail = "part " + std::to_string(i + 1) + " smaller than eta*n";
      return r;
    }
    for (Vertex v : result.parts[i]) {
      if (v < 0 || v >= g.order() || part_of[v] != -1) {
        r.verdict = Verdict::kFail;
        r.witness = Witness{{v}, {}};
        r.detail = "parts overlap or leave the vertex range";
        return r;
      }
      part_of[v] = static_cast<int>(i);
    }
  }
  if (static_cast<int>(result.parts.size()) != params.ell) {
    r.verdict = Verdict::kFail;
    r.detail = "expected " + std::to_string(params.ell) + " parts";
    return r;
  }
  for (const Edge& e : g.edges()) {
    ++r.pairs_checked;
    if (part_of[e.u] != -1 && part_of[e.v] != -1 && part_of[e.u] != part_of[e.v]) {
      r.verdict = Verdict::kFail;
      r.witness = Witness{{e.u}, {e.v}};
      r.detail = "edge between parts";
      return r;
    }
  }
  return r;
}

DecompResult decompose_alternatives(const Graph& g, const DecompParams& params, const DecompOptions& options) {
  if (params.ell < 2) throw PreconditionError("decompose: l must be >= 2");
  if (!(params.eta > Rational(0))) throw PreconditionError("decompose: eta must be > 0");
  DecompResult result;
  auto hypothesis = [&](const std::string& what) {
    if (!options.desk) throw StageFailure("decompose", what);
    result.violations.push_back(what);
  };
  const Rational big_a = params.big_a();
  if (Rational(g.order()) < big_a * Rational(params.n)) {
    const std::string what = "|V(G)| = " + std::to_string(g.order()) + " < A*n = " + (big_a * Rational(params.n)).str();
    if (!options.desk) throw PreconditionError("decompose: " + what);
    result.violations.push_back(what);
  }
  const std::int64_t expansion_cap = floor_nonneg(params.f * Rational(params.n - 1));
  const std::int64_t part_cap = floor_nonneg((params.eta + params.f) * Rational(params.n));
  const Rational eta_n = params.eta * Rational(params.n);
  const Rational round_bound = (params.d + Rational(1)) * (params.eta + params.f) * Rational(params.n);

  auto finish = [&](DecompResult::Kind kind) {
    result.kind = kind;
    result.certification = certify_decomposition(g, params, result, options.mode);
    if (result.certification.verdict == Verdict::kFail) {
      hypothesis("returned object fails certification: " + result.certification.detail);
    }
    return result;
  };
  auto expands = [&](const VertexSet& w) {
    if (w.empty()) return false;
    InducedSubgraph sub = induced_subgraph(g, w);
    CertReport r = is_expanding(sub.graph, params.n, params.f, params.d, options.mode);
    return r.verdict == Verdict::kPass;
  };

  VertexSet w(static_cast<std::size_t>(g.order()));
  for (Vertex v = 0; v < g.order(); ++v) w[v] = v;
  std::vector<char> covered(static_cast<std::size_t>(g.order()), 0);
  std::int64_t covered_count = 0;

  for (int k = 0; k < params.ell - 1; ++k) {
    InducedSubgraph sub = induced_subgraph(g, w);
    ViolatingSet vs = find_violating_set(sub.graph, params.d, part_cap, options.mode, expansion_cap);
    if (!vs.exact) result.heuristic = true;
    const bool no_small_violation = vs.exact ? !vs.small_violation : !vs.set.has_value();
    if (no_small_violation || (!vs.exact && expands(w))) {
      result.transcript.push_back("round " + std::to_string(k + 1) + ": G[W] on " + std::to_string(w.size()) +
                                  " vertices has no violating set of size <= f(n-1)");
      result.z = w;
      return finish(DecompResult::Kind::kExpander);
    }
    VertexSet v = relabel(*vs.set, sub.original);
    VertexSet local_n = neighborhood(sub.graph, *vs.set);
    std::vector<char> drop(static_cast<std::size_t>(g.order()), 0);
    for (Vertex x : v) drop[x] = 1;
    for (Vertex x : local_n) drop[sub.original[x]] = 1;
    for (Vertex x : v) {
      if (!covered[x]) covered[x] = 1, ++covered_count;
      for (Vertex y : g.neighbors(x)) {
        if (!covered[y]) covered[y] = 1, ++covered_count;
      }
    }
    ++result.rounds;
    result.parts.push_back(v);
    result.transcript.push_back("round " + std::to_string(k + 1) + ": extracted |V| = " + std::to_string(v.size()) +
                                " from |W| = " + std::to_string(w.size()));
    if (!(Rational(covered_count) < Rational(k + 1) * round_bound)) {
      hypothesis("bookkeeping bound on the covered set fails after round " + std::to_string(k + 1));
    }
    VertexSet next;
    for (Vertex x : w) {
      if (!drop[x]) next.push_back(x);
    }
    if (Rational(static_cast<std::int64_t>(v.size())) < eta_n) {
      // Maximality forces G[W_{k+1}] to expand.
      if (expands(next)) {
        result.transcript.push_back("extracted set smaller than eta*n; remaining W expands");
        result.parts.clear();
        result.z = next;
        return finish(DecompResult::Kind::kExpander);
      }
      hypothesis("extracted set of size " + std::to_string(v.size()) + " < eta*n and the remainder does not expand" +
                 (vs.exact ? "" : " (heuristic search)"));
    }
    w = std::move(next);
  }
  result.parts.push_back(w);
  result.transcript.push_back("final part: remaining |W| = " + std::to_string(w.size()));
  if (Rational(static_cast<std::int64_t>(w.size())) < eta_n) {
    hypothesis("final part has " + std::to_string(w.size()) + " vertices, fewer than eta*n");
  }
  return finish(DecompResult::Kind::kSeparatedSets);
}

ExpandingSubgraph expanding_subgraph_from_bijumbled(const Graph& g, const Rational& f, const Rational& d,
                                                    const Rational& c, const Rational& a, const Rational& theta,
                                                    std::int64_t n, const DecompOptions& options) {
  ExpandingSubgraph out;
  auto hypothesis = [&](const std::string& what) {
    if (!options.desk) throw PreconditionError("expanding subgraph: " + what);
    out.violations.push_back(what);
  };
  if (c < Rational(4) * (d + Rational(2)) * theta) hypothesis("c >= 4(D+2)theta fails");
  if (a < Rational(2) * (d + Rational(1)) * f) hypothesis("a >= 2(D+1)f fails");
  if (!(c > Rational(0))) throw PreconditionError("expanding subgraph: c must be > 0");
  out.eta = Rational(2) * theta * a / c;
  DecompParams params{f, d, 2, out.eta, n};
  out.decomposition = decompose_alternatives(g, params, options);
  for (const auto& v : out.decomposition.violations) out.violations.push_back(v);
  if (out.decomposition.kind == DecompResult::Kind::kSeparatedSets) {
    const auto& parts = out.decomposition.parts;
    throw ContradictionError("two disjoint sets of size >= eta*n span no edge; the graph is not bijumbled",
                             Witness{parts[0], parts[1]});
  }
  out.z = out.decomposition.z;
  return out;
}

}  // namespace forge
