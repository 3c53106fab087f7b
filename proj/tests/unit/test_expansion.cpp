#include <gtest/gtest.h>

#include "forge/errors.hpp"
#include "forge/expansion.hpp"
#include "forge/generator.hpp"
#include "support/oracles.hpp"

using namespace forge;

TEST(Expanding, Examples) {
  auto k10 = is_expanding(graphs::complete(10), 3, Rational(1), Rational(4), ExpansionMode::exact());
  EXPECT_TRUE(k10.passed());
  EXPECT_TRUE(oracle::expanding(graphs::complete(10), 3, Rational(1), Rational(4)));
  Graph iso = graphs::disjoint_union(graphs::complete(5), graphs::empty(1));
  auto r = is_expanding(iso, 3, Rational(1), Rational(1), ExpansionMode::exact());
  ASSERT_EQ(r.verdict, Verdict::kFail);
  EXPECT_EQ(r.witness->x, (VertexSet{5}));
  // n = 1: no admissible sets.
  EXPECT_TRUE(is_expanding(graphs::empty(3), 1, Rational(5), Rational(5)).passed());
}

TEST(Expanding, ExactMatchesOracle) {
  for (std::uint64_t seed = 0; seed < 80; ++seed) {
    const int n_vertices = 6 + static_cast<int>(seed % 8);
    Graph g = sample_gnp(n_vertices, 0.45, seed);
    const std::int64_t n = 2 + static_cast<std::int64_t>(seed % 3);
    const Rational a(1), b(1 + static_cast<std::int64_t>(seed % 3), 2);
    auto rep = is_expanding(g, n, a, b, ExpansionMode::exact());
    EXPECT_EQ(rep.passed(), oracle::expanding(g, n, a, b)) << seed;
    auto autorep = is_expanding(g, n, a, b);
    EXPECT_EQ(autorep.passed(), rep.passed());
    if (!rep.passed()) {
      const auto& x = rep.witness->x;
      EXPECT_LT(Rational(static_cast<std::int64_t>(neighborhood(g, x).size())), b * Rational(static_cast<std::int64_t>(x.size())));
    }
  }
}

TEST(Expanding, HeuristicNeverFalselyPasses) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Graph g = sample_gnp(12, 0.3, seed);
    auto h = is_expanding(g, 3, Rational(1), Rational(2), ExpansionMode::heuristic());
    EXPECT_NE(h.verdict, Verdict::kPass);
    if (h.verdict == Verdict::kFail) EXPECT_FALSE(oracle::expanding(g, 3, Rational(1), Rational(2)));
  }
}

TEST(ViolatingSet, Examples) {
  Graph two = graphs::disjoint_union(graphs::complete(5), graphs::complete(5));
  auto v = find_violating_set(two, Rational(5), 5);
  ASSERT_TRUE(v.set);
  EXPECT_TRUE(v.exact);
  EXPECT_EQ(*v.set, (VertexSet{0, 1, 2, 3, 4}));
  EXPECT_FALSE(find_violating_set(graphs::complete(10), Rational(1), 3).set);
  auto single = find_violating_set(graphs::empty(1), Rational(1), 1);
  ASSERT_TRUE(single.set);
  EXPECT_EQ(*single.set, (VertexSet{0}));
}

TEST(ViolatingSet, MaximumAgainstBruteForce) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Graph g = sample_gnp(10, 0.25, seed);
    const Rational d(3, 2);
    const int cap = 4;
    auto v = find_violating_set(g, d, cap);
    int best = 0;
    for (std::uint64_t x = 1; x < (1u << 10); ++x) {
      int s = __builtin_popcountll(x);
      if (s > cap) continue;
      if (Rational(oracle::neighborhood_size(g, x)) < d * Rational(s)) best = std::max(best, s);
    }
    EXPECT_EQ(v.set ? static_cast<int>(v.set->size()) : 0, best) << seed;
  }
}

TEST(Decompose, DisjointCliquesSeparate) {
  // Three K_4's. D = 5 makes every set violate; (eta+f)n = 4 caps the
  // extracted set at one clique.
  Graph g = graphs::disjoint_union(graphs::disjoint_union(graphs::complete(4), graphs::complete(4)), graphs::complete(4));
  DecompParams params{Rational(1), Rational(5), 3, Rational(1), 2};
  DecompOptions opts;
  opts.desk = true;  // |V| = 12 < A*n
  auto r = decompose_alternatives(g, params, opts);
  ASSERT_EQ(r.kind, DecompResult::Kind::kSeparatedSets);
  EXPECT_TRUE(r.certified());
  EXPECT_EQ(r.parts.size(), 3u);
  EXPECT_LE(r.rounds, params.ell - 1);
}

TEST(Decompose, CompleteGraphExpands) {
  DecompParams params{Rational(1), Rational(2), 2, Rational(1, 2), 3};
  // A = (1)(3)(3/2) + 1/2 = 5, A*n = 15.
  auto r = decompose_alternatives(graphs::complete(15), params);
  ASSERT_EQ(r.kind, DecompResult::Kind::kExpander);
  EXPECT_EQ(r.z.size(), 15u);
  EXPECT_TRUE(r.certified());
  EXPECT_THROW(decompose_alternatives(graphs::complete(14), params), PreconditionError);
}

TEST(Decompose, IslandsNeverInExpander) {
  // A dense core plus isolated islands: the islands violate expansion.
  for (int islands = 1; islands <= 3; ++islands) {
    Graph g = graphs::disjoint_union(graphs::complete(14), graphs::empty(islands));
    DecompParams params{Rational(1), Rational(2), 2, Rational(1, 3), 3};
    DecompOptions opts;
    opts.desk = true;
    auto r = decompose_alternatives(g, params, opts);
    if (r.kind == DecompResult::Kind::kExpander) {
      for (Vertex v : r.z) EXPECT_LT(v, 14);
    }
    EXPECT_TRUE(certify_decomposition(g, params, r).verdict != Verdict::kFail || !r.violations.empty());
  }
}

TEST(Decompose, JsonRoundTrip) {
  DecompParams params{Rational(1), Rational(2), 2, Rational(1, 2), 3};
  auto r = decompose_alternatives(graphs::complete(15), params);
  auto back = decomp_result_from_json(to_json(r));
  EXPECT_EQ(back.z, r.z);
  EXPECT_EQ(back.kind, r.kind);
  EXPECT_EQ(to_json(back), to_json(r));
}

TEST(BijumbledExpansion, CompleteGraph) {
  // eta = 2*theta*a/c = 2*1*16/64 = 1/2.
  auto out = expanding_subgraph_from_bijumbled(graphs::complete(32), Rational(1), Rational(1), Rational(64),
                                               Rational(16), Rational(1), 2);
  EXPECT_EQ(out.eta, Rational(1, 2));
  EXPECT_EQ(out.z.size(), 32u);
}

TEST(BijumbledExpansion, TwoComponentsContradiction) {
  Graph g = graphs::disjoint_union(graphs::complete(10), graphs::complete(10));
  DecompOptions opts;
  opts.desk = true;
  try {
    // eta = 2*1*8/16 = 1, so (eta+f)n = 10 and D = 12 makes one K_10 the extracted set.
    expanding_subgraph_from_bijumbled(g, Rational(1), Rational(12), Rational(16), Rational(8), Rational(1), 5, opts);
    FAIL() << "expected contradiction";
  } catch (const ContradictionError& e) {
    EXPECT_EQ(edges_between(g, e.witness().x, e.witness().y), 0);
    EXPECT_EQ(e.witness().x.size() + e.witness().y.size(), 20u);
  }
}
