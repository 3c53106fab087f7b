#include <gtest/gtest.h>

#include <numeric>

#include "forge/errors.hpp"
#include "forge/generator.hpp"
#include "forge/pseudorandom.hpp"
#include "forge/rng.hpp"
#include "support/oracles.hpp"

using namespace forge;

namespace {

Graph relabel(const Graph& g, const std::vector<Vertex>& perm) {
  std::vector<Edge> edges;
  for (const Edge& e : g.edges()) edges.push_back(make_edge(perm[e.u], perm[e.v]));
  return Graph::from_edges(g.order(), edges);
}

}  // namespace

TEST(Bijumbled, Examples) {
  auto k6 = is_bijumbled(graphs::complete(6), Rational(1), Rational(0));
  EXPECT_TRUE(k6.passed());
  auto empty = is_bijumbled(graphs::empty(8), Rational(1, 2), Rational(1, 10));
  ASSERT_EQ(empty.verdict, Verdict::kFail);
  EXPECT_EQ(empty.witness->x, (VertexSet{0}));
  EXPECT_EQ(empty.witness->y, (VertexSet{1}));
  EXPECT_THROW(is_bijumbled(graphs::empty(17), Rational(1, 2), Rational(1)), CapacityError);
  EXPECT_NO_THROW(is_bijumbled(graphs::empty(17), Rational(1, 2), Rational(1), CheckMode::exact(17)));
}

TEST(Bijumbled, ExactMatchesOracle) {
  Rng pick(99);
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const int n = 4 + static_cast<int>(seed % 7);
    Graph g = sample_gnp(n, 0.5, seed);
    const Rational p(1 + static_cast<std::int64_t>(pick.uniform(4)), 4);
    const Rational theta(static_cast<std::int64_t>(pick.uniform(12)), 8);
    auto r = is_bijumbled(g, p, theta);
    EXPECT_EQ(r.passed(), oracle::bijumbled(g, p, theta)) << "seed " << seed;
    if (!r.passed()) {
      EXPECT_FALSE(pair_within_bound(g, r.witness->x, r.witness->y, p, theta));
      EXPECT_LE(r.witness->x.size(), r.witness->y.size());
    }
  }
}

TEST(Bijumbled, RelabelingInvariant) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const int n = 6 + static_cast<int>(seed % 5);
    Graph g = sample_gnp(n, 0.4, seed);
    std::vector<Vertex> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(seed);
    rng.shuffle(std::span<Vertex>(perm));
    const Rational p(2, 5), theta(3, 4);
    EXPECT_EQ(is_bijumbled(g, p, theta).verdict, is_bijumbled(relabel(g, perm), p, theta).verdict);
  }
}

TEST(Bijumbled, SampledNeverStricterThanExact) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Graph g = sample_gnp(10, 0.5, seed);
    const Rational p(1, 2), theta(1);
    auto exact = is_bijumbled(g, p, theta);
    auto sampled = is_bijumbled(g, p, theta, CheckMode::sampled(2000, seed));
    if (exact.passed()) EXPECT_TRUE(sampled.passed());
    if (!sampled.passed()) {
      EXPECT_FALSE(exact.passed());
      EXPECT_FALSE(pair_within_bound(g, sampled.witness->x, sampled.witness->y, p, theta));
    }
  }
}

TEST(Density, DeviationExamples) {
  EXPECT_DOUBLE_EQ(edge_density_deviation(graphs::complete(4), std::vector<Vertex>{0, 1, 2, 3}, Rational(1)), 0.0);
  EXPECT_DOUBLE_EQ(edge_density_deviation(graphs::empty(6), std::vector<Vertex>{0, 1, 2, 3}, Rational(1, 2)), 3.0);
}

TEST(Density, ExactMatchesOracle) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Graph g = sample_gnp(9, 0.5, seed);
    const Rational p(1, 2), theta(static_cast<std::int64_t>(seed % 5), 4);
    EXPECT_EQ(satisfies_prop_jumbled(g, p, theta).passed(), oracle::density_controlled(g, p, theta));
  }
}

TEST(Density, BijumbledImpliesDensityAndEdges) {
  int passing = 0;
  for (std::uint64_t seed = 0; seed < 80; ++seed) {
    const int n = 6 + static_cast<int>(seed % 7);
    Graph g = sample_gnp(n, 0.5, seed);
    const Rational p(1, 2), theta(1 + static_cast<std::int64_t>(seed % 3), 1);
    if (!is_bijumbled(g, p, theta).passed()) continue;
    ++passing;
    EXPECT_TRUE(satisfies_prop_jumbled(g, p, theta).passed());
    EXPECT_TRUE(disjoint_sets_have_edge(g, theta / p).passed());
  }
  EXPECT_GT(passing, 10);
}

TEST(DisjointEdge, ExamplesAndOracle) {
  EXPECT_TRUE(disjoint_sets_have_edge(graphs::complete(7), Rational(1)).passed());
  Graph two = graphs::disjoint_union(graphs::complete(4), graphs::complete(4));
  auto r = disjoint_sets_have_edge(two, Rational(3));
  ASSERT_EQ(r.verdict, Verdict::kFail);
  EXPECT_EQ(r.witness->x, (VertexSet{0, 1, 2, 3}));
  EXPECT_EQ(r.witness->y, (VertexSet{4, 5, 6, 7}));
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Graph g = sample_gnp(9, 0.3, seed);
    Rational thr(static_cast<std::int64_t>(seed % 7), 2);
    auto rep = disjoint_sets_have_edge(g, thr);
    EXPECT_EQ(rep.passed(), oracle::disjoint_large_sets_have_edge(g, thr)) << seed;
    if (!rep.passed()) EXPECT_EQ(edges_between(g, rep.witness->x, rep.witness->y), 0);
  }
}

TEST(Membership, Conditions) {
  PnParams params{Rational(3), Rational(4), Rational(1), Rational(1), Rational(8), 4};
  auto wrong_order = class_membership(graphs::empty(11), params);
  EXPECT_EQ(wrong_order.first_failure, 1);
  PnParams star_params{Rational(1), Rational(3), Rational(1), Rational(1), Rational(100), 5};
  EXPECT_EQ(class_membership(graphs::star(4), star_params).first_failure, 2);
  PnParams cyc{Rational(1), Rational(3), Rational(1), Rational(3), Rational(100), 5};
  EXPECT_EQ(class_membership(graphs::cycle(5), cyc).first_failure, 3);
  PnParams ok{Rational(1), Rational(3), Rational(1), Rational(2), Rational(100), 10};
  EXPECT_TRUE(class_membership(graphs::petersen(), ok, CheckMode::exact()).passed());
  auto j = to_json(class_membership(graphs::petersen(), ok));
  EXPECT_EQ(j["first_failure"], 0);
}

TEST(GoodTuple, KnownExamples) {
  GoodTuple t{Rational(3), Rational(756), Rational(84), Rational(84), Rational(1), 2, 1};
  EXPECT_TRUE(is_good_tuple(t).good());
  auto a2 = t;
  a2.a = Rational(2);
  EXPECT_EQ(is_good_tuple(a2).first_failure(), 1);
  auto l83 = t;
  l83.ell = Rational(83);
  l83.c = Rational(83);
  l83.b = Rational(747);
  EXPECT_EQ(is_good_tuple(l83).first_failure(), 4);
}

TEST(Kst, BoundAndCheck) {
  EXPECT_NEAR(kst_edge_bound(9, 1), 108.0, 1e-9);
  EXPECT_NEAR(kst_edge_bound(4, 1), 32.0, 1e-9);
  EXPECT_TRUE(within_kst_bound(108, 9, 1));
  EXPECT_FALSE(within_kst_bound(109, 9, 1));

  Graph k44 = graphs::complete_bipartite(4, 4);
  std::vector<Vertex> left{0, 1, 2, 3}, right{4, 5, 6, 7};
  auto r = kst_check(k44, left, right, 1);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.witness->x.size(), 2u);

  std::vector<Edge> matching;
  for (int i = 0; i < 9; ++i) matching.push_back({i, 9 + i});
  Graph m = Graph::from_edges(18, matching);
  std::vector<Vertex> l9(9), r9(9);
  std::iota(l9.begin(), l9.end(), 0);
  std::iota(r9.begin(), r9.end(), 9);
  auto rm = kst_check(m, l9, r9, 1);
  EXPECT_TRUE(rm.passed());
  EXPECT_FALSE(rm.witness.has_value());

  // C_8 with sides {0,2,4,6} and {1,3,5,7}.
  auto rc = kst_check(graphs::cycle(8), std::vector<Vertex>{0, 2, 4, 6}, std::vector<Vertex>{1, 3, 5, 7}, 1);
  EXPECT_TRUE(rc.passed());
  EXPECT_FALSE(rc.witness.has_value());
  EXPECT_THROW(kst_check(k44, std::vector<Vertex>{0, 1}, std::vector<Vertex>{4}, 1), PreconditionError);
}

TEST(Kst, BicliqueSearchMatchesBruteForce) {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const int x = 6;
    std::vector<std::vector<std::uint64_t>> rows(x, std::vector<std::uint64_t>(1, 0));
    for (int i = 0; i < x; ++i)
      for (int j = 0; j < x; ++j)
        if (rng.bernoulli(0.6)) rows[i][0] |= std::uint64_t{1} << j;
    bool brute = false;
    for (int a = 0; a < x && !brute; ++a)
      for (int b = a + 1; b < x && !brute; ++b) {
        int common = __builtin_popcountll(rows[a][0] & rows[b][0]);
        brute = common >= 2;
      }
    auto found = find_biclique(rows, x, 2, 2);
    EXPECT_EQ(found.has_value(), brute);
    if (found) {
      for (int i : found->first)
        for (int j : found->second) EXPECT_TRUE(rows[i][0] >> j & 1);
    }
  }
}

TEST(CertReportJson, Shape) {
  auto r = is_bijumbled(graphs::empty(4), Rational(1, 2), Rational(0));
  auto j = to_json(r);
  EXPECT_EQ(j["verdict"], "fail");
  EXPECT_EQ(j["mode"], "exact");
  EXPECT_TRUE(j["witness"].contains("X"));
  EXPECT_EQ(cert_report_from_json(j).witness, r.witness);
  auto pass = to_json(is_bijumbled(graphs::complete(4), Rational(1), Rational(0)));
  EXPECT_TRUE(pass["witness"].is_null());
}
