#include <gtest/gtest.h>

#include "forge/blowup.hpp"
#include "forge/errors.hpp"
#include "forge/generator.hpp"
#include "forge/graph.hpp"
#include "forge/rng.hpp"
#include "forge/tree.hpp"
#include "support/oracles.hpp"

using namespace forge;

namespace {

Graph random_graph(int n, double p, std::uint64_t seed) { return sample_gnp(n, p, seed); }

bool is_subgraph(const Graph& a, const Graph& b) {
  if (a.order() != b.order()) return false;
  for (const Edge& e : a.edges())
    if (!b.has_edge(e.u, e.v)) return false;
  return true;
}

}  // namespace

TEST(Graph, RejectsLoopsDuplicatesAndRange) {
  std::vector<Edge> loop{{1, 1}};
  EXPECT_THROW(Graph::from_edges(3, loop), GraphError);
  std::vector<Edge> dup{{0, 1}, {1, 0}};
  EXPECT_THROW(Graph::from_edges(3, dup), GraphError);
  std::vector<Edge> range{{0, 3}};
  EXPECT_THROW(Graph::from_edges(3, range), GraphError);
}

TEST(Graph, DegreesMatchEdgeSet) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Graph g = random_graph(30, 0.2, seed);
    std::vector<int> deg(30, 0);
    for (const Edge& e : g.edges()) ++deg[e.u], ++deg[e.v];
    for (Vertex v = 0; v < 30; ++v) {
      EXPECT_EQ(g.degree(v), deg[v]);
      for (Vertex w : g.neighbors(v)) EXPECT_TRUE(g.has_edge(v, w));
    }
  }
}

TEST(Graph, SparseAndDenseAgree) {
  Graph dense = random_graph(40, 0.3, 7);
  const auto saved = Graph::dense_cap();
  Graph::set_dense_cap(0);
  Graph sparse = Graph::from_edges(40, dense.edges());
  Graph::set_dense_cap(saved);
  EXPECT_FALSE(sparse.has_dense_rows());
  EXPECT_TRUE(dense.has_dense_rows());
  for (Vertex u = 0; u < 40; ++u)
    for (Vertex v = 0; v < 40; ++v) EXPECT_EQ(sparse.has_edge(u, v), dense.has_edge(u, v));
}

TEST(Power, SmallCases) {
  EXPECT_EQ(power(graphs::path(3), 2), graphs::complete(3));
  Graph g = random_graph(9, 0.3, 3);
  EXPECT_EQ(power(g, 1), g);
  Graph c8 = power(graphs::cycle(8), 2);
  EXPECT_EQ(c8.size(), 16u);
  for (Vertex v = 0; v < 8; ++v) EXPECT_EQ(c8.degree(v), 4);
  EXPECT_THROW(power(g, 0), PreconditionError);
}

TEST(Power, MatchesFloydWarshall) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const int n = 10 + static_cast<int>(seed % 5) * 12;  // up to 58 vertices
    Graph g = random_graph(n, 3.0 / n, seed);
    auto d = oracle::floyd_warshall(g);
    for (int k = 1; k <= 4; ++k) {
      Graph pk = power(g, k);
      for (Vertex u = 0; u < n; ++u)
        for (Vertex v = u + 1; v < n; ++v) EXPECT_EQ(pk.has_edge(u, v), d[u][v] <= k) << u << " " << v << " k=" << k;
    }
  }
}

TEST(Power, IdempotentAndMonotone) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Graph g = random_graph(4 + static_cast<int>(seed % 9), 0.3, seed);
    for (int j = 1; j <= 3; ++j) {
      Graph pj = power(g, j);
      EXPECT_EQ(power(pj, 1), pj);
      EXPECT_TRUE(is_subgraph(pj, power(g, j + 1)));
    }
  }
}

TEST(BlowUp, ShearedCounts) {
  auto b = sheared_blowup(graphs::complete(2), 2);
  EXPECT_EQ(b.graph.order(), 4);
  EXPECT_EQ(b.graph.size(), 4u);
  EXPECT_EQ(b.graph, graphs::cycle(4));
  EXPECT_EQ(oracle::girth(b.graph), 4);
  for (Vertex v = 0; v < 4; ++v) EXPECT_EQ(b.graph.degree(v), 2);
  EXPECT_EQ(sheared_blowup(graphs::empty(1), 3).graph, graphs::complete(3));
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Graph g = random_graph(7, 0.4, seed);
    for (int ell = 1; ell <= 4; ++ell) {
      auto s = sheared_blowup(g, ell, Placement::seeded(seed));
      EXPECT_EQ(s.graph.size(),
                static_cast<std::size_t>(7 * ell * (ell - 1) / 2) + g.size() * static_cast<std::size_t>(ell * (ell - 1)));
      EXPECT_TRUE(is_subgraph(s.graph, complete_blowup(g, ell).graph));
    }
  }
}

TEST(BlowUp, CompleteAndLr) {
  EXPECT_EQ(complete_blowup(graphs::complete(2), 2).graph, graphs::complete(4));
  // Three K_2 cliques plus two full K_{2,2} links.
  EXPECT_EQ(complete_blowup(graphs::path(3), 2).graph.size(), 11u);
  EXPECT_EQ(lr_blowup(graphs::complete(2), 3, 3, Placement::seeded(5)).graph, complete_blowup(graphs::complete(2), 3).graph);
  auto lr = lr_blowup(graphs::complete(2), 4, 2);
  EXPECT_EQ(lr.graph.order(), 8);
  EXPECT_EQ(lr.graph.size(), 16u);
  EXPECT_THROW(lr_blowup(graphs::complete(2), 2, 3), PreconditionError);
}

TEST(BlowUp, ShearedContainsHalfBiclique) {
  // K_{l,l} minus a perfect matching holds K_{r,r} exactly when 2r <= l.
  auto has_krr = [](const BlowUp& s, int ell, int r) {
    std::vector<std::uint64_t> rows(ell, 0);
    for (int i = 0; i < ell; ++i)
      for (int j = 0; j < ell; ++j)
        if (s.graph.has_edge(s.map.vertex(0, i), s.map.vertex(1, j))) rows[i] |= std::uint64_t{1} << j;
    for (std::uint64_t left = 0; left < (std::uint64_t{1} << ell); ++left) {
      if (__builtin_popcountll(left) != r) continue;
      std::uint64_t common = (std::uint64_t{1} << ell) - 1;
      for (int i = 0; i < ell; ++i)
        if (left >> i & 1) common &= rows[i];
      if (__builtin_popcountll(common) >= r) return true;
    }
    return false;
  };
  for (int ell = 2; ell <= 7; ++ell) {
    auto s = sheared_blowup(graphs::complete(2), ell, Placement::seeded(static_cast<std::uint64_t>(ell)));
    EXPECT_TRUE(has_krr(s, ell, ell / 2)) << ell;
    EXPECT_FALSE(has_krr(s, ell, ell / 2 + 1)) << ell;
  }
}

TEST(BlowUp, MapInvariants) {
  Graph g = random_graph(6, 0.5, 11);
  auto b = lr_blowup(g, 4, 2, Placement::seeded(3));
  std::vector<int> seen(b.graph.order(), 0);
  for (Vertex v = 0; v < g.order(); ++v) {
    ASSERT_EQ(b.map.clique_of[v].size(), 4u);
    for (Vertex x : b.map.clique_of[v]) {
      ++seen[x];
      EXPECT_EQ(b.map.owner(x), v);
    }
  }
  for (int s : seen) EXPECT_EQ(s, 1);
  for (const Edge& e : b.graph.edges()) {
    Vertex ou = b.map.owner(e.u), ov = b.map.owner(e.v);
    EXPECT_TRUE(ou == ov || g.has_edge(ou, ov));
  }
  auto sh = sheared_blowup(g, 4, Placement::seeded(9));
  for (const auto& link : sh.map.links) {
    std::vector<int> m = link.matching;
    std::sort(m.begin(), m.end());
    for (int i = 0; i < 4; ++i) EXPECT_EQ(m[i], i);
  }
}

TEST(Girth, KnownGraphs) {
  EXPECT_EQ(girth(graphs::cycle(5)), 5);
  EXPECT_EQ(girth(graphs::path(9)), kInfiniteGirth);
  EXPECT_EQ(girth(graphs::star(4)), kInfiniteGirth);
  EXPECT_EQ(girth(graphs::petersen()), 5);
  EXPECT_EQ(oracle::girth(graphs::petersen()), 5);
}

TEST(Girth, MatchesOracleAndShortestCycle) {
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    Graph g = random_graph(5 + static_cast<int>(seed % 20), 0.15 + 0.01 * (seed % 10), seed);
    int want = oracle::girth(g);
    int got = girth(g);
    EXPECT_EQ(got == kInfiniteGirth ? oracle::kInf : got, want);
    for (int bound = 3; bound <= 8; ++bound) {
      EXPECT_EQ(girth(g) > bound, !has_cycle_at_most(g, bound));
      auto c = shortest_cycle(g, bound);
      EXPECT_EQ(c.has_value(), has_cycle_at_most(g, bound));
      if (c) {
        EXPECT_EQ(static_cast<int>(c->size()), got);
        for (std::size_t i = 0; i < c->size(); ++i) EXPECT_TRUE(g.has_edge((*c)[i], (*c)[(i + 1) % c->size()]));
      }
    }
  }
}

TEST(Neighborhood, Examples) {
  EXPECT_EQ(neighborhood(graphs::complete(3), std::vector<Vertex>{0}), (VertexSet{1, 2}));
  EXPECT_TRUE(neighborhood(graphs::complete(3), std::vector<Vertex>{}).empty());
  EXPECT_EQ(neighborhood(graphs::cycle(6), std::vector<Vertex>{0, 3}), (VertexSet{1, 2, 4, 5}));
  EXPECT_EQ(neighborhood(graphs::complete(3), std::vector<Vertex>{0, 1}), (VertexSet{0, 1, 2}));
}

TEST(Tree, FromParentsValidates) {
  EXPECT_THROW(RootedTree::from_parents({0, 0, 3, 2}), GraphError);
  EXPECT_THROW(RootedTree::from_parents({1, 0}), GraphError);
  EXPECT_THROW(RootedTree::from_parents({0, 1}), GraphError);
  auto t = RootedTree::from_parents({0, 0, 1, 1});
  EXPECT_EQ(t.depth(3), 2);
  EXPECT_EQ(t.max_degree(), 3);
}

TEST(Tree, RandomBoundedDegree) {
  EXPECT_EQ(random_bounded_degree_tree(1, 2, 0).order(), 1);
  EXPECT_THROW(random_bounded_degree_tree(3, 1, 0), PreconditionError);
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    int n = 1 + static_cast<int>(seed % 30);
    int delta = 2 + static_cast<int>(seed % 3);
    auto t = random_bounded_degree_tree(n, delta, seed);
    Graph g = t.as_graph();
    ASSERT_EQ(static_cast<int>(g.size()), n - 1);
    ASSERT_TRUE(is_connected(g));
    ASSERT_LE(g.max_degree(), delta);
    if (delta == 2) {
      for (Vertex v = 0; v < n; ++v) ASSERT_LE(g.degree(v), 2);
    }
  }
}

TEST(Rng, DeterministicStreams) {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    auto x = a();
    EXPECT_EQ(x, b());
    (void)c();
  }
  EXPECT_NE(Rng(1)(), Rng(2)());
  EXPECT_NE(derive_seed(1, 2, 3), derive_seed(1, 2, 4));
  Rng r(5);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_LT(r.uniform(7), 7u);
    double u = r.unit();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(Rational, ParseAndOrder) {
  EXPECT_EQ(Rational::parse("0.125"), Rational(1, 8));
  EXPECT_EQ(Rational::parse("-2/7"), Rational(-2, 7));
  EXPECT_EQ(Rational::parse("1e-3"), Rational(1, 1000));
  EXPECT_EQ(Rational::parse("2.5e2"), Rational(250));
  EXPECT_LT(Rational(1, 3), Rational(1, 2));
  EXPECT_EQ(Rational(7, 2).floor(), 3);
  EXPECT_EQ(Rational(-7, 2).floor(), -4);
  EXPECT_EQ(Rational(-7, 2).ceil(), -3);
  EXPECT_THROW(Rational::parse("x"), Error);
}
