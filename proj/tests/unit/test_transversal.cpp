#include <gtest/gtest.h>

#include <algorithm>
#include <functional>

#include "forge/errors.hpp"
#include "forge/generator.hpp"
#include "forge/rng.hpp"
#include "forge/transversal.hpp"
#include "support/oracles.hpp"

using namespace forge;

namespace {

TransversalSpec round_robin(int order, int ell, std::int64_t target) {
  TransversalSpec spec;
  spec.classes.resize(static_cast<std::size_t>(ell));
  for (int v = 0; v < order; ++v) spec.classes[static_cast<std::size_t>(v % ell)].push_back(v);
  spec.target_length = target;
  return spec;
}

}  // namespace

TEST(TransversalSpec, DZero) {
  TransversalSpec spec = round_robin(6, 3, 3);
  spec.gamma = Rational(1, 6);
  EXPECT_EQ(spec.d0(), Rational(8));
  // gamma = 1/(2l) gives 2 + 8l/(l+1) <= 10.
  for (int ell = 1; ell < 40; ++ell) {
    TransversalSpec s = round_robin(ell, ell, 1);
    s.gamma = Rational(1, 2 * ell);
    EXPECT_LE(s.d0(), Rational(10));
  }
}

TEST(Transversal, CompleteBipartiteAlternates) {
  for (int m = 1; m <= 6; ++m) {
    Graph g = graphs::complete_bipartite(m, m);
    TransversalSpec spec;
    spec.classes.resize(2);
    for (int v = 0; v < m; ++v) spec.classes[0].push_back(v);
    for (int v = m; v < 2 * m; ++v) spec.classes[1].push_back(v);
    spec.target_length = 2 * m;
    auto r = find_transversal_path(g, spec);
    ASSERT_TRUE(r.found());
    EXPECT_EQ(r.path->size(), static_cast<std::size_t>(2 * m));
    EXPECT_TRUE(is_transversal(g, spec, *r.path));
  }
}

TEST(Transversal, NoEdgesBetweenClasses) {
  Graph g = graphs::disjoint_union(graphs::complete(3), graphs::complete(3));
  TransversalSpec spec;
  spec.classes = {{0, 1, 2}, {3, 4, 5}};
  spec.target_length = 2;
  auto r = find_transversal_path(g, spec);
  EXPECT_FALSE(r.found());
  EXPECT_FALSE(r.exhausted);
}

TEST(Transversal, Errors) {
  Graph g = graphs::complete(4);
  TransversalSpec empty_class;
  empty_class.classes = {{0, 1}, {}};
  empty_class.target_length = 2;
  EXPECT_THROW(find_transversal_path(g, empty_class), PreconditionError);
  TransversalSpec overlap;
  overlap.classes = {{0, 1}, {1, 2}};
  overlap.target_length = 2;
  EXPECT_THROW(find_transversal_path(g, overlap), PreconditionError);
}

TEST(Transversal, BudgetTrips) {
  // Long target in a sparse random graph: a tiny budget cannot finish.
  Graph g = sample_gnp(40, 0.1, 3);
  auto r = find_transversal_path(g, round_robin(40, 4, 40), 10);
  EXPECT_FALSE(r.found());
  EXPECT_TRUE(r.exhausted);
  EXPECT_EQ(r.nodes, 10);
}

TEST(Transversal, AgreesWithBruteForceOnTinyGraphs) {
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    const int n = 5 + static_cast<int>(seed % 3);
    Graph g = sample_gnp(n, 0.5, seed);
    const int ell = 2 + static_cast<int>(seed % 2);
    const std::int64_t target = 3 + static_cast<std::int64_t>(seed % 3);
    TransversalSpec spec = round_robin(n, ell, target);
    auto r = find_transversal_path(g, spec);
    // Oracle: does the pattern graph (a path whose vertex i is restricted to
    // class i mod l) embed? Enumerate all injective sequences.
    bool exists = false;
    std::vector<Vertex> seq;
    std::vector<char> used(static_cast<std::size_t>(n), 0);
    std::function<void()> rec = [&] {
      if (exists) return;
      if (static_cast<std::int64_t>(seq.size()) == target) {
        exists = true;
        return;
      }
      const int want = static_cast<int>(seq.size()) % ell;
      for (Vertex v : spec.classes[static_cast<std::size_t>(want)]) {
        if (used[v] || (!seq.empty() && !g.has_edge(seq.back(), v))) continue;
        used[v] = 1;
        seq.push_back(v);
        rec();
        seq.pop_back();
        used[v] = 0;
      }
    };
    rec();
    EXPECT_EQ(r.found(), exists) << seed;
  }
}

TEST(SplitPath, Blocks) {
  auto s = split_path({10, 11, 12, 13, 14, 15}, 3);
  ASSERT_EQ(s.segments.size(), 2u);
  EXPECT_EQ(s.segments[0], (Path{10, 11, 12}));
  EXPECT_EQ(s.segments[1], (Path{13, 14, 15}));
  EXPECT_EQ(split_path({1, 2, 3}, 1).segments.size(), 3u);
  EXPECT_THROW(split_path({1, 2, 3, 4}, 3), PreconditionError);
  for (int ell = 1; ell <= 6; ++ell) {
    Path p;
    for (int i = 0; i < 6 * ell; ++i) p.push_back(i * 7 % 101);
    Path joined;
    for (const auto& q : split_path(p, ell).segments) joined.insert(joined.end(), q.begin(), q.end());
    EXPECT_EQ(joined, p);
  }
}

TEST(Quotient, PathSegments) {
  Graph g = graphs::path(12);
  Path p;
  for (int i = 0; i < 12; ++i) p.push_back(i);
  EXPECT_EQ(quotient_graph(g, split_path(p, 3)), graphs::path(4));
  EXPECT_EQ(quotient_graph(g, split_path({0, 1, 2}, 3)).order(), 1);
  EXPECT_EQ(quotient_graph(g, split_path({0, 1, 2}, 3)).size(), 0u);
}

// With girth(G) > 2l^2 there is at most one G edge between two segments of
// a path, so edge counts between segment sets transfer exactly.
TEST(Quotient, GirthTransfer) {
  int instances = 0;
  for (std::uint64_t seed = 0; seed < 400 && instances < 25; ++seed) {
    const int ell = 2;
    // A path with a few long chords.
    const Graph base = graphs::path(40);
    std::vector<Edge> edges(base.edges().begin(), base.edges().end());
    Rng rng(seed);
    for (int c = 0; c < 4; ++c) {
      const auto u = static_cast<Vertex>(rng.uniform(40)), v = static_cast<Vertex>(rng.uniform(40));
      if (std::abs(u - v) >= 12) edges.push_back(make_edge(u, v));
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    Graph g = Graph::from_edges(40, edges);
    if (girth(g) <= 2 * ell * ell) continue;
    TransversalSpec spec = round_robin(40, ell, 16);
    auto r = find_transversal_path(g, spec, 20000);
    if (!r.found()) continue;
    ++instances;
    auto s = split_path(*r.path, ell);
    Graph h = quotient_graph(g, s);
    const int m = h.order();
    for (Vertex i = 0; i < m; ++i) {
      for (Vertex j = i + 1; j < m; ++j) {
        std::int64_t cross = 0;
        for (Vertex u : s.segments[i])
          for (Vertex v : s.segments[j]) cross += g.has_edge(u, v);
        EXPECT_LE(cross, 1);
        EXPECT_EQ(cross == 1, h.has_edge(i, j));
      }
    }
    // e_H'(X,Y) = e_G(X_G, Y_G) over all disjoint index-set pairs.
    for (std::uint32_t xm = 1; xm < (1u << m); ++xm) {
      for (std::uint32_t ym = xm + 1; ym < (1u << m); ++ym) {
        if (xm & ym) continue;
        std::int64_t eh = 0, eg = 0;
        for (Vertex i = 0; i < m; ++i)
          for (Vertex j = 0; j < m; ++j) {
            if (!((xm >> i) & 1) || !((ym >> j) & 1)) continue;
            eh += h.has_edge(i, j);
            for (Vertex u : s.segments[i])
              for (Vertex v : s.segments[j]) eg += g.has_edge(u, v);
          }
        EXPECT_EQ(eh, eg);
      }
    }
  }
  EXPECT_GE(instances, 5);
}

TEST(SegmentedPathJson, Shape) {
  auto j = to_json(split_path({4, 5, 6, 7}, 2));
  EXPECT_EQ(j["ell"], 2);
  EXPECT_EQ(j["segments"][1], nlohmann::json::array({6, 7}));
}
