#include <gtest/gtest.h>

#include <algorithm>

#include "forge/blowup.hpp"
#include "forge/errors.hpp"
#include "forge/power_embed.hpp"
#include "forge/rng.hpp"
#include "support/oracles.hpp"

using namespace forge;

namespace {

RootedTree example_tree() {
  std::vector<Vertex> parent(21, 0);
  const std::pair<int, int> links[] = {{1, 0},  {2, 0},  {3, 1},   {4, 1},   {6, 3},   {7, 3},   {9, 6},
                                       {12, 9}, {15, 12}, {18, 15}, {20, 18}, {10, 7},  {5, 2},   {8, 5},
                                       {11, 8}, {13, 11}, {14, 11}, {16, 13}, {19, 16}, {17, 14}};
  for (auto [child, par] : links) parent[child] = par;
  return RootedTree::from_parents(parent);
}

Embedding identity(int n) {
  Embedding e;
  for (int i = 0; i < n; ++i) e.map.push_back(i);
  return e;
}

std::vector<Vertex> tree_vertices(const AuxTree& a) {
  std::vector<Vertex> out;
  for (std::size_t x = 1; x < a.vertex_map.size(); ++x) out.push_back(a.vertex_map[x]);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<Vertex, Vertex>> tree_edges(const AuxTree& a) {
  std::vector<std::pair<Vertex, Vertex>> out;
  for (Vertex x = 1; x < a.aux.order(); ++x) out.emplace_back(a.vertex_map[a.aux.parent(x)], a.vertex_map[x]);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(Descendants, Examples) {
  RootedTree t = example_tree();
  EXPECT_EQ(descendants_within(t, 5, 0), (VertexSet{5}));
  EXPECT_EQ(descendants_within(t, 9, 1), (VertexSet{9, 12}));
  EXPECT_EQ(descendants_within(t, 0, 2), (VertexSet{0, 1, 2, 3, 4, 5}));
  EXPECT_THROW(descendants_within(t, 21, 1), PreconditionError);
}

TEST(Descendants, DegreeBound) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const int delta = 2 + static_cast<int>(seed % 3);
    RootedTree t = random_bounded_degree_tree(30, delta, seed);
    for (Vertex v = 0; v < t.order(); v += 3) {
      for (int i = 0; i <= 3; ++i) {
        std::int64_t bound = 0, term = 1;
        for (int j = 0; j <= i; ++j, term *= delta) bound += term;
        EXPECT_LE(static_cast<std::int64_t>(descendants_within(t, v, i).size()), bound);
      }
    }
  }
}

TEST(AuxiliaryTree, TwentyOneVertexExample) {
  AuxTree a = auxiliary_tree(example_tree(), 2);
  EXPECT_EQ(tree_vertices(a), (std::vector<Vertex>{0, 9, 10, 11, 20}));
  EXPECT_EQ(a.vertex_map[0], -1);
  EXPECT_EQ(tree_edges(a), (std::vector<std::pair<Vertex, Vertex>>{{-1, 0}, {0, 9}, {0, 10}, {0, 11}, {9, 20}}));
  EXPECT_EQ(a.dplus[a.aux_of[9]], (VertexSet{9, 12}));
  EXPECT_EQ(a.dminus[a.aux_of[9]], (VertexSet{15, 18}));
  EXPECT_TRUE(aux_tree_violations(a).empty());
  auto j = to_json(a);
  EXPECT_EQ(j["dplus"]["9"], nlohmann::json::array({9, 12}));
}

TEST(AuxiliaryTree, SmallCases) {
  AuxTree single = auxiliary_tree(RootedTree::from_parents({0}), 1);
  EXPECT_EQ(single.aux.order(), 2);
  EXPECT_EQ(tree_edges(single), (std::vector<std::pair<Vertex, Vertex>>{{-1, 0}}));
  for (int k = 1; k <= 3; ++k) {
    AuxTree p = auxiliary_tree(RootedTree::from_graph(graphs::path(4 * k + 1)), k);
    EXPECT_EQ(tree_edges(p), (std::vector<std::pair<Vertex, Vertex>>{{-1, 0}, {0, 2 * k}, {2 * k, 4 * k}}));
  }
  EXPECT_THROW(auxiliary_tree(RootedTree::from_parents({0}), 0), PreconditionError);
}

TEST(AuxiliaryTree, InvariantsOnRandomTrees) {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const int n = 1 + static_cast<int>(seed % 40);
    const int delta = 2 + static_cast<int>((seed / 40) % 3);
    const int k = 1 + static_cast<int>(seed % 3);
    AuxTree a = auxiliary_tree(random_bounded_degree_tree(n, delta, seed), k);
    EXPECT_TRUE(aux_tree_violations(a).empty()) << seed << ": " << aux_tree_violations(a).front();
  }
}

TEST(AuxiliaryTree, DistantBlocksAreFarApart) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const int k = 1 + static_cast<int>(seed % 2);
    RootedTree t = random_bounded_degree_tree(40, 3, seed);
    AuxTree a = auxiliary_tree(t, k);
    const auto dist = oracle::floyd_warshall(t.as_graph());
    const auto aux_dist = oracle::floyd_warshall(a.aux.as_graph());
    for (Vertex x = 1; x < a.aux.order(); ++x) {
      for (Vertex y = x + 1; y < a.aux.order(); ++y) {
        if (aux_dist[x][y] < 2 || a.aux.parent(x) == a.aux.parent(y)) continue;
        int best = oracle::kInf;
        for (Vertex u : descendants_within(t, a.vertex_map[x], 2 * k - 1))
          for (Vertex v : descendants_within(t, a.vertex_map[y], 2 * k - 1)) best = std::min(best, dist[u][v]);
        EXPECT_GE(best, 2 * k + 1) << seed;
      }
    }
  }
}

TEST(PowerEmbed, PathThreeIntoCompleteBlowup) {
  RootedTree t = RootedTree::from_graph(graphs::path(3));
  AuxTree a = auxiliary_tree(t, 1);
  EXPECT_EQ(power_embed_r0(2, 1), 16);
  Graph j = a.aux.as_graph();
  BlowUp b = lr_blowup(j, 16, 16);
  auto res = embed_power_via_blowup(a, j, identity(j.order()), b.graph, b.map);
  EXPECT_TRUE(res.warnings.empty());
  EXPECT_TRUE(verify_embedding(graphs::complete(3), b.graph, res.phi));
}

TEST(PowerEmbed, SingleVertex) {
  RootedTree t = RootedTree::from_parents({0});
  AuxTree a = auxiliary_tree(t, 1);
  Graph j = a.aux.as_graph();
  BlowUp b = lr_blowup(j, 1, 1);
  // One clique vertex is plenty, but the generic room bound asks for 16.
  auto res = embed_power_via_blowup(a, j, identity(2), b.graph, b.map, LiftOptions{true});
  EXPECT_EQ(res.phi.map, (std::vector<Vertex>{0}));
  EXPECT_EQ(res.warnings.size(), 1u);
}

TEST(PowerEmbed, ExhaustiveSmallTrees) {
  int runs = 0;
  for (int n = 1; n <= 6; ++n) {
    for (const auto& edges : oracle::unlabeled_trees(n, 2)) {
      RootedTree t = RootedTree::from_graph(Graph::from_edges(n, edges));
      for (int k = 1; k <= 2; ++k) {
        AuxTree a = auxiliary_tree(t, k);
        const auto r0 = static_cast<int>(power_embed_r0(a.delta(), k));
        Graph j = a.aux.as_graph();
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
          BlowUp b = lr_blowup(j, r0, r0, Placement::seeded(seed));
          auto res = embed_power_via_blowup(a, j, identity(j.order()), b.graph, b.map);
          EXPECT_TRUE(verify_embedding(power(t.as_graph(), k), b.graph, res.phi));
          ++runs;
        }
      }
    }
  }
  EXPECT_GT(runs, 20);
}

TEST(PowerEmbed, RoomShortfall) {
  RootedTree t = RootedTree::from_graph(graphs::path(5));
  AuxTree a = auxiliary_tree(t, 1);
  Graph j = a.aux.as_graph();
  BlowUp b = lr_blowup(j, 2, 1);
  EXPECT_THROW(embed_power_via_blowup(a, j, identity(j.order()), b.graph, b.map), PreconditionError);
  // Desk mode warns, then the lift itself runs out of room on a side.
  LiftOptions desk{true};
  EXPECT_THROW(embed_power_via_blowup(a, j, identity(j.order()), b.graph, b.map, desk), CapacityError);
  // With room on every side the desk run succeeds with a warning.
  BlowUp roomy = lr_blowup(j, 3, 2);
  auto ok = embed_power_via_blowup(a, j, identity(j.order()), roomy.graph, roomy.map, desk);
  EXPECT_FALSE(ok.warnings.empty());
  EXPECT_TRUE(verify_embedding(power(t.as_graph(), 1), roomy.graph, ok.phi));
}

// Any injective map honouring the D+/D- placement rule embeds T^k, not just
// the greedy one.
TEST(PowerEmbed, RandomRuleAbidingMapsEmbed) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const int k = 1 + static_cast<int>(seed % 2);
    RootedTree t = random_bounded_degree_tree(3 + static_cast<int>(seed % 10), 2, seed);
    AuxTree a = auxiliary_tree(t, k);
    const auto r0 = static_cast<int>(power_embed_r0(a.delta(), k));
    Graph j = a.aux.as_graph();
    BlowUp b = lr_blowup(j, r0 + 2, r0, Placement::seeded(seed));
    Rng rng(seed);
    Embedding phi;
    phi.map.assign(static_cast<std::size_t>(t.order()), -1);
    std::vector<char> used(static_cast<std::size_t>(b.graph.order()), 0);
    auto place = [&](Vertex jv, std::vector<int> slots, Vertex v) {
      rng.shuffle(std::span<int>(slots));
      for (int s : slots) {
        const Vertex w = b.map.clique_of[jv][s];
        if (!used[w]) {
          used[w] = 1;
          phi.map[v] = w;
          return;
        }
      }
      FAIL() << "no room";
    };
    for (Vertex x = 1; x < a.aux.order(); ++x) {
      const Vertex y = a.aux.parent(x);
      const auto& link = b.map.links[*j.edge_index(x, y)];
      const bool x_is_u = link.base.u == x;
      for (Vertex u : a.dplus[x]) place(y, x_is_u ? link.side_v : link.side_u, u);
      for (Vertex u : a.dminus[x]) place(x, x_is_u ? link.side_u : link.side_v, u);
    }
    EXPECT_TRUE(verify_embedding(power(t.as_graph(), k), b.graph, phi)) << seed;
  }
}

TEST(BaseLift, PathThree) {
  Graph g = graphs::path(3);
  RootedTree t = RootedTree::from_graph(g);
  BlowUp b = sheared_blowup(power(g, 1), 3);
  auto res = greedy_power_embed_base(t, 1, g, identity(3), b);
  EXPECT_TRUE(verify_embedding(g, b.graph, res.phi));
  EXPECT_EQ(res.phi.map, (std::vector<Vertex>{0, 4, 6}));
}

TEST(BaseLift, StarAtBoundary) {
  for (int delta = 2; delta <= 5; ++delta) {
    Graph star = graphs::star(delta);
    RootedTree t = RootedTree::from_graph(star);
    // The host must also contain the leaf-leaf edges of the square.
    for (int k = 1; k <= 2; ++k) {
      std::int64_t need = 1;
      for (int i = 0; i < k; ++i) need *= delta;
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        BlowUp b = sheared_blowup(power(star, k), static_cast<int>(need + 1), Placement::seeded(seed));
        auto res = greedy_power_embed_base(t, k, star, identity(delta + 1), b);
        EXPECT_TRUE(verify_embedding(power(star, k), b.graph, res.phi));
      }
    }
  }
  Graph star = graphs::star(3);
  BlowUp tight = sheared_blowup(star, 3);
  EXPECT_THROW(greedy_power_embed_base(RootedTree::from_graph(star), 1, star, identity(4), tight), PreconditionError);
}

TEST(BaseLift, SingleVertex) {
  Graph g = graphs::empty(1);
  BlowUp b = sheared_blowup(g, 1);
  auto res = greedy_power_embed_base(RootedTree::from_parents({0}), 1, g, identity(1), b);
  EXPECT_EQ(res.phi.map, (std::vector<Vertex>{0}));
}
