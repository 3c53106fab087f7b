#include "forge/ramsey.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <set>

#include <boost/multiprecision/cpp_int.hpp>

#include "forge/errors.hpp"
#include "forge/generator.hpp"
#include "forge/graph_io.hpp"
#include "forge/power_embed.hpp"
#include "forge/rng.hpp"
#include "forge/transversal.hpp"

namespace forge {

namespace {

using Bits = std::vector<std::uint64_t>;

void set_bit(Bits& b, int i) { b[static_cast<std::size_t>(i) >> 6] |= std::uint64_t{1} << (i & 63); }
void clear_bit(Bits& b, int i) { b[static_cast<std::size_t>(i) >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
int popcount(const Bits& b) {
  int c = 0;
  for (auto w : b) c += std::popcount(w);
  return c;
}

int chi_at(const Graph& host, const Coloring& chi, Vertex u, Vertex v) {
  const auto idx = host.edge_index(u, v);
  return idx ? chi.colors[*idx] : -1;
}

// Lexicographically least t-clique (by position) in the graph given as bit
// rows; branch and bound on the remaining candidate count.
bool least_clique(const std::vector<Bits>& adj, Bits cand, int t, std::vector<int>& chosen) {
  if (static_cast<int>(chosen.size()) == t) return true;
  const int need = t - static_cast<int>(chosen.size());
  for (std::size_t w = 0; w < cand.size(); ++w) {
    while (cand[w]) {
      if (popcount(cand) < need) return false;
      const int i = static_cast<int>(w * 64) + std::countr_zero(cand[w]);
      clear_bit(cand, i);
      Bits next = cand;
      for (std::size_t q = 0; q < next.size(); ++q) next[q] &= adj[static_cast<std::size_t>(i)][q];
      chosen.push_back(i);
      if (least_clique(adj, std::move(next), t, chosen)) return true;
      chosen.pop_back();
    }
  }
  return false;
}

int colour_after_removing(int c, int blue) { return c < blue ? c : c - 1; }

std::uint64_t level_seed(std::uint64_t seed, int level) { return derive_seed(seed, 100 + static_cast<std::uint64_t>(level), 0); }

}  // namespace

BlowUp level_host(const Graph& g, int r, int ell) {
  if (r < 1 || ell < 1) throw PreconditionError("level host needs r >= 1 and l >= 1");
  return sheared_blowup(power(g, r), ell);
}

std::optional<std::vector<Vertex>> find_mono_clique(const Graph& host, const Coloring& chi,
                                                    std::span<const Vertex> clique, int t, int color) {
  if (t <= 0) return std::vector<Vertex>{};
  const int m = static_cast<int>(clique.size());
  if (t > m) return std::nullopt;
  const std::size_t words = (static_cast<std::size_t>(m) + 63) / 64;
  std::vector<Bits> adj(static_cast<std::size_t>(m), Bits(words, 0));
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (chi_at(host, chi, clique[i], clique[j]) == color) {
        set_bit(adj[static_cast<std::size_t>(i)], j);
        set_bit(adj[static_cast<std::size_t>(j)], i);
      }
  Bits all(words, 0);
  for (int i = 0; i < m; ++i) set_bit(all, i);
  std::vector<int> chosen;
  if (!least_clique(adj, all, t, chosen)) return std::nullopt;
  std::vector<Vertex> out;
  for (int i : chosen) out.push_back(clique[static_cast<std::size_t>(i)]);
  return out;
}

std::optional<MonoClique> mono_clique_in_clique(const Graph& host, const Coloring& chi,
                                                std::span<const Vertex> clique, int t) {
  for (int c = 0; c < chi.s; ++c) {
    if (auto v = find_mono_clique(host, chi, clique, t, c)) return MonoClique{c, std::move(*v)};
  }
  return std::nullopt;
}

RamseyState build_majority_j(const BlowUp& host, const Coloring& chi, int t, int r0) {
  if (chi.colors.size() != host.graph.size()) throw PreconditionError("majority: colouring does not match the host");
  if (t < 1 || r0 < 1) throw PreconditionError("majority: t and r0 must be positive");
  const int nbase = static_cast<int>(host.map.clique_of.size());
  const int s = chi.s;
  RamseyState st;
  st.available.assign(static_cast<std::size_t>(s), 0);
  std::vector<std::vector<std::optional<std::vector<Vertex>>>> found(static_cast<std::size_t>(s));
  for (int c = 0; c < s; ++c) {
    auto& row = found[static_cast<std::size_t>(c)];
    row.resize(static_cast<std::size_t>(nbase));
    for (int w = 0; w < nbase; ++w) {
      row[static_cast<std::size_t>(w)] = find_mono_clique(host.graph, chi, host.map.clique_of[static_cast<std::size_t>(w)], t, c);
      if (row[static_cast<std::size_t>(w)]) ++st.available[static_cast<std::size_t>(c)];
    }
  }
  int without = 0;
  for (int w = 0; w < nbase; ++w) {
    bool any = false;
    for (int c = 0; c < s; ++c) any = any || found[static_cast<std::size_t>(c)][static_cast<std::size_t>(w)].has_value();
    without += !any;
  }
  if (without > 0) {
    st.warnings.push_back(std::to_string(without) + " cliques hold no monochromatic " + std::to_string(t) +
                          "-clique (l' below r_s(t))");
  }
  st.blue = static_cast<int>(std::max_element(st.available.begin(), st.available.end()) - st.available.begin());
  st.w_index.assign(static_cast<std::size_t>(nbase), -1);
  for (int w = 0; w < nbase; ++w) {
    auto& c = found[static_cast<std::size_t>(st.blue)][static_cast<std::size_t>(w)];
    if (!c) continue;
    st.w_index[static_cast<std::size_t>(w)] = static_cast<int>(st.w.size());
    st.w.push_back(w);
    st.j_map.clique_of.push_back(std::move(*c));
  }
  if (static_cast<std::int64_t>(st.w.size()) * s < nbase) {
    throw StageFailure("majority", "|W| = " + std::to_string(st.w.size()) + " < |V(G)|/s = " + std::to_string(nbase) +
                                       "/" + std::to_string(s));
  }
  st.j_map.clique_size = t;

  std::vector<Edge> jedges;
  const std::size_t words = (static_cast<std::size_t>(t) + 63) / 64;
  for (const auto& link : host.map.links) {
    const int ju = st.w_index[static_cast<std::size_t>(link.base.u)];
    const int jv = st.w_index[static_cast<std::size_t>(link.base.v)];
    if (ju < 0 || jv < 0) continue;
    const auto& cu = st.j_map.clique_of[static_cast<std::size_t>(ju)];
    const auto& cv = st.j_map.clique_of[static_cast<std::size_t>(jv)];
    std::vector<Bits> rows(cu.size(), Bits(words, 0));
    std::int64_t blue_edges = 0;
    for (std::size_t i = 0; i < cu.size(); ++i)
      for (std::size_t q = 0; q < cv.size(); ++q)
        if (chi_at(host.graph, chi, cu[i], cv[q]) == st.blue) {
          set_bit(rows[i], static_cast<int>(q));
          ++blue_edges;
        }
    auto bic = find_biclique(rows, static_cast<int>(cv.size()), r0, r0);
    if (bic) {
      jedges.push_back(Edge{ju, jv});
      BlowUpMap::Link l;
      l.base = Edge{ju, jv};
      l.side_u = bic->first;
      l.side_v = bic->second;
      st.j_map.links.push_back(std::move(l));
    } else {
      // No blue K_{r0,r0}: the KST theorem caps the blue edges at 4 t^{2-1/r0}.
      namespace mp = boost::multiprecision;
      const mp::cpp_int lhs = mp::pow(mp::cpp_int(blue_edges), static_cast<unsigned>(r0));
      const mp::cpp_int rhs = mp::pow(mp::cpp_int(4), static_cast<unsigned>(r0)) *
                              mp::pow(mp::cpp_int(t), static_cast<unsigned>(2 * r0 - 1));
      ++st.kst_checked;
      if (lhs > rhs) {
        st.warnings.push_back("KST bound exceeded between W vertices " + std::to_string(link.base.u) + " and " +
                              std::to_string(link.base.v));
      }
    }
  }
  std::vector<std::size_t> order(jedges.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return jedges[a] < jedges[b]; });
  std::vector<BlowUpMap::Link> links;
  for (std::size_t i : order) links.push_back(std::move(st.j_map.links[i]));
  st.j_map.links = std::move(links);
  st.j = Graph::from_unique_edges(static_cast<int>(st.w.size()), std::move(jedges));
  return st;
}

LllResult lll_select(const LllProblem& problem, std::uint64_t seed, std::int64_t max_resamples) {
  const std::size_t nv = problem.candidates.size();
  for (const auto& c : problem.candidates)
    if (c.empty()) throw PreconditionError("lll: a variable has no candidates");
  std::vector<std::vector<int>> incident(nv);
  for (std::size_t e = 0; e < problem.events.size(); ++e) {
    const auto [u, v] = problem.events[e];
    if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= nv || static_cast<std::size_t>(v) >= nv || u == v) {
      throw PreconditionError("lll: event " + std::to_string(e) + " names invalid variables");
    }
    incident[static_cast<std::size_t>(u)].push_back(static_cast<int>(e));
    incident[static_cast<std::size_t>(v)].push_back(static_cast<int>(e));
  }
  Rng rng(seed);
  LllResult out;
  out.events = static_cast<std::int64_t>(problem.events.size());
  out.choice.resize(nv);
  auto draw = [&](std::size_t v) {
    const auto& c = problem.candidates[v];
    out.choice[v] = c[rng.uniform(c.size())];
  };
  for (std::size_t v = 0; v < nv; ++v) draw(v);
  auto violated_now = [&](int e) {
    const auto [u, v] = problem.events[static_cast<std::size_t>(e)];
    return problem.bad(out.choice[static_cast<std::size_t>(u)], out.choice[static_cast<std::size_t>(v)]);
  };
  std::set<int> violated;
  for (int e = 0; e < static_cast<int>(problem.events.size()); ++e)
    if (violated_now(e)) violated.insert(e);
  while (!violated.empty() && out.resamples < max_resamples) {
    const int e = *violated.begin();
    const auto [u, v] = problem.events[static_cast<std::size_t>(e)];
    draw(static_cast<std::size_t>(u));
    draw(static_cast<std::size_t>(v));
    ++out.resamples;
    for (int var : {u, v})
      for (int f : incident[static_cast<std::size_t>(var)]) {
        if (violated_now(f))
          violated.insert(f);
        else
          violated.erase(f);
      }
  }
  out.converged = violated.empty();
  return out;
}

double lll_condition(double b, int r, double ell, double t, int r0) {
  const double lb = std::log(b) * (r + 1);
  const double ll = std::log(ell);
  const double hi = std::max(lb, ll), lo = std::min(lb, ll);
  const double log_sum = ll + hi + std::log1p(std::exp(lo - hi));  // ln(l (b^{r+1} + l))
  return std::exp(std::log(40.0) + log_sum - std::log(t) / r0);
}

bool verify_monochromatic_copy(const Graph& pattern, const Graph& host, const Coloring& chi, const Embedding& m,
                               int color) {
  if (chi.colors.size() != host.size()) return false;
  if (!verify_embedding(pattern, host, m)) return false;
  for (const Edge& e : pattern.edges()) {
    if (chi_at(host, chi, m.map[static_cast<std::size_t>(e.u)], m.map[static_cast<std::size_t>(e.v)]) != color) return false;
  }
  return true;
}

LevelParams level_params(const ConstantSet& cs, int level) {
  const auto& l = cs.level(level);
  auto small = [&](const Quantity& q, const char* name, std::int64_t cap) {
    const std::int64_t v = cs.integer(q, std::string(name) + "_" + std::to_string(level));
    if (v < 1 || v > cap) {
      throw PreconditionError(std::string(name) + "_" + std::to_string(level) + " = " + std::to_string(v) +
                              " is outside the executable range [1, " + std::to_string(cap) + "]");
    }
    return v;
  };
  LevelParams p;
  p.level = level;
  p.r = static_cast<int>(small(l.r, "r", 1 << 16));
  p.ell = static_cast<int>(small(l.ell, "l", 1 << 16));
  p.a = small(l.a, "a", 1 << 20);
  p.b = cs.value(l.b, "b_" + std::to_string(level));
  p.c = cs.value(l.c, "c_" + std::to_string(level));
  p.theta = cs.value(l.theta, "theta_" + std::to_string(level));
  if (l.step) {
    p.t = static_cast<int>(small(l.step->t, "t", 1 << 16));
    p.r0 = static_cast<int>(l.step->r0);
    if (p.r0 < 1 || p.r0 > p.t) throw PreconditionError("r0_" + std::to_string(level) + " must lie in [1, t]");
    p.c_star = cs.value(l.step->c_star, "c*_" + std::to_string(level));
    p.d0 = l.step->d0;
    p.eta = cs.value(l.step->eta, "eta_" + std::to_string(level));
  }
  return p;
}

std::string to_string(ChainLink::Kind kind) {
  switch (kind) {
    case ChainLink::Kind::kReduced: return "reduced";
    case ChainLink::Kind::kMonochromatic: return "monochromatic";
    case ChainLink::Kind::kBase: return "base";
    case ChainLink::Kind::kFailure: return "failure";
  }
  return "failure";
}

namespace {

ChainLink::Kind kind_from_string(const std::string& s) {
  for (auto k : {ChainLink::Kind::kReduced, ChainLink::Kind::kMonochromatic, ChainLink::Kind::kBase,
                 ChainLink::Kind::kFailure})
    if (to_string(k) == s) return k;
  throw ParseError(0, "unknown link kind '" + s + "'");
}

nlohmann::json decomp_summary(const DecompResult& d) {
  nlohmann::json parts = nlohmann::json::array();
  for (const auto& p : d.parts) parts.push_back(p.size());
  return {{"kind", d.kind == DecompResult::Kind::kExpander ? "expander" : "separated-sets"},
          {"z_size", d.z.size()},
          {"part_sizes", parts},
          {"rounds", d.rounds},
          {"heuristic", d.heuristic},
          {"certification", to_json(d.certification)},
          {"violations", d.violations}};
}

Graph blue_subgraph(const Graph& host, const Coloring& chi, int blue) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < host.size(); ++i)
    if (chi.colors[i] == blue) edges.push_back(host.edges()[i]);
  return Graph::from_unique_edges(host.order(), std::move(edges));
}

// Colour shared by every image edge of T^k, or -1 if there is none.
int copy_color(const Graph& pattern, const Graph& host, const Coloring& chi, const Embedding& phi) {
  if (pattern.size() == 0) return 0;
  const Edge& e = pattern.edges()[0];
  return chi_at(host, chi, phi.map[static_cast<std::size_t>(e.u)], phi.map[static_cast<std::size_t>(e.v)]);
}

StepResult blue_branch(const BlowUp& host, const Coloring& chi, const RamseyState& st, const DecompResult& decomp,
                       const RootedTree& tree, int k, const EngineOptions& options, nlohmann::json& trace) {
  trace["branch"] = "blue";
  const AuxTree aux = auxiliary_tree(tree, k);
  std::optional<Embedding> et;
  std::vector<std::string> warnings;
  if (static_cast<int>(decomp.z.size()) >= aux.aux.order()) {
    const InducedSubgraph jz = induced_subgraph(st.j, decomp.z);
    auto r = embed_tree(aux.aux, jz.graph, options.search_budget);
    if (r.found()) {
      Embedding m;
      for (Vertex v : r.embedding->map) m.map.push_back(jz.original[static_cast<std::size_t>(v)]);
      et = std::move(m);
    }
  }
  if (!et) {
    // J[Z] is a subgraph of J, so a copy of T' in J serves the lift equally.
    warnings.push_back("T' not found in J[Z] (|Z| = " + std::to_string(decomp.z.size()) + "); searched all of J");
    if (st.j.order() >= aux.aux.order()) {
      auto r = embed_tree(aux.aux, st.j, options.search_budget);
      if (r.found()) et = *r.embedding;
    }
  }
  if (!et) throw StageFailure("blue-branch", "no copy of T' in J");
  const Graph blue = blue_subgraph(host.graph, chi, st.blue);
  LiftResult lift = embed_power_via_blowup(aux, st.j, *et, blue, st.j_map, LiftOptions{options.desk});
  for (auto& w : lift.warnings) warnings.push_back(std::move(w));
  const Graph tk = power(tree.as_graph(), k);
  if (!verify_monochromatic_copy(tk, host.graph, chi, lift.phi, st.blue)) {
    throw StageFailure("blue-branch", "lifted copy is not blue in the host");
  }
  StepResult out;
  out.link.kind = ChainLink::Kind::kMonochromatic;
  out.link.blue = st.blue;
  out.link.color = st.blue;
  out.link.phi = std::move(lift.phi);
  trace["t_prime_embedding"] = et->map;
  trace["branch_warnings"] = warnings;
  out.link.trace = trace;
  return out;
}

StepResult gray_branch_impl(const Graph& g, const BlowUp& host, const Coloring& chi, const RamseyState& st,
                            const std::vector<VertexSet>& parts, std::int64_t n, const LevelParams& here,
                            const LevelParams& below, std::uint64_t seed, const EngineOptions& options,
                            nlohmann::json& trace) {
  trace["branch"] = "gray";
  const int ell = below.ell;
  if (static_cast<int>(parts.size()) != ell) {
    throw PreconditionError("gray-branch: expected " + std::to_string(ell) + " parts, got " + std::to_string(parts.size()));
  }
  std::vector<std::string> violations;

  // Transversal path in G' = G[V_1 u ... u V_l].
  VertexSet keep;
  for (const auto& p : parts)
    for (Vertex jv : p) keep.push_back(st.w.at(static_cast<std::size_t>(jv)));
  std::sort(keep.begin(), keep.end());
  const InducedSubgraph gp = induced_subgraph(g, keep);
  std::vector<int> local(static_cast<std::size_t>(g.order()), -1);
  for (std::size_t i = 0; i < gp.original.size(); ++i) local[static_cast<std::size_t>(gp.original[i])] = static_cast<int>(i);
  TransversalSpec spec;
  for (const auto& p : parts) {
    VertexSet cls;
    for (Vertex jv : p) cls.push_back(local[static_cast<std::size_t>(st.w[static_cast<std::size_t>(jv)])]);
    std::sort(cls.begin(), cls.end());
    spec.classes.push_back(std::move(cls));
  }
  spec.gamma = Rational(1, 2 * ell);
  spec.target_length = 2 * below.a * ell * n;
  const auto tp = find_transversal_path(gp.graph, spec, options.search_budget);
  trace["transversal"] = {{"target", spec.target_length}, {"nodes", tp.nodes}, {"exhausted", tp.exhausted}};
  if (!tp.found()) {
    throw StageFailure("transversal", std::string(tp.exhausted ? "search budget exhausted" : "no transversal path") +
                                          " for length " + std::to_string(spec.target_length));
  }
  Path path;
  for (Vertex v : *tp.path) path.push_back(gp.original[static_cast<std::size_t>(v)]);
  const SegmentedPath seg = split_path(path, ell);
  const Graph hprime = quotient_graph(g, seg);
  trace["path"] = path;

  // H' in P_n(2a, l b', c*, l, l theta').
  PnParams hp_params;
  hp_params.a = Rational(2 * below.a);
  hp_params.b = Rational(ell) * here.b;
  hp_params.c = here.c_star;
  hp_params.ell = Rational(ell);
  hp_params.theta = Rational(ell) * here.theta;
  hp_params.n = n;
  const MembershipReport hp_report = class_membership(hprime, hp_params, options.membership);
  trace["h_prime_membership"] = to_json(hp_report);
  if (!hp_report.passed()) {
    const std::string what = "H' fails P_n(2a, l b', c*, l, l theta') at condition " + std::to_string(hp_report.first_failure);
    if (!options.desk) throw StageFailure("h-prime", what);
    violations.push_back(what);
  }

  // Sparsify with p = 1/l', trim to an vertices, certify.
  PnParams h_params;
  h_params.a = Rational(below.a);
  h_params.b = below.b;
  h_params.c = below.c;
  h_params.ell = Rational(ell);
  h_params.theta = below.theta;
  h_params.n = n;
  const double p = 1.0 / here.ell;
  std::optional<Pruned> chosen;
  std::optional<MembershipReport> chosen_report;
  std::optional<Pruned> first_structural;
  std::optional<MembershipReport> first_structural_report;
  nlohmann::json attempts = nlohmann::json::array();
  for (int attempt = 0; attempt < options.max_retries && !chosen; ++attempt) {
    Rng rng(derive_seed(seed, stage::kSparsify, static_cast<std::uint64_t>(attempt)));
    std::vector<Edge> kept_edges;
    for (const Edge& e : hprime.edges())
      if (rng.bernoulli(p)) kept_edges.push_back(e);
    const Graph hpp = Graph::from_unique_edges(hprime.order(), std::move(kept_edges));
    const auto target = static_cast<int>(below.a * n);
    if (hpp.order() < target) throw StageFailure("sparsify", "H'' has fewer than an vertices");
    Pruned trimmed = trim_to_degree(hpp, target);
    MembershipReport rep = class_membership(trimmed.graph, h_params, options.membership);
    attempts.push_back({{"edges", hpp.size()}, {"first_failure", rep.first_failure}});
    if (rep.passed()) {
      chosen = std::move(trimmed);
      chosen_report = rep;
    } else if (rep.structural_passed() && !first_structural) {
      first_structural = std::move(trimmed);
      first_structural_report = rep;
    }
  }
  trace["sparsify_attempts"] = attempts;
  if (!chosen) {
    if (!options.desk || !first_structural) {
      throw StageFailure("sparsify", "no sparsified H passed P_n(a, b, c, l, theta) in " +
                                         std::to_string(options.max_retries) + " attempts");
    }
    violations.push_back("H accepted on structural conditions only; bijumbledness check failed");
    chosen = std::move(first_structural);
    chosen_report = first_structural_report;
  }
  trace["h_membership"] = to_json(*chosen_report);
  trace["h_params"] = to_json(h_params);
  trace["h_segments"] = chosen->kept;
  const Graph& h = chosen->graph;

  // Template tau: vertex (q, m) of H^r{l} is the m-th vertex of segment q.
  const BlowUp next_host = level_host(h, below.r, ell);
  std::vector<Vertex> tau(static_cast<std::size_t>(next_host.graph.order()));
  for (Vertex q = 0; q < h.order(); ++q)
    for (int m = 0; m < ell; ++m)
      tau[static_cast<std::size_t>(q * ell + m)] =
          seg.segments[static_cast<std::size_t>(chosen->kept[static_cast<std::size_t>(q)])][static_cast<std::size_t>(m)];
  const Graph gr = power(g, here.r);
  std::int64_t too_far = 0, on_j = 0;
  std::string first_problem;
  for (const Edge& e : next_host.graph.edges()) {
    const Vertex gu = tau[static_cast<std::size_t>(e.u)], gv = tau[static_cast<std::size_t>(e.v)];
    if (!gr.has_edge(gu, gv)) {
      if (first_problem.empty())
        first_problem = "G vertices " + std::to_string(gu) + " and " + std::to_string(gv) + " are more than r' apart";
      ++too_far;
    } else if (st.j.has_edge(st.w_index[static_cast<std::size_t>(gu)], st.w_index[static_cast<std::size_t>(gv)])) {
      if (first_problem.empty())
        first_problem = "G vertices " + std::to_string(gu) + " and " + std::to_string(gv) + " span an edge of J";
      ++on_j;
    }
  }
  trace["template"] = {{"edges", next_host.graph.size()}, {"beyond_r_prime", too_far}, {"on_j", on_j}};
  if (too_far + on_j > 0) {
    throw StageFailure("template", std::to_string(too_far) + " template pairs beyond distance r', " +
                                       std::to_string(on_j) + " on J; first: " + first_problem);
  }

  // Moser-Tardos selection of x_u in C'(u).
  LllProblem problem;
  for (Vertex v : tau) problem.candidates.push_back(st.j_map.clique_of[static_cast<std::size_t>(st.w_index[static_cast<std::size_t>(v)])]);
  for (const Edge& e : next_host.graph.edges()) problem.events.emplace_back(e.u, e.v);
  const int blue = st.blue;
  problem.bad = [&](Vertex x, Vertex y) {
    const auto idx = host.graph.edge_index(x, y);
    return !idx || chi.colors[*idx] == blue;
  };
  const double condition = lll_condition(below.b.to_double(), below.r, ell, here.t, here.r0);
  const LllResult lll = lll_select(problem, derive_seed(seed, stage::kLll, 0),
                                   options.lll_factor * std::max<std::int64_t>(1, static_cast<std::int64_t>(problem.events.size())));
  trace["lll"] = {{"condition", condition},
                  {"condition_holds", condition <= 1.0},
                  {"events", lll.events},
                  {"resamples", lll.resamples},
                  {"converged", lll.converged}};
  if (condition > 1.0) violations.push_back("LLL condition 40(b^{r+1} l + l^2) t^{-1/r0} = " + std::to_string(condition) + " > 1");
  if (!lll.converged) throw StageFailure("lll", "resample budget exhausted after " + std::to_string(lll.resamples));

  StepResult out;
  out.link.kind = ChainLink::Kind::kReduced;
  out.link.blue = blue;
  out.link.x = lll.choice;
  out.h = h;
  out.chi_next.s = chi.s - 1;
  out.chi_next.colors.reserve(next_host.graph.size());
  for (const Edge& e : next_host.graph.edges()) {
    const int c = chi_at(host.graph, chi, lll.choice[static_cast<std::size_t>(e.u)], lll.choice[static_cast<std::size_t>(e.v)]);
    if (c < 0 || c == blue) throw StageFailure("lll", "selected copy has a blue or missing edge");
    out.chi_next.colors.push_back(colour_after_removing(c, blue));
  }
  trace["violations_gray"] = violations;
  out.link.trace = trace;
  return out;
}

}  // namespace

StepResult gray_branch(const Graph& g, const BlowUp& host, const Coloring& chi, const RamseyState& state,
                       const std::vector<VertexSet>& parts, std::int64_t n, const LevelParams& here,
                       const LevelParams& below, std::uint64_t seed, const EngineOptions& options) {
  nlohmann::json trace = nlohmann::json::object();
  return gray_branch_impl(g, host, chi, state, parts, n, here, below, seed, options, trace);
}

StepResult induction_step(const Graph& g, const Coloring& chi, const RootedTree& tree, int k, int delta,
                          const LevelParams& here, const LevelParams& below, std::uint64_t seed,
                          const EngineOptions& options) {
  if (here.level < 2 || here.t < 1) throw PreconditionError("induction step needs level >= 2 with step constants");
  const BlowUp host = level_host(g, here.r, here.ell);
  if (chi.colors.size() != host.graph.size()) throw PreconditionError("induction step: colouring does not match G^{r'}{l'}");
  const std::int64_t n = tree.order();
  RamseyState st = build_majority_j(host, chi, here.t, here.r0);

  nlohmann::json trace;
  trace["blue"] = st.blue;
  trace["available"] = st.available;
  trace["w_size"] = st.w.size();
  trace["j_edges"] = st.j.size();
  trace["kst_checked"] = st.kst_checked;
  trace["majority_warnings"] = st.warnings;

  std::int64_t d2k = 1;
  for (int i = 0; i < 2 * k; ++i) d2k *= delta;
  DecompParams params;
  params.f = Rational(2);
  params.d = Rational(d2k + 1);
  params.ell = below.ell;
  params.eta = here.eta;
  params.n = n + 1;
  const DecompResult decomp = decompose_alternatives(st.j, params, DecompOptions{options.expansion, options.desk});
  trace["decomposition"] = decomp_summary(decomp);

  StepResult out;
  try {
    out = decomp.kind == DecompResult::Kind::kExpander
              ? blue_branch(host, chi, st, decomp, tree, k, options, trace)
              : gray_branch_impl(g, host, chi, st, decomp.parts, n, here, below, seed, options, trace);
  } catch (const StageFailure& e) {
    const std::string what = e.what();
    throw TracedFailure(e.stage(), what.substr(std::min(what.size(), e.stage().size() + 2)), trace);
  } catch (const CapacityError& e) {
    throw TracedFailure("capacity", e.what(), trace);
  }
  out.link.level = here.level;
  out.link.g = g;
  out.link.r = here.r;
  out.link.ell = here.ell;
  out.link.chi = chi;
  return out;
}

ChainLink base_case(const Graph& g, const Coloring& chi, const RootedTree& tree, int k, int delta,
                    const LevelParams& here, const EngineOptions& options) {
  if (here.r < k) throw PreconditionError("base case needs r >= k");
  const BlowUp host = level_host(g, here.r, here.ell);
  if (chi.colors.size() != host.graph.size()) throw PreconditionError("base case: colouring does not match G^r{l}");
  const std::int64_t n = tree.order();
  nlohmann::json trace;
  std::vector<std::string> warnings;

  VertexSet z;
  try {
    const ExpandingSubgraph ex = expanding_subgraph_from_bijumbled(g, Rational(2), Rational(delta + 1), here.c,
                                                                   Rational(here.a), here.theta, n,
                                                                   DecompOptions{options.expansion, options.desk});
    z = ex.z;
    trace["decomposition"] = decomp_summary(ex.decomposition);
    trace["hypothesis_violations"] = ex.violations;
  } catch (const ContradictionError& e) {
    if (!options.desk) throw;
    warnings.push_back(std::string("expanding subgraph: ") + e.what());
  }

  std::optional<Embedding> et;
  if (static_cast<int>(z.size()) >= tree.order()) {
    const InducedSubgraph gz = induced_subgraph(g, z);
    auto r = embed_tree(tree, gz.graph, options.search_budget);
    if (r.found()) {
      Embedding m;
      for (Vertex v : r.embedding->map) m.map.push_back(gz.original[static_cast<std::size_t>(v)]);
      et = std::move(m);
    }
  }
  if (!et) {
    warnings.push_back("T not found in G[Z] (|Z| = " + std::to_string(z.size()) + "); searched all of G");
    if (g.order() >= tree.order()) {
      auto r = embed_tree(tree, g, options.search_budget);
      if (r.found()) et = *r.embedding;
    }
  }
  if (!et) throw StageFailure("base-embed", "no copy of T in G");
  trace["tree_embedding"] = et->map;

  const BlowUp bk = here.r == k ? host : level_host(g, k, here.ell);
  LiftResult lift = greedy_power_embed_base(tree, k, g, *et, bk, LiftOptions{options.desk});
  for (auto& w : lift.warnings) warnings.push_back(std::move(w));
  const Graph tk = power(tree.as_graph(), k);
  const int color = copy_color(tk, host.graph, chi, lift.phi);
  if (color < 0 || !verify_monochromatic_copy(tk, host.graph, chi, lift.phi, color)) {
    throw StageFailure("base-lift", "lifted copy of T^k is not monochromatic in G^r{l}");
  }
  trace["warnings"] = warnings;

  ChainLink link;
  link.kind = ChainLink::Kind::kBase;
  link.level = here.level;
  link.g = g;
  link.r = here.r;
  link.ell = here.ell;
  link.chi = chi;
  link.color = color;
  link.phi = std::move(lift.phi);
  link.trace = std::move(trace);
  return link;
}

namespace {

void compose_top(Chain& chain) {
  const ChainLink& last = chain.links.back();
  if (last.kind != ChainLink::Kind::kMonochromatic && last.kind != ChainLink::Kind::kBase) return;
  Embedding phi = last.phi;
  int color = last.color;
  for (std::size_t i = chain.links.size() - 1; i-- > 0;) {
    const ChainLink& l = chain.links[i];
    for (auto& v : phi.map) v = l.x.at(static_cast<std::size_t>(v));
    if (color >= l.blue) ++color;
  }
  chain.top_phi = std::move(phi);
  chain.top_color = color;
}

}  // namespace

Chain run_pipeline(const RootedTree& tree, int k, const ConstantSet& cs, const Graph& g, const Coloring& chi,
                   std::uint64_t seed, const EngineOptions& options) {
  if (cs.k != k) throw PreconditionError("pipeline: constants were derived for k = " + std::to_string(cs.k));
  if (chi.s != cs.s) throw PreconditionError("pipeline: colouring has " + std::to_string(chi.s) + " colours, constants expect " +
                                             std::to_string(cs.s));
  if (tree.max_degree() > cs.delta) throw PreconditionError("pipeline: tree degree exceeds Delta");
  std::vector<LevelParams> params;
  for (int i = 1; i <= cs.s; ++i) params.push_back(level_params(cs, i));

  Chain chain;
  chain.tree = tree;
  chain.k = k;
  chain.delta = cs.delta;
  chain.s = cs.s;
  Graph cur_g = g;
  Coloring cur_chi = chi;
  for (int level = cs.s; level >= 1; --level) {
    const LevelParams& here = params[static_cast<std::size_t>(level - 1)];
    try {
      if (level == 1) {
        chain.links.push_back(base_case(cur_g, cur_chi, tree, k, cs.delta, here, options));
        break;
      }
      StepResult step = induction_step(cur_g, cur_chi, tree, k, cs.delta, here, params[static_cast<std::size_t>(level - 2)],
                                       level_seed(seed, level), options);
      const bool reduced = step.link.kind == ChainLink::Kind::kReduced;
      chain.links.push_back(std::move(step.link));
      if (!reduced) break;
      cur_g = std::move(step.h);
      cur_chi = std::move(step.chi_next);
    } catch (const Error& e) {
      ChainLink fail;
      fail.kind = ChainLink::Kind::kFailure;
      fail.level = level;
      fail.g = cur_g;
      fail.r = here.r;
      fail.ell = here.ell;
      fail.chi = cur_chi;
      if (const auto* sf = dynamic_cast<const StageFailure*>(&e)) {
        fail.stage = sf->stage();
      } else if (dynamic_cast<const CapacityError*>(&e)) {
        fail.stage = "capacity";
      } else {
        fail.stage = "precondition";
      }
      fail.message = e.what();
      if (const auto* tf = dynamic_cast<const TracedFailure*>(&e)) fail.trace = tf->trace();
      chain.links.push_back(std::move(fail));
      break;
    }
  }
  compose_top(chain);
  return chain;
}

nlohmann::json to_json(const Chain& chain) {
  nlohmann::json links = nlohmann::json::array();
  for (const auto& l : chain.links) {
    nlohmann::json j = {{"kind", to_string(l.kind)}, {"level", l.level}, {"r", l.r}, {"ell", l.ell},
                        {"graph", graph_to_json(l.g)}, {"coloring", coloring_to_json(l.chi)}};
    switch (l.kind) {
      case ChainLink::Kind::kReduced:
        j["blue"] = l.blue;
        j["x"] = l.x;
        break;
      case ChainLink::Kind::kMonochromatic:
        j["blue"] = l.blue;
        [[fallthrough]];
      case ChainLink::Kind::kBase:
        j["color"] = l.color;
        j["embedding"] = l.phi.map;
        break;
      case ChainLink::Kind::kFailure:
        j["stage"] = l.stage;
        j["message"] = l.message;
        break;
    }
    j["trace"] = l.trace;
    links.push_back(std::move(j));
  }
  nlohmann::json out = {{"k", chain.k},
                        {"delta", chain.delta},
                        {"s", chain.s},
                        {"tree", {{"parents", chain.tree.parents()}}},
                        {"links", links},
                        {"outcome", chain.succeeded() ? "monochromatic-copy" : "failure"}};
  if (chain.top_phi) out["top"] = {{"color", chain.top_color}, {"embedding", chain.top_phi->map}};
  return out;
}

Chain chain_from_json(const nlohmann::json& j) {
  try {
    Chain c;
    c.k = j.at("k").get<int>();
    c.delta = j.at("delta").get<int>();
    c.s = j.at("s").get<int>();
    c.tree = RootedTree::from_parents(j.at("tree").at("parents").get<std::vector<Vertex>>());
    for (const auto& lj : j.at("links")) {
      ChainLink l;
      l.kind = kind_from_string(lj.at("kind").get<std::string>());
      l.level = lj.at("level").get<int>();
      l.r = lj.at("r").get<int>();
      l.ell = lj.at("ell").get<int>();
      l.g = graph_from_json(lj.at("graph"));
      if (l.r < 1 || l.ell < 1) throw ParseError(0, "link needs r >= 1 and l >= 1");
      l.chi = coloring_from_json(lj.at("coloring"), level_host(l.g, l.r, l.ell).graph);
      if (lj.contains("blue")) l.blue = lj["blue"].get<int>();
      if (lj.contains("x")) l.x = lj["x"].get<std::vector<Vertex>>();
      if (lj.contains("color")) l.color = lj["color"].get<int>();
      if (lj.contains("embedding")) l.phi.map = lj["embedding"].get<std::vector<Vertex>>();
      if (lj.contains("stage")) l.stage = lj["stage"].get<std::string>();
      if (lj.contains("message")) l.message = lj["message"].get<std::string>();
      if (lj.contains("trace")) l.trace = lj["trace"];
      c.links.push_back(std::move(l));
    }
    if (j.contains("top")) {
      c.top_color = j["top"].at("color").get<int>();
      c.top_phi = Embedding{j["top"].at("embedding").get<std::vector<Vertex>>()};
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("bad certificate json: ") + e.what());
  }
}

ChainVerdict verify_chain(const Chain& chain) {
  ChainVerdict v;
  auto fail = [&](const std::string& what) {
    v.valid = false;
    v.problems.push_back(what);
  };
  if (chain.links.empty()) {
    fail("chain has no links");
    return v;
  }
  const Graph tk = power(chain.tree.as_graph(), chain.k);
  std::vector<BlowUp> hosts;
  for (const auto& l : chain.links) hosts.push_back(level_host(l.g, l.r, l.ell));
  for (std::size_t i = 0; i < chain.links.size(); ++i) {
    const ChainLink& l = chain.links[i];
    const std::string where = "link " + std::to_string(i) + " (level " + std::to_string(l.level) + "): ";
    const bool last = i + 1 == chain.links.size();
    if (l.level != chain.s - static_cast<int>(i)) fail(where + "level out of sequence");
    if (l.chi.s > l.level) fail(where + "colouring uses more colours than the level allows");
    if (l.chi.colors.size() != hosts[i].graph.size()) {
      fail(where + "colouring does not match the host");
      continue;
    }
    switch (l.kind) {
      case ChainLink::Kind::kReduced: {
        if (last) {
          fail(where + "reduced link ends the chain");
          break;
        }
        const ChainLink& next = chain.links[i + 1];
        const Graph& nh = hosts[i + 1].graph;
        if (l.blue < 0 || l.blue >= l.chi.s) fail(where + "blue colour out of range");
        if (next.chi.s != l.chi.s - 1) fail(where + "next colouring does not drop a colour");
        if (static_cast<int>(l.x.size()) != nh.order()) {
          fail(where + "selection size does not match the next host");
          break;
        }
        std::vector<char> used(static_cast<std::size_t>(hosts[i].graph.order()), 0);
        bool injective = true;
        for (Vertex x : l.x) {
          if (x < 0 || x >= hosts[i].graph.order() || used[static_cast<std::size_t>(x)]) {
            injective = false;
            break;
          }
          used[static_cast<std::size_t>(x)] = 1;
        }
        if (!injective) {
          fail(where + "selection is not an injective map into the host");
          break;
        }
        for (std::size_t e = 0; e < nh.size(); ++e) {
          const Edge& ed = nh.edges()[e];
          const int c = chi_at(hosts[i].graph, l.chi, l.x[static_cast<std::size_t>(ed.u)], l.x[static_cast<std::size_t>(ed.v)]);
          if (c < 0) {
            fail(where + "next host edge " + std::to_string(e) + " maps to a non-edge");
            break;
          }
          if (c == l.blue) {
            fail(where + "next host edge " + std::to_string(e) + " maps to a blue edge");
            break;
          }
          if (next.chi.colors[e] != colour_after_removing(c, l.blue)) {
            fail(where + "next colouring disagrees with the restriction at edge " + std::to_string(e));
            break;
          }
        }
        if (l.trace.contains("h_params") && l.trace.contains("h_membership")) {
          const PnParams params = pn_params_from_json(l.trace["h_params"]);
          const MembershipReport rep = class_membership(next.g, params, {}, false);
          const auto& recorded = l.trace["h_membership"]["conditions"];
          static const char* names[] = {"order", "max_degree", "girth"};
          for (int c = 0; c < 3; ++c) {
            const auto it = recorded.find(names[c]);
            if (it != recorded.end() && !it->is_null() && it->get<bool>() != rep.holds[static_cast<std::size_t>(c)].value_or(false)) {
              fail(where + "recorded membership condition " + std::to_string(c + 1) + " does not re-check");
            }
          }
        }
        break;
      }
      case ChainLink::Kind::kMonochromatic:
      case ChainLink::Kind::kBase:
        if (!last) fail(where + "terminal link is followed by more links");
        if (!verify_monochromatic_copy(tk, hosts[i].graph, l.chi, l.phi, l.color)) {
          fail(where + "embedding is not a monochromatic copy of T^k");
        }
        break;
      case ChainLink::Kind::kFailure:
        if (!last) fail(where + "failure link is followed by more links");
        if (l.stage.empty()) fail(where + "failure without a stage");
        break;
    }
  }
  const auto last_kind = chain.links.back().kind;
  const bool terminal_copy = last_kind == ChainLink::Kind::kMonochromatic || last_kind == ChainLink::Kind::kBase;
  if (terminal_copy != chain.top_phi.has_value()) fail("top-level copy does not match the final link");
  if (chain.top_phi) {
    if (!verify_monochromatic_copy(tk, hosts[0].graph, chain.links[0].chi, *chain.top_phi, chain.top_color)) {
      fail("top-level copy is not monochromatic in the first host");
    }
    if (v.valid) {
      Chain recomposed = chain;
      recomposed.top_phi.reset();
      compose_top(recomposed);
      if (recomposed.top_phi != chain.top_phi || recomposed.top_color != chain.top_color) {
        fail("top-level copy is not the composition of the link maps");
      }
    }
  }
  v.copy = v.valid && chain.top_phi.has_value();
  return v;
}

std::optional<Adversary> adversary_from_name(const std::string& name) {
  if (name == "all-one-color") return Adversary::kAllOneColor;
  if (name == "random") return Adversary::kRandom;
  if (name == "clique-alternating") return Adversary::kCliqueAlternating;
  return std::nullopt;
}

Coloring adversary_coloring(Adversary kind, const BlowUp& host, int s, std::uint64_t seed) {
  if (s < 1) throw PreconditionError("adversary: s must be positive");
  Coloring chi;
  chi.s = s;
  chi.colors.reserve(host.graph.size());
  Rng rng(derive_seed(seed, stage::kColoring, 0));
  for (const Edge& e : host.graph.edges()) {
    switch (kind) {
      case Adversary::kAllOneColor: chi.colors.push_back(0); break;
      case Adversary::kRandom: chi.colors.push_back(static_cast<int>(rng.uniform(static_cast<std::uint64_t>(s)))); break;
      case Adversary::kCliqueAlternating:
        if (host.map.owner(e.u) == host.map.owner(e.v) || s == 1) {
          chi.colors.push_back(0);
        } else {
          chi.colors.push_back(1 + (host.map.slot(e.u) + host.map.slot(e.v)) % (s - 1));
        }
        break;
    }
  }
  return chi;
}

}  // namespace forge
