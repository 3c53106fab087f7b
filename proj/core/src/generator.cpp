#include "forge/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>

#include "forge/rng.hpp"

namespace forge {

Graph sample_gnp(int n, double p, std::uint64_t seed) {
  if (n < 0) throw PreconditionError("sample_gnp: n must be >= 0");
  if (!(p >= 0.0 && p <= 1.0)) throw PreconditionError("sample_gnp: p must lie in [0, 1]");
  Rng rng(seed);
  std::vector<Edge> edges;
  if (p >= 1.0) {
    for (Vertex v = 1; v < n; ++v)
      for (Vertex u = 0; u < v; ++u) edges.push_back({u, v});
  } else if (p > 0.0) {
    // Geometric skips over the pairs (u, v), u < v, in column order.
    const double log_q = std::log1p(-p);
    std::int64_t v = 1, u = -1;
    while (v < n) {
      u += 1 + static_cast<std::int64_t>(std::floor(std::log1p(-rng.unit()) / log_q));
      while (u >= v && v < n) {
        u -= v;
        ++v;
      }
      if (v < n) edges.push_back({static_cast<Vertex>(u), static_cast<Vertex>(v)});
    }
  }
  return Graph::from_unique_edges(n, std::move(edges));
}

namespace {

Pruned finish(const Graph& g, const std::vector<char>& alive, std::vector<Vertex> removed) {
  std::vector<Vertex> keep;
  for (Vertex v = 0; v < g.order(); ++v) {
    if (alive[v]) keep.push_back(v);
  }
  InducedSubgraph sub = induced_subgraph(g, keep);
  return {std::move(sub.graph), std::move(sub.original), std::move(removed)};
}

}  // namespace

Pruned strip_short_cycles(const Graph& g, int bound) {
  // Removing vertices never creates cycles, so the shortest cycle seen from
  // each source only grows. Keeping those lengths as lazy heap keys visits
  // victims in the same order as repeatedly taking the globally shortest
  // cycle (ties to the lowest source), without rescanning the graph.
  const int n = g.order();
  std::vector<char> alive(static_cast<std::size_t>(n), 1);
  std::vector<Vertex> removed;
  std::vector<int> dist(static_cast<std::size_t>(n), -1);
  std::vector<Vertex> parent(static_cast<std::size_t>(n), -1);
  std::vector<Vertex> queue;
  // (length, victim) of the first shortest cycle seen from s, length > bound if none.
  auto scan = [&](Vertex s) {
    queue.assign(1, s);
    dist[s] = 0;
    int found = bound + 1;
    Vertex cu = -1, cw = -1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const Vertex u = queue[head];
      if (2 * dist[u] + 1 > bound || 2 * dist[u] + 1 >= found) break;
      for (Vertex w : g.neighbors(u)) {
        if (!alive[w]) continue;
        if (dist[w] < 0) {
          dist[w] = dist[u] + 1;
          parent[w] = u;
          queue.push_back(w);
        } else if (w != parent[u]) {
          const int len = dist[u] + dist[w] + 1;
          if (len < found) {
            found = len;
            cu = u;
            cw = w;
          }
        }
      }
    }
    Vertex victim = -1;
    if (cu >= 0) {
      victim = s;
      for (Vertex v = cu; v != -1; v = parent[v]) victim = std::min(victim, v);
      for (Vertex v = cw; v != -1; v = parent[v]) victim = std::min(victim, v);
    }
    for (Vertex v : queue) {
      dist[v] = -1;
      parent[v] = -1;
    }
    return std::pair{found, victim};
  };
  using Key = std::pair<int, Vertex>;
  std::priority_queue<Key, std::vector<Key>, std::greater<>> heap;
  for (Vertex s = 0; s < n; ++s) {
    const int len = scan(s).first;
    if (len <= bound) heap.push({len, s});
  }
  while (!heap.empty()) {
    const auto [key, s] = heap.top();
    heap.pop();
    if (!alive[s]) continue;
    const auto [len, victim] = scan(s);
    if (len > bound) continue;
    if (len > key) {
      heap.push({len, s});
      continue;
    }
    alive[victim] = 0;
    removed.push_back(victim);
    heap.push({len, s});
  }
  return finish(g, alive, std::move(removed));
}

Pruned trim_to_degree(const Graph& g, int target_n) {
  if (target_n < 0 || target_n > g.order()) {
    throw PreconditionError("trim_to_degree: graph has " + std::to_string(g.order()) + " vertices, fewer than " +
                            std::to_string(target_n));
  }
  std::vector<int> degree(static_cast<std::size_t>(g.order()));
  std::set<std::pair<int, Vertex>> queue;  // (-degree, vertex)
  for (Vertex v = 0; v < g.order(); ++v) {
    degree[v] = g.degree(v);
    queue.insert({-degree[v], v});
  }
  std::vector<char> alive(static_cast<std::size_t>(g.order()), 1);
  std::vector<Vertex> removed;
  while (static_cast<int>(queue.size()) > target_n) {
    const Vertex v = queue.begin()->second;
    queue.erase(queue.begin());
    alive[v] = 0;
    removed.push_back(v);
    for (Vertex w : g.neighbors(v)) {
      if (!alive[w]) continue;
      queue.erase({-degree[w], w});
      --degree[w];
      queue.insert({-degree[w], w});
    }
  }
  return finish(g, alive, std::move(removed));
}

double chernoff_bound(double eps, double mu) {
  if (!(eps > 0.0 && eps <= 1.5)) throw PreconditionError("chernoff_bound: eps must lie in (0, 3/2]");
  if (!(mu >= 0.0)) throw PreconditionError("chernoff_bound: mu must be >= 0");
  return 2.0 * std::exp(-eps * eps * mu / 3.0);
}

double expected_short_cycles(int m, double p, int bound) {
  // C(m,i) * (i-1)!/2 * p^i = m!/(m-i)! / (2i) * p^i
  double total = 0;
  for (int i = 3; i <= std::min(bound, m); ++i) {
    double falling = 1;
    for (int j = 0; j < i; ++j) falling *= static_cast<double>(m - j);
    total += falling / (2.0 * i) * std::pow(p, i);
  }
  return total;
}

nlohmann::json to_json(const GenTrace& trace) {
  nlohmann::json j;
  j["seed"] = trace.seed;
  j["params"] = to_json(trace.params);
  j["attempts"] = trace.attempts;
  j["expected_short_cycles"] = trace.expected_short_cycles;
  j["edge_count_tail"] = trace.edge_count_tail;
  j["warnings"] = trace.warnings;
  j["bijumbledness_note"] = "condition (iv) is checked by sampling; it is not proven";
  auto& attempts = j["per_attempt"] = nlohmann::json::array();
  for (const auto& a : trace.per_attempt) {
    attempts.push_back({{"seed", a.seed},
                        {"edges_sampled", a.edges_sampled},
                        {"short_cycles_found", a.short_cycles_found},
                        {"removed_for_cycles", a.removed_for_cycles},
                        {"survivors", a.survivors},
                        {"trimmed_for_degree", a.trimmed_for_degree},
                        {"max_degree", a.max_degree},
                        {"structural_pass", a.structural_pass},
                        {"jumbled_verdict", a.jumbled_verdict},
                        {"accepted", a.accepted},
                        {"note", a.note}});
  }
  return j;
}

Generated generate_pn(const PnParams& params, std::uint64_t seed, const GenOptions& options) {
  GenTrace trace;
  trace.seed = seed;
  trace.params = params;

  const Rational big_n_r = params.big_n();
  if (!big_n_r.is_integer() || big_n_r < Rational(1)) {
    throw PreconditionError("generate: a*n must be a positive integer, got " + big_n_r.str());
  }
  const int big_n = static_cast<int>(big_n_r.num());
  const Rational p_sample = params.c / Rational(big_n);
  if (p_sample < Rational(0) || p_sample > Rational(1)) {
    throw PreconditionError("generate: sampling probability c/N = " + p_sample.str() + " is outside [0, 1]");
  }

  GoodTuple tuple{params.a, params.b, params.c, params.ell, params.theta, options.delta, options.k};
  auto good = is_good_tuple(tuple);
  std::vector<std::string> violations;
  static const char* names[] = {"a >= 3", "c >= theta*l", "b >= 9c", "l >= 21*delta^(2k)"};
  for (int i = 0; i < 4; ++i) {
    if (!good.holds[i]) violations.emplace_back(names[i]);
  }
  if (params.theta * params.theta < Rational(1024) * params.c) violations.emplace_back("theta >= 32*sqrt(c)");
  if (!violations.empty()) {
    std::string list;
    for (const auto& v : violations) list += (list.empty() ? "" : ", ") + v;
    if (!options.desk) throw PreconditionError("generate: hypotheses violated: " + list);
    trace.warnings.push_back("desk override: hypotheses violated: " + list);
  }

  const int bound = static_cast<int>((Rational(2) * params.ell).floor());
  const double p = p_sample.to_double();
  trace.expected_short_cycles = expected_short_cycles(3 * big_n, p, bound);
  const double mean_edges = p * 3.0 * big_n * (3.0 * big_n - 1) / 2.0;
  trace.edge_count_tail = chernoff_bound(0.5, mean_edges);

  for (int attempt = 0; attempt < options.max_retries; ++attempt) {
    AttemptTrace at;
    at.seed = derive_seed(seed, stage::kGenerate, static_cast<std::uint64_t>(attempt));
    ++trace.attempts;
    Graph sampled = sample_gnp(3 * big_n, p, at.seed);
    at.edges_sampled = static_cast<std::int64_t>(sampled.size());
    Pruned stripped = strip_short_cycles(sampled, bound);
    at.short_cycles_found = static_cast<int>(stripped.removed.size());
    at.removed_for_cycles = static_cast<int>(stripped.removed.size());
    at.survivors = stripped.graph.order();
    if (at.survivors < big_n) {
      at.note = "fewer than N vertices survived cycle removal";
      trace.per_attempt.push_back(at);
      continue;
    }
    Pruned trimmed = trim_to_degree(stripped.graph, big_n);
    at.trimmed_for_degree = static_cast<int>(trimmed.removed.size());
    at.max_degree = trimmed.graph.max_degree();
    MembershipReport structural = class_membership(trimmed.graph, params, options.jumbled, false);
    at.structural_pass = structural.structural_passed();
    if (!at.structural_pass) {
      at.note = "structural certification failed: " + structural.detail;
      trace.per_attempt.push_back(at);
      continue;
    }
    CheckMode jm = options.jumbled;
    if (jm.kind == CheckMode::Kind::kSampled) jm.seed = derive_seed(at.seed, stage::kJumbledSample, 0);
    CertReport jumbled = is_bijumbled(trimmed.graph, params.p(), params.theta, jm);
    at.jumbled_verdict = to_string(jumbled.verdict);
    if (options.require_jumbled && jumbled.verdict == Verdict::kFail) {
      at.note = "bijumbledness violated";
      trace.per_attempt.push_back(at);
      continue;
    }
    at.accepted = true;
    trace.per_attempt.push_back(at);
    return {std::move(trimmed.graph), std::move(trace)};
  }
  throw GenerationError("no attempt out of " + std::to_string(options.max_retries) + " produced a certified graph",
                        std::move(trace));
}

}  // namespace forge
