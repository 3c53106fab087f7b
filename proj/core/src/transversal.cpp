#include "forge/transversal.hpp"

#include <algorithm>

#include "forge/errors.hpp"

namespace forge {

Rational TransversalSpec::d0() const {
  if (!(gamma > Rational(0))) throw PreconditionError("transversal: gamma must be > 0");
  return Rational(2) + Rational(4) / (gamma * Rational(ell() + 1));
}

namespace {

std::vector<int> class_index(const Graph& g, const TransversalSpec& spec) {
  if (spec.classes.empty()) throw PreconditionError("transversal: no classes");
  std::vector<int> cls(static_cast<std::size_t>(g.order()), -1);
  for (int j = 0; j < spec.ell(); ++j) {
    if (spec.classes[j].empty()) throw PreconditionError("transversal: class " + std::to_string(j + 1) + " is empty");
    for (Vertex v : spec.classes[j]) {
      if (v < 0 || v >= g.order()) throw PreconditionError("transversal: class vertex out of range");
      if (cls[v] >= 0) throw PreconditionError("transversal: classes overlap at vertex " + std::to_string(v));
      cls[v] = j;
    }
  }
  return cls;
}

}  // namespace

bool is_transversal(const Graph& g, const TransversalSpec& spec, const Path& path) {
  if (!is_path(g, path)) return false;
  std::vector<int> cls = class_index(g, spec);
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (cls[path[i]] != static_cast<int>(i % spec.classes.size())) return false;
  }
  return true;
}

TransversalResult find_transversal_path(const Graph& g, const TransversalSpec& spec, std::int64_t budget) {
  const std::vector<int> cls = class_index(g, spec);
  if (spec.target_length < 1) throw PreconditionError("transversal: target length must be >= 1");
  const int ell = spec.ell();
  TransversalResult out;
  if (spec.target_length > g.order()) return out;

  std::vector<char> used(static_cast<std::size_t>(g.order()), 0);
  auto onward = [&](Vertex w, int next_class) {
    int c = 0;
    for (Vertex x : g.neighbors(w)) c += !used[x] && cls[x] == next_class;
    return c;
  };
  auto ordered = [&](std::vector<std::pair<int, Vertex>> c) {
    std::sort(c.begin(), c.end());
    std::vector<Vertex> out_list;
    for (const auto& [d, w] : c) out_list.push_back(w);
    return out_list;
  };

  std::vector<std::pair<int, Vertex>> starts;
  for (Vertex v : spec.classes[0]) starts.emplace_back(onward(v, 1 % ell), v);

  // Explicit stack: one candidate list per path position.
  std::vector<std::vector<Vertex>> cand{ordered(std::move(starts))};
  std::vector<std::size_t> next{0};
  Path path;
  while (!cand.empty()) {
    const std::size_t depth = cand.size() - 1;
    if (next[depth] == cand[depth].size()) {
      cand.pop_back();
      next.pop_back();
      if (!path.empty()) {
        used[path.back()] = 0;
        path.pop_back();
      }
      continue;
    }
    if (budget >= 0 && out.nodes >= budget) {
      out.exhausted = true;
      return out;
    }
    ++out.nodes;
    const Vertex w = cand[depth][next[depth]++];
    path.push_back(w);
    used[w] = 1;
    if (static_cast<std::int64_t>(path.size()) == spec.target_length) {
      if (!is_transversal(g, spec, path)) throw StageFailure("transversal", "search returned an invalid path");
      out.path = std::move(path);
      return out;
    }
    const int want = static_cast<int>(path.size() % static_cast<std::size_t>(ell));
    std::vector<std::pair<int, Vertex>> c;
    for (Vertex x : g.neighbors(w)) {
      if (!used[x] && cls[x] == want) c.emplace_back(onward(x, (want + 1) % ell), x);
    }
    cand.push_back(ordered(std::move(c)));
    next.push_back(0);
  }
  return out;
}

SegmentedPath split_path(const Path& p, int ell) {
  if (ell < 1) throw PreconditionError("split_path: l must be >= 1");
  if (p.size() % static_cast<std::size_t>(ell) != 0) {
    throw PreconditionError("split_path: path length " + std::to_string(p.size()) + " is not divisible by " +
                            std::to_string(ell));
  }
  SegmentedPath s{p, ell, {}};
  for (std::size_t i = 0; i < p.size(); i += static_cast<std::size_t>(ell)) {
    s.segments.emplace_back(p.begin() + static_cast<std::ptrdiff_t>(i), p.begin() + static_cast<std::ptrdiff_t>(i + ell));
  }
  return s;
}

Graph quotient_graph(const Graph& g, const SegmentedPath& s) {
  std::vector<int> seg(static_cast<std::size_t>(g.order()), -1);
  for (std::size_t i = 0; i < s.segments.size(); ++i) {
    for (Vertex v : s.segments[i]) {
      if (seg[v] >= 0) throw PreconditionError("quotient_graph: segments overlap");
      seg[v] = static_cast<int>(i);
    }
  }
  std::vector<Edge> edges;
  for (const Edge& e : g.edges()) {
    const int a = seg[e.u], b = seg[e.v];
    if (a >= 0 && b >= 0 && a != b) edges.push_back(make_edge(a, b));
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return Graph::from_unique_edges(static_cast<int>(s.segments.size()), std::move(edges));
}

nlohmann::json to_json(const SegmentedPath& s) { return {{"ell", s.ell}, {"path", s.path}, {"segments", s.segments}}; }

}  // namespace forge
