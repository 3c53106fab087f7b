#include "forge/pseudorandom.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include <boost/multiprecision/cpp_int.hpp>

#include "forge/errors.hpp"
#include "forge/rng.hpp"

namespace forge {

using boost::multiprecision::cpp_int;

namespace {

std::vector<std::uint64_t> neighbor_masks(const Graph& g) {
  std::vector<std::uint64_t> nb(static_cast<std::size_t>(g.order()), 0);
  for (const Edge& e : g.edges()) {
    nb[e.u] |= std::uint64_t{1} << e.v;
    nb[e.v] |= std::uint64_t{1} << e.u;
  }
  return nb;
}

VertexSet mask_to_set(std::uint64_t mask) {
  VertexSet out;
  while (mask != 0) {
    out.push_back(std::countr_zero(mask));
    mask &= mask - 1;
  }
  return out;
}

void require_exact_cap(const Graph& g, const CheckMode& mode, int hard_limit, const char* what) {
  int cap = std::min(mode.exact_cap, hard_limit);
  if (g.order() > cap) {
    throw CapacityError(std::string(what) + ": exact mode supports at most " + std::to_string(cap) +
                        " vertices, graph has " + std::to_string(g.order()));
  }
}

// Largest admissible |Y| for a given |X|: min(n - x, floor(p*N*x)).
std::int64_t max_partner_size(std::int64_t x, std::int64_t n, const Rational& p) {
  cpp_int lim = cpp_int(p.num()) * n * x / p.den();
  return lim < n - x ? static_cast<std::int64_t>(lim) : n - x;
}

std::int64_t count_edges_between_marked(const Graph& g, std::span<const Vertex> x, const std::vector<char>& in_y) {
  std::int64_t e = 0;
  for (Vertex v : x) {
    for (Vertex w : g.neighbors(v)) e += in_y[w];
  }
  return e;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kPass: return "pass";
    case Verdict::kFail: return "fail";
    case Verdict::kUnknown: return "unknown";
  }
  return "unknown";
}

namespace {
Verdict verdict_from_string(const std::string& s) {
  if (s == "pass") return Verdict::kPass;
  if (s == "fail") return Verdict::kFail;
  if (s == "unknown") return Verdict::kUnknown;
  throw Error("unknown verdict '" + s + "'");
}
}  // namespace

nlohmann::json to_json(const CertReport& report) {
  nlohmann::json j;
  j["verdict"] = to_string(report.verdict);
  j["mode"] = report.mode;
  if (report.witness) {
    j["witness"] = {{"X", report.witness->x}, {"Y", report.witness->y}};
  } else {
    j["witness"] = nullptr;
  }
  j["pairs_checked"] = report.pairs_checked;
  if (!report.detail.empty()) j["detail"] = report.detail;
  return j;
}

CertReport cert_report_from_json(const nlohmann::json& j) {
  CertReport r;
  r.verdict = verdict_from_string(j.at("verdict").get<std::string>());
  r.mode = j.at("mode").get<std::string>();
  if (!j.at("witness").is_null()) {
    r.witness = Witness{j["witness"].at("X").get<VertexSet>(), j["witness"].at("Y").get<VertexSet>()};
  }
  r.pairs_checked = j.at("pairs_checked").get<std::int64_t>();
  r.detail = j.value("detail", std::string());
  return r;
}

bool pair_within_bound(const Graph& g, std::span<const Vertex> x, std::span<const Vertex> y, const Rational& p,
                       const Rational& theta) {
  return within_jumbled_bound(edges_between(g, x, y), static_cast<std::int64_t>(x.size()),
                              static_cast<std::int64_t>(y.size()), p, theta);
}

CertReport is_bijumbled(const Graph& g, const Rational& p, const Rational& theta, const CheckMode& mode) {
  if (theta < Rational(0)) throw PreconditionError("is_bijumbled: theta must be >= 0");
  const int n = g.order();
  CertReport report;

  if (mode.kind == CheckMode::Kind::kExact) {
    require_exact_cap(g, mode, 30, "is_bijumbled");
    report.mode = "exact";
    // ok[x][y][e]: e edges between sizes x and y are within the bound.
    std::vector<std::vector<std::vector<char>>> ok(static_cast<std::size_t>(n + 1));
    std::vector<std::int64_t> ymax(static_cast<std::size_t>(n + 1), -1);
    for (int x = 1; x <= n; ++x) {
      ymax[x] = max_partner_size(x, n, p);
      ok[x].resize(static_cast<std::size_t>(n + 1));
      for (int y = x; y <= ymax[x]; ++y) {
        auto& row = ok[x][y];
        row.resize(static_cast<std::size_t>(x * y + 1));
        for (int e = 0; e <= x * y; ++e) row[e] = within_jumbled_bound(e, x, y, p, theta);
      }
    }
    const auto nb = neighbor_masks(g);
    const std::uint64_t full = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
    std::vector<int> comp;
    std::vector<int> into_x(static_cast<std::size_t>(n));
    for (std::uint64_t xm = 1; xm <= full; ++xm) {
      const int x = std::popcount(xm);
      if (ymax[x] < x) continue;
      comp.clear();
      for (std::uint64_t rest = full & ~xm; rest; rest &= rest - 1) {
        int v = std::countr_zero(rest);
        comp.push_back(v);
        into_x[v] = std::popcount(nb[v] & xm);
      }
      const auto& okx = ok[x];
      std::uint64_t ym = 0;
      int y = 0;
      int e = 0;
      std::optional<std::uint64_t> worst;
      const std::uint64_t steps = std::uint64_t{1} << comp.size();
      for (std::uint64_t i = 1; i < steps; ++i) {
        const int bit = std::countr_zero(i);
        const int v = comp[bit];
        const std::uint64_t vb = std::uint64_t{1} << v;
        if (ym & vb) {
          ym &= ~vb;
          --y;
          e -= into_x[v];
        } else {
          ym |= vb;
          ++y;
          e += into_x[v];
        }
        if (y < x || y > ymax[x]) continue;
        ++report.pairs_checked;
        if (!okx[y][e] && (!worst || ym < *worst)) worst = ym;
      }
      if (worst) {
        report.verdict = Verdict::kFail;
        report.witness = Witness{mask_to_set(xm), mask_to_set(*worst)};
        return report;
      }
    }
    return report;
  }

  report.mode = "sampled";
  // Draw (|X|,|Y|) uniformly over admissible size pairs, then uniform sets.
  std::vector<std::int64_t> prefix{0};
  for (std::int64_t x = 1; x <= n; ++x) {
    std::int64_t count = std::max<std::int64_t>(0, max_partner_size(x, n, p) - x + 1);
    prefix.push_back(prefix.back() + count);
  }
  const std::int64_t total = prefix.back();
  if (total == 0) return report;
  Rng rng(mode.seed);
  std::vector<Vertex> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<char> in_y(static_cast<std::size_t>(n), 0);
  for (std::int64_t trial = 0; trial < mode.trials; ++trial) {
    std::int64_t idx = static_cast<std::int64_t>(rng.uniform(static_cast<std::uint64_t>(total)));
    auto it = std::upper_bound(prefix.begin(), prefix.end(), idx);
    std::int64_t x = it - prefix.begin();
    std::int64_t y = x + (idx - prefix[x - 1]);
    for (std::int64_t i = 0; i < x + y; ++i) {
      std::size_t j = static_cast<std::size_t>(i) + rng.uniform(static_cast<std::uint64_t>(n - i));
      std::swap(perm[i], perm[j]);
    }
    std::span<const Vertex> xs(perm.data(), static_cast<std::size_t>(x));
    std::span<const Vertex> ys(perm.data() + x, static_cast<std::size_t>(y));
    for (Vertex v : ys) in_y[v] = 1;
    std::int64_t e = count_edges_between_marked(g, xs, in_y);
    for (Vertex v : ys) in_y[v] = 0;
    ++report.pairs_checked;
    if (!within_jumbled_bound(e, x, y, p, theta)) {
      Witness w{VertexSet(xs.begin(), xs.end()), VertexSet(ys.begin(), ys.end())};
      std::sort(w.x.begin(), w.x.end());
      std::sort(w.y.begin(), w.y.end());
      report.verdict = Verdict::kFail;
      report.witness = std::move(w);
      return report;
    }
  }
  return report;
}

double edge_density_deviation(const Graph& g, std::span<const Vertex> u, const Rational& p) {
  const double size = static_cast<double>(u.size());
  return std::abs(static_cast<double>(edges_inside(g, u)) - p.to_double() * size * (size - 1) / 2.0);
}

CertReport satisfies_prop_jumbled(const Graph& g, const Rational& p, const Rational& theta, const CheckMode& mode) {
  const int n = g.order();
  CertReport report;
  if (mode.kind == CheckMode::Kind::kExact) {
    require_exact_cap(g, mode, 24, "satisfies_prop_jumbled");
    report.mode = "exact";
    const auto nb = neighbor_masks(g);
    // Sets in increasing mask order; e(U) updated from e(U minus its top bit).
    const std::uint64_t count = std::uint64_t{1} << n;
    std::vector<std::int64_t> inside(count, 0);
    for (std::uint64_t um = 1; um < count; ++um) {
      const int top = 63 - std::countl_zero(um);
      const std::uint64_t rest = um & ~(std::uint64_t{1} << top);
      inside[um] = inside[rest] + std::popcount(nb[top] & rest);
      ++report.pairs_checked;
      if (!within_density_bound(inside[um], std::popcount(um), p, theta)) {
        report.verdict = Verdict::kFail;
        report.witness = Witness{mask_to_set(um), {}};
        return report;
      }
    }
    return report;
  }
  report.mode = "sampled";
  if (n == 0) return report;
  Rng rng(mode.seed);
  std::vector<Vertex> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  for (std::int64_t trial = 0; trial < mode.trials; ++trial) {
    const std::size_t size = 1 + rng.uniform(static_cast<std::uint64_t>(n));
    for (std::size_t i = 0; i < size; ++i) {
      std::size_t j = i + rng.uniform(static_cast<std::uint64_t>(n) - i);
      std::swap(perm[i], perm[j]);
    }
    VertexSet u(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(size));
    std::sort(u.begin(), u.end());
    ++report.pairs_checked;
    if (!within_density_bound(edges_inside(g, u), static_cast<std::int64_t>(size), p, theta)) {
      report.verdict = Verdict::kFail;
      report.witness = Witness{std::move(u), {}};
      return report;
    }
  }
  return report;
}

CertReport disjoint_sets_have_edge(const Graph& g, const Rational& threshold, const CheckMode& mode) {
  CertReport report;
  report.mode = "exact";
  require_exact_cap(g, mode, 63, "disjoint_sets_have_edge");
  const int n = g.order();
  // Any edgeless pair of larger sets shrinks to one of size exactly m.
  const std::int64_t m = threshold < Rational(0) ? 1 : threshold.floor() + 1;
  if (2 * m > n) return report;
  const auto nb = neighbor_masks(g);
  const std::uint64_t full = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  // Gosper's hack: all m-subsets in increasing mask order.
  std::uint64_t xm = (std::uint64_t{1} << m) - 1;
  while (xm <= full) {
    std::uint64_t reach = xm;
    for (std::uint64_t rest = xm; rest; rest &= rest - 1) reach |= nb[std::countr_zero(rest)];
    const std::uint64_t far = full & ~reach;
    ++report.pairs_checked;
    if (std::popcount(far) >= m) {
      VertexSet y = mask_to_set(far);
      y.resize(static_cast<std::size_t>(m));
      report.verdict = Verdict::kFail;
      report.witness = Witness{mask_to_set(xm), std::move(y)};
      return report;
    }
    const std::uint64_t c = xm & (~xm + 1);
    const std::uint64_t r = xm + c;
    if (r == 0) break;
    xm = (((r ^ xm) >> 2) / c) | r;
  }
  return report;
}

nlohmann::json to_json(const PnParams& params) {
  return {{"a", params.a.str()},         {"b", params.b.str()},     {"c", params.c.str()},
          {"ell", params.ell.str()},     {"theta", params.theta.str()}, {"n", params.n}};
}

PnParams pn_params_from_json(const nlohmann::json& j) {
  PnParams p;
  p.a = Rational::parse(j.at("a").get<std::string>());
  p.b = Rational::parse(j.at("b").get<std::string>());
  p.c = Rational::parse(j.at("c").get<std::string>());
  p.ell = Rational::parse(j.at("ell").get<std::string>());
  p.theta = Rational::parse(j.at("theta").get<std::string>());
  p.n = j.at("n").get<std::int64_t>();
  return p;
}

nlohmann::json to_json(const MembershipReport& report) {
  nlohmann::json j;
  static const char* names[] = {"order", "max_degree", "girth", "bijumbled"};
  for (int i = 0; i < MembershipReport::kConditions; ++i) {
    j["conditions"][names[i]] = report.holds[i] ? nlohmann::json(*report.holds[i]) : nlohmann::json(nullptr);
  }
  j["first_failure"] = report.first_failure;
  j["bijumbled"] = to_json(report.jumbled);
  if (!report.detail.empty()) j["detail"] = report.detail;
  return j;
}

MembershipReport class_membership(const Graph& g, const PnParams& params, const CheckMode& mode, bool check_jumbled) {
  MembershipReport report;
  auto fail = [&](int condition, const std::string& why) {
    report.holds[condition - 1] = false;
    if (report.first_failure == 0) {
      report.first_failure = condition;
      report.detail = why;
    }
  };
  const Rational big_n = params.big_n();
  if (!big_n.is_integer() || big_n != Rational(g.order())) {
    fail(1, "|V| = " + std::to_string(g.order()) + " but an = " + big_n.str());
  } else {
    report.holds[0] = true;
  }
  if (Rational(g.max_degree()) > params.b) {
    fail(2, "max degree " + std::to_string(g.max_degree()) + " exceeds b = " + params.b.str());
  } else {
    report.holds[1] = true;
  }
  const std::int64_t bound = (Rational(2) * params.ell).floor();
  if (auto cycle = shortest_cycle(g, static_cast<int>(std::min<std::int64_t>(bound, g.order())))) {
    fail(3, "cycle of length " + std::to_string(cycle->size()) + " <= 2l");
  } else {
    report.holds[2] = true;
  }
  if (check_jumbled) {
    report.jumbled = is_bijumbled(g, params.p(), params.theta, mode);
    if (report.jumbled.verdict == Verdict::kFail) {
      fail(4, "not (p, theta)-bijumbled");
    } else {
      report.holds[3] = true;
    }
  }
  return report;
}

int GoodTupleReport::first_failure() const noexcept {
  for (int i = 0; i < 4; ++i) {
    if (!holds[i]) return i + 1;
  }
  return 0;
}

GoodTupleReport is_good_tuple(const GoodTuple& t) {
  GoodTupleReport r;
  r.holds[0] = t.a >= Rational(3);
  r.holds[1] = t.c >= t.theta * t.ell;
  r.holds[2] = t.b >= Rational(9) * t.c;
  cpp_int rhs = 21;
  for (int i = 0; i < 2 * t.k; ++i) rhs *= t.delta;
  r.holds[3] = cpp_int(t.ell.num()) >= rhs * t.ell.den();
  return r;
}

double kst_edge_bound(std::int64_t x, int k) {
  return 4.0 * std::pow(static_cast<double>(x), 2.0 - 1.0 / (2.0 * k));
}

bool within_kst_bound(std::int64_t edges, std::int64_t x, int k) {
  // e <= 4 x^{(4k-1)/(2k)}  <=>  e^{2k} <= 4^{2k} x^{4k-1}
  if (edges <= 0) return true;
  cpp_int lhs = 1;
  cpp_int rhs = 1;
  for (int i = 0; i < 2 * k; ++i) {
    lhs *= edges;
    rhs *= 4;
  }
  for (int i = 0; i < 4 * k - 1; ++i) rhs *= x;
  return lhs <= rhs;
}

namespace {

struct BicliqueSearch {
  std::span<const std::vector<std::uint64_t>> rows;
  int words;
  int s;
  int t;
  std::vector<int> chosen;
  std::vector<std::uint64_t> found_common;

  static int count(const std::vector<std::uint64_t>& bits) {
    int c = 0;
    for (auto w : bits) c += std::popcount(w);
    return c;
  }

  bool run(int next, const std::vector<std::uint64_t>& common) {
    if (static_cast<int>(chosen.size()) == s) {
      found_common = common;
      return true;
    }
    const int n = static_cast<int>(rows.size());
    const int need = s - static_cast<int>(chosen.size());
    std::vector<std::uint64_t> narrowed(static_cast<std::size_t>(words));
    for (int i = next; i + need <= n; ++i) {
      for (int w = 0; w < words; ++w) narrowed[w] = common[w] & rows[i][w];
      if (count(narrowed) < t) continue;
      chosen.push_back(i);
      if (run(i + 1, narrowed)) return true;
      chosen.pop_back();
    }
    return false;
  }
};

}  // namespace

std::optional<std::pair<std::vector<int>, std::vector<int>>> find_biclique(
    std::span<const std::vector<std::uint64_t>> rows, int right_size, int s, int t) {
  if (s <= 0 || t <= 0) return std::pair<std::vector<int>, std::vector<int>>{};
  const int words = (right_size + 63) / 64;
  std::vector<std::uint64_t> all(static_cast<std::size_t>(words), ~std::uint64_t{0});
  if (right_size % 64 != 0) all.back() = (std::uint64_t{1} << (right_size % 64)) - 1;
  if (right_size == 0) return std::nullopt;
  BicliqueSearch search{rows, words, s, t, {}, {}};
  if (!search.run(0, all)) return std::nullopt;
  std::vector<int> right;
  for (int w = 0; w < words && static_cast<int>(right.size()) < t; ++w) {
    for (std::uint64_t bits = search.found_common[w]; bits && static_cast<int>(right.size()) < t; bits &= bits - 1) {
      right.push_back(w * 64 + std::countr_zero(bits));
    }
  }
  return std::pair{search.chosen, right};
}

CertReport kst_check(const Graph& g, std::span<const Vertex> left, std::span<const Vertex> right, int k) {
  if (left.size() != right.size()) throw PreconditionError("kst_check: sides must have equal size");
  if (k < 1) throw PreconditionError("kst_check: k must be >= 1");
  std::vector<char> on_left(static_cast<std::size_t>(g.order()), 0);
  for (Vertex v : left) on_left[v] = 1;
  for (Vertex v : right) {
    if (on_left[v]) throw PreconditionError("kst_check: sides must be disjoint");
  }
  const int x = static_cast<int>(left.size());
  const int words = (x + 63) / 64;
  std::vector<std::vector<std::uint64_t>> rows(left.size(), std::vector<std::uint64_t>(static_cast<std::size_t>(words)));
  std::int64_t edges = 0;
  for (std::size_t i = 0; i < left.size(); ++i) {
    for (std::size_t j = 0; j < right.size(); ++j) {
      if (g.has_edge(left[i], right[j])) {
        rows[i][j / 64] |= std::uint64_t{1} << (j % 64);
        ++edges;
      }
    }
  }
  CertReport report;
  report.mode = "exact";
  report.pairs_checked = edges;
  if (auto found = find_biclique(rows, x, 2 * k, 2 * k)) {
    Witness w;
    for (int i : found->first) w.x.push_back(left[i]);
    for (int j : found->second) w.y.push_back(right[j]);
    report.witness = std::move(w);
    report.detail = "contains K_{2k,2k}";
    return report;
  }
  if (within_kst_bound(edges, x, k)) {
    report.detail = "edge count within 4x^(2-1/(2k))";
    return report;
  }
  report.verdict = Verdict::kFail;
  report.witness = Witness{VertexSet(left.begin(), left.end()), VertexSet(right.begin(), right.end())};
  report.detail = "K_{2k,2k}-free with " + std::to_string(edges) + " edges, above the bound";
  return report;
}

}  // namespace forge
