#include "forge/constants.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include <boost/multiprecision/cpp_int.hpp>

#include "forge/errors.hpp"

namespace forge {

using boost::multiprecision::cpp_int;

namespace {

constexpr long double kTopLimit = 1024.0L;

Magnitude normalize(int h, long double v) {
  if (h == 0 && v >= std::ldexp(1.0L, 1024)) {
    h = 1;
    v = std::log2(v);
  }
  while (h > 0 && v >= std::ldexp(1.0L, 1024)) v = std::log2(v);  // keeps h; unreachable in practice
  while (h > 0 && v < kTopLimit) {
    v = std::exp2(v);
    --h;
  }
  return {h, v};
}

}  // namespace

Magnitude Magnitude::of(long double v) { return normalize(0, v); }

Magnitude Magnitude::log2() const {
  if (height == 0) return of(std::log2(top));
  return normalize(height - 1, top);
}

Magnitude Magnitude::exp2(const Magnitude& x) {
  if (x.height == 0 && x.top < kTopLimit) return of(std::exp2(x.top));
  return normalize(x.height + 1, x.top);
}

Magnitude operator*(const Magnitude& a, const Magnitude& b) {
  if (a.height == 0 && b.height == 0) return Magnitude::of(a.top * b.top);
  return Magnitude::exp2(a.log2() + b.log2());
}

Magnitude operator+(const Magnitude& a, const Magnitude& b) {
  if (a.height == 0 && b.height == 0) return Magnitude::of(a.top + b.top);
  // At least one side exceeds 2^1024; the smaller one is invisible unless
  // both are equal.
  if (!(a < b) && !(b < a)) return a * Magnitude::of(2);
  return a < b ? b : a;
}

Magnitude Magnitude::pow(const Magnitude& a, const Magnitude& b) { return exp2(a.log2() * b); }

bool operator<(const Magnitude& a, const Magnitude& b) noexcept {
  if (a.height != b.height) return a.height < b.height;
  return a.top < b.top;
}

std::string Magnitude::str() const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6Lg", top);
  std::string out;
  for (int i = 0; i < height; ++i) out += "2^";
  return out + buf;
}

Quantity operator*(const Quantity& a, const Quantity& b) {
  Quantity q(a.coef * b.coef);
  q.powers = a.powers;
  for (const auto& [id, e] : b.powers) {
    if ((q.powers[id] += e) == 0) q.powers.erase(id);
  }
  return q;
}

Quantity operator/(const Quantity& a, const Quantity& b) {
  Quantity q(a.coef / b.coef);
  q.powers = a.powers;
  for (const auto& [id, e] : b.powers) {
    if ((q.powers[id] -= e) == 0) q.powers.erase(id);
  }
  return q;
}

Quantity Quantity::pow(int e) const {
  Quantity out(Rational(1));
  Quantity base = e >= 0 ? *this : Quantity(Rational(1)) / *this;
  for (int i = 0; i < std::abs(e); ++i) out = out * base;
  return out;
}

std::string to_string(Tri t) {
  switch (t) {
    case Tri::kTrue: return "true";
    case Tri::kFalse: return "false";
    case Tri::kUnknown: break;
  }
  return "unknown";
}

namespace {

constexpr std::int64_t kExactCap = std::int64_t{1} << 62;

cpp_int to_big(const Rational& r) { return cpp_int(r.num()) / cpp_int(r.den()); }

Magnitude big_magnitude(const cpp_int& v) {
  const auto bits = static_cast<long double>(msb(v));
  if (bits < 1000) return Magnitude::of(static_cast<long double>(v));
  // v ~ 2^bits; keep the top 60 bits for the mantissa.
  const cpp_int top = v >> static_cast<unsigned>(bits - 60);
  return Magnitude::exp2(Magnitude::of(bits - 60 + std::log2(static_cast<long double>(top))));
}

class Deriver {
 public:
  Deriver(ConstantSet& cs, const ConstantOverrides& overrides) : cs_(cs), overrides_(overrides) {}

  /// Override for (level, field) if any, else `formula`; records overrides.
  Quantity pick(int level, const std::string& field, const Quantity& formula) {
    auto lv = overrides_.find(level);
    if (lv != overrides_.end()) {
      auto f = lv->second.find(field);
      if (f != lv->second.end()) {
        cs_.overridden.push_back("level " + std::to_string(level) + ": " + field + " = " + f->second.str() +
                                 " (formula gives " + cs_.str(formula) + ")");
        return Quantity(f->second);
      }
    }
    return formula;
  }

  int new_atom(const std::string& name, const Magnitude& m) {
    cs_.atoms.push_back({name, m});
    return static_cast<int>(cs_.atoms.size() - 1);
  }

  /// Exact integer as a Quantity, or a fresh atom when it is too large.
  Quantity integer(const cpp_int& v, const std::string& name) {
    if (v < kExactCap) return Quantity(Rational(static_cast<std::int64_t>(v)));
    return Quantity::atom(new_atom(name, big_magnitude(v)));
  }

  Magnitude magnitude(const Quantity& q) const {
    if (q.exact()) return Magnitude::of(static_cast<long double>(q.coef.to_double()));
    Magnitude log = Magnitude::of(std::log2(static_cast<long double>(q.coef.to_double())));
    for (const auto& [id, e] : q.powers) {
      if (e < 0) throw PreconditionError("constants: magnitude of a quantity with a negative power");
      log = log + cs_.atoms[static_cast<std::size_t>(id)].magnitude.log2() * Magnitude::of(e);
    }
    return Magnitude::exp2(log);
  }

  /// Decides lhs >= rhs for positive quantities.
  Tri geq(const Quantity& lhs, const Quantity& rhs) const {
    const Quantity ratio = lhs / rhs;
    if (ratio.exact()) return ratio.coef >= Rational(1) ? Tri::kTrue : Tri::kFalse;
    // log2(ratio) = log2(coef) + sum e_i log2(A_i). Find the dominant term.
    struct Term {
      Magnitude size;
      int sign;
    };
    std::vector<Term> terms;
    const long double lc = std::log2(static_cast<long double>(ratio.coef.to_double()));
    if (lc != 0) terms.push_back({Magnitude::of(std::fabs(lc)), lc > 0 ? 1 : -1});
    for (const auto& [id, e] : ratio.powers) {
      terms.push_back({cs_.atoms[static_cast<std::size_t>(id)].magnitude.log2() * Magnitude::of(std::abs(e)), e > 0 ? 1 : -1});
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < terms.size(); ++i) {
      if (terms[best].size < terms[i].size) best = i;
    }
    if (terms[best].size.height == 0) {
      long double sum = 0, scale = 0;
      for (const Term& t : terms) {
        sum += t.sign * t.size.top;
        scale = std::max(scale, t.size.top);
      }
      if (std::fabs(sum) <= 1e-12L * scale) return Tri::kUnknown;
      return sum > 0 ? Tri::kTrue : Tri::kFalse;
    }
    for (std::size_t i = 0; i < terms.size(); ++i) {
      if (i != best && terms[i].size.height == terms[best].size.height) return Tri::kUnknown;
    }
    return terms[best].sign > 0 ? Tri::kTrue : Tri::kFalse;
  }

  void check(int level, const std::string& name, Tri holds, const std::string& detail) {
    cs_.checks.push_back({level, name, holds, detail});
  }

  void check_geq(int level, const std::string& name, const Quantity& lhs, const Quantity& rhs) {
    check(level, name, geq(lhs, rhs), cs_.str(lhs) + " vs " + cs_.str(rhs));
  }

 private:
  ConstantSet& cs_;
  const ConstantOverrides& overrides_;
};

std::int64_t ipow(std::int64_t b, int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) {
    if (r > kExactCap / std::max<std::int64_t>(b, 1)) throw PreconditionError("constants: Delta^k overflows");
    r *= b;
  }
  return r;
}

}  // namespace

std::optional<std::int64_t> known_ramsey(int s, std::int64_t t) {
  if (t <= 1) return 1;
  if (s == 1) return t;
  if (t == 2) return 2;
  if (s == 2 && t == 3) return 6;
  if (s == 2 && t == 4) return 18;
  if (s == 3 && t == 3) return 17;
  return std::nullopt;
}

Rational ConstantSet::value(const Quantity& q, const std::string& what) const {
  if (!q.exact()) {
    throw PreconditionError("constants: " + what + " = " + str(q) +
                            " is symbolic and cannot be executed; supply a desk override");
  }
  return q.coef;
}

std::int64_t ConstantSet::integer(const Quantity& q, const std::string& what) const {
  Rational v = value(q, what);
  if (!v.is_integer()) throw PreconditionError("constants: " + what + " = " + v.str() + " is not an integer");
  return v.num();
}

std::string ConstantSet::str(const Quantity& q) const {
  std::string out = q.coef.str();
  for (const auto& [id, e] : q.powers) {
    out += "*" + atoms.at(static_cast<std::size_t>(id)).name;
    if (e != 1) out += "^" + std::to_string(e);
  }
  return out;
}

std::vector<ConstantCheck> ConstantSet::failures() const {
  std::vector<ConstantCheck> out;
  for (const auto& c : checks) {
    if (c.holds != Tri::kTrue) out.push_back(c);
  }
  return out;
}

bool ConstantSet::level_audit_passes(int lvl) const {
  static const char* const kAudit[] = {"a >= 3", "c >= theta*l", "b >= 9c", "l >= 21 Delta^{2k}",
                                       "theta >= 2^h 32 sqrt(c)"};
  for (const auto& c : checks) {
    if (c.level != lvl) continue;
    for (const char* name : kAudit) {
      if (c.name == name && c.holds != Tri::kTrue) return false;
    }
  }
  return true;
}

ConstantSet derive_constants(int k, int delta, int s, const ConstantOverrides& overrides, HConvention convention) {
  if (k < 1) throw PreconditionError("derive_constants: k must be >= 1");
  if (delta < 2) throw PreconditionError("derive_constants: Delta must be >= 2");
  if (s < 1) throw PreconditionError("derive_constants: s must be >= 1");
  ConstantSet cs;
  cs.k = k;
  cs.delta = delta;
  cs.s = s;
  cs.convention = convention;
  Deriver d(cs, overrides);
  const std::int64_t d2k = ipow(delta, 2 * k);
  const Quantity q21d2k(Rational(21 * d2k));

  auto audit = [&](const LevelConstants& lv) {
    const int i = lv.level;
    d.check(i, "a >= 3", d.geq(lv.a, Rational(3)), cs.str(lv.a));
    d.check_geq(i, "c >= theta*l", lv.c, lv.theta * lv.ell);
    d.check_geq(i, "b >= 9c", lv.b, Quantity(Rational(9)) * lv.c);
    d.check_geq(i, "l >= 21 Delta^{2k}", lv.ell, q21d2k);
    // theta >= 2^h 32 sqrt(c)  <=>  theta^2 >= 4^h 1024 c (h may be 0).
    const Quantity rhs = Quantity(Rational(ipow(4, lv.h) * 1024)) * lv.c;
    d.check(i, "theta >= 2^h 32 sqrt(c)", d.geq(lv.theta.pow(2), rhs),
            "theta^2 = " + cs.str(lv.theta.pow(2)) + " vs 4^h*1024*c = " + cs.str(rhs) + " (h = " + std::to_string(lv.h) + ")");
  };

  // Level 1: base case.
  {
    LevelConstants lv;
    lv.level = 1;
    lv.h = s - 1;
    const int base_h = convention == HConvention::kShifted ? s : s - 1;
    lv.r = d.pick(1, "r", Rational(k));
    lv.ell = d.pick(1, "ell", q21d2k);
    lv.theta = d.pick(1, "theta", Quantity(Rational(ipow(4, base_h) * 256)) * lv.ell);
    lv.c = d.pick(1, "c", lv.theta * lv.ell);
    lv.b = d.pick(1, "b", Quantity(Rational(9)) * lv.c);
    // a >= 2(D+1)f with f = 2 and D = Delta+1.
    lv.a = d.pick(1, "a", Rational(4 * (delta + 2)));
    audit(lv);
    d.check_geq(1, "c >= 4(D+2) theta", lv.c, Quantity(Rational(4 * (delta + 3))) * lv.theta);
    d.check_geq(1, "a >= 2(D+1) f", lv.a, Rational(4 * (delta + 2)));
    d.check_geq(1, "l >= Delta^k + 1", lv.ell, Rational(ipow(delta, k) + 1));
    d.check_geq(1, "r >= k", lv.r, Rational(k));
    cs.levels.push_back(std::move(lv));
  }

  for (int i = 2; i <= s; ++i) {
    const LevelConstants prev = cs.levels.back();
    LevelConstants lv;
    lv.level = i;
    lv.h = s - i;
    StepConstants st;
    // r_0 = Delta^{4k}, rounded up to even.
    std::int64_t r0 = ipow(delta, 4 * k);
    r0 += r0 % 2;
    st.r0 = d.pick(i, "r0", Rational(r0)).coef.num();

    // t = max{r_0, (40(l b^{r+1} + l))^{r_0}}.
    bool t_formula_exact = false;
    Quantity t_formula;
    if (prev.ell.exact() && prev.b.exact() && prev.r.exact()) {
      const cpp_int ell = to_big(prev.ell.coef), b = to_big(prev.b.coef);
      const auto r = static_cast<unsigned>(prev.r.coef.num());
      const double bits = (static_cast<double>(r) + 1) * std::log2(b.convert_to<double>()) * static_cast<double>(st.r0);
      if (bits < 200000) {
        cpp_int base = 40 * (ell * boost::multiprecision::pow(b, r + 1) + ell);
        cpp_int tv = boost::multiprecision::pow(base, static_cast<unsigned>(st.r0));
        if (tv < st.r0) tv = st.r0;
        t_formula = d.integer(tv, "t_" + std::to_string(i));
        t_formula_exact = true;
      }
    }
    if (!t_formula_exact) {
      const Magnitude base = Magnitude::of(40) * (d.magnitude(prev.ell) * Magnitude::pow(d.magnitude(prev.b), d.magnitude(prev.r) + Magnitude::of(1)));
      t_formula = Quantity::atom(d.new_atom("t_" + std::to_string(i), Magnitude::pow(base, Magnitude::of(static_cast<long double>(st.r0)))));
    }
    st.t = d.pick(i, "t", t_formula);
    const bool t_overridden = !(st.t == t_formula);

    // l' = max{4 s l^2, r_s(t)}.
    const Quantity four_s_l2 = Quantity(Rational(4 * i)) * prev.ell.pow(2);
    Quantity ramsey;
    std::optional<Magnitude> ramsey_mag;
    if (st.t.exact() && st.t.coef.is_integer()) {
      if (auto known = known_ramsey(i, st.t.coef.num())) {
        ramsey = Rational(*known);
        st.ramsey = "exact r_" + std::to_string(i) + "(" + st.t.coef.str() + ") = " + std::to_string(*known);
      } else {
        const double bits = static_cast<double>(i) * static_cast<double>(st.t.coef.num()) * std::log2(static_cast<double>(i));
        if (bits < 20000) {
          ramsey = d.integer(boost::multiprecision::pow(cpp_int(i), static_cast<unsigned>(i * st.t.coef.num())), "R_" + std::to_string(i));
        } else {
          ramsey_mag = Magnitude::exp2(Magnitude::of(i * std::log2(static_cast<long double>(i))) * Magnitude::of(static_cast<long double>(st.t.coef.num())));
        }
        st.ramsey = "upper bound r_s(t) <= s^{s t}";
      }
    } else {
      ramsey_mag = Magnitude::exp2(Magnitude::of(i * std::log2(static_cast<long double>(i))) * d.magnitude(st.t));
      st.ramsey = "upper bound r_s(t) <= s^{s t}";
    }
    if (ramsey_mag) ramsey = Quantity::atom(d.new_atom("R_" + std::to_string(i), *ramsey_mag));
    Quantity ell_formula = d.geq(four_s_l2, ramsey) == Tri::kTrue ? four_s_l2 : ramsey;
    if (!ell_formula.exact() && ell_formula.powers.size() == 1 && ell_formula.coef == Rational(1)) {
      // Rename the chosen Ramsey atom as this level's l'.
      cs.atoms[static_cast<std::size_t>(ell_formula.powers.begin()->first)].name = "l_" + std::to_string(i);
    }
    lv.ell = d.pick(i, "ell", ell_formula);
    if (!(lv.ell == ell_formula)) st.ramsey += " (l' overridden)";

    lv.a = d.pick(i, "a", lv.ell * prev.a);
    st.c_star = Quantity(Rational(2)) * lv.ell * prev.c;
    lv.c = d.pick(i, "c", lv.ell.pow(2) / prev.ell.pow(2) * prev.c);
    lv.r = d.pick(i, "r", prev.ell * prev.r);
    lv.b = d.pick(i, "b", Quantity(Rational(9)) * lv.c);
    lv.theta = d.pick(i, "theta", lv.ell / (Quantity(Rational(2)) * prev.ell) * prev.theta);
    st.p = Quantity(Rational(1)) / lv.ell;
    const Quantity eps_bound = prev.ell * lv.theta / (Quantity(Rational(4)) * lv.ell * prev.c.pow(2));
    st.eps = d.geq(eps_bound, Rational(1, 2)) == Tri::kTrue ? Quantity(Rational(1, 2)) : eps_bound;
    if (prev.ell.exact()) {
      const Rational gamma = Rational(1) / (Rational(2) * prev.ell.coef);
      st.d0 = Rational(2) + Rational(4) / (gamma * (prev.ell.coef + Rational(1)));
    } else {
      st.d0 = Rational(10);
    }
    st.eta = Quantity(Rational(2) * st.d0) * prev.a;
    // a'' = l (Delta^{2k}+2)(2 a d0 + 2). With a symbolic, the +2 is
    // negligible and dropped.
    if (prev.a.exact()) {
      st.a2 = prev.ell * Quantity(Rational(d2k + 2) * (Rational(2) * prev.a.coef * st.d0 + Rational(2)));
    } else {
      st.a2 = prev.ell * Quantity(Rational(d2k + 2) * Rational(2) * st.d0) * prev.a;
    }
    lv.step = st;
    audit(lv);

    d.check(i, "t >= r0", d.geq(st.t, Rational(st.r0)), cs.str(st.t) + " vs " + std::to_string(st.r0));
    d.check_geq(i, "l' >= 4 s l^2", lv.ell, four_s_l2);
    {
      Tri holds = d.geq(lv.ell, ramsey);
      if (holds != Tri::kTrue && st.ramsey.rfind("upper bound", 0) == 0) holds = Tri::kUnknown;
      d.check(i, "l' >= r_s(t)", holds, st.ramsey);
    }
    d.check_geq(i, "r' >= l r", lv.r, prev.ell * prev.r);
    // Two vertices of adjacent segments can sit l - 1 + 1 + l - 1 apart, and
    // m-step segment walks reach l(m+1) - 1; the template needs r' that large.
    {
      Tri holds = Tri::kUnknown;
      std::string detail = cs.str(lv.r) + " vs l(r+1) - 1";
      if (lv.r.exact() && prev.ell.exact() && prev.r.exact()) {
        const Rational need = prev.ell.coef * (prev.r.coef + Rational(1)) - Rational(1);
        holds = lv.r.coef >= need ? Tri::kTrue : Tri::kFalse;
        detail = cs.str(lv.r) + " vs " + need.str();
      } else if (lv.r == prev.ell * prev.r) {
        holds = Tri::kFalse;  // l is symbolic, so l > 1
      }
      d.check(i, "r' >= l(r+1) - 1 (segment distance)", holds, detail);
    }
    d.check_geq(i, "l' >= 2 l^2 (girth transfer)", lv.ell, Quantity(Rational(2)) * prev.ell.pow(2));
    d.check_geq(i, "c* <= c'", lv.c, st.c_star);
    d.check_geq(i, "a'/s >= 2 a''", lv.a / Quantity(Rational(i)), Quantity(Rational(2)) * st.a2);
    // 40(b^{r+1} l + l^2) t^{-1/r0} <= 1, with the unprimed b, r, l.
    {
      Tri holds = Tri::kUnknown;
      std::string detail;
      if (!t_overridden && !(st.t == Quantity(Rational(st.r0)))) {
        // t^{1/r0} = 40(l b^{r+1} + l), which is below 40(b^{r+1} l + l^2)
        // exactly when l > 1.
        holds = d.geq(Rational(1), prev.ell);
        detail = "t^{1/r0} = 40(l b^{r+1} + l); condition holds iff l <= 1";
      } else if (prev.ell.exact() && prev.b.exact() && prev.r.exact() && st.t.exact()) {
        const cpp_int ell = to_big(prev.ell.coef), b = to_big(prev.b.coef);
        const auto r = static_cast<unsigned>(prev.r.coef.num());
        const double bits = (static_cast<double>(r) + 1) * std::log2(b.convert_to<double>()) * static_cast<double>(st.r0);
        if (bits < 200000) {
          cpp_int lhs = boost::multiprecision::pow(40 * (boost::multiprecision::pow(b, r + 1) * ell + ell * ell),
                                                   static_cast<unsigned>(st.r0));
          holds = lhs <= to_big(st.t.coef) ? Tri::kTrue : Tri::kFalse;
          detail = "(40(b^{r+1} l + l^2))^{r0} vs t, exact";
        }
      }
      d.check(i, "LLL: 40(b^{r+1} l + l^2) t^{-1/r0} <= 1", holds, detail);
    }
    cs.levels.push_back(std::move(lv));
  }
  return cs;
}

namespace {

nlohmann::json quantity_json(const ConstantSet& cs, const Quantity& q) { return cs.str(q); }

}  // namespace

nlohmann::json to_json(const ConstantSet& cs) {
  nlohmann::json j;
  j["k"] = cs.k;
  j["delta"] = cs.delta;
  j["s"] = cs.s;
  j["convention"] = cs.convention == HConvention::kShifted ? "shifted" : "level-index";
  nlohmann::json atoms = nlohmann::json::array();
  for (const auto& a : cs.atoms) atoms.push_back({{"name", a.name}, {"magnitude", a.magnitude.str()}});
  j["atoms"] = std::move(atoms);
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& lv : cs.levels) {
    nlohmann::json l{{"level", lv.level},
                     {"h", lv.h},
                     {"a", quantity_json(cs, lv.a)},
                     {"b", quantity_json(cs, lv.b)},
                     {"c", quantity_json(cs, lv.c)},
                     {"ell", quantity_json(cs, lv.ell)},
                     {"theta", quantity_json(cs, lv.theta)},
                     {"r", quantity_json(cs, lv.r)}};
    if (lv.step) {
      const auto& st = *lv.step;
      l["step"] = {{"r0", st.r0},
                   {"t", quantity_json(cs, st.t)},
                   {"c_star", quantity_json(cs, st.c_star)},
                   {"p", quantity_json(cs, st.p)},
                   {"eps", quantity_json(cs, st.eps)},
                   {"d0", st.d0.str()},
                   {"a2", quantity_json(cs, st.a2)},
                   {"eta", quantity_json(cs, st.eta)},
                   {"ramsey", st.ramsey}};
    }
    levels.push_back(std::move(l));
  }
  j["levels"] = std::move(levels);
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : cs.checks) {
    checks.push_back({{"level", c.level}, {"name", c.name}, {"holds", to_string(c.holds)}, {"detail", c.detail}});
  }
  j["checks"] = std::move(checks);
  j["overridden"] = cs.overridden;
  return j;
}

}  // namespace forge
