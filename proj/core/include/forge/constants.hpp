#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "forge/rational.hpp"

namespace forge {

/// A positive number too large for exact arithmetic, stored as an iterated
/// power of two: the value is 2^2^...^top with `height` twos. Canonical
/// form keeps height-0 values below 2^1024 and height >= 1 tops at or above
/// 1024, so (height, top) order equals numeric order.
struct Magnitude {
  int height = 0;
  long double top = 0;

  static Magnitude of(long double v);
  /// log2 of this number (must be > 1 for height > 0 to stay positive).
  Magnitude log2() const;
  static Magnitude exp2(const Magnitude& x);
  friend Magnitude operator*(const Magnitude& a, const Magnitude& b);
  friend Magnitude operator+(const Magnitude& a, const Magnitude& b);
  /// a^b.
  static Magnitude pow(const Magnitude& a, const Magnitude& b);
  friend bool operator<(const Magnitude& a, const Magnitude& b) noexcept;
  std::string str() const;
};

/// Symbolic constant too large to evaluate, e.g. a Ramsey bound.
struct Atom {
  std::string name;
  Magnitude magnitude;
};

/// coef * prod atoms[i]^powers[i]; exact when no atom occurs.
struct Quantity {
  Rational coef{0};
  std::map<int, int> powers;

  Quantity() = default;
  Quantity(Rational c) : coef(c) {}  // NOLINT: implicit by design
  static Quantity atom(int id) {
    Quantity q(Rational(1));
    q.powers[id] = 1;
    return q;
  }

  bool exact() const noexcept { return powers.empty(); }
  friend Quantity operator*(const Quantity& a, const Quantity& b);
  friend Quantity operator/(const Quantity& a, const Quantity& b);
  Quantity pow(int e) const;
  friend bool operator==(const Quantity&, const Quantity&) = default;
};

enum class Tri { kFalse, kTrue, kUnknown };
std::string to_string(Tri t);

/// One inequality of the construction, evaluated on derived constants.
struct ConstantCheck {
  int level = 0;
  std::string name;
  Tri holds = Tri::kUnknown;
  std::string detail;
};

/// Quantities that exist for every level i >= 2: they are fixed when level
/// i is derived from level i-1 (the unprimed tuple) and used when a level-i
/// instance is processed.
struct StepConstants {
  std::int64_t r0 = 1;
  Quantity t;           // blue clique size
  Quantity c_star;      // 2 l' c
  Quantity p;           // 1 / l'
  Quantity eps;         // min(l theta' / (4 l' c^2), 1/2)
  Rational d0;          // 2 + 4/(gamma(l+1)), gamma = 1/(2l); 10 when l is symbolic
  Quantity a2;          // a'' = l (Delta^{2k}+2)(2 a d0 + 2)
  Quantity eta;         // 2 a d0
  std::string ramsey;   // how l' was obtained
};

struct LevelConstants {
  int level = 1;
  int h = 0;
  Quantity a, b, c, ell, theta, r;
  std::optional<StepConstants> step;
};

/// Which h the base step is applied with. kLevelIndex uses h_1 = s - 1
/// (so s = 1 gives theta = 256 l); kShifted applies it with h = s, which
/// is what makes theta_1 >= 2^{h_1} 32 sqrt(c_1) hold.
enum class HConvention { kLevelIndex, kShifted };

/// Desk replacements keyed by level, then by field name
/// (a, b, c, ell, theta, r, t, r0).
using ConstantOverrides = std::map<int, std::map<std::string, Rational>>;

struct ConstantSet {
  int k = 1;
  int delta = 2;
  int s = 1;
  HConvention convention = HConvention::kLevelIndex;
  std::vector<Atom> atoms;
  std::vector<LevelConstants> levels;  // levels[i-1] is level i
  std::vector<ConstantCheck> checks;
  std::vector<std::string> overridden;

  const LevelConstants& level(int i) const { return levels.at(static_cast<std::size_t>(i - 1)); }
  /// Exact value or throws PreconditionError naming the symbolic atom.
  Rational value(const Quantity& q, const std::string& what) const;
  std::int64_t integer(const Quantity& q, const std::string& what) const;
  std::string str(const Quantity& q) const;
  /// Checks that did not come out true.
  std::vector<ConstantCheck> failures() const;
  /// Checks belonging to goodness and the theta bound (the per-level audit).
  bool level_audit_passes(int level) const;
};

/// Level 1 from the base-case formulas (r = k, l = 21 Delta^{2k},
/// theta = 4^h 256 l, c = theta l, b = 9c, a = 4(Delta+2)), then each
/// level i >= 2 by the induction-step recurrence with i colours. Overrides
/// replace a field before anything depending on it is computed. r_s(t) is
/// taken exactly for s = 1 and for the few known small values, otherwise
/// bounded by s^{s t}. Every inequality the proof relies on is evaluated
/// into `checks`.
ConstantSet derive_constants(int k, int delta, int s, const ConstantOverrides& overrides = {},
                             HConvention convention = HConvention::kLevelIndex);

/// Known multicolour Ramsey numbers r_s(t) (s colours, cliques of order t)
/// for s = 1, r_2(t) with t <= 4, and r_3(3).
std::optional<std::int64_t> known_ramsey(int s, std::int64_t t);

nlohmann::json to_json(const ConstantSet& cs);

}  // namespace forge
