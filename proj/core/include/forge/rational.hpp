#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace forge {

/// Exact rational with 64-bit numerator/denominator. Intermediate products
/// are formed in 128 bits; any result that does not fit throws.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  /// Accepts "3", "-2/7", "0.125", "1e-3" and "2.5e2". Decimal forms are
  /// converted exactly.
  static Rational parse(std::string_view text);

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }

  double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string str() const;

  /// floor(this), exact.
  std::int64_t floor() const noexcept;
  /// ceil(this), exact.
  std::int64_t ceil() const noexcept;

  bool is_integer() const noexcept { return den_ == 1; }

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational operator-() const { return Rational(-num_, den_); }

  friend bool operator==(const Rational& a, const Rational& b) noexcept {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) noexcept;

 private:
  static Rational from_wide(__int128 num, __int128 den);

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// True iff |edges - p*x*y| <= theta*sqrt(x*y), decided exactly by squaring.
/// Requires theta >= 0.
bool within_jumbled_bound(std::int64_t edges, std::int64_t x, std::int64_t y, const Rational& p,
                          const Rational& theta);

/// True iff |2*edges - p*u*(u-1)| <= 2*theta*u, i.e. the internal-density
/// deviation |e(U) - p*binom(u,2)| <= theta*u, decided exactly.
bool within_density_bound(std::int64_t edges, std::int64_t u, const Rational& p,
                          const Rational& theta);

}  // namespace forge
