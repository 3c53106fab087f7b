#include "forge/rational.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <limits>
#include <numeric>

#include "forge/errors.hpp"

namespace forge {

namespace {

using boost::multiprecision::cpp_int;

__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

constexpr __int128 kMax = std::numeric_limits<std::int64_t>::max();

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw PreconditionError("rational with zero denominator");
  *this = from_wide(num, den);
}

Rational Rational::from_wide(__int128 num, __int128 den) {
  if (den == 0) throw PreconditionError("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  __int128 g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  if (num > kMax || num < -kMax || den > kMax) throw Error("rational overflow");
  Rational r;
  r.num_ = static_cast<std::int64_t>(num);
  r.den_ = static_cast<std::int64_t>(den);
  return r;
}

Rational Rational::parse(std::string_view text) {
  auto fail = [&] { return ParseError(0, "malformed number '" + std::string(text) + "'"); };
  if (text.empty()) throw fail();
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Rational a = parse(text.substr(0, slash));
    Rational b = parse(text.substr(slash + 1));
    if (!a.is_integer() || !b.is_integer()) throw fail();
    return a / b;
  }
  std::size_t i = 0;
  bool negative = false;
  if (text[i] == '+' || text[i] == '-') {
    negative = text[i] == '-';
    ++i;
  }
  __int128 num = 0;
  __int128 den = 1;
  bool digits = false;
  bool point = false;
  for (; i < text.size(); ++i) {
    char ch = text[i];
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      num = num * 10 + (ch - '0');
      if (point) den *= 10;
      digits = true;
      if (num > kMax || den > kMax) throw fail();
    } else if (ch == '.' && !point) {
      point = true;
    } else if (ch == 'e' || ch == 'E') {
      break;
    } else {
      throw fail();
    }
  }
  if (!digits) throw fail();
  if (i < text.size()) {
    std::string_view exp_text = text.substr(i + 1);
    if (exp_text.empty()) throw fail();
    int exp = 0;
    std::size_t j = 0;
    bool exp_neg = false;
    if (exp_text[0] == '+' || exp_text[0] == '-') {
      exp_neg = exp_text[0] == '-';
      j = 1;
    }
    if (j >= exp_text.size()) throw fail();
    for (; j < exp_text.size(); ++j) {
      if (!std::isdigit(static_cast<unsigned char>(exp_text[j]))) throw fail();
      exp = exp * 10 + (exp_text[j] - '0');
      if (exp > 18) throw fail();
    }
    for (int k = 0; k < exp; ++k) {
      if (exp_neg) {
        den *= 10;
      } else {
        num *= 10;
      }
      if (num > kMax || den > kMax) throw fail();
    }
  }
  return from_wide(negative ? -num : num, den);
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

std::int64_t Rational::floor() const noexcept {
  std::int64_t q = num_ / den_;
  if ((num_ % den_ != 0) && (num_ < 0)) --q;
  return q;
}

std::int64_t Rational::ceil() const noexcept {
  std::int64_t q = num_ / den_;
  if ((num_ % den_ != 0) && (num_ > 0)) ++q;
  return q;
}

Rational operator+(const Rational& a, const Rational& b) {
  return Rational::from_wide(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                             static_cast<__int128>(a.den_) * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
  return Rational::from_wide(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.num_ == 0) throw PreconditionError("rational division by zero");
  return Rational::from_wide(static_cast<__int128>(a.num_) * b.den_, static_cast<__int128>(a.den_) * b.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) noexcept {
  __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
  __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
  return lhs <=> rhs;
}

bool within_jumbled_bound(std::int64_t edges, std::int64_t x, std::int64_t y, const Rational& p,
                          const Rational& theta) {
  // (e*pd - pn*x*y)^2 * td^2 <= tn^2 * pd^2 * x*y
  cpp_int pd = p.den(), pn = p.num(), td = theta.den(), tn = theta.num();
  cpp_int xy = cpp_int(x) * y;
  cpp_int dev = cpp_int(edges) * pd - pn * xy;
  return dev * dev * td * td <= tn * tn * pd * pd * xy;
}

bool within_density_bound(std::int64_t edges, std::int64_t u, const Rational& p, const Rational& theta) {
  // |2e*pd - pn*u(u-1)| * td <= 2*tn*u*pd
  cpp_int pd = p.den(), pn = p.num(), td = theta.den(), tn = theta.num();
  cpp_int dev = 2 * cpp_int(edges) * pd - pn * cpp_int(u) * (u - 1);
  if (dev < 0) dev = -dev;
  return dev * td <= 2 * tn * cpp_int(u) * pd;
}

}  // namespace forge
