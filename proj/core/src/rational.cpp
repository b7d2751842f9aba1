// SPDX-License-Identifier: Apache-2.0
#include "mathsynth/rational.hpp"

#include <charconv>
#include <limits>
#include <numeric>

#include "mathsynth/error.hpp"

namespace mathsynth {
namespace {

__extension__ typedef __int128 Wide;

constexpr Wide kMax = std::numeric_limits<std::int64_t>::max();
constexpr Wide kMin = std::numeric_limits<std::int64_t>::min();

Wide wide_gcd(Wide a, Wide b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    Wide t = a % b;
    a = b;
    b = t;
  }
  return a;
}

std::optional<Rational> reduce(Wide n, Wide d) {
  if (d == 0) return std::nullopt;
  if (d < 0) {
    n = -n;
    d = -d;
  }
  Wide g = wide_gcd(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  if (n > kMax || n < kMin || d > kMax) return std::nullopt;
  return Rational::try_make(static_cast<std::int64_t>(n), static_cast<std::int64_t>(d));
}

Rational must(std::optional<Rational> r, const char* what) {
  if (!r) throw ArithmeticError(what);
  return *r;
}

}  // namespace

std::string_view fault_name(FaultCode code) noexcept {
  switch (code) {
    case FaultCode::IndexOutOfRange: return "index out of range";
    case FaultCode::ContainsEquality: return "subtree contains '='";
    case FaultCode::RootReplacement: return "cannot replace the '=' root";
    case FaultCode::NotApplicable: return "not applicable";
    case FaultCode::NonCommutative: return "non-commutative operator";
    case FaultCode::LeafNode: return "leaf node";
    case FaultCode::MixedOperatorClass: return "mixed operator classes";
    case FaultCode::NoCommonFactor: return "no common factor";
    case FaultCode::DivisionByZero: return "division by zero";
    case FaultCode::Overflow: return "integer overflow";
    case FaultCode::TypeMismatch: return "type mismatch";
    case FaultCode::StepLimit: return "evaluation step limit exceeded";
  }
  return "unknown fault";
}

std::string describe(const Fault& fault) {
  std::string out(fault_name(fault.code));
  if (!fault.detail.empty()) {
    out += ": ";
    out += fault.detail;
  }
  return out;
}

Rational::Rational(std::int64_t numerator, std::int64_t denominator) {
  if (denominator == 0) throw ArithmeticError("zero denominator");
  *this = must(reduce(numerator, denominator), "rational overflow");
}

std::optional<Rational> Rational::try_make(std::int64_t numerator, std::int64_t denominator) {
  if (denominator == 0) return std::nullopt;
  if (denominator < 0 || std::gcd(numerator, denominator) != 1) {
    if (denominator == 1) {
      Rational r;
      r.num_ = numerator;
      return r;
    }
    return reduce(numerator, denominator);
  }
  Rational r;
  r.num_ = numerator;
  r.den_ = denominator;
  return r;
}

std::optional<Rational> Rational::try_add(const Rational& a, const Rational& b) {
  return reduce(Wide(a.num_) * b.den_ + Wide(b.num_) * a.den_, Wide(a.den_) * b.den_);
}

std::optional<Rational> Rational::try_sub(const Rational& a, const Rational& b) {
  return reduce(Wide(a.num_) * b.den_ - Wide(b.num_) * a.den_, Wide(a.den_) * b.den_);
}

std::optional<Rational> Rational::try_mul(const Rational& a, const Rational& b) {
  return reduce(Wide(a.num_) * b.num_, Wide(a.den_) * b.den_);
}

std::optional<Rational> Rational::try_div(const Rational& a, const Rational& b) {
  if (b.num_ == 0) return std::nullopt;
  return reduce(Wide(a.num_) * b.den_, Wide(a.den_) * b.num_);
}

Rational Rational::operator-() const { return must(reduce(-Wide(num_), den_), "rational overflow"); }

Rational operator+(const Rational& a, const Rational& b) {
  return must(Rational::try_add(a, b), "rational overflow");
}
Rational operator-(const Rational& a, const Rational& b) {
  return must(Rational::try_sub(a, b), "rational overflow");
}
Rational operator*(const Rational& a, const Rational& b) {
  return must(Rational::try_mul(a, b), "rational overflow");
}
Rational operator/(const Rational& a, const Rational& b) {
  if (b.is_zero()) throw ArithmeticError("division by zero");
  return must(Rational::try_div(a, b), "rational overflow");
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  Wide lhs = Wide(a.num_) * b.den_;
  Wide rhs = Wide(b.num_) * a.den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::parse(std::string_view text) {
  auto parse_int = [&](std::string_view part) {
    std::int64_t v = 0;
    const char* first = part.data();
    const char* last = part.data() + part.size();
    if (!part.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || first == last) {
      throw ParseError("malformed rational '" + std::string(text) + "'", 0);
    }
    return v;
  };
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text));
  std::int64_t d = parse_int(text.substr(slash + 1));
  if (d == 0) throw ParseError("zero denominator in '" + std::string(text) + "'", slash + 1);
  return Rational(parse_int(text.substr(0, slash)), d);
}

}  // namespace mathsynth
