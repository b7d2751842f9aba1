// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace mathsynth {

/// Exact rational in lowest terms with a positive denominator.
/// Arithmetic is overflow-checked and throws ArithmeticError rather than wrapping.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t value) : num_(value) {}  // NOLINT(google-explicit-constructor)
  Rational(std::int64_t numerator, std::int64_t denominator);

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }
  bool is_integer() const noexcept { return den_ == 1; }
  bool is_zero() const noexcept { return num_ == 0; }

  Rational operator-() const;
  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);

  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

  /// "p" when integral, otherwise "p/q".
  std::string str() const;
  /// Accepts "p", "-p", "p/q" (q may be negative; result is normalized).
  static Rational parse(std::string_view text);

  /// Non-throwing variants used by the search hot path.
  static std::optional<Rational> try_make(std::int64_t numerator, std::int64_t denominator);
  static std::optional<Rational> try_add(const Rational& a, const Rational& b);
  static std::optional<Rational> try_sub(const Rational& a, const Rational& b);
  static std::optional<Rational> try_mul(const Rational& a, const Rational& b);
  static std::optional<Rational> try_div(const Rational& a, const Rational& b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace mathsynth
