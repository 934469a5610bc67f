#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace kinlab {

using Rational = boost::multiprecision::cpp_rational;

/// Exact rational extended by a single +infinity symbol.
///
/// Only the operations the exponent algebra needs are defined. Negative
/// values are representable (differences of reciprocals are signed) but
/// infinity is always positive; `inf - inf` and `0 * inf` are rejected.
class ExtRational {
 public:
  ExtRational() = default;
  ExtRational(std::int64_t n) : value_(Rational(n)) {}  // NOLINT(implicit)
  ExtRational(std::int64_t num, std::int64_t den);
  explicit ExtRational(Rational r) : value_(std::move(r)) {}

  static ExtRational infinity() { return ExtRational(Tag{}); }

  /// Parses "4/3", "2", "-1/2", "inf" or "∞".
  static ExtRational parse(std::string_view text);

  bool is_infinite() const { return !value_.has_value(); }
  bool is_finite() const { return value_.has_value(); }
  bool is_positive() const { return is_infinite() || *value_ > 0; }
  bool is_zero() const { return is_finite() && *value_ == 0; }

  /// Finite value; throws if infinite.
  const Rational& value() const;

  /// 1/x with 1/inf = 0 and 1/0 = inf.
  ExtRational reciprocal() const;

  /// Hoelder conjugate x' with 1/x + 1/x' = 1; requires x >= 1.
  ExtRational conjugate() const;

  double to_double() const;
  std::string str() const;

  friend ExtRational operator+(const ExtRational& a, const ExtRational& b);
  friend ExtRational operator-(const ExtRational& a, const ExtRational& b);
  friend ExtRational operator*(const ExtRational& a, const ExtRational& b);
  friend ExtRational operator/(const ExtRational& a, const ExtRational& b);
  friend bool operator==(const ExtRational& a, const ExtRational& b);
  friend std::strong_ordering operator<=>(const ExtRational& a, const ExtRational& b);

 private:
  struct Tag {};
  explicit ExtRational(Tag) : value_(std::nullopt) {}

  std::optional<Rational> value_ = Rational(0);
};

std::ostream& operator<<(std::ostream& os, const ExtRational& x);

}  // namespace kinlab
