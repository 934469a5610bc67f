#include "kinlab/ext_rational.hpp"

#include <limits>
#include <ostream>

#include "kinlab/error.hpp"

namespace kinlab {

namespace {

const char* kModule = "exponents";

Rational parse_integer(std::string_view s) {
  if (s.empty()) throw MalformedInput(kModule, "empty number");
  std::size_t i = 0;
  if (s[0] == '-' || s[0] == '+') i = 1;
  if (i == s.size()) throw MalformedInput(kModule, "bad number '" + std::string(s) + "'");
  for (std::size_t k = i; k < s.size(); ++k) {
    if (s[k] < '0' || s[k] > '9') {
      throw MalformedInput(kModule, "bad number '" + std::string(s) + "'");
    }
  }
  return Rational(boost::multiprecision::cpp_int(std::string(s[0] == '+' ? s.substr(1) : s)));
}

Rational parse_decimal(std::string_view s) {
  // "1.25" -> 125/100, kept exact.
  const auto dot = s.find('.');
  if (dot == std::string_view::npos) return parse_integer(s);
  std::string digits(s.substr(0, dot));
  const std::string_view frac = s.substr(dot + 1);
  if (frac.empty()) throw MalformedInput(kModule, "bad number '" + std::string(s) + "'");
  digits += frac;
  if (digits == "-" || digits == "+") digits += "0";
  Rational r = parse_integer(digits);
  boost::multiprecision::cpp_int scale = 1;
  for (std::size_t k = 0; k < frac.size(); ++k) scale *= 10;
  return r / Rational(scale);
}

}  // namespace

ExtRational::ExtRational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw MalformedInput(kModule, "zero denominator");
  value_ = Rational(num) / Rational(den);
}

ExtRational ExtRational::parse(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text == "inf" || text == "+inf" || text == "infinity" || text == "\xE2\x88\x9E") {
    return infinity();
  }
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return ExtRational(parse_decimal(text));
  const Rational num = parse_decimal(text.substr(0, slash));
  const Rational den = parse_decimal(text.substr(slash + 1));
  if (den == 0) throw MalformedInput(kModule, "zero denominator in '" + std::string(text) + "'");
  return ExtRational(num / den);
}

const Rational& ExtRational::value() const {
  if (!value_) throw OutOfRange(kModule, "value() of infinity");
  return *value_;
}

ExtRational ExtRational::reciprocal() const {
  if (is_infinite()) return ExtRational(0);
  if (*value_ == 0) return infinity();
  return ExtRational(Rational(1) / *value_);
}

ExtRational ExtRational::conjugate() const {
  if (is_infinite()) return ExtRational(1);
  if (*value_ < 1) throw OutOfRange(kModule, "Hoelder conjugate needs exponent >= 1, got " + str());
  if (*value_ == 1) return infinity();
  return ExtRational(*value_ / (*value_ - 1));
}

double ExtRational::to_double() const {
  if (is_infinite()) return std::numeric_limits<double>::infinity();
  return value_->convert_to<double>();
}

std::string ExtRational::str() const {
  if (is_infinite()) return "inf";
  const auto num = boost::multiprecision::numerator(*value_);
  const auto den = boost::multiprecision::denominator(*value_);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

ExtRational operator+(const ExtRational& a, const ExtRational& b) {
  if (a.is_infinite() || b.is_infinite()) return ExtRational::infinity();
  return ExtRational(*a.value_ + *b.value_);
}

ExtRational operator-(const ExtRational& a, const ExtRational& b) {
  if (b.is_infinite()) throw OutOfRange(kModule, "subtraction of infinity");
  if (a.is_infinite()) return ExtRational::infinity();
  return ExtRational(*a.value_ - *b.value_);
}

ExtRational operator*(const ExtRational& a, const ExtRational& b) {
  if (a.is_infinite() || b.is_infinite()) {
    if (a.is_zero() || b.is_zero()) throw OutOfRange(kModule, "0 * inf is undefined");
    if ((a.is_finite() && *a.value_ < 0) || (b.is_finite() && *b.value_ < 0)) {
      throw OutOfRange(kModule, "negative infinity is not representable");
    }
    return ExtRational::infinity();
  }
  return ExtRational(*a.value_ * *b.value_);
}

ExtRational operator/(const ExtRational& a, const ExtRational& b) {
  if (b.is_zero()) throw OutOfRange(kModule, "division by zero");
  return a * b.reciprocal();
}

bool operator==(const ExtRational& a, const ExtRational& b) {
  if (a.is_infinite() || b.is_infinite()) return a.is_infinite() && b.is_infinite();
  return *a.value_ == *b.value_;
}

std::strong_ordering operator<=>(const ExtRational& a, const ExtRational& b) {
  if (a.is_infinite()) return b.is_infinite() ? std::strong_ordering::equal : std::strong_ordering::greater;
  if (b.is_infinite()) return std::strong_ordering::less;
  if (*a.value_ < *b.value_) return std::strong_ordering::less;
  if (*a.value_ > *b.value_) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::ostream& operator<<(std::ostream& os, const ExtRational& x) { return os << x.str(); }

}  // namespace kinlab
