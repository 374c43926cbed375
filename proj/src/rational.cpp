#include "soficlab/rational.hpp"

#include <cmath>
#include <cstdlib>

namespace soficlab {

std::string to_string(const Rational& r) {
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) {
      return Rational(std::stoll(text));
    }
    const std::int64_t num = std::stoll(text.substr(0, slash));
    const std::int64_t den = std::stoll(text.substr(slash + 1));
    if (den <= 0) {
      throw std::invalid_argument("rational denominator must be positive: " + text);
    }
    return Rational(num, den);
  } catch (const std::out_of_range&) {
    throw std::invalid_argument("rational out of range: " + text);
  }
}

double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

std::int64_t floor_times(const Rational& r, std::int64_t n) {
  if (r < Rational(0)) {
    throw std::invalid_argument("floor_times expects a nonnegative rational");
  }
  const BigInt num = BigInt(r.numerator()) * n;
  const BigInt q = num / r.denominator();  // exact floor: operands nonnegative
  return static_cast<std::int64_t>(q);
}

double log_bigint(const BigInt& value) {
  if (value <= 0) {
    throw std::invalid_argument("log_bigint expects a positive value");
  }
  const std::size_t bits = boost::multiprecision::msb(value) + 1;
  // Single set bit: k * ln 2 exactly, so log(a^d)/d reproduces log a bit-for-bit
  // for powers of two.
  if (boost::multiprecision::lsb(value) == bits - 1) {
    return static_cast<double>(bits - 1) * std::log(2.0);
  }
  if (bits <= 62) {
    return std::log(static_cast<double>(value));
  }
  const BigInt top = value >> (bits - 62);
  return std::log(static_cast<double>(top)) + static_cast<double>(bits - 62) * std::log(2.0);
}

}  // namespace soficlab
