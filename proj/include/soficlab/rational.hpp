#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

namespace soficlab {

/// Exact rational arithmetic for all metric/threshold values. Floating point
/// is banned from the quality pipeline; everything order-sensitive goes
/// through Rational.
using Rational = boost::rational<std::int64_t>;

/// Unbounded integers (polynomial coefficients, trace counts, binomial tails).
using BigInt = boost::multiprecision::cpp_int;

/// Serializes as "num/den", always reduced, denominator positive.
std::string to_string(const Rational& r);

/// Parses "num/den" or a bare integer "num". Exact; no decimals accepted.
Rational parse_rational(const std::string& text);

double to_double(const Rational& r);

/// floor(r * n) as a nonnegative integer; r must be >= 0.
std::int64_t floor_times(const Rational& r, std::int64_t n);

/// Natural log of a positive BigInt. Exact for powers of two.
double log_bigint(const BigInt& value);

}  // namespace soficlab
