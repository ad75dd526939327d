#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>

namespace mpvi {

/// Arbitrary-precision rational. GMP keeps results of arithmetic canonical
/// (gcd 1, positive denominator); values built from a numerator/denominator
/// pair must be canonicalized by the caller.
using Rational = mpq_class;

/// Parses an integer, a fraction `p/q`, or a decimal with an optional
/// exponent (`0.999`, `1e-3`). Returns nullopt on malformed input.
std::optional<Rational> parse_rational(std::string_view text);

/// Nearest double, ties to even.
double to_double(const Rational& value);

/// Exact value of a finite double.
Rational from_double(double value);

/// `p` for integers, `p/q` otherwise.
std::string to_string(const Rational& value);

/// Shortest decimal that reads back as the same double.
std::string format_double(double value);

}  // namespace mpvi
