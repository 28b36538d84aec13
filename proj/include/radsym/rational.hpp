#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace radsym {

using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

/// Parses "3", "-3/4", "0.25" or "2.5e-3" exactly. Throws ParseError.
Rational parse_rational(std::string_view text);

/// Smallest-denominator rational within 1e-13 relative of `x` when one with a
/// denominator below 10^6 exists, else the exact binary value of `x`.
Rational to_rational(double x);

double to_double(const Rational& r);
std::string to_string(const Rational& r);
bool is_integer(const Rational& r);

/// Exact value of base^exponent when it is rational, e.g. (9/4)^(1/2) = 3/2.
std::optional<Rational> exact_power(const Rational& base, const Rational& exponent);

}  // namespace radsym
