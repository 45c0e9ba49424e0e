#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <string>
#include <string_view>

namespace cocert {

// Expression templates are disabled so that `auto` behaves like a value.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;

/// Parses "p/q", "p" or a decimal literal such as "0.25". Throws Error(ParseError).
Rational parse_rational(std::string_view text);

/// "p/q" in lowest terms, or "p" when the denominator is 1.
std::string to_string(const Rational& q);

Integer numerator_of(const Rational& q);
Integer denominator_of(const Rational& q);

/// Closest rational to `x` whose denominator does not exceed `max_denominator`.
Rational limit_denominator(const Rational& x, const Integer& max_denominator);

/// Exact value of a finite double.
Rational from_double(double x);

/// Returns true and sets `root` when q = root^2 with root >= 0 rational.
bool is_rational_square(const Rational& q, Rational& root);

double to_double(const Rational& q);

}  // namespace cocert
