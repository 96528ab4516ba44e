#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>
#include <vector>

namespace cd {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Parses a "p" or "p/q" token. Throws std::invalid_argument on malformed
/// input or zero denominator.
Rational parse_rational(const std::string& token);

/// Emits "p" for integers, "p/q" otherwise (canonical reduced form).
std::string rational_to_string(const Rational& r);

Int gcd_vector(const std::vector<Int>& v);

/// floor(sqrt(n)) for n >= 0.
Int isqrt(const Int& n);

/// True iff n is a perfect square; root returned through *root if non-null.
bool is_square(const Int& n, Int* root = nullptr);

int sign(const Rational& r);

double to_double(const Rational& r);

}  // namespace cd
