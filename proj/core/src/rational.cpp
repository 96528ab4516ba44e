#include "conedioph/rational.hpp"

#include <boost/multiprecision/integer.hpp>

#include <stdexcept>

namespace cd {

Rational parse_rational(const std::string& token) {
  auto slash = token.find('/');
  try {
    if (slash == std::string::npos) {
      return Rational(Int(token));
    }
    Int num(token.substr(0, slash));
    Int den(token.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator: " + token);
    return Rational(num, den);
  } catch (const std::runtime_error&) {
    throw std::invalid_argument("malformed rational token: " + token);
  }
}

std::string rational_to_string(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

Int gcd_vector(const std::vector<Int>& v) {
  Int g = 0;
  for (const auto& x : v) g = boost::multiprecision::gcd(g, x);
  return g;
}

Int isqrt(const Int& n) {
  if (n < 0) throw std::domain_error("isqrt of negative");
  return boost::multiprecision::sqrt(n);
}

bool is_square(const Int& n, Int* root) {
  if (n < 0) return false;
  Int r = isqrt(n);
  if (r * r != n) return false;
  if (root) *root = r;
  return true;
}

int sign(const Rational& r) {
  if (r > 0) return 1;
  if (r < 0) return -1;
  return 0;
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace cd
