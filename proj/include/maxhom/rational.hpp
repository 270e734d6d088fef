#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

namespace maxhom {

using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

// Parses "p/q" or "p" (optional leading '-'). Throws on malformed input,
// q = 0, or stray characters.
Rational parse_rational(const std::string& s);

// Always renders with an explicit denominator, e.g. "4/1", "-2/3".
std::string format_rational(const Rational& r);

// Convenience literal for test/code readability: rat(2,3) == 2/3.
inline Rational rat(long long p, long long q = 1) { return Rational(p) / q; }

// Least multiple r of a grid fine enough for the denominator cap such that
// r*r >= x, refined to the smallest rational with denominator <= den_cap
// satisfying r^2 >= x (Stern-Brocot walk). x must be >= 0.
Rational rational_sqrt_upper(const Rational& x, long long den_cap = 1000000);

// Same idea for k-th roots: smallest rational with denominator <= den_cap
// whose k-th power is >= x.
Rational rational_root_upper(const Rational& x, int k, long long den_cap = 1000000);

// floor(log_base(x)) for base > 1, x > 0, computed exactly over rationals;
// used for geometric bucketing (base < 1 handled by the caller via negation).
long long floor_log(const Rational& base, const Rational& x);

} // namespace maxhom
