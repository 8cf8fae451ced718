// SPDX-License-Identifier: MIT
#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

namespace pirlab {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational make_rational(long long num, long long den = 1) { return Rational(BigInt(num), BigInt(den)); }

// "3/5", or "2" when the denominator is 1.
inline std::string to_string(const Rational& r) {
    BigInt n = boost::multiprecision::numerator(r);
    BigInt d = boost::multiprecision::denominator(r);
    if (d == 1) return n.str();
    return n.str() + "/" + d.str();
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace pirlab
