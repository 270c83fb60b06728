#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <string>

namespace padicqm {

/// Exact rational scalar used for norms, Haar measures, fractional parts and
/// Monna coordinates. Desk-scale windows keep numerators/denominators far
/// below the int64 range.
using Rational = boost::rational<long long>;

/// p^e as an exact rational, e of either sign.
inline Rational rational_pow(long long p, int e) {
    long long v = 1;
    for (int i = 0; i < (e < 0 ? -e : e); ++i) v *= p;
    return e < 0 ? Rational(1, v) : Rational(v);
}

inline double to_double(const Rational& q) {
    return static_cast<double>(q.numerator()) / static_cast<double>(q.denominator());
}

inline std::string to_string(const Rational& q) {
    if (q.denominator() == 1) return std::to_string(q.numerator());
    return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

}  // namespace padicqm
