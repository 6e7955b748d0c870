#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <complex>
#include <string>

namespace gluecb {

using Integer = boost::multiprecision::cpp_int;
// eager evaluation: lazy expression templates interact badly with code that
// captures subexpressions (test assertion macros do)
using Rational =
    boost::multiprecision::number<boost::multiprecision::cpp_rational_backend,
                                  boost::multiprecision::et_off>;
using Complex = std::complex<double>;

inline std::string to_string(const Rational& r) {
    return r.str();
}

inline double to_double(const Rational& r) {
    return r.convert_to<double>();
}

// True when r = (p/q)^2 for some rational p/q.
inline bool is_rational_square(const Rational& r) {
    using boost::multiprecision::numerator;
    using boost::multiprecision::denominator;
    using boost::multiprecision::sqrt;
    if (r < 0) return false;
    const Integer n = numerator(r), d = denominator(r);
    const Integer sn = sqrt(n), sd = sqrt(d);
    return sn * sn == n && sd * sd == d;
}

}  // namespace gluecb
