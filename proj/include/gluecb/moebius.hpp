#pragma once

#include <gluecb/series.hpp>

#include <array>
#include <stdexcept>

namespace gluecb {

struct IndeterminateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Homogeneous pair [u : v]; infinity is [1 : 0].
template <typename R>
struct ProjectivePoint {
    R u;
    R v;
};

// Projective 2x2 matrix; equality is scalar equality (all 2x2 minors of the
// stacked 2x4 matrix vanish).
template <typename R>
struct Moebius {
    R a, b, c, d;

    R det() const { return a * d - b * c; }
    R trace() const { return a + d; }

    Moebius adjugate() const { return {d, -b, -c, a}; }

    ProjectivePoint<R> apply(const ProjectivePoint<R>& p) const {
        return {a * p.u + b * p.v, c * p.u + d * p.v};
    }

    friend Moebius operator*(const Moebius& m, const Moebius& n) {
        return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d, m.c * n.a + m.d * n.c,
                m.c * n.b + m.d * n.d};
    }
};

template <typename R>
bool projectively_equal(const ProjectivePoint<R>& p, const ProjectivePoint<R>& q) {
    return p.u * q.v == q.u * p.v;
}

template <typename R>
bool projectively_equal(const Moebius<R>& m, const Moebius<R>& n) {
    std::array<R, 4> me{m.a, m.b, m.c, m.d};
    std::array<R, 4> ne{n.a, n.b, n.c, n.d};
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (me[i] * ne[j] != me[j] * ne[i]) return false;
    return true;
}

// [a; b; c; d] = (a-c)(b-d) / ((a-d)(b-c)), computed homogeneously with no
// intermediate division; returns numerator and denominator.
template <typename R>
std::pair<R, R> cross_ratio_homogeneous(const ProjectivePoint<R>& a, const ProjectivePoint<R>& b,
                                        const ProjectivePoint<R>& c, const ProjectivePoint<R>& d) {
    auto minor = [](const ProjectivePoint<R>& p, const ProjectivePoint<R>& q) {
        return p.u * q.v - q.u * p.v;
    };
    R num = minor(a, c) * minor(b, d);
    R den = minor(a, d) * minor(b, c);
    return {num, den};
}

inline ExactSeries cross_ratio(const ProjectivePoint<ExactSeries>& a,
                               const ProjectivePoint<ExactSeries>& b,
                               const ProjectivePoint<ExactSeries>& c,
                               const ProjectivePoint<ExactSeries>& d) {
    auto [num, den] = cross_ratio_homogeneous(a, b, c, d);
    if (num.is_zero() && den.is_zero())
        throw IndeterminateError("cross ratio: both homogeneous components vanish");
    return num * den.invert();
}

inline Complex cross_ratio(const ProjectivePoint<Complex>& a, const ProjectivePoint<Complex>& b,
                           const ProjectivePoint<Complex>& c, const ProjectivePoint<Complex>& d) {
    auto [num, den] = cross_ratio_homogeneous(a, b, c, d);
    if (std::abs(num) == 0.0 && std::abs(den) == 0.0)
        throw IndeterminateError("cross ratio: both homogeneous components vanish");
    return num / den;
}

}  // namespace gluecb
