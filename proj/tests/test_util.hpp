#pragma once

#include <gluecb/series.hpp>

#include <cstdint>
#include <vector>

namespace gluecb::testutil {

// deterministic xorshift generator so expected values stay frozen
struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed ? seed : 0x9e3779b97f4a7c15ULL) {}
    std::uint64_t next() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return state;
    }
    // uniform in [0, n)
    int below(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }
    // small signed integer in [-m, m]
    int small(int m) { return below(2 * m + 1) - m; }
};

inline ExactSeries random_series(Rng& rng, const VarSet& vars, int order, int nterms,
                                 bool with_x = false) {
    ExactSeries s(vars, order);
    for (int t = 0; t < nterms; ++t) {
        Expo e(vars.size(), 0);
        int budget = rng.below(order + 1);
        for (int d = 0; d < budget; ++d) e[rng.below(static_cast<int>(vars.size()))] += 1;
        LocalizedScalar c(Rational(rng.small(9)));
        if (with_x && rng.below(3) == 0)
            c = c * LocalizedScalar::x_power(rng.small(2)) *
                LocalizedScalar::one_minus_x_power(rng.small(1));
        s.set(e, s.coefficient(e) + c);
    }
    return s;
}

// random series with invertible constant term
inline ExactSeries random_unit_series(Rng& rng, const VarSet& vars, int order, int nterms) {
    ExactSeries s = random_series(rng, vars, order, nterms);
    Expo zero(vars.size(), 0);
    int c0 = rng.small(4);
    if (c0 == 0) c0 = 1;
    s.set(zero, LocalizedScalar(Rational(c0)));
    return s;
}

}  // namespace gluecb::testutil
