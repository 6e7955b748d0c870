#pragma once

#include <gluecb/rational.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace gluecb {

struct DegenerateModuleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Weakly decreasing positive parts; indexes the basis vector
// L_{-p1} L_{-p2} ... e of a highest-weight module.
struct Partition {
    std::vector<int> parts;

    Partition() = default;
    Partition(std::initializer_list<int> ps) : parts(ps) { normalize(); }
    explicit Partition(std::vector<int> ps) : parts(std::move(ps)) { normalize(); }

    int level() const {
        int s = 0;
        for (int p : parts) s += p;
        return s;
    }
    bool empty() const { return parts.empty(); }

    // tail after removing the leading (largest) part
    Partition rest() const { return Partition(std::vector<int>(parts.begin() + 1, parts.end())); }

    friend bool operator==(const Partition& a, const Partition& b) { return a.parts == b.parts; }
    // basis order: by level, then larger leading parts first (L_{-2}e
    // precedes L_{-1}^2 e at level 2)
    friend bool operator<(const Partition& a, const Partition& b) {
        int la = a.level(), lb = b.level();
        if (la != lb) return la < lb;
        return a.parts > b.parts;
    }

    // all partitions of n in basis order
    static std::vector<Partition> all(int n) {
        std::vector<Partition> out;
        std::vector<int> cur;
        std::function<void(int, int)> rec = [&](int remaining, int maxpart) {
            if (remaining == 0) {
                out.emplace_back(std::vector<int>(cur));
                return;
            }
            for (int p = std::min(remaining, maxpart); p >= 1; --p) {
                cur.push_back(p);
                rec(remaining - p, p);
                cur.pop_back();
            }
        };
        rec(n, n);
        return out;
    }

    std::string str() const {
        std::string s = "(";
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(parts[i]);
        }
        return s + ")";
    }

private:
    void normalize() {
        std::sort(parts.begin(), parts.end(), std::greater<int>());
        for (int p : parts)
            if (p <= 0) throw std::invalid_argument("partition parts must be positive");
    }
};

template <typename F>
struct VirasoroParams {
    F c;
    F delta;
};

// c = 1 + 6 Q^2, Delta = alpha (Q - alpha)
template <typename F>
VirasoroParams<F> params_from_alpha(const F& Q, const F& alpha) {
    return {F(1) + F(6) * Q * Q, alpha * (Q - alpha)};
}

template <typename F>
bool field_zero(const F& v) {
    if constexpr (std::is_same_v<F, Complex>)
        return std::abs(v) < 1e-13;
    else
        return v == F(0);
}

// Homogeneous element of the Verma module: coefficients on the partition
// basis at one level.
template <typename F>
struct VermaVector {
    std::map<Partition, F> terms;

    static VermaVector highest_weight() {
        VermaVector v;
        v.terms.emplace(Partition{}, F(1));
        return v;
    }
    static VermaVector basis(const Partition& p) {
        VermaVector v;
        v.terms.emplace(p, F(1));
        return v;
    }

    bool is_zero() const { return terms.empty(); }
    int level() const { return terms.empty() ? 0 : terms.begin()->first.level(); }

    void add(const Partition& p, const F& c) {
        auto it = terms.find(p);
        if (it == terms.end()) {
            if (!field_zero(c)) terms.emplace(p, c);
        } else {
            it->second = it->second + c;
            if (field_zero(it->second)) terms.erase(it);
        }
    }

    VermaVector& operator+=(const VermaVector& o) {
        for (const auto& [p, c] : o.terms) add(p, c);
        return *this;
    }
    friend VermaVector operator+(VermaVector a, const VermaVector& b) { return a += b; }
    VermaVector& scale(const F& c) {
        if (field_zero(c)) {
            terms.clear();
            return *this;
        }
        for (auto& [p, v] : terms) v = v * c;
        return *this;
    }
    friend VermaVector operator*(VermaVector a, const F& c) { return a.scale(c); }
    friend bool operator==(const VermaVector& a, const VermaVector& b) {
        return a.terms == b.terms;
    }
};

namespace detail {

// L_n applied to the word L_{-w0} L_{-w1} ... e (w weakly decreasing),
// normal ordered via the bracket
// [L_n, L_m] = (n - m) L_{n+m} + (c/12) n (n^2 - 1) delta_{n+m,0}.
template <typename F>
VermaVector<F> apply_word(int n, const std::vector<int>& w, const VirasoroParams<F>& par) {
    VermaVector<F> out;
    if (w.empty()) {
        if (n > 0) return out;
        if (n == 0) {
            out.add(Partition{}, par.delta);
            return out;
        }
        out.add(Partition{std::vector<int>{-n}}, F(1));
        return out;
    }
    int m = -w[0];
    std::vector<int> rest(w.begin() + 1, w.end());
    if (n < 0 && -n >= w[0]) {
        // already normal ordered: prepend
        std::vector<int> parts(w);
        parts.insert(parts.begin(), -n);
        out.add(Partition(std::move(parts)), F(1));
        return out;
    }
    // L_n L_m = L_m L_n + (n - m) L_{n+m} + (c/12) n (n^2-1) delta_{n+m,0}
    VermaVector<F> inner = apply_word(n, rest, par);
    for (const auto& [p, c] : inner.terms) {
        VermaVector<F> t = apply_word(m, p.parts, par);
        out += t.scale(c);
    }
    VermaVector<F> bracket = apply_word(n + m, rest, par);
    out += bracket.scale(F(n - m));
    if (n + m == 0) {
        F central = par.c * F(n * (n * n - 1)) / F(12);
        out.add(Partition(rest), central);
    }
    return out;
}

}  // namespace detail

template <typename F>
VermaVector<F> apply_L(int n, const VermaVector<F>& v, const VirasoroParams<F>& par) {
    VermaVector<F> out;
    for (const auto& [p, c] : v.terms) {
        VermaVector<F> t = detail::apply_word(n, p.parts, par);
        out += t.scale(c);
    }
    return out;
}

// Shapovalov pairing of two homogeneous vectors (zero across levels).
template <typename F>
F inner_product(const VermaVector<F>& v, const VermaVector<F>& w, const VirasoroParams<F>& par) {
    F total(0);
    for (const auto& [p, c] : v.terms) {
        // adjoint of L_{-p0} L_{-p1} ... is ... L_{p1} L_{p0}; peel leftmost
        VermaVector<F> u = w;
        for (int part : p.parts) u = apply_L(part, u, par);
        auto it = u.terms.find(Partition{});
        if (it != u.terms.end()) total = total + c * it->second;
    }
    return total;
}

template <typename F>
using Matrix = std::vector<std::vector<F>>;

template <typename F>
Matrix<F> gram_matrix(const VirasoroParams<F>& par, int level) {
    auto basis = Partition::all(level);
    std::size_t n = basis.size();
    Matrix<F> g(n, std::vector<F>(n, F(0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            F v = inner_product(VermaVector<F>::basis(basis[i]),
                                VermaVector<F>::basis(basis[j]), par);
            g[i][j] = v;
            g[j][i] = v;
        }
    return g;
}

// Gauss-Jordan inverse; exact over the rationals.  Throws DegenerateModuleError
// on a singular matrix.
template <typename F>
Matrix<F> matrix_inverse(Matrix<F> a) {
    std::size_t n = a.size();
    Matrix<F> inv(n, std::vector<F>(n, F(0)));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = F(1);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        if constexpr (std::is_same_v<F, Complex>) {
            for (std::size_t r = col + 1; r < n; ++r)
                if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        } else {
            while (piv < n && field_zero(a[piv][col])) ++piv;
        }
        if (piv >= n || field_zero(a[piv][col]))
            throw DegenerateModuleError("Gram matrix is singular at this level");
        std::swap(a[piv], a[col]);
        std::swap(inv[piv], inv[col]);
        F d = a[col][col];
        for (std::size_t j = 0; j < n; ++j) {
            a[col][j] = a[col][j] / d;
            inv[col][j] = inv[col][j] / d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || field_zero(a[r][col])) continue;
            F f = a[r][col];
            for (std::size_t j = 0; j < n; ++j) {
                a[r][j] = a[r][j] - f * a[col][j];
                inv[r][j] = inv[r][j] - f * inv[col][j];
            }
        }
    }
    return inv;
}

template <typename F>
Matrix<F> dual_basis(const VirasoroParams<F>& par, int level) {
    return matrix_inverse(gram_matrix(par, level));
}

// ---- invariant three-point functional ---------------------------------
//
// Punctures at (infinity, 1, 0) with local coordinates (1/z, z-1, z).  The
// global vector fields used for reduction all have the shape
// s * z^a * (z-1)^b; mode coefficients below are c_k in
// rho(chi) = sum_k c_k L_k with the identification L_k = -xi^{k+1} d/dxi.

namespace detail {

template <typename F>
F binomial(int top, int k) {
    if (k < 0) return F(0);
    F r(1);
    for (int j = 0; j < k; ++j) r = r * F(top - j) / F(j + 1);
    return r;
}

// coefficient of z^j in (z-1)^b, j >= 0
template <typename F>
F zm1_coeff(int b, int j) {
    if (j < 0) return F(0);
    if (b >= 0) {
        if (j > b) return F(0);
        return binomial<F>(b, j) * F((b - j) % 2 == 0 ? 1 : -1);
    }
    // (z-1)^b = (-1)^b sum_j C(-b-1+j, j) z^j
    F sign((-b) % 2 == 0 ? 1 : -1);
    return sign * binomial<F>(-b - 1 + j, j);
}

}  // namespace detail

// mode coefficient c_k of chi = s z^a (z-1)^b at leg 1, 2 or 3
template <typename F>
F leg_mode(int leg, int s, int a, int b, int k) {
    using detail::binomial;
    using detail::zm1_coeff;
    F sf(s);
    switch (leg) {
        case 3:  // xi = z
            return -(sf * zm1_coeff<F>(b, k + 1 - a));
        case 2:  // xi = z - 1
            return -(sf * binomial<F>(a, k + 1 - b));
        case 1: {  // xi = 1/z: chi = -s xi^{2-a-b} (1-xi)^b d/dxi
            int j = k + a + b - 1;
            if (j < 0) return F(0);
            return sf * binomial<F>(b, j) * F(j % 2 == 0 ? 1 : -1);
        }
        default:
            throw std::invalid_argument("leg must be 1, 2 or 3");
    }
}

enum class WardStrategy {
    LastLegFirst,   // clear descendants on leg 3, then 2, then 1
    FirstLegFirst,  // clear descendants on leg 1, then 2, then 3
};

template <typename F>
class ThreePoint {
public:
    ThreePoint(std::array<VirasoroParams<F>, 3> params,
               WardStrategy strategy = WardStrategy::LastLegFirst)
        : par_(std::move(params)), strategy_(strategy) {}

    F operator()(const Partition& m1, const Partition& m2, const Partition& m3) {
        return value({m1, m2, m3});
    }

    F operator()(const VermaVector<F>& v1, const VermaVector<F>& v2, const VermaVector<F>& v3) {
        F total(0);
        for (const auto& [p1, c1] : v1.terms)
            for (const auto& [p2, c2] : v2.terms)
                for (const auto& [p3, c3] : v3.terms)
                    total = total + c1 * c2 * c3 * value({p1, p2, p3});
        return total;
    }

    // sum over legs of F(..., rho_leg(chi) v_leg, ...) for chi = s z^a (z-1)^b
    // with poles only at the punctures; zero by invariance
    F apply_field(int s, int a, int b, const VermaVector<F>& v1, const VermaVector<F>& v2,
                  const VermaVector<F>& v3) {
        std::array<const VermaVector<F>*, 3> legs{&v1, &v2, &v3};
        F total(0);
        for (int leg = 1; leg <= 3; ++leg) {
            int lv = legs[leg - 1]->level();
            for (int k = -(std::abs(a) + std::abs(b) + 2); k <= lv; ++k) {
                F ck = leg_mode<F>(leg, s, a, b, k);
                if (field_zero(ck)) continue;
                VermaVector<F> moved = apply_L(k, *legs[leg - 1], par_[leg - 1]);
                if (moved.is_zero()) continue;
                std::array<const VermaVector<F>*, 3> t = legs;
                t[leg - 1] = &moved;
                total = total + ck * (*this)(*t[0], *t[1], *t[2]);
            }
        }
        return total;
    }

private:
    std::array<VirasoroParams<F>, 3> par_;
    WardStrategy strategy_;
    std::map<std::array<std::vector<int>, 3>, F> memo_;

    F value(std::array<Partition, 3> p) {
        if (p[0].empty() && p[1].empty() && p[2].empty()) return F(1);
        std::array<std::vector<int>, 3> key{p[0].parts, p[1].parts, p[2].parts};
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;

        // choose which leg to clear
        std::array<int, 3> priority = strategy_ == WardStrategy::LastLegFirst
                                          ? std::array<int, 3>{3, 2, 1}
                                          : std::array<int, 3>{1, 2, 3};
        int leg = 0;
        for (int cand : priority)
            if (!p[cand - 1].empty()) {
                leg = cand;
                break;
            }
        int n = p[leg - 1].parts[0];
        Partition rest = p[leg - 1].rest();

        // vector field whose leg-local modes reach L_{-n}
        int s = 1, a = 0, b = 0;
        switch (leg) {
            case 3: s = 1, a = 1 - n, b = 1; break;
            case 2: s = 1, a = 1, b = 1 - n; break;
            case 1: s = -1, a = n, b = 1; break;
        }
        F eps = leg_mode<F>(leg, s, a, b, -n);

        F acc(0);
        for (int l = 1; l <= 3; ++l) {
            const Partition& base = (l == leg) ? rest : p[l - 1];
            int kmin = (l == leg) ? -n + 1 : 0;
            for (int k = kmin; k <= base.level(); ++k) {
                F ck = leg_mode<F>(l, s, a, b, k);
                if (field_zero(ck)) continue;
                VermaVector<F> moved =
                    apply_L(k, VermaVector<F>::basis(base), par_[l - 1]);
                for (const auto& [q, c] : moved.terms) {
                    std::array<Partition, 3> next = p;
                    next[leg - 1] = rest;
                    next[l - 1] = q;
                    acc = acc + ck * c * value(next);
                }
            }
        }
        F result = -acc / eps;
        memo_.emplace(std::move(key), result);
        return result;
    }
};

template <typename F>
F three_point(const std::array<VirasoroParams<F>, 3>& params, const Partition& m1,
              const Partition& m2, const Partition& m3,
              WardStrategy strategy = WardStrategy::LastLegFirst) {
    ThreePoint<F> tp(params, strategy);
    return tp(m1, m2, m3);
}

}  // namespace gluecb
