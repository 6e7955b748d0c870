#pragma once

#include <gluecb/localized_scalar.hpp>
#include <gluecb/rational.hpp>

#include <algorithm>
#include <map>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace gluecb {

struct VariableMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotDivisibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Expo = std::vector<int>;

inline int total_degree(const Expo& e) {
    return std::accumulate(e.begin(), e.end(), 0);
}

// graded-lexicographic: by total degree first, then lex
struct GradedLex {
    bool operator()(const Expo& a, const Expo& b) const {
        int da = total_degree(a), db = total_degree(b);
        if (da != db) return da < db;
        return a < b;
    }
};

template <typename C>
struct coeff_traits;

template <>
struct coeff_traits<LocalizedScalar> {
    static bool is_zero(const LocalizedScalar& c) { return c.is_zero(); }
    static bool is_unit(const LocalizedScalar& c) { return c.is_unit(); }
    static LocalizedScalar inverse(const LocalizedScalar& c) { return c.inverse(); }
    static LocalizedScalar one() { return LocalizedScalar(1); }
};

template <>
struct coeff_traits<Rational> {
    static bool is_zero(const Rational& c) { return c == 0; }
    static bool is_unit(const Rational& c) { return c != 0; }
    static Rational inverse(const Rational& c) { return Rational(1) / c; }
    static Rational one() { return Rational(1); }
};

template <>
struct coeff_traits<Complex> {
    static bool is_zero(const Complex& c) { return c == Complex(0.0); }
    static bool is_unit(const Complex& c) { return c != Complex(0.0); }
    static Complex inverse(const Complex& c) { return Complex(1.0) / c; }
    static Complex one() { return Complex(1.0); }
};

// Named, ordered variable set shared between series of one ring.
class VarSet {
public:
    VarSet() : names_(std::make_shared<std::vector<std::string>>()) {}
    explicit VarSet(std::vector<std::string> names)
        : names_(std::make_shared<std::vector<std::string>>(std::move(names))) {}

    std::size_t size() const { return names_->size(); }
    const std::string& name(std::size_t i) const { return (*names_)[i]; }
    const std::vector<std::string>& names() const { return *names_; }
    int index(const std::string& n) const {
        for (std::size_t i = 0; i < names_->size(); ++i)
            if ((*names_)[i] == n) return static_cast<int>(i);
        return -1;
    }
    friend bool operator==(const VarSet& a, const VarSet& b) {
        return a.names_ == b.names_ || *a.names_ == *b.names_;
    }

private:
    std::shared_ptr<const std::vector<std::string>> names_;
};

// Multivariate power series truncated at total degree N.  Terms of total
// degree > N are discarded on every operation; zero coefficients are never
// stored.
template <typename C>
class BasicSeries {
public:
    using Coeff = C;
    using Terms = std::map<Expo, C, GradedLex>;

    BasicSeries() = default;
    BasicSeries(VarSet vars, int order) : vars_(std::move(vars)), order_(order) {
        if (order < 0) throw std::invalid_argument("series order must be >= 0");
    }

    static BasicSeries constant(const VarSet& vars, int order, const C& c) {
        BasicSeries s(vars, order);
        if (!coeff_traits<C>::is_zero(c)) s.terms_.emplace(Expo(vars.size(), 0), c);
        return s;
    }
    static BasicSeries variable(const VarSet& vars, int order, const std::string& name) {
        int i = vars.index(name);
        if (i < 0) throw VariableMismatchError("unknown variable " + name);
        BasicSeries s(vars, order);
        if (order >= 1) {
            Expo e(vars.size(), 0);
            e[i] = 1;
            s.terms_.emplace(std::move(e), coeff_traits<C>::one());
        }
        return s;
    }

    const VarSet& vars() const { return vars_; }
    int order() const { return order_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    C coefficient(const Expo& e) const {
        auto it = terms_.find(e);
        return it == terms_.end() ? C{} : it->second;
    }
    C constant_term() const { return coefficient(Expo(vars_.size(), 0)); }

    void set(const Expo& e, const C& c) {
        if (static_cast<int>(e.size()) != static_cast<int>(vars_.size()))
            throw VariableMismatchError("exponent arity mismatch");
        if (total_degree(e) > order_) return;
        if (coeff_traits<C>::is_zero(c))
            terms_.erase(e);
        else
            terms_[e] = c;
    }

    BasicSeries operator-() const {
        BasicSeries r(vars_, order_);
        for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
        return r;
    }

    BasicSeries& operator+=(const BasicSeries& o) {
        check_ring(o);
        for (const auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }
    BasicSeries& operator-=(const BasicSeries& o) {
        check_ring(o);
        for (const auto& [e, c] : o.terms_) add_term(e, -c);
        return *this;
    }

    friend BasicSeries operator+(BasicSeries a, const BasicSeries& b) { return a += b; }
    friend BasicSeries operator-(BasicSeries a, const BasicSeries& b) { return a -= b; }

    friend BasicSeries operator*(const BasicSeries& a, const BasicSeries& b) {
        a.check_ring(b);
        BasicSeries r(a.vars_, a.order_);
        for (const auto& [ea, ca] : a.terms_) {
            int da = total_degree(ea);
            for (const auto& [eb, cb] : b.terms_) {
                if (da + total_degree(eb) > a.order_) continue;
                Expo e(ea.size());
                for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
                r.add_term(e, ca * cb);
            }
        }
        return r;
    }
    BasicSeries& operator*=(const BasicSeries& o) { return *this = *this * o; }

    BasicSeries& scale(const C& c) {
        if (coeff_traits<C>::is_zero(c)) {
            terms_.clear();
            return *this;
        }
        for (auto it = terms_.begin(); it != terms_.end();) {
            it->second = it->second * c;
            if (coeff_traits<C>::is_zero(it->second))
                it = terms_.erase(it);
            else
                ++it;
        }
        return *this;
    }
    friend BasicSeries operator*(BasicSeries a, const C& c) { return a.scale(c); }

    friend bool operator==(const BasicSeries& a, const BasicSeries& b) {
        a.check_ring(b);
        return a.terms_ == b.terms_;
    }
    friend bool operator!=(const BasicSeries& a, const BasicSeries& b) { return !(a == b); }

    BasicSeries pow(int k) const {
        BasicSeries r = constant(vars_, order_, coeff_traits<C>::one());
        for (int i = 0; i < k; ++i) r = r * *this;
        return r;
    }

    // Multiplicative inverse up to order N; the constant term must be a unit.
    BasicSeries invert() const {
        C c0 = constant_term();
        if (!coeff_traits<C>::is_unit(c0))
            throw NonUnitError("invert: constant term is not a unit");
        BasicSeries r = constant(vars_, order_, coeff_traits<C>::inverse(c0));
        BasicSeries two = constant(vars_, order_, coeff_traits<C>::one() + coeff_traits<C>::one());
        // Newton iteration doubles the number of correct orders each step
        int correct = 1;
        while (correct <= order_) {
            r = r * (two - *this * r);
            correct *= 2;
        }
        return r;
    }

    // Exact division by the monomial with exponent vector m.
    BasicSeries monomial_ratio(const Expo& m) const {
        if (m.size() != vars_.size()) throw VariableMismatchError("monomial arity mismatch");
        BasicSeries r(vars_, order_);
        for (const auto& [e, c] : terms_) {
            Expo q(e.size());
            for (std::size_t i = 0; i < e.size(); ++i) {
                q[i] = e[i] - m[i];
                if (q[i] < 0)
                    throw NotDivisibleError("monomial_ratio: term " + expo_str(e) +
                                            " not divisible");
            }
            r.terms_.emplace(std::move(q), c);
        }
        return r;
    }

    // Composition: replaces each assigned variable by the given series (in the
    // same ring); unassigned variables stay put.
    BasicSeries substitute(const std::map<std::string, BasicSeries>& assign) const {
        std::vector<const BasicSeries*> sub(vars_.size(), nullptr);
        for (const auto& [n, s] : assign) {
            int i = vars_.index(n);
            if (i < 0) throw VariableMismatchError("substitute: unknown variable " + n);
            check_ring(s);
            sub[i] = &s;
        }
        BasicSeries r(vars_, order_);
        for (const auto& [e, c] : terms_) {
            BasicSeries t = constant(vars_, order_, c);
            for (std::size_t i = 0; i < e.size(); ++i) {
                if (e[i] == 0) continue;
                if (sub[i]) {
                    t = t * sub[i]->pow(e[i]);
                } else {
                    Expo m(e.size(), 0);
                    m[i] = e[i];
                    BasicSeries v(vars_, order_);
                    if (total_degree(m) <= order_) v.terms_.emplace(m, coeff_traits<C>::one());
                    t = t * v;
                }
            }
            r += t;
        }
        return r;
    }

    // Drops all terms of total degree > n (a coarser truncation).
    BasicSeries truncated(int n) const {
        BasicSeries r(vars_, order_);
        for (const auto& [e, c] : terms_) {
            if (total_degree(e) <= n) r.terms_.emplace(e, c);
        }
        return r;
    }

    int min_degree() const {
        return terms_.empty() ? order_ + 1 : total_degree(terms_.begin()->first);
    }

    static std::string expo_str(const Expo& e) {
        std::string s = "(";
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(e[i]);
        }
        return s + ")";
    }

private:
    VarSet vars_;
    int order_ = 0;
    Terms terms_;

    void check_ring(const BasicSeries& o) const {
        if (!(vars_ == o.vars_) || order_ != o.order_)
            throw VariableMismatchError("series from different rings");
    }

    void add_term(const Expo& e, const C& c) {
        if (total_degree(e) > order_) return;
        auto it = terms_.find(e);
        if (it == terms_.end()) {
            if (!coeff_traits<C>::is_zero(c)) terms_.emplace(e, c);
        } else {
            it->second = it->second + c;
            if (coeff_traits<C>::is_zero(it->second)) terms_.erase(it);
        }
    }
};

using ExactSeries = BasicSeries<LocalizedScalar>;
using NumericSeries = BasicSeries<Complex>;

// Text serialization of exact series, one term piece per line:
//   p/q * x^a * (1-x)^b * v1^k1 * v2^k2 ...
// sorted by graded-lexicographic exponent order; round-trips bit-exactly.
std::string series_to_text(const ExactSeries& s);
ExactSeries series_from_text(const VarSet& vars, int order, const std::string& text);

// Numeric evaluation: x |-> xval, variable i |-> vals[i].
Complex series_eval(const ExactSeries& s, const Complex& xval, const std::vector<Complex>& vals);

}  // namespace gluecb
