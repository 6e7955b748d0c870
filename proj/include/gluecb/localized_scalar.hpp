#pragma once

#include <gluecb/rational.hpp>

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace gluecb {

struct NonUnitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Element of Q[x, 1/x, 1/(1-x)]: a polynomial in x divided by x^a (1-x)^b.
// The stored form is canonical: common factors of x and (1-x) are cancelled
// between numerator and denominator, so equality is member-wise.
class LocalizedScalar {
public:
    LocalizedScalar() = default;
    LocalizedScalar(const Rational& c);  // NOLINT: implicit by intent
    LocalizedScalar(long c) : LocalizedScalar(Rational(c)) {}
    LocalizedScalar(int c) : LocalizedScalar(Rational(c)) {}

    // x^k, k may be negative.
    static LocalizedScalar x_power(int k);
    // (1-x)^k, k may be negative.
    static LocalizedScalar one_minus_x_power(int k);

    bool is_zero() const { return num_.empty(); }
    // True when the value is c * x^j * (1-x)^k with c a nonzero rational,
    // i.e. invertible in the localized ring.
    bool is_unit() const;
    LocalizedScalar inverse() const;  // throws NonUnitError

    // True when no x appears at all (plain rational).
    bool is_constant() const;
    Rational constant_value() const;  // requires is_constant()

    // Pulls out the monomial decomposition c * x^j * (1-x)^k of a unit.
    void unit_parts(Rational& c, int& xexp, int& oexp) const;

    Rational eval(const Rational& x0) const;  // x0 not in {0, 1}
    Complex eval(const Complex& x0) const;

    LocalizedScalar operator-() const;
    LocalizedScalar& operator+=(const LocalizedScalar& o);
    LocalizedScalar& operator-=(const LocalizedScalar& o);
    LocalizedScalar& operator*=(const LocalizedScalar& o);

    friend LocalizedScalar operator+(LocalizedScalar a, const LocalizedScalar& b) { return a += b; }
    friend LocalizedScalar operator-(LocalizedScalar a, const LocalizedScalar& b) { return a -= b; }
    friend LocalizedScalar operator*(LocalizedScalar a, const LocalizedScalar& b) { return a *= b; }
    friend bool operator==(const LocalizedScalar& a, const LocalizedScalar& b) {
        return a.xden_ == b.xden_ && a.oden_ == b.oden_ && a.num_ == b.num_;
    }
    friend bool operator!=(const LocalizedScalar& a, const LocalizedScalar& b) { return !(a == b); }

    // Expansion into (rational, x-exponent, (1-x)-exponent) triples; the
    // x-exponent may be negative, the (1-x)-exponent is always <= 0.
    struct Piece {
        Rational coeff;
        int xexp = 0;
        int oexp = 0;
    };
    std::vector<Piece> pieces() const;
    static LocalizedScalar from_pieces(const std::vector<Piece>& ps);

    std::string str() const;

private:
    // numerator polynomial, exponent -> coefficient, no zero entries
    std::map<int, Rational> num_;
    int xden_ = 0;  // power of x in the denominator, >= 0
    int oden_ = 0;  // power of (1-x) in the denominator, >= 0

    void reduce();
};

}  // namespace gluecb
