#include <gluecb/localized_scalar.hpp>

#include <sstream>

namespace gluecb {

namespace {

using Poly = std::map<int, Rational>;

void poly_add(Poly& a, const Poly& b) {
    for (const auto& [e, c] : b) {
        auto it = a.find(e);
        if (it == a.end()) {
            a.emplace(e, c);
        } else {
            it->second += c;
            if (it->second == 0) a.erase(it);
        }
    }
}

Poly poly_mul(const Poly& a, const Poly& b) {
    Poly r;
    for (const auto& [ea, ca] : a)
        for (const auto& [eb, cb] : b) {
            Rational c = ca * cb;
            auto it = r.find(ea + eb);
            if (it == r.end()) {
                r.emplace(ea + eb, c);
            } else {
                it->second += c;
                if (it->second == 0) r.erase(it);
            }
        }
    return r;
}

void poly_shift(Poly& a, int k) {
    if (k == 0 || a.empty()) return;
    Poly r;
    for (const auto& [e, c] : a) r.emplace(e + k, c);
    a = std::move(r);
}

// Divides a by (1-x) exactly; returns false (leaving a untouched) if the
// remainder is nonzero.  (1-x) divides p(x) iff p(1) = 0.
bool poly_divide_one_minus_x(Poly& a) {
    if (a.empty()) return true;
    Rational at_one = 0;
    for (const auto& [e, c] : a) at_one += c;
    if (at_one != 0) return false;
    // synthetic division: p(x) = (1-x) q(x), q built from the top degree down
    Poly q;
    Rational carry = 0;  // running coefficient of q at the current degree
    int top = a.rbegin()->first;
    int bottom = a.begin()->first;
    for (int d = top - 1; d >= bottom; --d) {
        auto it = a.find(d + 1);
        Rational pd1 = (it == a.end()) ? Rational(0) : it->second;
        carry = carry - pd1;  // q_d = q_{d+1} - p_{d+1}
        if (carry != 0) q.emplace(d, carry);
    }
    a = std::move(q);
    return true;
}

Poly poly_one_minus_x_power(int k) {
    Poly p{{0, 1}};
    Poly base{{0, 1}, {1, -1}};
    for (int i = 0; i < k; ++i) p = poly_mul(p, base);
    return p;
}

}  // namespace

LocalizedScalar::LocalizedScalar(const Rational& c) {
    if (c != 0) num_.emplace(0, c);
}

LocalizedScalar LocalizedScalar::x_power(int k) {
    LocalizedScalar r;
    if (k >= 0) {
        r.num_.emplace(k, 1);
    } else {
        r.num_.emplace(0, 1);
        r.xden_ = -k;
    }
    return r;
}

LocalizedScalar LocalizedScalar::one_minus_x_power(int k) {
    LocalizedScalar r;
    if (k >= 0) {
        r.num_ = poly_one_minus_x_power(k);
    } else {
        r.num_.emplace(0, 1);
        r.oden_ = -k;
    }
    return r;
}

void LocalizedScalar::reduce() {
    if (num_.empty()) {
        xden_ = oden_ = 0;
        return;
    }
    int low = num_.begin()->first;
    if (xden_ > 0 && low > 0) {
        int k = std::min(xden_, low);
        poly_shift(num_, -k);
        xden_ -= k;
    }
    while (oden_ > 0) {
        Poly saved = num_;
        if (!poly_divide_one_minus_x(num_)) {
            num_ = std::move(saved);
            break;
        }
        --oden_;
    }
}

bool LocalizedScalar::is_unit() const {
    if (num_.empty()) return false;
    Poly p = num_;
    // strip x factors
    poly_shift(p, -p.begin()->first);
    while (p.size() > 1) {
        if (!poly_divide_one_minus_x(p)) return false;
        poly_shift(p, -p.begin()->first);
    }
    return p.size() == 1 && p.begin()->first == 0;
}

void LocalizedScalar::unit_parts(Rational& c, int& xexp, int& oexp) const {
    if (num_.empty()) throw NonUnitError("unit_parts: zero scalar");
    Poly p = num_;
    xexp = p.begin()->first - xden_;
    poly_shift(p, -p.begin()->first);
    oexp = -oden_;
    while (p.size() > 1) {
        if (!poly_divide_one_minus_x(p)) throw NonUnitError("unit_parts: not a unit: " + str());
        ++oexp;
        int sh = p.begin()->first;
        xexp += sh;
        poly_shift(p, -sh);
    }
    if (p.begin()->first != 0) throw NonUnitError("unit_parts: not a unit: " + str());
    c = p.begin()->second;
}

LocalizedScalar LocalizedScalar::inverse() const {
    Rational c;
    int xe = 0, oe = 0;
    unit_parts(c, xe, oe);
    LocalizedScalar r(Rational(1) / c);
    return r * x_power(-xe) * one_minus_x_power(-oe);
}

bool LocalizedScalar::is_constant() const {
    return xden_ == 0 && oden_ == 0 &&
           (num_.empty() || (num_.size() == 1 && num_.begin()->first == 0));
}

Rational LocalizedScalar::constant_value() const {
    if (num_.empty()) return 0;
    if (!is_constant()) throw std::logic_error("constant_value: depends on x: " + str());
    return num_.begin()->second;
}

Rational LocalizedScalar::eval(const Rational& x0) const {
    Rational n = 0, xp = 1;
    int prev = 0;
    for (const auto& [e, c] : num_) {
        for (; prev < e; ++prev) xp *= x0;
        n += c * xp;
    }
    Rational den = 1;
    for (int i = 0; i < xden_; ++i) den *= x0;
    for (int i = 0; i < oden_; ++i) den *= (1 - x0);
    return n / den;
}

Complex LocalizedScalar::eval(const Complex& x0) const {
    Complex n = 0;
    for (const auto& [e, c] : num_) {
        Complex xp = 1;
        for (int i = 0; i < e; ++i) xp *= x0;
        n += to_double(c) * xp;
    }
    Complex den = 1;
    for (int i = 0; i < xden_; ++i) den *= x0;
    for (int i = 0; i < oden_; ++i) den *= (1.0 - x0);
    return n / den;
}

LocalizedScalar LocalizedScalar::operator-() const {
    LocalizedScalar r = *this;
    for (auto& [e, c] : r.num_) c = -c;
    return r;
}

LocalizedScalar& LocalizedScalar::operator+=(const LocalizedScalar& o) {
    // bring both over the common denominator x^X (1-x)^O
    int X = std::max(xden_, o.xden_), O = std::max(oden_, o.oden_);
    poly_shift(num_, X - xden_);
    if (O - oden_ > 0) num_ = poly_mul(num_, poly_one_minus_x_power(O - oden_));
    Poly on = o.num_;
    poly_shift(on, X - o.xden_);
    if (O - o.oden_ > 0) on = poly_mul(on, poly_one_minus_x_power(O - o.oden_));
    poly_add(num_, on);
    xden_ = X;
    oden_ = O;
    reduce();
    return *this;
}

LocalizedScalar& LocalizedScalar::operator-=(const LocalizedScalar& o) {
    return *this += -o;
}

LocalizedScalar& LocalizedScalar::operator*=(const LocalizedScalar& o) {
    num_ = poly_mul(num_, o.num_);
    xden_ += o.xden_;
    oden_ += o.oden_;
    reduce();
    return *this;
}

std::vector<LocalizedScalar::Piece> LocalizedScalar::pieces() const {
    std::vector<Piece> ps;
    ps.reserve(num_.size());
    for (const auto& [e, c] : num_) ps.push_back({c, e - xden_, -oden_});
    return ps;
}

LocalizedScalar LocalizedScalar::from_pieces(const std::vector<Piece>& ps) {
    LocalizedScalar r;
    for (const auto& p : ps) {
        LocalizedScalar t(p.coeff);
        r += t * x_power(p.xexp) * one_minus_x_power(p.oexp);
    }
    return r;
}

std::string LocalizedScalar::str() const {
    if (num_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : num_) {
        if (!first) os << " + ";
        first = false;
        os << c.str();
        if (e != 0) os << "*x^" << e;
    }
    if (num_.size() > 1 && (xden_ > 0 || oden_ > 0)) {
        std::string inner = os.str();
        os.str("");
        os << "(" << inner << ")";
    }
    if (xden_ > 0) os << "/x^" << xden_;
    if (oden_ > 0) os << "/(1-x)^" << oden_;
    return os.str();
}

}  // namespace gluecb
