#include <gluecb/series.hpp>

#include <sstream>

namespace gluecb {

std::string series_to_text(const ExactSeries& s) {
    std::ostringstream os;
    bool any = false;
    for (const auto& [e, c] : s.terms()) {
        for (const auto& p : c.pieces()) {
            os << p.coeff.str();
            if (p.xexp != 0) os << " * x^" << p.xexp;
            if (p.oexp != 0) os << " * (1-x)^" << p.oexp;
            for (std::size_t i = 0; i < e.size(); ++i)
                if (e[i] != 0) os << " * " << s.vars().name(i) << "^" << e[i];
            os << "\n";
            any = true;
        }
    }
    if (!any) os << "0\n";
    return os.str();
}

ExactSeries series_from_text(const VarSet& vars, int order, const std::string& text) {
    ExactSeries s(vars, order);
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line == "0") continue;
        std::vector<std::string> factors;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            std::size_t sep = line.find(" * ", pos);
            if (sep == std::string::npos) {
                factors.push_back(line.substr(pos));
                break;
            }
            factors.push_back(line.substr(pos, sep - pos));
            pos = sep + 3;
        }
        if (factors.empty())
            throw std::runtime_error("series text line " + std::to_string(lineno) + ": empty");
        Rational coeff(factors[0]);
        int xexp = 0, oexp = 0;
        Expo e(vars.size(), 0);
        for (std::size_t i = 1; i < factors.size(); ++i) {
            const std::string& f = factors[i];
            std::size_t caret = f.rfind('^');
            if (caret == std::string::npos)
                throw std::runtime_error("series text line " + std::to_string(lineno) +
                                         ": bad factor '" + f + "'");
            std::string base = f.substr(0, caret);
            int exp = std::stoi(f.substr(caret + 1));
            if (base == "x") {
                xexp = exp;
            } else if (base == "(1-x)") {
                oexp = exp;
            } else {
                int vi = vars.index(base);
                if (vi < 0)
                    throw std::runtime_error("series text line " + std::to_string(lineno) +
                                             ": unknown variable '" + base + "'");
                e[vi] = exp;
            }
        }
        LocalizedScalar c = LocalizedScalar(coeff) * LocalizedScalar::x_power(xexp) *
                            LocalizedScalar::one_minus_x_power(oexp);
        s.set(e, s.coefficient(e) + c);
    }
    return s;
}

Complex series_eval(const ExactSeries& s, const Complex& xval, const std::vector<Complex>& vals) {
    if (vals.size() != s.vars().size())
        throw VariableMismatchError("series_eval: wrong number of values");
    Complex r = 0;
    for (const auto& [e, c] : s.terms()) {
        Complex t = c.eval(xval);
        for (std::size_t i = 0; i < e.size(); ++i)
            for (int k = 0; k < e[i]; ++k) t *= vals[i];
        r += t;
    }
    return r;
}

}  // namespace gluecb
