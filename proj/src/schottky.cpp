#include <gluecb/schottky.hpp>

#include <cmath>
#include <set>

namespace gluecb {

SchottkyConfig::SchottkyConfig(StableGraph graph, VarSet vars, int order)
    : graph_(std::move(graph)), vars_(std::move(vars)), order_(order) {
    // stability is not needed for the uniformization, connectedness is
    if (!graph_.connected()) throw GraphError("SchottkyConfig requires a connected graph");
    if (!graph_.tails().empty())
        throw GraphError("SchottkyConfig requires a tailless graph; extend tails first");
    std::size_t ne = graph_.edges().size();
    alpha_pos_.resize(ne);
    alpha_neg_.resize(ne);
    // default: edge e deforms along the e-th variable when the counts match;
    // otherwise callers install each q via set_q
    for (std::size_t e = 0; e < ne; ++e)
        q_.push_back(vars_.size() == ne ? ExactSeries::variable(vars_, order_, vars_.name(e))
                                        : zero());
}

void SchottkyConfig::set_alpha(const Half& h, std::optional<LocalizedScalar> value) {
    if (h.is_tail()) throw GraphError("set_alpha: tails carry no fixed point");
    (h.positive ? alpha_pos_ : alpha_neg_)[h.edge] = std::move(value);
}

const std::optional<LocalizedScalar>& SchottkyConfig::alpha(const Half& h) const {
    if (h.is_tail()) throw GraphError("alpha: tails carry no fixed point");
    return (h.positive ? alpha_pos_ : alpha_neg_)[h.edge];
}

void SchottkyConfig::set_q(int edge, ExactSeries q) {
    q_[edge] = std::move(q);
}

void SchottkyConfig::validate() const {
    int ne = static_cast<int>(graph_.edges().size());
    std::set<int> inf_vertices;
    for (int e = 0; e < ne; ++e) {
        if (!alpha_pos_[e] && !alpha_neg_[e])
            throw GraphError("edge " + std::to_string(e) + ": both halves at infinity");
        if (alpha_pos_[e] && alpha_neg_[e] && *alpha_pos_[e] == *alpha_neg_[e])
            throw GraphError("edge " + std::to_string(e) + ": equal fixed points");
        for (bool pos : {true, false}) {
            Half h = Half::edge_half(e, pos);
            if (!alpha(h)) {
                int v = graph_.terminal(h);
                if (!inf_vertices.insert(v).second)
                    throw GraphError("vertex " + std::to_string(v) +
                                     ": two branches at infinity");
            }
        }
    }
    for (int v = 0; v < graph_.num_vertices(); ++v) {
        auto br = graph_.branches_at(v);
        for (std::size_t i = 0; i < br.size(); ++i)
            for (std::size_t j = i + 1; j < br.size(); ++j) {
                const auto &ai = alpha(br[i]), &aj = alpha(br[j]);
                if (ai && aj && *ai == *aj)
                    throw GraphError("vertex " + std::to_string(v) +
                                     ": repeated fixed point among branches");
            }
        if (graph_.degree(v) > 3) {
            // every finite pairwise difference must stay invertible
            for (std::size_t i = 0; i < br.size(); ++i)
                for (std::size_t j = i + 1; j < br.size(); ++j) {
                    const auto &ai = alpha(br[i]), &aj = alpha(br[j]);
                    if (ai && aj && !(*ai - *aj).is_unit())
                        throw GraphError("vertex " + std::to_string(v) +
                                         ": fixed-point difference is not a unit");
                }
        }
    }
    for (const auto& q : q_) {
        if (q.is_zero() || !q.constant_term().is_zero())
            throw GraphError("deformation series must be nonzero and vanish at the origin");
    }
}

ProjectivePoint<ExactSeries> SchottkyConfig::alpha_point(const Half& h) const {
    const auto& a = alpha(h);
    if (!a) return {one(), zero()};
    return {constant(*a), one()};
}

SchottkyConfig schottky_from_rigidification(const StableGraph& graph, const Rigidification& tau,
                                            const std::vector<std::string>& var_names, int order,
                                            const std::map<Half, LocalizedScalar>& extra) {
    if (var_names.size() != graph.edges().size())
        throw GraphError("one variable per edge required");
    SchottkyConfig cfg(graph, VarSet(var_names), order);
    static const LocalizedScalar coords[2] = {LocalizedScalar(0), LocalizedScalar(1)};
    for (int v = 0; v < graph.num_vertices(); ++v) {
        for (int slot = 0; slot < 3; ++slot) {
            const auto& h = tau.assign[v][slot];
            if (!h || h->is_tail()) continue;
            if (slot == 2)
                cfg.set_alpha(*h, std::nullopt);
            else
                cfg.set_alpha(*h, coords[slot]);
        }
    }
    for (const auto& [h, a] : extra) cfg.set_alpha(h, a);
    cfg.validate();
    return cfg;
}

MoebiusS phi(const SchottkyConfig& cfg, const Half& h) {
    if (h.is_tail()) throw GraphError("phi: tails have no generator");
    const auto& ah = cfg.alpha(h);
    const auto& am = cfg.alpha(h.inverse());
    ExactSeries q = cfg.q(h.edge);
    ExactSeries one = cfg.one();
    ExactSeries omq = one - q;
    if (!ah) {
        // alpha_h = infinity
        return {one, -(cfg.constant(*am) * omq), cfg.zero(), q};
    }
    if (!am) {
        // alpha_{-h} = infinity
        return {q, cfg.constant(*ah) * omq, cfg.zero(), one};
    }
    ExactSeries A = cfg.constant(*ah), B = cfg.constant(*am);
    return {A - B * q, -(A * B * omq), omq, -B + A * q};
}

MoebiusS path_element(const SchottkyConfig& cfg, const Path& rho) {
    if (rho.empty()) throw NotComposableError("empty path");
    const StableGraph& g = cfg.graph();
    for (std::size_t i = 0; i + 1 < rho.size(); ++i) {
        if (g.terminal(rho[i]) != g.initial(rho[i + 1]))
            throw NotComposableError("vertex mismatch at step " + std::to_string(i));
        if (rho[i + 1] == rho[i].inverse())
            throw NotReducedError("backtracking at step " + std::to_string(i));
    }
    MoebiusS m = phi(cfg, rho.front());
    for (std::size_t i = 1; i < rho.size(); ++i) m = phi(cfg, rho[i]) * m;
    return m;
}

ExactSeries multiplier(const SchottkyConfig& cfg, const MoebiusS& m) {
    ExactSeries det = m.det();
    ExactSeries tr2 = m.trace() * m.trace();
    if (tr2.is_zero()) throw NotLoxodromicError("trace vanishes");
    // the representative may carry a monomial scalar (conjugated words do);
    // strip the common content before inverting tr^2
    Expo mu = tr2.terms().begin()->first;
    ExactSeries t, d;
    try {
        t = tr2.monomial_ratio(mu);
        d = det.monomial_ratio(mu);
    } catch (const NotDivisibleError&) {
        throw NotLoxodromicError("tr^2 does not divide det in the series ring");
    }
    if (!t.constant_term().is_unit())
        throw NotLoxodromicError("tr^2 is not a unit multiple of a monomial");
    // lambda = (det/tr^2)(1+lambda)^2, branch vanishing with the deformation
    ExactSeries r = d * t.invert();
    if (!r.constant_term().is_zero())
        throw NotLoxodromicError("element is not loxodromic over the series ring");
    ExactSeries lam = cfg.zero();
    ExactSeries one = cfg.one();
    for (int i = 0; i <= cfg.order(); ++i) {
        ExactSeries op = one + lam;
        lam = r * op * op;
    }
    ExactSeries op = one + lam;
    if (lam != r * op * op) throw NotLoxodromicError("multiplier iteration did not close");
    return lam;
}

ProjectivePoint<ExactSeries> attractive_fixed_point(const SchottkyConfig& cfg, const MoebiusS& m,
                                                    const ProjectivePoint<ExactSeries>& seed) {
    ProjectivePoint<ExactSeries> p = seed;
    for (int i = 0; i < cfg.order() + 2; ++i) {
        ProjectivePoint<ExactSeries> next = m.apply(p);
        if (next.u.is_zero() && next.v.is_zero())
            throw NoConvergenceError("iterate vanished identically");
        if (projectively_equal(p, next)) return p;
        p = std::move(next);
    }
    throw NoConvergenceError("fixed point did not stabilize; seed not admissible");
}

ProjectivePoint<ExactSeries> admissible_seed(const SchottkyConfig& cfg, const Path& rho) {
    if (rho.empty()) throw NotComposableError("empty path");
    int base = cfg.graph().initial(rho.front());
    Half forbidden = rho.front().inverse();
    for (const Half& h : cfg.graph().branches_at(base)) {
        if (h.is_tail() || h == forbidden) continue;
        return cfg.alpha_point(h);
    }
    throw NoConvergenceError("no admissible branch at the basepoint");
}

ProjectivePoint<ExactSeries> attractive_fixed_point(const SchottkyConfig& cfg, const Path& rho) {
    const StableGraph& g = cfg.graph();
    if (rho.empty() || g.terminal(rho.back()) != g.initial(rho.front()))
        throw NotComposableError("fixed points need a closed path");
    if (!g.path_reduced(rho) || rho.back() == rho.front().inverse())
        throw NotReducedError("path must be cyclically reduced");
    return attractive_fixed_point(cfg, path_element(cfg, rho), admissible_seed(cfg, rho));
}

ClosedFiber closed_fiber(const SchottkyConfig& cfg) {
    ClosedFiber fiber;
    fiber.components.resize(cfg.graph().num_vertices());
    for (int v = 0; v < cfg.graph().num_vertices(); ++v) {
        for (const Half& h : cfg.graph().branches_at(v))
            fiber.components[v].push_back({h, cfg.alpha(h)});
    }
    return fiber;
}

NumericSchottky specialize(const SchottkyConfig& cfg, const Complex& xval,
                           const std::vector<Complex>& qvals) {
    NumericSchottky n;
    n.graph = cfg.graph();
    std::size_t ne = cfg.graph().edges().size();
    n.alpha_pos.resize(ne);
    n.alpha_neg.resize(ne);
    for (std::size_t e = 0; e < ne; ++e) {
        for (bool pos : {true, false}) {
            Half h = Half::edge_half(static_cast<int>(e), pos);
            const auto& a = cfg.alpha(h);
            auto& slot = pos ? n.alpha_pos[e] : n.alpha_neg[e];
            if (a) slot = a->eval(xval);
        }
        n.q.push_back(series_eval(cfg.q(static_cast<int>(e)), xval, qvals));
    }
    return n;
}

MoebiusC phi(const NumericSchottky& cfg, const Half& h) {
    const auto& ah = cfg.alpha(h);
    const auto& am = cfg.alpha(h.inverse());
    Complex q = cfg.q[h.edge];
    Complex omq = Complex(1.0) - q;
    if (!ah) return {Complex(1.0), -(*am * omq), Complex(0.0), q};
    if (!am) return {q, *ah * omq, Complex(0.0), Complex(1.0)};
    return {*ah - *am * q, -(*ah * *am * omq), omq, -*am + *ah * q};
}

MoebiusC path_element(const NumericSchottky& cfg, const Path& rho) {
    if (rho.empty()) throw NotComposableError("empty path");
    for (std::size_t i = 0; i + 1 < rho.size(); ++i) {
        if (cfg.graph.terminal(rho[i]) != cfg.graph.initial(rho[i + 1]))
            throw NotComposableError("vertex mismatch at step " + std::to_string(i));
        if (rho[i + 1] == rho[i].inverse())
            throw NotReducedError("backtracking at step " + std::to_string(i));
    }
    MoebiusC m = phi(cfg, rho.front());
    for (std::size_t i = 1; i < rho.size(); ++i) m = phi(cfg, rho[i]) * m;
    return m;
}

static std::pair<Complex, Complex> eigenvalues(const MoebiusC& m) {
    Complex tr = m.trace(), det = m.det();
    Complex disc = std::sqrt(tr * tr - Complex(4.0) * det);
    // pick the sign avoiding cancellation, recover the other root from det
    Complex l1 = (std::abs(tr + disc) >= std::abs(tr - disc)) ? (tr + disc) / Complex(2.0)
                                                              : (tr - disc) / Complex(2.0);
    Complex l2 = std::abs(l1) == 0.0 ? Complex(0.0) : det / l1;
    return {l1, l2};  // dominant first
}

Complex multiplier(const MoebiusC& m) {
    auto [l1, l2] = eigenvalues(m);
    if (std::abs(l1) == 0.0 || std::abs(l2 / l1 - Complex(1.0)) < 1e-12)
        throw NotLoxodromicError("numeric element is not loxodromic");
    return l2 / l1;
}

Complex multiplier(const NumericSchottky& cfg, const Path& rho) {
    MoebiusC m = path_element(cfg, rho);
    Complex det = 1.0;
    for (const Half& h : rho) det *= phi(cfg, h).det();
    Complex tr = m.trace();
    if (std::abs(tr) == 0.0) throw NotLoxodromicError("numeric word has zero trace");
    Complex r = det / (tr * tr);
    if (std::abs(r) > 0.25) throw NotLoxodromicError("numeric word is not strongly loxodromic");
    Complex lam = 0.0;
    for (int i = 0; i < 64; ++i) {
        Complex next = r * (Complex(1.0) + lam) * (Complex(1.0) + lam);
        if (next == lam) break;
        lam = next;
    }
    return lam;
}

ProjectivePoint<Complex> attractive_fixed_point(const MoebiusC& m) {
    auto [l1, l2] = eigenvalues(m);
    if (std::abs(l2 / l1 - Complex(1.0)) < 1e-12)
        throw NotLoxodromicError("numeric element is not loxodromic");
    // (A - l2 I) projects onto the l1 eigenspace; take its larger column
    Complex c1u = m.a - l2, c1v = m.c;
    Complex c2u = m.b, c2v = m.d - l2;
    if (std::abs(c1u) + std::abs(c1v) >= std::abs(c2u) + std::abs(c2v)) return {c1u, c1v};
    return {c2u, c2v};
}

}  // namespace gluecb
