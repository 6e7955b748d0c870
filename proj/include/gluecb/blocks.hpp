#pragma once

#include <gluecb/graph.hpp>
#include <gluecb/series.hpp>
#include <gluecb/virasoro.hpp>

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace gluecb {

struct ArityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Trivalent stable graph with external legs (tails) carrying fixed weights
// and internal edges carrying channel weights; the rigidification places the
// three branches of each vertex at the punctures 0, 1, infinity of its
// 3-pointed sphere.
template <typename F>
struct PantsDecomposition {
    StableGraph graph;
    Rigidification tau;
    F c{};
    std::vector<F> external;  // Delta per tail
    std::vector<F> internal;  // Delta per edge

    F branch_delta(const Half& h) const {
        return h.is_tail() ? external[h.tail] : internal[h.edge];
    }

    void validate() const {
        graph.validate();
        for (int v = 0; v < graph.num_vertices(); ++v)
            if (graph.degree(v) != 3)
                throw GraphError("pants decomposition requires trivalent vertices");
        if (!rigidification_valid(graph, tau))
            throw GraphError("invalid rigidification on the pants graph");
        if (external.size() != graph.tails().size() || internal.size() != graph.edges().size())
            throw ArityError("weight counts do not match legs and edges");
        int g = graph.genus(), n = static_cast<int>(graph.tails().size());
        if (static_cast<int>(graph.edges().size()) != 3 * g - 3 + n)
            throw GraphError("edge count is not 3g-3+n");
    }
};

// Multivariate expansion of a glued block: body in the edge variables, with
// the q_e^{Delta_{beta(e)}} prefactors recorded separately per variable.
template <typename F>
struct BlockSeries {
    BasicSeries<F> body;
    std::vector<F> edge_shifts;
};

// constant term of prod q_e^{-Delta} * block
template <typename F>
F leading_normalization(const BlockSeries<F>& b) {
    return b.body.constant_term();
}

enum class EdgeTruncation {
    TotalLevel,  // sum of edge levels bounded by the order
    PerEdge,     // each edge level bounded independently
};

// Contraction engine: per-vertex invariant functionals (memoized) and
// per-edge inverse Gram matrices.
template <typename F>
class BlockEvaluator {
public:
    explicit BlockEvaluator(const PantsDecomposition<F>& pd) : pd_(&pd) {
        pd.validate();
        for (int v = 0; v < pd.graph.num_vertices(); ++v) {
            std::array<VirasoroParams<F>, 3> par;
            // legs ordered (infinity, 1, 0) = rigidification slots (2, 1, 0)
            for (int leg = 0; leg < 3; ++leg) {
                const Half& h = *pd.tau.assign[v][2 - leg];
                par[leg] = {pd.c, pd.branch_delta(h)};
            }
            tp_.emplace_back(par);
        }
    }

    const Matrix<F>& inverse_gram(int edge, int level) {
        auto key = std::make_pair(edge, level);
        auto it = ginv_.find(key);
        if (it != ginv_.end()) return it->second;
        try {
            VirasoroParams<F> par{pd_->c, pd_->internal[edge]};
            return ginv_.emplace(key, dual_basis(par, level)).first->second;
        } catch (const DegenerateModuleError&) {
            throw DegenerateModuleError("degenerate channel weight on edge " +
                                        std::to_string(edge) + " at level " +
                                        std::to_string(level));
        }
    }

    // Sum over edge states of total level <= budget, written into the given
    // ring (var_of_edge maps edge index to ring variable index).
    BasicSeries<F> body(const VarSet& vars, const std::vector<int>& var_of_edge, int order,
                        int budget, const std::map<int, VermaVector<F>>& tail_states,
                        EdgeTruncation trunc = EdgeTruncation::TotalLevel) {
        BasicSeries<F> out(vars, order);
        std::map<Half, Partition> edge_state;
        Expo expo(vars.size(), 0);
        recurse(out, 0, budget, F(1), edge_state, expo, var_of_edge, tail_states, trunc,
                budget);
        return out;
    }

    // product over vertices of the invariant functional with the given
    // branch states (absent branches carry the highest-weight vector)
    F vertex_product(const std::map<Half, VermaVector<F>>& states) {
        F total(1);
        VermaVector<F> hw = VermaVector<F>::highest_weight();
        for (int v = 0; v < pd_->graph.num_vertices(); ++v) {
            std::array<const VermaVector<F>*, 3> legs;
            for (int leg = 0; leg < 3; ++leg) {
                const Half& h = *pd_->tau.assign[v][2 - leg];
                auto it = states.find(h);
                legs[leg] = it == states.end() ? &hw : &it->second;
            }
            total = total * tp_[v](*legs[0], *legs[1], *legs[2]);
        }
        return total;
    }

private:
    const PantsDecomposition<F>* pd_;
    std::vector<ThreePoint<F>> tp_;
    std::map<std::pair<int, int>, Matrix<F>> ginv_;

    void recurse(BasicSeries<F>& out, int edge, int budget, F weight,
                 std::map<Half, Partition>& edge_state, Expo& expo,
                 const std::vector<int>& var_of_edge,
                 const std::map<int, VermaVector<F>>& tail_states, EdgeTruncation trunc,
                 int per_edge_budget) {
        int ne = static_cast<int>(pd_->graph.edges().size());
        if (edge == ne) {
            F val = weight * leaf_value(edge_state, tail_states);
            if (!field_zero(val)) out.set(expo, out.coefficient(expo) + val);
            return;
        }
        int cap = trunc == EdgeTruncation::TotalLevel ? budget : per_edge_budget;
        Half pos = Half::edge_half(edge, true), neg = Half::edge_half(edge, false);
        for (int k = 0; k <= cap; ++k) {
            auto parts = Partition::all(k);
            const Matrix<F>& gi = inverse_gram(edge, k);
            for (std::size_t i = 0; i < parts.size(); ++i)
                for (std::size_t j = 0; j < parts.size(); ++j) {
                    if (field_zero(gi[i][j])) continue;
                    edge_state[pos] = parts[i];
                    edge_state[neg] = parts[j];
                    expo[var_of_edge[edge]] = k;
                    int next_budget =
                        trunc == EdgeTruncation::TotalLevel ? budget - k : budget;
                    recurse(out, edge + 1, next_budget, weight * gi[i][j], edge_state,
                            expo, var_of_edge, tail_states, trunc, per_edge_budget);
                }
        }
        edge_state.erase(pos);
        edge_state.erase(neg);
        expo[var_of_edge[edge]] = 0;
    }

    F leaf_value(const std::map<Half, Partition>& edge_state,
                 const std::map<int, VermaVector<F>>& tail_states) {
        F total(1);
        for (int v = 0; v < pd_->graph.num_vertices(); ++v) {
            std::array<Partition, 3> ps;
            std::array<const VermaVector<F>*, 3> vecs{nullptr, nullptr, nullptr};
            for (int leg = 0; leg < 3; ++leg) {
                const Half& h = *pd_->tau.assign[v][2 - leg];
                if (h.is_tail()) {
                    auto it = tail_states.find(h.tail);
                    if (it != tail_states.end()) vecs[leg] = &it->second;
                } else {
                    auto it = edge_state.find(h);
                    if (it != edge_state.end()) ps[leg] = it->second;
                }
            }
            if (vecs[0] || vecs[1] || vecs[2]) {
                VermaVector<F> tmp[3];
                for (int leg = 0; leg < 3; ++leg)
                    if (!vecs[leg]) {
                        tmp[leg] = VermaVector<F>::basis(ps[leg]);
                        vecs[leg] = &tmp[leg];
                    }
                total = total * tp_[v](*vecs[0], *vecs[1], *vecs[2]);
            } else {
                total = total * tp_[v](ps[0], ps[1], ps[2]);
            }
            if (field_zero(total)) return total;
        }
        return total;
    }
};

// Full pants-decomposition block: series in variables q0..q_{m-1} indexed by
// graph edge, truncated at total level `order`.
template <typename F>
BlockSeries<F> graph_block(const PantsDecomposition<F>& pd, int order,
                           EdgeTruncation trunc = EdgeTruncation::TotalLevel) {
    int ne = static_cast<int>(pd.graph.edges().size());
    std::vector<std::string> names;
    std::vector<int> var_of_edge;
    for (int e = 0; e < ne; ++e) {
        names.push_back("q" + std::to_string(e));
        var_of_edge.push_back(e);
    }
    VarSet vars(names);
    BlockEvaluator<F> ev(pd);
    int series_order = trunc == EdgeTruncation::TotalLevel ? order : order * std::max(ne, 1);
    BlockSeries<F> out{ev.body(vars, var_of_edge, series_order, order, {}, trunc),
                       pd.internal};
    return out;
}

// Glues a tail of one block to a tail of another through a channel of weight
// delta_beta: sum over levels k and basis pairs of
// (G_k^{-1})_{lm} q^k F_a(v_l at the tail) F_b(v_m at the tail).
// Result variables: qA<i> for a's edges, qB<i> for b's edges, then q for the
// new channel.
template <typename F>
BlockSeries<F> glue_two(const PantsDecomposition<F>& a, int tail_a,
                        const PantsDecomposition<F>& b, int tail_b, const F& delta_beta,
                        int order) {
    if (tail_a < 0 || tail_a >= static_cast<int>(a.graph.tails().size()) || tail_b < 0 ||
        tail_b >= static_cast<int>(b.graph.tails().size()))
        throw ArityError("glue_two: tail index out of range");
    if (!field_zero(a.c - b.c)) throw ArityError("glue_two: central charges differ");
    int na = static_cast<int>(a.graph.edges().size());
    int nb = static_cast<int>(b.graph.edges().size());
    std::vector<std::string> names;
    std::vector<int> var_a, var_b;
    for (int e = 0; e < na; ++e) {
        var_a.push_back(static_cast<int>(names.size()));
        names.push_back("qA" + std::to_string(e));
    }
    for (int e = 0; e < nb; ++e) {
        var_b.push_back(static_cast<int>(names.size()));
        names.push_back("qB" + std::to_string(e));
    }
    int var_q = static_cast<int>(names.size());
    names.push_back("q");
    VarSet vars(names);

    BlockEvaluator<F> ea(a), eb(b);
    BasicSeries<F> body(vars, order);
    VirasoroParams<F> beta{a.c, delta_beta};
    for (int k = 0; k <= order; ++k) {
        auto parts = Partition::all(k);
        Matrix<F> gi;
        try {
            gi = dual_basis(beta, k);
        } catch (const DegenerateModuleError&) {
            throw DegenerateModuleError("degenerate channel weight at level " +
                                        std::to_string(k));
        }
        for (std::size_t i = 0; i < parts.size(); ++i)
            for (std::size_t j = 0; j < parts.size(); ++j) {
                if (field_zero(gi[i][j])) continue;
                std::map<int, VermaVector<F>> sa{{tail_a, VermaVector<F>::basis(parts[i])}};
                std::map<int, VermaVector<F>> sb{{tail_b, VermaVector<F>::basis(parts[j])}};
                BasicSeries<F> fa = ea.body(vars, var_a, order, order - k, sa);
                BasicSeries<F> fb = eb.body(vars, var_b, order, order - k, sb);
                BasicSeries<F> qk(vars, order);
                Expo e(vars.size(), 0);
                e[var_q] = k;
                qk.set(e, gi[i][j]);
                body += qk * fa * fb;
            }
    }
    BlockSeries<F> out{std::move(body), {}};
    for (const F& s : a.internal) out.edge_shifts.push_back(s);
    for (const F& s : b.internal) out.edge_shifts.push_back(s);
    out.edge_shifts.push_back(delta_beta);
    return out;
}

// Glues two tails of one block to each other (trace over the channel).
// Result variables: q<i> for the block's edges, then q for the channel.
template <typename F>
BlockSeries<F> self_glue(const PantsDecomposition<F>& a, int tail_i, int tail_j,
                         const F& delta_beta, int order) {
    int nt = static_cast<int>(a.graph.tails().size());
    if (tail_i < 0 || tail_i >= nt || tail_j < 0 || tail_j >= nt || tail_i == tail_j)
        throw ArityError("self_glue: needs two distinct tails of the same block");
    int na = static_cast<int>(a.graph.edges().size());
    std::vector<std::string> names;
    std::vector<int> var_a;
    for (int e = 0; e < na; ++e) {
        var_a.push_back(static_cast<int>(names.size()));
        names.push_back("q" + std::to_string(e));
    }
    int var_q = static_cast<int>(names.size());
    names.push_back("q");
    VarSet vars(names);

    BlockEvaluator<F> ea(a);
    BasicSeries<F> body(vars, order);
    VirasoroParams<F> beta{a.c, delta_beta};
    for (int k = 0; k <= order; ++k) {
        auto parts = Partition::all(k);
        Matrix<F> gi;
        try {
            gi = dual_basis(beta, k);
        } catch (const DegenerateModuleError&) {
            throw DegenerateModuleError("degenerate channel weight at level " +
                                        std::to_string(k));
        }
        for (std::size_t i = 0; i < parts.size(); ++i)
            for (std::size_t j = 0; j < parts.size(); ++j) {
                if (field_zero(gi[i][j])) continue;
                std::map<int, VermaVector<F>> st{
                    {tail_i, VermaVector<F>::basis(parts[i])},
                    {tail_j, VermaVector<F>::basis(parts[j])}};
                BasicSeries<F> fa = ea.body(vars, var_a, order, order - k, st);
                BasicSeries<F> qk(vars, order);
                Expo e(vars.size(), 0);
                e[var_q] = k;
                qk.set(e, gi[i][j]);
                body += qk * fa;
            }
    }
    BlockSeries<F> out{std::move(body), {}};
    for (const F& s : a.internal) out.edge_shifts.push_back(s);
    out.edge_shifts.push_back(delta_beta);
    return out;
}

}  // namespace gluecb
