#pragma once

#include <gluecb/graph.hpp>
#include <gluecb/moebius.hpp>
#include <gluecb/series.hpp>

#include <map>
#include <optional>
#include <vector>

namespace gluecb {

struct NotLoxodromicError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotReducedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotComposableError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Universal Schottky data over a truncated series ring: an oriented tailless
// stable graph, a fixed-point value alpha_h for every half-edge (nullopt
// meaning infinity), and a deformation series q_e per edge (by default the
// edge's own variable, but rescaled series like x * Y_1 are allowed).
class SchottkyConfig {
public:
    SchottkyConfig(StableGraph graph, VarSet vars, int order);

    const StableGraph& graph() const { return graph_; }
    const VarSet& vars() const { return vars_; }
    int order() const { return order_; }

    void set_alpha(const Half& h, std::optional<LocalizedScalar> value);
    const std::optional<LocalizedScalar>& alpha(const Half& h) const;
    bool at_infinity(const Half& h) const { return !alpha(h).has_value(); }

    void set_q(int edge, ExactSeries q);
    const ExactSeries& q(int edge) const { return q_[edge]; }

    // checks the E_inf conditions and fixed-point distinctness; throws
    void validate() const;

    ExactSeries constant(const LocalizedScalar& c) const {
        return ExactSeries::constant(vars_, order_, c);
    }
    ExactSeries zero() const { return ExactSeries(vars_, order_); }
    ExactSeries one() const { return constant(LocalizedScalar(1)); }

    // the fixed point of phi_h as a projective point
    ProjectivePoint<ExactSeries> alpha_point(const Half& h) const;

private:
    StableGraph graph_;
    VarSet vars_;
    int order_;
    std::vector<std::optional<LocalizedScalar>> alpha_pos_, alpha_neg_;
    std::vector<ExactSeries> q_;
};

// Builds the config whose alpha values realize a rigidification: at each
// vertex tau_v(0), tau_v(1), tau_v(inf) sit at 0, 1, infinity, and branches
// outside the image of tau (only possible at a 4-valent vertex) take the
// supplied extra coordinates.  Edge e uses the variable var_names[e].
SchottkyConfig schottky_from_rigidification(const StableGraph& graph, const Rigidification& tau,
                                            const std::vector<std::string>& var_names, int order,
                                            const std::map<Half, LocalizedScalar>& extra = {});

using MoebiusS = Moebius<ExactSeries>;

// The generator phi_h of Section 2.2, with the symbolic-limit matrices when
// alpha_h or alpha_{-h} is infinity.  Projective representative without the
// 1/(alpha_h - alpha_{-h}) prefactor; det = q_h * (alpha_h - alpha_{-h})^2.
MoebiusS phi(const SchottkyConfig& cfg, const Half& h);

// rho^* for a reduced path rho = h(1)...h(l): phi_{h(l)} ... phi_{h(1)}
MoebiusS path_element(const SchottkyConfig& cfg, const Path& rho);

// Eigenvalue ratio lambda of a loxodromic element, the branch with
// lambda = 0 mod the deformation ideal, solved order by order from
// lambda = (det/tr^2) (1 + lambda)^2.
ExactSeries multiplier(const SchottkyConfig& cfg, const MoebiusS& m);

// lim gamma^n(seed); stabilization is projective equality up to order N.
ProjectivePoint<ExactSeries> attractive_fixed_point(const SchottkyConfig& cfg, const MoebiusS& m,
                                                    const ProjectivePoint<ExactSeries>& seed);

// Seed chosen per the admissibility rule: the least branch h at the initial
// vertex of rho with h != -rho.front(), seeded at alpha_h.
ProjectivePoint<ExactSeries> attractive_fixed_point(const SchottkyConfig& cfg, const Path& rho);
ProjectivePoint<ExactSeries> admissible_seed(const SchottkyConfig& cfg, const Path& rho);

// One P^1 per vertex with its marked gluing points; q -> 0 fiber.
struct ClosedFiberPoint {
    Half half;                               // which branch the point realizes
    std::optional<LocalizedScalar> position;  // nullopt = infinity
};
struct ClosedFiber {
    // per-vertex point lists; edge e glues the alpha_e point on one
    // component to the alpha_{-e} point on another (or the same) component
    std::vector<std::vector<ClosedFiberPoint>> components;
};
ClosedFiber closed_fiber(const SchottkyConfig& cfg);

// ---- numeric mode ----------------------------------------------------

// Complex specialization of a config: alpha values and q values as numbers.
struct NumericSchottky {
    StableGraph graph;
    std::vector<std::optional<Complex>> alpha_pos, alpha_neg;  // nullopt = infinity
    std::vector<Complex> q;

    const std::optional<Complex>& alpha(const Half& h) const {
        return h.positive ? alpha_pos[h.edge] : alpha_neg[h.edge];
    }
};

// Evaluates an exact config at x = xval and edge variables q_e = qvals[e].
NumericSchottky specialize(const SchottkyConfig& cfg, const Complex& xval,
                           const std::vector<Complex>& qvals);

using MoebiusC = Moebius<Complex>;

MoebiusC phi(const NumericSchottky& cfg, const Half& h);
MoebiusC path_element(const NumericSchottky& cfg, const Path& rho);

// eigenvalue ratio with |lambda| < 1
Complex multiplier(const MoebiusC& m);
// multiplier of a word, with the determinant accumulated per letter; avoids
// the cancellation in det of the product matrix for very small multipliers
Complex multiplier(const NumericSchottky& cfg, const Path& rho);
// eigenvector of the dominant eigenvalue
ProjectivePoint<Complex> attractive_fixed_point(const MoebiusC& m);

}  // namespace gluecb
