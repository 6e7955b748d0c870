#pragma once

#include <gluecb/graph.hpp>
#include <gluecb/moebius.hpp>
#include <gluecb/schottky.hpp>
#include <gluecb/series.hpp>

#include <array>
#include <map>
#include <string>
#include <vector>

namespace gluecb {

struct RecipeUnavailableError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonUnitRatioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CoordinateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using PlainSeries = BasicSeries<Rational>;

enum class LoopPattern {
    AllDistinct,  // |h_1|..|h_4| mutually different
    FirstPair,    // |h_1| = |h_2| only
    TwoPairs,     // |h_1| = |h_2| and |h_3| = |h_4|
    Other,
};

enum class Side {
    PrimeAtZero,  // split keeping h_1, h_2 together; degeneration x -> 0
    DPrimeAtOne,  // split keeping h_1, h_3 together; degeneration x -> 1
};

// A graph with exactly one 4-valent vertex v0 (all others trivalent) and an
// ordering h_1..h_4 of the branches there.  The rigidification places h_2,
// h_3, h_4 at 0, 1, infinity and h_1 at the cross-ratio coordinate x.
struct ComparisonCase {
    StableGraph graph;
    int v0 = 0;
    std::array<Half, 4> h;
    Side side = Side::PrimeAtZero;

    std::vector<int> index_set() const;  // 1-based i with h_i an edge half
    LoopPattern pattern() const;
    void validate() const;  // throws GraphError
};

// Replaces every tail by a bridge to a loop-carrying vertex; tail branches
// among h_1..h_4 become the bridge halves ending at v0.
ComparisonCase extended_case(const ComparisonCase& c);

// Expansion ring at the degeneration boundary: variable 0 is x (side at 0)
// or 1-x (side at 1), variable 1+e is the deformation parameter of edge e,
// divided by the boundary variable when xshift[e] = 1.
struct DeltaSideRing {
    VarSet vars;
    int order = 0;
    std::vector<int> xshift;  // per graph edge
    bool at_one = false;
};

DeltaSideRing delta_side_ring(const ComparisonCase& c, int order);

// Laurent-expands the x-dependence of every coefficient at the boundary and
// rewrites rescaled edge variables; throws NonUnitRatioError when a negative
// boundary exponent survives.
PlainSeries expand_at_boundary(const ExactSeries& s, const DeltaSideRing& ring);

// Coefficient-wise embedding of an x-free exact series.
PlainSeries plain_series(const ExactSeries& s);

// Substitutes images[i] for variable i; images live in a common ring.
PlainSeries compose_series(const PlainSeries& g, const std::vector<PlainSeries>& images);

// rho_i with reduced expression ... h_i, completed through a spanning tree.
std::array<Path, 4> diagonal_paths(const ComparisonCase& c);

// The four-loop family whose fixed-point cross-ratio isolates y_target:
// two paths ending in other branches and two ending in ... h_5 h_target,
// ... h_6 h_target.  Empty with a note when h_target is a tail.
struct GammaRecipes {
    std::vector<Path> paths;
    std::string note;
};
GammaRecipes gamma_recipes(const ComparisonCase& c, int target = 1);

// Fixed point of the word of a closed path that need not be cyclically
// reduced; the conjugating prefix is stripped and applied afterwards.
ProjectivePoint<ExactSeries> conjugated_fixed_point(const SchottkyConfig& cfg, Path rho);

// [a_1, a_3; a_2, a_4] of the diagonal fixed points, expanded at the
// boundary; lies in x * (ring)^x.
PlainSeries invariant_cross_ratio(const ComparisonCase& c, int order);

// Everything the order-by-order matching produces: the split graph, its
// rigidification, and each split-side deformation variable as a series in
// the boundary ring.
struct ComparisonSolution {
    DeltaSideRing ring;
    StableGraph split;         // Delta' or Delta''
    Rigidification tau;        // on the 4-valent graph
    Rigidification tau_split;  // on the split graph
    int new_edge = 0;          // e'_0 resp. e''_0
    std::vector<PlainSeries> svar;  // per split edge
};
ComparisonSolution solve_comparison(const ComparisonCase& c, int order);

struct RatioEntry {
    std::string name;
    PlainSeries value;
    bool is_unit = false;
    int sign = 0;  // sign of the constant term
};
struct RatioReport {
    std::vector<RatioEntry> entries;
    ComparisonSolution solution;
};
RatioReport theorem21_ratios(const ComparisonCase& c, int order);

// Deformation parameters u_i normalizing every ratio constant to +1; the
// series live in the unexpanded ring of the 4-valent graph.
struct UParameter {
    std::string name;
    ExactSeries value;
    int sign = 0;
};
std::vector<UParameter> u_parameters(const ComparisonCase& c, int order);

// ---- standard-coordinate deformation --------------------------------

// z_h for every edge half: a projective-line automorphism permuting
// {0, 1, infinity} with z_h(alpha_h) = 0.
using CoordinateAssignment = std::map<Half, Moebius<Rational>>;

// Canonical choice: the other two branch positions go to 1 and infinity in
// increasing slot order.
CoordinateAssignment standard_coordinates(const StableGraph& g, const Rigidification& tau);

// The composite g_d h_{d-1} ... g_1 h_0 g_0 of coordinate changes and edge
// crossings z -> q_e / z along a closed path; an anti-homomorphism in the
// path, matching path_element.
Moebius<PlainSeries> ihara_nakamura_element(const StableGraph& g, const Rigidification& tau,
                                            const CoordinateAssignment& coords, const Path& gamma,
                                            const VarSet& qvars, int order);

// Multiplier of a loxodromic series matrix over any coefficient field,
// normalized into the augmentation ideal; same contract as the Schottky
// overload.
PlainSeries series_multiplier(const Moebius<PlainSeries>& m);

}  // namespace gluecb
