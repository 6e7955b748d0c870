#pragma once

#include <gluecb/blocks.hpp>
#include <gluecb/compare.hpp>

#include <array>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace gluecb {

struct MoveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class MoveKind { HalfDehn, Fusing, Simple };

struct Move {
    MoveKind kind = MoveKind::HalfDehn;
    int edge = -1;    // HalfDehn, Fusing
    int order = 2;    // re-expansion order of a Fusing dictionary
    int handle = -1;  // Simple
};

// A sequence of marking moves.  Text format: whitespace-separated tokens
// `HD:<edge>`, `F:<edge>:<order>`, `S:<handle>`.
struct MoveWord {
    std::vector<Move> moves;
};

MoveWord parse_move_word(const std::string& text);
std::string move_word_text(const MoveWord& w);

// Checks each move against the decomposition state at its position (fusing
// replaces the graph by the companion channel), so any prefix of a word that
// validates also validates.  Throws MoveError naming the offending move.
void validate_word(const StableGraph& sigma, const MoveWord& w);

// The companion pants decomposition reached by re-routing one channel: edge e
// is contracted to a 4-valent vertex and the resulting branches are regrouped
// the other way.  The charts are the unit-normalized deformation coordinates
// of the 4-valent state at its two boundary points x -> 0 (the original
// channel) and x -> 1 (the companion); together with the cross-ratio
// coordinate x itself they form the dictionary along which a block would be
// re-expanded.
struct FusingData {
    StableGraph contracted;        // e collapsed; carries one 4-valent vertex
    int vertex = 0;                // the 4-valent vertex
    std::array<Half, 4> branches;  // branch order used (halves of `contracted`)
    StableGraph companion;         // the regrouped channel
    int new_edge = 0;              // channel edge inside `companion`
    std::array<Half, 4> legs;      // branch images inside `companion`
    std::vector<UParameter> chart_prime;   // coordinates of the original channel
    std::vector<UParameter> chart_dprime;  // coordinates of the companion channel
};

// branch_order, when supplied, lists the four branches in terms of halves of
// sigma; by default the two branches at the initial vertex of e come first.
// Requires e non-loop with trivalent endpoints (the move is local).
FusingData fusing_state(const StableGraph& sigma, int e, int order,
                        std::optional<std::array<Half, 4>> branch_order = std::nullopt);

// A block together with its half-turn ledger: half_turns[e] counts half-Dehn
// twists applied along edge variable e, each acting on the body by
// q_e -> -q_e and contributing exp(i*pi*Delta_e) through the q_e^{Delta_e}
// prefactor recorded in edge_shifts.
template <typename F>
struct TwistState {
    BlockSeries<F> block;
    std::vector<int> half_turns;
};

template <typename F>
TwistState<F> make_twist_state(BlockSeries<F> b) {
    if (b.body.vars().size() != b.edge_shifts.size())
        throw MoveError("block variables and edge shifts disagree in number");
    TwistState<F> s{std::move(b), {}};
    s.half_turns.assign(s.block.edge_shifts.size(), 0);
    return s;
}

template <typename F>
void half_dehn(TwistState<F>& s, int edge) {
    if (edge < 0 || edge >= static_cast<int>(s.half_turns.size()))
        throw MoveError("half_dehn: unknown edge " + std::to_string(edge));
    BasicSeries<F> out(s.block.body.vars(), s.block.body.order());
    for (const auto& [e, c] : s.block.body.terms()) out.set(e, e[edge] % 2 ? -c : c);
    s.block.body = std::move(out);
    s.half_turns[edge] += 1;
}

// sum over edges of half_turns[e] * Delta_e; the accumulated phase is
// exp(i * pi * exponent)
template <typename F>
F twist_exponent(const TwistState<F>& s) {
    F out{};
    for (std::size_t e = 0; e < s.half_turns.size(); ++e)
        out += F(s.half_turns[e]) * s.block.edge_shifts[e];
    return out;
}

inline Complex twist_phase(const TwistState<Complex>& s) {
    return std::exp(Complex(0, 1) * std::numbers::pi * twist_exponent(s));
}

// Composition stops at the first fusing or simple move: the half-Dehn action
// is exact, while crossing a channel change needs analytic continuation data
// that external kernels must supply.  This is a declared scope boundary, not
// a failure.
struct AnalyticContinuationRequired {
    std::size_t move_index = 0;  // position of the stopping move
    Move move;
    std::optional<FusingData> dictionary;  // present for fusing with a graph
    std::string reason;
};

template <typename F>
struct ComposeOutcome {
    TwistState<F> state;
    std::size_t applied = 0;  // number of moves actually applied
    std::optional<AnalyticContinuationRequired> boundary;
};

// Applies w to the block left to right.  When sigma is supplied the word is
// validated against it first and a stopping fusing move carries its full
// re-expansion dictionary; without a graph only edge-range checks apply and
// the dictionary is omitted.
template <typename F>
ComposeOutcome<F> compose(const MoveWord& w, TwistState<F> state,
                          const StableGraph* sigma = nullptr) {
    if (sigma) validate_word(*sigma, w);
    ComposeOutcome<F> out{std::move(state)};
    for (std::size_t i = 0; i < w.moves.size(); ++i) {
        const Move& m = w.moves[i];
        if (m.kind == MoveKind::HalfDehn) {
            half_dehn(out.state, m.edge);
            ++out.applied;
            continue;
        }
        AnalyticContinuationRequired b;
        b.move_index = i;
        b.move = m;
        if (m.kind == MoveKind::Fusing) {
            b.reason = "fusing move: re-expansion across the channel change needs an "
                       "analytic continuation kernel";
            if (sigma) b.dictionary = fusing_state(*sigma, m.edge, m.order);
        } else {
            b.reason = "simple move: the torus-handle kernel is external";
        }
        out.boundary = std::move(b);
        return out;
    }
    return out;
}

}  // namespace gluecb
