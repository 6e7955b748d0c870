#include <gluecb/moves.hpp>

#include <algorithm>
#include <sstream>

namespace gluecb {

namespace {

int parse_int(const std::string& s, const std::string& token) {
    std::size_t used = 0;
    int value = 0;
    try {
        value = std::stoi(s, &used);
    } catch (const std::exception&) {
        throw MoveError("bad move token '" + token + "'");
    }
    if (used != s.size() || value < 0) throw MoveError("bad move token '" + token + "'");
    return value;
}

// The graph surgery of a fusing move, without the coordinate charts.
struct SurgeryCore {
    StableGraph contracted;
    int vertex = 0;
    std::array<Half, 4> branches;
    StableGraph companion;
    int new_edge = 0;
    std::array<Half, 4> legs;
};

SurgeryCore fusing_core(const StableGraph& g, int e,
                        const std::optional<std::array<Half, 4>>& order_in) {
    if (e < 0 || e >= static_cast<int>(g.edges().size()))
        throw MoveError("fusing: unknown edge " + std::to_string(e));
    const Edge& ed = g.edges()[e];
    if (ed.is_loop())
        throw MoveError("fusing: edge " + std::to_string(e) + " is a loop; the move is local");
    if (g.degree(ed.from) != 3 || g.degree(ed.to) != 3)
        throw MoveError("fusing: both endpoints of edge " + std::to_string(e) +
                        " must be trivalent");
    // contract_edge drops edge e and shifts the higher edge indices down
    auto map = [&](const Half& h) {
        if (!h.is_tail() && h.edge > e) return Half::edge_half(h.edge - 1, h.positive);
        return h;
    };
    SurgeryCore core;
    if (order_in) {
        for (int k = 0; k < 4; ++k) {
            const Half& h = (*order_in)[k];
            if (!h.is_tail() && h.edge == e)
                throw MoveError("fusing: branch order may not use the contracted edge");
            core.branches[k] = map(h);
        }
    } else {
        int k = 0;
        for (const Half& h : g.branches_at(ed.from))
            if (h != Half::edge_half(e, false)) core.branches[k++] = map(h);
        for (const Half& h : g.branches_at(ed.to))
            if (h != Half::edge_half(e, true)) core.branches[k++] = map(h);
        if (k != 4) throw MoveError("fusing: endpoint branches of edge " + std::to_string(e) +
                                    " do not form a 4-valent vertex");
    }
    core.contracted = contract_edge(g, e);
    core.vertex = std::min(ed.from, ed.to);
    for (int i = 0; i < 4; ++i) {
        if (core.contracted.terminal(core.branches[i]) != core.vertex)
            throw MoveError("fusing: branch order must list the four branches at the merged "
                            "vertex");
        for (int j = 0; j < i; ++j)
            if (core.branches[i] == core.branches[j])
                throw MoveError("fusing: repeated branch in branch order");
    }
    FuseResult fr = fuse_surgery(core.contracted, core.vertex, core.branches);
    // regrouping the other way: the companion keeps branches 1 and 3 together
    core.companion = fr.dprime;
    core.new_edge = fr.new_edge_dprime;
    core.legs = fr.legs_dprime;
    return core;
}

}  // namespace

MoveWord parse_move_word(const std::string& text) {
    MoveWord w;
    std::istringstream in(text);
    std::string token;
    while (in >> token) {
        std::vector<std::string> parts;
        std::size_t pos = 0;
        while (true) {
            std::size_t colon = token.find(':', pos);
            parts.push_back(token.substr(pos, colon - pos));
            if (colon == std::string::npos) break;
            pos = colon + 1;
        }
        Move m;
        if (parts[0] == "HD" && parts.size() == 2) {
            m.kind = MoveKind::HalfDehn;
            m.edge = parse_int(parts[1], token);
        } else if (parts[0] == "F" && parts.size() == 3) {
            m.kind = MoveKind::Fusing;
            m.edge = parse_int(parts[1], token);
            m.order = parse_int(parts[2], token);
        } else if (parts[0] == "S" && parts.size() == 2) {
            m.kind = MoveKind::Simple;
            m.handle = parse_int(parts[1], token);
        } else {
            throw MoveError("bad move token '" + token + "'");
        }
        w.moves.push_back(m);
    }
    return w;
}

std::string move_word_text(const MoveWord& w) {
    std::string out;
    for (const Move& m : w.moves) {
        if (!out.empty()) out += ' ';
        switch (m.kind) {
            case MoveKind::HalfDehn: out += "HD:" + std::to_string(m.edge); break;
            case MoveKind::Fusing:
                out += "F:" + std::to_string(m.edge) + ":" + std::to_string(m.order);
                break;
            case MoveKind::Simple: out += "S:" + std::to_string(m.handle); break;
        }
    }
    return out;
}

void validate_word(const StableGraph& sigma, const MoveWord& w) {
    StableGraph g = sigma;
    for (std::size_t i = 0; i < w.moves.size(); ++i) {
        const Move& m = w.moves[i];
        try {
            switch (m.kind) {
                case MoveKind::HalfDehn:
                    if (m.edge < 0 || m.edge >= static_cast<int>(g.edges().size()))
                        throw MoveError("half_dehn: unknown edge " + std::to_string(m.edge));
                    break;
                case MoveKind::Fusing:
                    g = fusing_core(g, m.edge, std::nullopt).companion;
                    break;
                case MoveKind::Simple:
                    if (m.handle < 0) throw MoveError("simple: bad handle index");
                    break;
            }
        } catch (const MoveError& err) {
            throw MoveError("move " + std::to_string(i) + ": " + err.what());
        }
    }
}

FusingData fusing_state(const StableGraph& sigma, int e, int order,
                        std::optional<std::array<Half, 4>> branch_order) {
    SurgeryCore core = fusing_core(sigma, e, branch_order);
    FusingData out;
    out.contracted = core.contracted;
    out.vertex = core.vertex;
    out.branches = core.branches;
    out.companion = core.companion;
    out.new_edge = core.new_edge;
    out.legs = core.legs;
    // The charts depend only on the channel grouping, not on the branch
    // labels, while the supported loop patterns do depend on the labels.
    // Search the relabelings for one that classifies, matching the wanted
    // grouping through either side of the comparison.
    auto grouping = [](const std::array<Half, 4>& g, Side s) {
        std::array<Half, 2> p{g[0], s == Side::PrimeAtZero ? g[1] : g[2]};
        std::array<Half, 2> q{s == Side::PrimeAtZero ? g[2] : g[1], g[3]};
        if (p[1] < p[0]) std::swap(p[0], p[1]);
        if (q[1] < q[0]) std::swap(q[0], q[1]);
        if (q < p) std::swap(p, q);
        return std::array<Half, 4>{p[0], p[1], q[0], q[1]};
    };
    auto original = grouping(core.branches, Side::PrimeAtZero);
    auto regrouped = grouping(core.branches, Side::DPrimeAtOne);
    std::optional<ComparisonCase> case_orig, case_comp;
    std::array<int, 4> perm{0, 1, 2, 3};
    do {
        ComparisonCase cc;
        cc.graph = core.contracted;
        cc.v0 = core.vertex;
        for (int i = 0; i < 4; ++i) cc.h[i] = core.branches[perm[i]];
        if (cc.pattern() == LoopPattern::Other) continue;
        for (Side s : {Side::PrimeAtZero, Side::DPrimeAtOne}) {
            cc.side = s;
            auto gr = grouping(cc.h, s);
            if (!case_orig && gr == original) case_orig = cc;
            if (!case_comp && gr == regrouped) case_comp = cc;
        }
    } while (!(case_orig && case_comp) && std::next_permutation(perm.begin(), perm.end()));
    if (!case_orig || !case_comp)
        throw RecipeUnavailableError(
            "fusing: no supported branch labeling for the coordinate charts of edge " +
            std::to_string(e));
    out.chart_prime = u_parameters(*case_orig, order);
    out.chart_dprime = u_parameters(*case_comp, order);
    return out;
}

}  // namespace gluecb
