// Batch front-end: graph inspection and surgery, Schottky reports, the
// boundary-comparison ratio report, unit-normalized coordinates, conformal
// block expansions, and move words.  Exit codes: 0 success, 1 usage or input
// errors, 2 a falsified mathematical invariant.
#include "CLI11.hpp"

#include <gluecb/blocks.hpp>
#include <gluecb/compare.hpp>
#include <gluecb/moves.hpp>
#include <gluecb/schottky.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace gluecb;

namespace {

struct InvariantFalsified : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Rational parse_rational(const std::string& s) {
    try {
        return Rational(s);
    } catch (const std::exception&) {
        throw CLI::ValidationError("not a rational number: " + s);
    }
}

std::vector<Rational> parse_rational_list(const std::string& s) {
    std::vector<Rational> out;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(parse_rational(item));
    }
    return out;
}

std::string rat(const Rational& r) { return to_string(r); }

std::string plain_to_text(const PlainSeries& s) {
    std::ostringstream os;
    bool any = false;
    for (const auto& [e, c] : s.terms()) {
        os << rat(c);
        for (std::size_t i = 0; i < e.size(); ++i)
            if (e[i] != 0) os << " * " << s.vars().name(i) << "^" << e[i];
        os << "\n";
        any = true;
    }
    if (!any) os << "0\n";
    return os.str();
}

std::string half_name(const ParsedGraph& pg, const Half& h) {
    if (h.is_tail())
        return h.tail < static_cast<int>(pg.tail_names.size()) ? pg.tail_names[h.tail]
                                                               : "t" + std::to_string(h.tail);
    std::string en = h.edge < static_cast<int>(pg.edge_names.size())
                         ? pg.edge_names[h.edge]
                         : "e" + std::to_string(h.edge);
    return (h.positive ? "+" : "-") + en;
}

Half parse_half(const ParsedGraph& pg, const std::string& tok) {
    if (!tok.empty() && (tok[0] == '+' || tok[0] == '-')) {
        int e = pg.edge_index(tok.substr(1));
        if (e < 0) throw GraphError("unknown edge " + tok.substr(1));
        return Half::edge_half(e, tok[0] == '+');
    }
    for (std::size_t i = 0; i < pg.tail_names.size(); ++i)
        if (pg.tail_names[i] == tok) return Half::tail_half(static_cast<int>(i));
    throw GraphError("unknown branch " + tok);
}

// The 4-valent-vertex labeling a comparison needs: the marked vertex and, by
// default, its branches in enumeration order (overridable via --branches).
ComparisonCase comparison_case(const ParsedGraph& pg, const std::string& branches,
                               const std::string& side) {
    ComparisonCase c;
    c.graph = pg.graph;
    c.v0 = -1;
    for (int v = 0; v < c.graph.num_vertices(); ++v) {
        if (c.graph.degree(v) == 4) {
            if (c.v0 >= 0) throw GraphError("more than one 4-valent vertex");
            c.v0 = v;
        }
    }
    if (c.v0 < 0) throw GraphError("no 4-valent vertex to compare at");
    std::vector<Half> br;
    if (branches.empty()) {
        for (const Half& h : c.graph.branches_at(c.v0)) br.push_back(h);
    } else {
        std::istringstream in(branches);
        std::string tok;
        while (std::getline(in, tok, ',')) br.push_back(parse_half(pg, tok));
    }
    if (br.size() != 4) throw GraphError("need exactly 4 branches at the marked vertex");
    std::copy(br.begin(), br.end(), c.h.begin());
    c.side = side == "dprime" ? Side::DPrimeAtOne : Side::PrimeAtZero;
    c.validate();
    return c;
}

ParsedGraph wrap_graph(const StableGraph& g) {
    ParsedGraph pg;
    pg.graph = g;
    pg.declared_genus = g.genus();
    for (int v = 0; v < g.num_vertices(); ++v) pg.vertex_names.push_back("v" + std::to_string(v));
    for (std::size_t e = 0; e < g.edges().size(); ++e)
        pg.edge_names.push_back("e" + std::to_string(e));
    for (std::size_t t = 0; t < g.tails().size(); ++t)
        pg.tail_names.push_back("t" + std::to_string(t));
    return pg;
}

template <typename F>
PantsDecomposition<F> pants_from(const ParsedGraph& pg, const F& c, const std::vector<F>& ext,
                                 const std::vector<F>& inner) {
    PantsDecomposition<F> pd;
    pd.graph = pg.graph;
    pd.tau = find_rigidification(pg.graph, pg.rigid_constraints);
    pd.c = c;
    pd.external = ext;
    pd.internal = inner;
    pd.validate();
    return pd;
}

void emit(const std::string& text, const std::string& output) {
    if (output.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(output);
    if (!out) throw std::runtime_error("cannot write " + output);
    out << text;
}

std::string describe_block(const BlockSeries<Rational>& b, bool numeric) {
    std::ostringstream os;
    for (std::size_t e = 0; e < b.edge_shifts.size(); ++e)
        os << "# prefactor " << b.body.vars().name(e) << "^" << rat(b.edge_shifts[e]) << "\n";
    if (!numeric) {
        os << plain_to_text(b.body);
        return os.str();
    }
    os.precision(17);
    for (const auto& [e, c] : b.body.terms()) {
        os << to_double(c);
        for (std::size_t i = 0; i < e.size(); ++i)
            if (e[i] != 0) os << " * " << b.body.vars().name(i) << "^" << e[i];
        os << "\n";
    }
    if (b.body.terms().empty()) os << "0\n";
    return os.str();
}

std::string chart_text(const std::vector<UParameter>& chart) {
    std::ostringstream os;
    for (const auto& u : chart) {
        os << u.name << " sign " << (u.sign >= 0 ? "+1" : "-1") << "\n";
        std::istringstream lines(series_to_text(u.value));
        std::string l;
        while (std::getline(lines, l)) os << "  " << l << "\n";
    }
    return os.str();
}

// ---- subcommand bodies ------------------------------------------------

int run_graph_check(const std::string& file, const std::string& output) {
    ParsedGraph pg = parse_graph_file(file);
    std::ostringstream os;
    const StableGraph& g = pg.graph;
    os << "vertices " << g.num_vertices() << "\n"
       << "edges " << g.edges().size() << "\n"
       << "tails " << g.tails().size() << "\n"
       << "genus " << g.genus() << "\n"
       << "certificate " << canonical_certificate(g) << "\n";
    try {
        Rigidification tau = find_rigidification(g, pg.rigid_constraints);
        os << "rigidification ok\n";
        for (int v = 0; v < g.num_vertices(); ++v) {
            os << "  vertex " << v;
            for (int s = 0; s < 3; ++s)
                os << " "
                   << (tau.assign[v][s] ? half_name(pg, *tau.assign[v][s]) : std::string("-"));
            os << "\n";
        }
    } catch (const std::exception& e) {
        os << "rigidification failed: " << e.what() << "\n";
    }
    emit(os.str(), output);
    return 0;
}

int run_graph_extend(const std::string& file, const std::string& output) {
    ParsedGraph pg = parse_graph_file(file);
    TailExtension ext = extend_tails(pg.graph);
    std::ostringstream os;
    os << graph_to_text(wrap_graph(ext.graph));
    for (std::size_t t = 0; t < ext.bridge_edge.size(); ++t)
        os << "# tail " << half_name(pg, Half::tail_half(static_cast<int>(t))) << " -> bridge e"
           << ext.bridge_edge[t] << " loop e" << ext.loop_edge[t] << "\n";
    emit(os.str(), output);
    return 0;
}

int run_graph_fuse(const std::string& file, const std::string& edge, int order,
                   const std::string& output) {
    ParsedGraph pg = parse_graph_file(file);
    int e = pg.edge_index(edge);
    if (e < 0) throw GraphError("unknown edge " + edge);
    FusingData fd = fusing_state(pg.graph, e, order);
    std::ostringstream os;
    os << "# companion channel\n" << graph_to_text(wrap_graph(fd.companion));
    os << "# new edge e" << fd.new_edge << "\n";
    os << "# chart of the original channel\n" << chart_text(fd.chart_prime);
    os << "# chart of the companion channel\n" << chart_text(fd.chart_dprime);
    emit(os.str(), output);
    return 0;
}

int run_schottky_report(const std::string& file, int order, const std::string& output) {
    ParsedGraph pg = parse_graph_file(file);
    StableGraph g = pg.graph;
    std::ostringstream os;
    if (!g.tails().empty()) {
        g = extend_tails(g).graph;
        os << "# tails replaced by loop handles\n";
    }
    Rigidification tau =
        g.num_vertices() == pg.graph.num_vertices()
            ? find_rigidification(g, pg.rigid_constraints)
            : find_rigidification(g);
    std::vector<std::string> names;
    for (std::size_t e = 0; e < g.edges().size(); ++e) names.push_back("y" + std::to_string(e));
    // a 4-valent vertex leaves one branch without a slot; place it at x
    std::map<Half, LocalizedScalar> extra;
    for (int v = 0; v < g.num_vertices(); ++v) {
        for (const Half& h : g.branches_at(v)) {
            bool assigned = false;
            for (int s = 0; s < 3; ++s)
                if (tau.assign[v][s] && *tau.assign[v][s] == h) assigned = true;
            if (!assigned) extra.emplace(h, LocalizedScalar::x_power(1));
        }
    }
    SchottkyConfig cfg = schottky_from_rigidification(g, tau, names, order, extra);
    cfg.validate();
    for (std::size_t e = 0; e < g.edges().size(); ++e) {
        for (bool pos : {true, false}) {
            Half h = Half::edge_half(static_cast<int>(e), pos);
            os << "alpha " << (pos ? "+" : "-") << "e" << e << " = "
               << (cfg.at_infinity(h) ? std::string("inf") : cfg.alpha(h)->str()) << "\n";
        }
    }
    auto gens = fundamental_group_generators(g, 0);
    for (std::size_t i = 0; i < gens.size(); ++i) {
        ExactSeries m = multiplier(cfg, path_element(cfg, gens[i]));
        os << "generator " << i << " multiplier:\n";
        std::istringstream lines(series_to_text(m));
        std::string l;
        while (std::getline(lines, l)) os << "  " << l << "\n";
    }
    emit(os.str(), output);
    return 0;
}

int run_compare(const std::string& file, const std::string& side, const std::string& branches,
                int order, const std::string& output) {
    ParsedGraph pg = parse_graph_file(file);
    ComparisonCase c = comparison_case(pg, branches, side);
    std::ostringstream os;
    PlainSeries inv = invariant_cross_ratio(c, order);
    os << "invariant cross-ratio (boundary expansion):\n";
    {
        std::istringstream lines(plain_to_text(inv));
        std::string l;
        while (std::getline(lines, l)) os << "  " << l << "\n";
    }
    RatioReport rep = theorem21_ratios(c, order);
    bool ok = true;
    for (const auto& en : rep.entries) {
        os << en.name << " unit " << (en.is_unit ? "yes" : "NO") << " sign "
           << (en.sign > 0 ? "+1" : en.sign < 0 ? "-1" : "0") << "\n";
        ok = ok && en.is_unit && en.sign != 0;
    }
    emit(os.str(), output);
    if (!ok) throw InvariantFalsified("a comparison ratio is not a unit at order " +
                                      std::to_string(order));
    return 0;
}

int run_uparams(const std::string& file, const std::string& side, const std::string& branches,
                int order, const std::string& output) {
    ParsedGraph pg = parse_graph_file(file);
    ComparisonCase c = comparison_case(pg, branches, side);
    emit(chart_text(u_parameters(c, order)), output);
    return 0;
}

int run_blocks_fourpoint(const std::string& cc, const std::array<std::string, 4>& d,
                         const std::string& dbeta, int order, bool numeric,
                         const std::string& output) {
    PantsDecomposition<Rational> pd;
    pd.graph = StableGraph(2, {{0, 1}}, {{0, 1}, {0, 2}, {1, 3}, {1, 4}});
    pd.tau.assign = {
        {Half::edge_half(0, false), Half::tail_half(1), Half::tail_half(0)},
        {Half::tail_half(3), Half::tail_half(2), Half::edge_half(0, true)},
    };
    pd.c = parse_rational(cc);
    for (const auto& s : d) pd.external.push_back(parse_rational(s));
    pd.internal = {parse_rational(dbeta)};
    emit(describe_block(graph_block(pd, order), numeric), output);
    return 0;
}

int run_blocks_torus(const std::string& cc, const std::string& dext, const std::string& dbeta,
                     int order, bool numeric, const std::string& output) {
    PantsDecomposition<Rational> pd;
    pd.graph = StableGraph(1, {{0, 0}}, {{0, 1}});
    pd.tau.assign = {{Half::edge_half(0, true), Half::edge_half(0, false), Half::tail_half(0)}};
    pd.c = parse_rational(cc);
    pd.external = {parse_rational(dext)};
    pd.internal = {parse_rational(dbeta)};
    emit(describe_block(graph_block(pd, order), numeric), output);
    return 0;
}

int run_blocks_graph(const std::string& file, const std::string& cc, const std::string& ext,
                     const std::string& inner, int order, bool numeric, bool per_edge,
                     const std::string& output) {
    ParsedGraph pg = parse_graph_file(file);
    auto pd = pants_from(pg, parse_rational(cc), parse_rational_list(ext),
                         parse_rational_list(inner));
    auto trunc = per_edge ? EdgeTruncation::PerEdge : EdgeTruncation::TotalLevel;
    emit(describe_block(graph_block(pd, order, trunc), numeric), output);
    return 0;
}

int run_moves_apply(const std::string& file, const std::string& word, const std::string& cc,
                    const std::string& ext, const std::string& inner, int order,
                    const std::string& output) {
    ParsedGraph pg = parse_graph_file(file);
    auto pd = pants_from(pg, parse_rational(cc), parse_rational_list(ext),
                         parse_rational_list(inner));
    MoveWord w = parse_move_word(word);
    auto state = make_twist_state(graph_block(pd, order));
    auto out = compose(w, std::move(state), &pd.graph);
    std::ostringstream os;
    os << "applied " << out.applied << " of " << w.moves.size() << " moves\n";
    os << "half-turns";
    for (int h : out.state.half_turns) os << " " << h;
    os << "\nphase exponent " << rat(twist_exponent(out.state)) << "  (phase exp(i*pi*exponent))\n";
    os << describe_block(out.state.block, false);
    if (out.boundary) {
        os << "stopped: " << out.boundary->reason << "\n";
        if (out.boundary->dictionary) {
            const FusingData& fd = *out.boundary->dictionary;
            os << "# companion channel\n" << graph_to_text(wrap_graph(fd.companion));
            os << "# chart of the original channel\n" << chart_text(fd.chart_prime);
            os << "# chart of the companion channel\n" << chart_text(fd.chart_dprime);
        }
    }
    emit(os.str(), output);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact deformation parameters and conformal block expansions on stable graphs"};
    app.require_subcommand(1);

    std::string file, output, side = "prime", branches, word;
    std::string cc = "1/2", d1 = "1/3", d2 = "1/3", d3 = "1/3", d4 = "1/3", dbeta = "2/5",
                dext = "1/3", external_list, internal_list, edge;
    int order = 3;
    bool numeric = false, per_edge = false;
    unsigned seed = 0;
    app.add_option("--output", output, "write the report to a file instead of stdout");
    app.add_option("--seed", seed, "seed for randomized property checks");

    auto* graph = app.add_subcommand("graph", "inspect and transform stable graphs");
    auto* gcheck = graph->add_subcommand("check", "parse, validate and summarize a graph file");
    gcheck->add_option("--file", file, "graph file")->required();
    auto* gextend = graph->add_subcommand("extend", "replace every tail by a loop handle");
    gextend->add_option("--file", file, "graph file")->required();
    auto* gfuse = graph->add_subcommand("fuse", "re-route a channel and print the dictionary");
    gfuse->add_option("--file", file, "graph file")->required();
    gfuse->add_option("--edge", edge, "edge to contract")->required();
    gfuse->add_option("--order", order, "chart truncation order");

    auto* schottky = app.add_subcommand("schottky", "universal deformation reports");
    auto* sreport = schottky->add_subcommand("report", "fixed points and generator multipliers");
    sreport->add_option("--file", file, "graph file")->required();
    sreport->add_option("--order", order, "series truncation order");

    auto* cmp = app.add_subcommand(
        "compare", "boundary comparison at a 4-valent vertex; exit 2 when a ratio fails");
    cmp->add_option("--file", file, "graph file with one 4-valent vertex")->required();
    cmp->add_option("--side", side, "prime (x->0) or dprime (x->1)")
        ->check(CLI::IsMember({"prime", "dprime"}));
    cmp->add_option("--branches", branches, "comma list of the four branches (+e/-e/tail)");
    cmp->add_option("--order", order, "series truncation order");

    auto* upar = app.add_subcommand("uparams", "unit-normalized deformation coordinates");
    upar->add_option("--file", file, "graph file with one 4-valent vertex")->required();
    upar->add_option("--side", side, "prime or dprime")
        ->check(CLI::IsMember({"prime", "dprime"}));
    upar->add_option("--branches", branches, "comma list of the four branches");
    upar->add_option("--order", order, "series truncation order");

    auto* blocks = app.add_subcommand("blocks", "conformal block expansions");
    auto* bfour = blocks->add_subcommand("four-point", "sphere four-point channel expansion");
    bfour->add_option("--c", cc, "central charge p/q");
    bfour->add_option("--d1", d1, "external weight 1");
    bfour->add_option("--d2", d2, "external weight 2");
    bfour->add_option("--d3", d3, "external weight 3");
    bfour->add_option("--d4", d4, "external weight 4");
    bfour->add_option("--dbeta", dbeta, "channel weight");
    bfour->add_option("--order", order, "truncation level");
    bfour->add_flag("--numeric", numeric, "print coefficients as doubles");
    auto* btorus = blocks->add_subcommand("torus", "torus one-point expansion");
    btorus->add_option("--c", cc, "central charge p/q");
    btorus->add_option("--dext", dext, "external weight");
    btorus->add_option("--dbeta", dbeta, "channel weight");
    btorus->add_option("--order", order, "truncation level");
    btorus->add_flag("--numeric", numeric, "print coefficients as doubles");
    auto* bgraph = blocks->add_subcommand("graph", "expansion over a trivalent graph file");
    bgraph->add_option("--file", file, "graph file")->required();
    bgraph->add_option("--c", cc, "central charge p/q");
    bgraph->add_option("--external", external_list, "comma list of tail weights");
    bgraph->add_option("--internal", internal_list, "comma list of edge weights");
    bgraph->add_option("--order", order, "truncation level");
    bgraph->add_flag("--numeric", numeric, "print coefficients as doubles");
    bgraph->add_flag("--per-edge", per_edge, "truncate each edge level independently");

    auto* moves = app.add_subcommand("moves", "marking moves on block expansions");
    auto* mapply = moves->add_subcommand("apply", "apply a move word to a graph block");
    mapply->add_option("--file", file, "trivalent graph file")->required();
    mapply->add_option("--word", word, "move word, e.g. 'HD:0 HD:1 F:2:3'")->required();
    mapply->add_option("--c", cc, "central charge p/q");
    mapply->add_option("--external", external_list, "comma list of tail weights");
    mapply->add_option("--internal", internal_list, "comma list of edge weights");
    mapply->add_option("--order", order, "truncation level");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (gcheck->parsed()) return run_graph_check(file, output);
        if (gextend->parsed()) return run_graph_extend(file, output);
        if (gfuse->parsed()) return run_graph_fuse(file, edge, order, output);
        if (sreport->parsed()) return run_schottky_report(file, order, output);
        if (cmp->parsed()) return run_compare(file, side, branches, order, output);
        if (upar->parsed()) return run_uparams(file, side, branches, order, output);
        if (bfour->parsed())
            return run_blocks_fourpoint(cc, {d1, d2, d3, d4}, dbeta, order, numeric, output);
        if (btorus->parsed()) return run_blocks_torus(cc, dext, dbeta, order, numeric, output);
        if (bgraph->parsed())
            return run_blocks_graph(file, cc, external_list, internal_list, order, numeric,
                                    per_edge, output);
        if (mapply->parsed())
            return run_moves_apply(file, word, cc, external_list, internal_list, order, output);
        std::cerr << "no subcommand selected\n";
        return 1;
    } catch (const InvariantFalsified& e) {
        std::cerr << "invariant falsified: " << e.what() << "\n";
        return 2;
    } catch (const NonUnitRatioError& e) {
        std::cerr << "invariant falsified: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
