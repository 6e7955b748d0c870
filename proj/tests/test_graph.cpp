#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <gluecb/graph.hpp>

#include <sstream>

using namespace gluecb;

namespace {

StableGraph two_loop_vertex() {
    return StableGraph(1, {{0, 0}, {0, 0}}, {});
}

StableGraph dumbbell() {
    // loop at 0, loop at 1, bridge 0-1
    return StableGraph(2, {{0, 0}, {1, 1}, {0, 1}}, {});
}

StableGraph three_tail_vertex() {
    return StableGraph(1, {}, {{0, 1}, {0, 2}, {0, 3}});
}

StableGraph four_tail_vertex() {
    return StableGraph(1, {}, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
}

}  // namespace

TEST_CASE("genus") {
    CHECK(two_loop_vertex().genus() == 2);
    CHECK(dumbbell().genus() == 2);
    CHECK(three_tail_vertex().genus() == 0);
    StableGraph disconnected(2, {{0, 0}, {1, 1}}, {});
    CHECK_THROWS_AS(disconnected.genus(), GraphError);
}

TEST_CASE("stability and validation") {
    CHECK(two_loop_vertex().stable());
    CHECK(three_tail_vertex().stable());
    StableGraph low(2, {{0, 1}}, {{0, 1}, {0, 2}});
    CHECK_FALSE(low.stable());
    CHECK_THROWS_AS(low.validate(), GraphError);
}

TEST_CASE("extend_tails") {
    auto ext = extend_tails(three_tail_vertex());
    CHECK(ext.graph.num_vertices() == 4);
    CHECK(ext.graph.edges().size() == 6);
    CHECK(ext.graph.tails().empty());
    CHECK(ext.graph.genus() == 3);
    CHECK(ext.graph.stable());

    auto same = extend_tails(two_loop_vertex());
    CHECK(same.graph.num_vertices() == 1);
    CHECK(same.graph.edges().size() == 2);

    StableGraph one_loop_one_tail(1, {{0, 0}}, {{0, 1}});
    auto ext2 = extend_tails(one_loop_one_tail);
    CHECK(ext2.graph.num_vertices() == 2);
    CHECK(ext2.graph.edges().size() == 3);
    CHECK(ext2.graph.genus() == 2);

    // genus increases by exactly |T| and the result is stable and tailless
    for (const auto& g : {three_tail_vertex(), four_tail_vertex(), one_loop_one_tail}) {
        auto e = extend_tails(g);
        CHECK(e.graph.genus() == g.genus() + static_cast<int>(g.tails().size()));
        CHECK(e.graph.stable());
        CHECK(e.graph.tails().empty());
    }
}

TEST_CASE("find_rigidification: trivalent tail vertex") {
    StableGraph g = three_tail_vertex();
    Rigidification tau = find_rigidification(g);
    CHECK(rigidification_valid(g, tau));
    // only choice up to order: the three tails in enumeration order
    CHECK(*tau.assign[0][0] == Half::tail_half(0));
    CHECK(*tau.assign[0][1] == Half::tail_half(1));
    CHECK(*tau.assign[0][2] == Half::tail_half(2));
}

TEST_CASE("find_rigidification: constrained 4-valent vertex") {
    StableGraph g = two_loop_vertex();
    // branches at the single vertex: +a, -a, +b, -b
    std::vector<RigidConstraint> cs{
        {0, 0, Half::edge_half(0, false)},  // tau(0) = h2 = -a
        {0, 1, Half::edge_half(1, true)},   // tau(1) = h3 = +b
        {0, 2, Half::edge_half(1, false)},  // tau(inf) = h4 = -b
    };
    Rigidification tau = find_rigidification(g, cs);
    CHECK(rigidification_valid(g, tau));
}

TEST_CASE("find_rigidification: adversarial constraint is unsatisfiable") {
    StableGraph g = dumbbell();
    // force tau_v(0) = -tau_v'(0) across the bridge (edge 2: 0 -> 1)
    std::vector<RigidConstraint> cs{
        {0, 0, Half::edge_half(2, false)},
        {1, 0, Half::edge_half(2, true)},
    };
    CHECK_THROWS_AS(find_rigidification(g, cs), UnsatisfiableError);
}

TEST_CASE("find_rigidification outputs always revalidate") {
    for (const auto& g : {two_loop_vertex(), dumbbell(), extend_tails(four_tail_vertex()).graph}) {
        Rigidification tau = find_rigidification(g);
        CHECK(rigidification_valid(g, tau));
    }
}

TEST_CASE("fuse_surgery: four tails") {
    StableGraph g = four_tail_vertex();
    std::array<Half, 4> br{Half::tail_half(0), Half::tail_half(1), Half::tail_half(2),
                           Half::tail_half(3)};
    auto r = fuse_surgery(g, 0, br);
    for (const StableGraph* s : {&r.prime, &r.dprime}) {
        CHECK(s->num_vertices() == 2);
        CHECK(s->edges().size() == 1);
        CHECK(s->tails().size() == 4);
        CHECK(s->stable());
        CHECK(s->genus() == 0);
    }
    // prime: tails 1,2 on one side; dprime: tails 1,3
    CHECK(r.prime.tails()[0].vertex == r.prime.tails()[1].vertex);
    CHECK(r.dprime.tails()[0].vertex == r.dprime.tails()[2].vertex);
    CHECK(r.prime.tails()[0].vertex != r.prime.tails()[2].vertex);
}

TEST_CASE("fuse_surgery: two-loop vertex gives dumbbells") {
    StableGraph g = two_loop_vertex();
    std::array<Half, 4> br{Half::edge_half(0, true), Half::edge_half(0, false),
                           Half::edge_half(1, true), Half::edge_half(1, false)};
    auto r = fuse_surgery(g, 0, br);
    CHECK(isomorphic(r.prime, dumbbell()));
    // the other pairing splits both loops: a theta graph of genus 2
    StableGraph theta(2, {{0, 1}, {0, 1}, {0, 1}}, {});
    CHECK(isomorphic(r.dprime, theta));
    CHECK(r.dprime.genus() == 2);
    // contracting the new edge returns the original graph
    CHECK(isomorphic(contract_edge(r.prime, r.new_edge_prime), g));
    CHECK(isomorphic(contract_edge(r.dprime, r.new_edge_dprime), g));
}

TEST_CASE("fuse_surgery: loop plus two tails") {
    StableGraph g(1, {{0, 0}}, {{0, 1}, {0, 2}});
    std::array<Half, 4> br{Half::edge_half(0, true), Half::edge_half(0, false),
                           Half::tail_half(0), Half::tail_half(1)};
    auto r = fuse_surgery(g, 0, br);
    // prime keeps the loop on one vertex
    int loops = 0;
    for (const auto& e : r.prime.edges()) loops += e.is_loop() ? 1 : 0;
    CHECK(loops == 1);
    CHECK(r.prime.num_vertices() == 2);
    // dprime splits the loop into a bridge
    for (const auto& e : r.dprime.edges()) CHECK_FALSE(e.is_loop());
    CHECK(r.dprime.stable());
    CHECK(isomorphic(contract_edge(r.prime, r.new_edge_prime), g));
    CHECK(isomorphic(contract_edge(r.dprime, r.new_edge_dprime), g));
}

TEST_CASE("fuse_surgery rejects bad valence") {
    StableGraph g = dumbbell();
    auto br = g.branches_at(0);
    CHECK(br.size() == 3);
    CHECK_THROWS_AS(
        fuse_surgery(g, 0, std::array<Half, 4>{br[0], br[1], br[2], Half::edge_half(1, true)}),
        GraphError);
}

TEST_CASE("fundamental group generators") {
    StableGraph one_loop(1, {{0, 0}}, {});
    auto gens = fundamental_group_generators(one_loop, 0);
    REQUIRE(gens.size() == 1);
    CHECK(gens[0] == Path{Half::edge_half(0, true)});

    StableGraph db = dumbbell();
    auto gens2 = fundamental_group_generators(db, 1);
    CHECK(gens2.size() == 2);
    for (const auto& p : gens2) {
        CHECK(db.path_reduced(p));
        CHECK(db.initial(p.front()) == 1);
        CHECK(db.terminal(p.back()) == 1);
    }

    StableGraph tree(2, {{0, 1}}, {});
    CHECK(fundamental_group_generators(tree, 0).empty());
}

TEST_CASE("abelianization rank equals genus") {
    for (const auto& g : {two_loop_vertex(), dumbbell(), extend_tails(four_tail_vertex()).graph,
                          extend_tails(three_tail_vertex()).graph}) {
        auto gens = fundamental_group_generators(g, 0);
        CHECK(static_cast<int>(gens.size()) == g.genus());
        CHECK(matrix_rank(abelianization(g, gens)) == g.genus());
    }
}

TEST_CASE("path reduction") {
    StableGraph db = dumbbell();
    Half bridge = Half::edge_half(2, true);
    Path p{bridge, bridge.inverse(), Half::edge_half(0, true)};
    CHECK_FALSE(db.path_reduced(p));
    Path r = db.reduce_path(p);
    CHECK(r == Path{Half::edge_half(0, true)});
}

TEST_CASE("graph file parsing") {
    std::istringstream in(
        "graph 2 0\n"
        "vertex v1\n"
        "vertex v2\n"
        "edge a v1 v1\n"
        "edge b v2 v2\n"
        "edge c v1 v2\n"
        "orient c v2\n");
    ParsedGraph pg = parse_graph(in);
    CHECK(pg.graph.genus() == 2);
    CHECK(isomorphic(pg.graph, dumbbell()));
    CHECK(pg.graph.edges()[2].from == 1);  // orient flipped the bridge

    std::istringstream bad(
        "graph 0 2\n"
        "vertex v1\n"
        "vertex v2\n"
        "edge a v1 v2\n"
        "tail t1 v1 1\n"
        "tail t2 v2 2\n");
    CHECK_THROWS_WITH_AS(parse_graph(bad), doctest::Contains("degree"), GraphError);

    std::istringstream malformed("graph 1 0\nvertex v\nedge a v w\n");
    CHECK_THROWS_WITH_AS(parse_graph(malformed), doctest::Contains("line 3"), GraphError);

    // rigid constraints round-trip into find_rigidification input
    std::istringstream rg(
        "graph 2 0\n"
        "vertex v\n"
        "edge a v v\n"
        "edge b v v\n"
        "rigid v 0 -a\n"
        "rigid v 1 +b\n"
        "rigid v inf -b\n");
    ParsedGraph pg2 = parse_graph(rg);
    REQUIRE(pg2.rigid_constraints.size() == 3);
    Rigidification tau = find_rigidification(pg2.graph, pg2.rigid_constraints);
    CHECK(rigidification_valid(pg2.graph, tau));
}

TEST_CASE("isomorphism certificate distinguishes and identifies") {
    CHECK_FALSE(isomorphic(two_loop_vertex(), dumbbell()));
    // relabeled dumbbell
    StableGraph db2(2, {{1, 0}, {0, 0}, {1, 1}}, {});
    CHECK(isomorphic(dumbbell(), db2));
}
