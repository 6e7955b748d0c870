#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gluecb {

struct GraphError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnsatisfiableError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A branch at a vertex: an oriented edge (one of the two half-edges of an
// edge) or a tail.  Loops contribute two distinct half-edges at one vertex.
struct Half {
    int edge = -1;         // edge index, or -1 for a tail
    bool positive = true;  // which half of the edge
    int tail = -1;         // tail index when edge < 0

    static Half edge_half(int e, bool pos) { return {e, pos, -1}; }
    static Half tail_half(int t) { return {-1, true, t}; }

    bool is_tail() const { return edge < 0; }
    Half inverse() const {
        if (is_tail()) throw GraphError("tail has no inverse half");
        return {edge, !positive, -1};
    }
    friend bool operator==(const Half&, const Half&) = default;
    friend auto operator<=>(const Half&, const Half&) = default;
};

using Path = std::vector<Half>;

struct Edge {
    int from = 0;  // v_{-h} for the positive half
    int to = 0;    // v_h for the positive half
    bool is_loop() const { return from == to; }
};

struct Tail {
    int vertex = 0;
    int numbering = 0;  // value of nu, 1-based
};

// Per-vertex assignment of the three coordinates {0, 1, inf} to branches.
struct Rigidification {
    // one entry per vertex; slots are [0] -> 0, [1] -> 1, [2] -> inf
    std::vector<std::array<std::optional<Half>, 3>> assign;
};

class StableGraph {
public:
    StableGraph() = default;
    StableGraph(int nvertices, std::vector<Edge> edges, std::vector<Tail> tails);

    int num_vertices() const { return nvertices_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<Tail>& tails() const { return tails_; }

    int terminal(const Half& h) const {
        if (h.is_tail()) return tails_[h.tail].vertex;
        return h.positive ? edges_[h.edge].to : edges_[h.edge].from;
    }
    int initial(const Half& h) const {
        if (h.is_tail()) throw GraphError("tail has no initial vertex");
        return h.positive ? edges_[h.edge].from : edges_[h.edge].to;
    }

    // branches with terminal vertex v, in enumeration order (edge halves
    // first by edge index then sign, then tails)
    std::vector<Half> branches_at(int v) const;
    int degree(int v) const { return static_cast<int>(branches_at(v).size()); }

    bool connected() const;
    bool stable() const;
    void validate() const;  // throws GraphError with the reason

    int genus() const;  // |E| - |V| + 1, requires connected

    // path sanity used throughout: consecutive half-edges compose head to
    // tail and no immediate backtracking
    bool path_composable(const Path& p) const;
    bool path_reduced(const Path& p) const;
    Path reduce_path(Path p) const;

private:
    int nvertices_ = 0;
    std::vector<Edge> edges_;
    std::vector<Tail> tails_;
};

struct TailExtension {
    StableGraph graph;            // the tailless extension
    std::vector<int> bridge_edge;  // per original tail: index of the new bridge
    std::vector<int> loop_edge;    // per original tail: index of the new loop
};

// Replaces every tail by a bridge to a fresh vertex carrying a loop.
TailExtension extend_tails(const StableGraph& g);

struct RigidConstraint {
    int vertex;
    int slot;  // 0, 1, 2 for coordinates 0, 1, inf
    Half branch;
};

// Backtracking completion of a partial rigidification; deterministic in the
// branch enumeration order.  Throws UnsatisfiableError.
Rigidification find_rigidification(const StableGraph& g,
                                   const std::vector<RigidConstraint>& constraints = {});

// Independent re-validation of both defining conditions.
bool rigidification_valid(const StableGraph& g, const Rigidification& tau);

struct FuseResult {
    StableGraph prime;    // h1,h2 on one side of the new edge
    StableGraph dprime;   // h1,h3 on one side of the new edge
    int new_edge_prime;   // index of e'_0 in prime
    int new_edge_dprime;  // index of e''_0 in dprime
    // images of the four branches; same indexing as the inputs
    std::array<Half, 4> legs_prime;
    std::array<Half, 4> legs_dprime;
    int near_vertex;  // the vertex replacing v0 that carries h1
    int far_vertex;   // the added vertex
};

// Splits a 4-valent vertex into an edge, both ways.  The branches h1..h4 are
// caller-supplied in order.
FuseResult fuse_surgery(const StableGraph& g, int v0, const std::array<Half, 4>& branches);

// Contracts a non-loop edge (merging its endpoints); for test assertions.
StableGraph contract_edge(const StableGraph& g, int e);

// One reduced closed path per non-tree edge of a deterministic spanning tree.
std::vector<Path> fundamental_group_generators(const StableGraph& g, int basepoint);

// Canonical certificate under vertex relabeling; equal certificates iff
// isomorphic as graphs-with-tail-counts.  Small graphs only.
std::string canonical_certificate(const StableGraph& g);
bool isomorphic(const StableGraph& a, const StableGraph& b);

// abelianization matrix of paths (rows = paths, columns = edges)
std::vector<std::vector<int>> abelianization(const StableGraph& g, const std::vector<Path>& paths);
int matrix_rank(std::vector<std::vector<int>> m);

struct ParsedGraph {
    StableGraph graph;
    std::vector<RigidConstraint> rigid_constraints;
    std::vector<std::string> vertex_names;
    std::vector<std::string> edge_names;
    std::vector<std::string> tail_names;
    int declared_genus = 0;

    int vertex_index(const std::string& name) const;
    int edge_index(const std::string& name) const;
};

// Text format:
//   graph <genus> <ntails>
//   vertex <id>
//   edge <id> <v> <w>
//   tail <id> <v> <nu>
//   orient <edge-id> <from-vertex>     (loops: orient <edge-id> first|second)
//   rigid <v> <0|1|inf> <half-edge-or-tail>   half-edge syntax: +id / -id
// Rejects unstable or disconnected graphs with line-numbered diagnostics.
ParsedGraph parse_graph(std::istream& in);
ParsedGraph parse_graph_file(const std::string& path);

std::string graph_to_text(const ParsedGraph& g);

}  // namespace gluecb
