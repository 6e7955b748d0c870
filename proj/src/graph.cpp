#include <gluecb/graph.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <numeric>
#include <queue>
#include <sstream>

namespace gluecb {

StableGraph::StableGraph(int nvertices, std::vector<Edge> edges, std::vector<Tail> tails)
    : nvertices_(nvertices), edges_(std::move(edges)), tails_(std::move(tails)) {
    for (const auto& e : edges_)
        if (e.from < 0 || e.from >= nvertices_ || e.to < 0 || e.to >= nvertices_)
            throw GraphError("edge endpoint out of range");
    for (const auto& t : tails_)
        if (t.vertex < 0 || t.vertex >= nvertices_)
            throw GraphError("tail vertex out of range");
}

std::vector<Half> StableGraph::branches_at(int v) const {
    std::vector<Half> r;
    for (int e = 0; e < static_cast<int>(edges_.size()); ++e) {
        if (edges_[e].to == v) r.push_back(Half::edge_half(e, true));
        if (edges_[e].from == v) r.push_back(Half::edge_half(e, false));
    }
    for (int t = 0; t < static_cast<int>(tails_.size()); ++t)
        if (tails_[t].vertex == v) r.push_back(Half::tail_half(t));
    return r;
}

bool StableGraph::connected() const {
    if (nvertices_ == 0) return false;
    std::vector<bool> seen(nvertices_, false);
    std::queue<int> q;
    q.push(0);
    seen[0] = true;
    int count = 1;
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (const auto& e : edges_) {
            for (int w : {e.from, e.to}) {
                if ((e.from == v || e.to == v) && !seen[w]) {
                    seen[w] = true;
                    ++count;
                    q.push(w);
                }
            }
        }
    }
    return count == nvertices_;
}

bool StableGraph::stable() const {
    for (int v = 0; v < nvertices_; ++v)
        if (degree(v) < 3) return false;
    return true;
}

void StableGraph::validate() const {
    if (!connected()) throw GraphError("graph is not connected");
    if (!stable())
        for (int v = 0; v < nvertices_; ++v)
            if (degree(v) < 3)
                throw GraphError("vertex " + std::to_string(v) + " has degree " +
                                 std::to_string(degree(v)) + " < 3");
}

int StableGraph::genus() const {
    if (!connected()) throw GraphError("genus of disconnected graph");
    return static_cast<int>(edges_.size()) - nvertices_ + 1;
}

bool StableGraph::path_composable(const Path& p) const {
    for (const auto& h : p)
        if (h.is_tail()) return false;
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
        if (terminal(p[i]) != initial(p[i + 1])) return false;
    return true;
}

bool StableGraph::path_reduced(const Path& p) const {
    if (!path_composable(p)) return false;
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
        if (p[i + 1] == p[i].inverse()) return false;
    return true;
}

Path StableGraph::reduce_path(Path p) const {
    Path out;
    for (const auto& h : p) {
        if (!out.empty() && out.back() == h.inverse())
            out.pop_back();
        else
            out.push_back(h);
    }
    return out;
}

TailExtension extend_tails(const StableGraph& g) {
    int nv = g.num_vertices();
    std::vector<Edge> edges = g.edges();
    TailExtension ext;
    for (const auto& t : g.tails()) {
        int w = nv++;
        ext.bridge_edge.push_back(static_cast<int>(edges.size()));
        edges.push_back({t.vertex, w});
        ext.loop_edge.push_back(static_cast<int>(edges.size()));
        edges.push_back({w, w});
    }
    ext.graph = StableGraph(nv, std::move(edges), {});
    return ext;
}

Rigidification find_rigidification(const StableGraph& g,
                                   const std::vector<RigidConstraint>& constraints) {
    const int n = g.num_vertices();
    Rigidification tau;
    tau.assign.resize(n);
    std::vector<std::vector<bool>> fixed(n, std::vector<bool>(3, false));
    for (const auto& c : constraints) {
        if (c.vertex < 0 || c.vertex >= n || c.slot < 0 || c.slot > 2)
            throw UnsatisfiableError("constraint out of range");
        if (g.terminal(c.branch) != c.vertex)
            throw UnsatisfiableError("constrained branch does not end at the vertex");
        tau.assign[c.vertex][c.slot] = c.branch;
        fixed[c.vertex][c.slot] = true;
    }

    auto conflicts = [&](int v, int slot, const Half& h) {
        for (int s = 0; s < 3; ++s)
            if (s != slot && tau.assign[v][s] && *tau.assign[v][s] == h) return true;
        if (!h.is_tail()) {
            Half inv = h.inverse();
            for (int v2 = 0; v2 < n; ++v2) {
                if (v2 == v) continue;
                if (tau.assign[v2][slot] && *tau.assign[v2][slot] == inv) return true;
            }
        }
        return false;
    };

    // consistency of the constraints themselves
    for (int v = 0; v < n; ++v)
        for (int s = 0; s < 3; ++s)
            if (fixed[v][s] && conflicts(v, s, *tau.assign[v][s]))
                throw UnsatisfiableError("constraints violate the rigidification conditions");

    std::function<bool(int)> solve = [&](int pos) {
        if (pos == 3 * n) return true;
        int v = pos / 3, slot = pos % 3;
        if (fixed[v][slot]) return solve(pos + 1);
        for (const auto& h : g.branches_at(v)) {
            if (conflicts(v, slot, h)) continue;
            tau.assign[v][slot] = h;
            if (solve(pos + 1)) return true;
            tau.assign[v][slot].reset();
        }
        return false;
    };
    if (!solve(0)) throw UnsatisfiableError("no rigidification extends the constraints");
    return tau;
}

bool rigidification_valid(const StableGraph& g, const Rigidification& tau) {
    const int n = g.num_vertices();
    if (static_cast<int>(tau.assign.size()) != n) return false;
    for (int v = 0; v < n; ++v) {
        for (int s = 0; s < 3; ++s) {
            if (!tau.assign[v][s]) return false;
            if (g.terminal(*tau.assign[v][s]) != v) return false;
            for (int s2 = s + 1; s2 < 3; ++s2)
                if (tau.assign[v][s2] && *tau.assign[v][s] == *tau.assign[v][s2]) return false;
        }
    }
    for (int s = 0; s < 3; ++s)
        for (int v = 0; v < n; ++v)
            for (int v2 = v + 1; v2 < n; ++v2) {
                const Half& a = *tau.assign[v][s];
                const Half& b = *tau.assign[v2][s];
                if (!a.is_tail() && !b.is_tail() && b == a.inverse()) return false;
            }
    return true;
}

namespace {

StableGraph split_vertex(const StableGraph& g, int v0, const std::array<Half, 4>& branches,
                         const std::array<int, 4>& group, int& new_edge) {
    // group[i] = 0 keeps branch i on v0, group[i] = 1 moves it to the new
    // vertex; the new edge joins them
    int far = g.num_vertices();
    std::vector<Edge> edges = g.edges();
    std::vector<Tail> tails = g.tails();
    for (int i = 0; i < 4; ++i) {
        int target = group[i] == 0 ? v0 : far;
        const Half& h = branches[i];
        if (h.is_tail()) {
            tails[h.tail].vertex = target;
        } else if (h.positive) {
            edges[h.edge].to = target;
        } else {
            edges[h.edge].from = target;
        }
    }
    new_edge = static_cast<int>(edges.size());
    edges.push_back({far, v0});
    return StableGraph(g.num_vertices() + 1, std::move(edges), std::move(tails));
}

}  // namespace

FuseResult fuse_surgery(const StableGraph& g, int v0, const std::array<Half, 4>& branches) {
    auto at_v0 = g.branches_at(v0);
    if (at_v0.size() != 4) throw GraphError("fuse_surgery: vertex is not 4-valent");
    for (int v = 0; v < g.num_vertices(); ++v)
        if (v != v0 && g.degree(v) != 3)
            throw GraphError("fuse_surgery: vertex " + std::to_string(v) + " is not trivalent");
    for (int i = 0; i < 4; ++i) {
        if (g.terminal(branches[i]) != v0)
            throw GraphError("fuse_surgery: branch does not end at the marked vertex");
        for (int j = i + 1; j < 4; ++j)
            if (branches[i] == branches[j]) throw GraphError("fuse_surgery: repeated branch");
    }
    FuseResult r;
    r.near_vertex = v0;
    r.far_vertex = g.num_vertices();
    r.prime = split_vertex(g, v0, branches, {0, 0, 1, 1}, r.new_edge_prime);
    r.dprime = split_vertex(g, v0, branches, {0, 1, 0, 1}, r.new_edge_dprime);
    r.legs_prime = branches;
    r.legs_dprime = branches;
    return r;
}

StableGraph contract_edge(const StableGraph& g, int e) {
    if (g.edges()[e].is_loop()) throw GraphError("cannot contract a loop");
    int a = g.edges()[e].from, b = g.edges()[e].to;
    int keep = std::min(a, b), gone = std::max(a, b);
    auto relabel = [&](int v) {
        if (v == gone) return keep;
        return v > gone ? v - 1 : v;
    };
    std::vector<Edge> edges;
    for (int i = 0; i < static_cast<int>(g.edges().size()); ++i) {
        if (i == e) continue;
        edges.push_back({relabel(g.edges()[i].from), relabel(g.edges()[i].to)});
    }
    std::vector<Tail> tails = g.tails();
    for (auto& t : tails) t.vertex = relabel(t.vertex);
    return StableGraph(g.num_vertices() - 1, std::move(edges), std::move(tails));
}

std::vector<Path> fundamental_group_generators(const StableGraph& g, int basepoint) {
    if (!g.tails().empty()) throw GraphError("fundamental group needs a tailless graph");
    if (!g.connected()) throw GraphError("fundamental group of disconnected graph");
    const int n = g.num_vertices();
    // BFS spanning tree; tree_in[v] = half-edge entering v from its parent
    std::vector<std::optional<Half>> tree_in(n);
    std::vector<bool> seen(n, false);
    std::vector<bool> edge_in_tree(g.edges().size(), false);
    std::queue<int> q;
    q.push(basepoint);
    seen[basepoint] = true;
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (int e = 0; e < static_cast<int>(g.edges().size()); ++e) {
            for (bool pos : {true, false}) {
                Half h = Half::edge_half(e, pos);
                if (g.initial(h) != v) continue;
                int w = g.terminal(h);
                if (!seen[w]) {
                    seen[w] = true;
                    tree_in[w] = h;
                    edge_in_tree[e] = true;
                    q.push(w);
                }
            }
        }
    }
    auto path_from_base = [&](int v) {
        Path p;
        while (v != basepoint) {
            p.push_back(*tree_in[v]);
            v = g.initial(*tree_in[v]);
        }
        std::reverse(p.begin(), p.end());
        return p;
    };
    std::vector<Path> gens;
    for (int e = 0; e < static_cast<int>(g.edges().size()); ++e) {
        if (edge_in_tree[e]) continue;
        Half h = Half::edge_half(e, true);
        Path p = path_from_base(g.initial(h));
        p.push_back(h);
        Path back = path_from_base(g.terminal(h));
        std::reverse(back.begin(), back.end());
        for (auto& bh : back) bh = bh.inverse();
        p.insert(p.end(), back.begin(), back.end());
        gens.push_back(g.reduce_path(std::move(p)));
    }
    return gens;
}

namespace {

std::string encode_relabeled(const StableGraph& g, const std::vector<int>& label) {
    // multiset of relabeled edges + per-vertex tail counts
    std::vector<std::pair<int, int>> es;
    for (const auto& e : g.edges()) {
        int a = label[e.from], b = label[e.to];
        es.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(es.begin(), es.end());
    std::vector<int> tails(g.num_vertices(), 0);
    for (const auto& t : g.tails()) ++tails[label[t.vertex]];
    std::ostringstream os;
    for (const auto& [a, b] : es) os << a << "-" << b << ";";
    os << "|";
    for (int c : tails) os << c << ",";
    return os.str();
}

}  // namespace

std::string canonical_certificate(const StableGraph& g) {
    const int n = g.num_vertices();
    // iterative refinement of vertex invariants
    std::vector<int> inv(n);
    for (int v = 0; v < n; ++v) {
        int loops = 0;
        for (const auto& e : g.edges())
            if (e.is_loop() && e.from == v) ++loops;
        int tails = 0;
        for (const auto& t : g.tails())
            if (t.vertex == v) ++tails;
        inv[v] = g.degree(v) * 100 + loops * 10 + tails;
    }
    for (int round = 0; round < n; ++round) {
        std::vector<std::vector<int>> sig(n);
        for (int v = 0; v < n; ++v) {
            sig[v].push_back(inv[v]);
            std::vector<int> nb;
            for (const auto& e : g.edges()) {
                if (e.from == v) nb.push_back(inv[e.to]);
                if (e.to == v) nb.push_back(inv[e.from]);
            }
            std::sort(nb.begin(), nb.end());
            sig[v].insert(sig[v].end(), nb.begin(), nb.end());
        }
        std::vector<std::vector<int>> sorted = sig;
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        std::vector<int> next(n);
        for (int v = 0; v < n; ++v)
            next[v] = static_cast<int>(
                std::lower_bound(sorted.begin(), sorted.end(), sig[v]) - sorted.begin());
        if (next == inv) break;
        inv = next;
    }
    // enumerate labelings consistent with the invariant classes, keep the
    // lexicographically least encoding
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return inv[a] != inv[b] ? inv[a] < inv[b] : a < b;
    });
    std::string best;
    long long tried = 0;
    std::vector<int> label(n, -1);
    // assign label positions class by class
    std::function<void(int)> rec2 = [&](int pos) {
        if (++tried > 2'000'000)
            throw GraphError("canonical_certificate: graph too symmetric for brute force");
        if (pos == n) {
            std::string enc = encode_relabeled(g, label);
            if (best.empty() || enc < best) best = enc;
            return;
        }
        int cls = inv[order[pos]];
        for (int i = 0; i < n; ++i) {
            int v = order[i];
            if (label[v] >= 0 || inv[v] != cls) continue;
            label[v] = pos;
            rec2(pos + 1);
            label[v] = -1;
        }
    };
    rec2(0);
    std::ostringstream os;
    os << n << "#";
    for (int v : order) os << inv[v] << ",";
    os << "#" << best;
    return os.str();
}

bool isomorphic(const StableGraph& a, const StableGraph& b) {
    if (a.num_vertices() != b.num_vertices() || a.edges().size() != b.edges().size() ||
        a.tails().size() != b.tails().size())
        return false;
    return canonical_certificate(a) == canonical_certificate(b);
}

std::vector<std::vector<int>> abelianization(const StableGraph& g,
                                             const std::vector<Path>& paths) {
    std::vector<std::vector<int>> m;
    for (const auto& p : paths) {
        std::vector<int> row(g.edges().size(), 0);
        for (const auto& h : p) row[h.edge] += h.positive ? 1 : -1;
        m.push_back(std::move(row));
    }
    return m;
}

int matrix_rank(std::vector<std::vector<int>> m) {
    if (m.empty()) return 0;
    std::vector<std::vector<long long>> a(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) a[i].assign(m[i].begin(), m[i].end());
    int rank = 0;
    std::size_t cols = a[0].size();
    for (std::size_t c = 0; c < cols && rank < static_cast<int>(a.size()); ++c) {
        std::size_t piv = rank;
        while (piv < a.size() && a[piv][c] == 0) ++piv;
        if (piv == a.size()) continue;
        std::swap(a[rank], a[piv]);
        for (std::size_t r = 0; r < a.size(); ++r) {
            if (static_cast<int>(r) == rank || a[r][c] == 0) continue;
            long long f1 = a[rank][c], f2 = a[r][c];
            long long gg = std::gcd(f1, f2);
            for (std::size_t k = 0; k < cols; ++k)
                a[r][k] = a[r][k] * (f1 / gg) - a[rank][k] * (f2 / gg);
        }
        ++rank;
    }
    return rank;
}

int ParsedGraph::vertex_index(const std::string& name) const {
    auto it = std::find(vertex_names.begin(), vertex_names.end(), name);
    return it == vertex_names.end() ? -1 : static_cast<int>(it - vertex_names.begin());
}

int ParsedGraph::edge_index(const std::string& name) const {
    auto it = std::find(edge_names.begin(), edge_names.end(), name);
    return it == edge_names.end() ? -1 : static_cast<int>(it - edge_names.begin());
}

ParsedGraph parse_graph(std::istream& in) {
    ParsedGraph pg;
    std::vector<Edge> edges;
    std::vector<Tail> tails;
    struct PendingRigid {
        std::string vertex, slot, branch;
        int line;
    };
    std::vector<PendingRigid> rigids;
    int declared_tails = -1;
    bool header = false;
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw GraphError("line " + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw) || kw[0] == '#') continue;
        if (kw == "graph") {
            if (!(ls >> pg.declared_genus >> declared_tails)) fail("bad graph header");
            header = true;
        } else if (kw == "vertex") {
            std::string id;
            if (!(ls >> id)) fail("vertex needs an id");
            if (pg.vertex_index(id) >= 0) fail("duplicate vertex " + id);
            pg.vertex_names.push_back(id);
        } else if (kw == "edge") {
            std::string id, v, w;
            if (!(ls >> id >> v >> w)) fail("edge needs id and two vertices");
            if (pg.edge_index(id) >= 0) fail("duplicate edge " + id);
            int vi = pg.vertex_index(v), wi = pg.vertex_index(w);
            if (vi < 0) fail("unknown vertex " + v);
            if (wi < 0) fail("unknown vertex " + w);
            pg.edge_names.push_back(id);
            edges.push_back({vi, wi});
        } else if (kw == "tail") {
            std::string id, v;
            int nu;
            if (!(ls >> id >> v >> nu)) fail("tail needs id, vertex and numbering");
            int vi = pg.vertex_index(v);
            if (vi < 0) fail("unknown vertex " + v);
            pg.tail_names.push_back(id);
            tails.push_back({vi, nu});
        } else if (kw == "orient") {
            std::string id, dir;
            if (!(ls >> id >> dir)) fail("orient needs edge and direction");
            int ei = pg.edge_index(id);
            if (ei < 0) fail("unknown edge " + id);
            Edge& e = edges[ei];
            if (e.is_loop()) {
                if (dir == "first") {
                    // default half labeling
                } else if (dir == "second") {
                    // swapping the halves of a loop is a no-op on endpoints
                } else {
                    fail("loop orientation must be first or second");
                }
            } else {
                int vi = pg.vertex_index(dir);
                if (vi < 0) fail("unknown vertex " + dir);
                if (vi == e.to) std::swap(e.from, e.to);
                else if (vi != e.from) fail("edge " + id + " is not incident to " + dir);
            }
        } else if (kw == "rigid") {
            PendingRigid pr;
            if (!(ls >> pr.vertex >> pr.slot >> pr.branch)) fail("rigid needs vertex, slot, branch");
            pr.line = lineno;
            rigids.push_back(pr);
        } else {
            fail("unknown keyword " + kw);
        }
    }
    lineno = 0;
    if (!header) throw GraphError("missing 'graph <genus> <ntails>' header");
    pg.graph = StableGraph(static_cast<int>(pg.vertex_names.size()), edges, tails);
    pg.graph.validate();
    if (pg.graph.genus() != pg.declared_genus)
        throw GraphError("declared genus " + std::to_string(pg.declared_genus) +
                         " but computed " + std::to_string(pg.graph.genus()));
    if (declared_tails != static_cast<int>(tails.size()))
        throw GraphError("declared " + std::to_string(declared_tails) + " tails but found " +
                         std::to_string(tails.size()));
    for (const auto& pr : rigids) {
        lineno = pr.line;
        auto fail2 = [&](const std::string& msg) {
            throw GraphError("line " + std::to_string(pr.line) + ": " + msg);
        };
        RigidConstraint rc;
        rc.vertex = pg.vertex_index(pr.vertex);
        if (rc.vertex < 0) fail2("unknown vertex " + pr.vertex);
        if (pr.slot == "0") rc.slot = 0;
        else if (pr.slot == "1") rc.slot = 1;
        else if (pr.slot == "inf") rc.slot = 2;
        else fail2("slot must be 0, 1 or inf");
        if (pr.branch.size() > 1 && (pr.branch[0] == '+' || pr.branch[0] == '-')) {
            int ei = pg.edge_index(pr.branch.substr(1));
            if (ei < 0) fail2("unknown edge " + pr.branch.substr(1));
            rc.branch = Half::edge_half(ei, pr.branch[0] == '+');
        } else {
            auto it = std::find(pg.tail_names.begin(), pg.tail_names.end(), pr.branch);
            if (it == pg.tail_names.end()) fail2("unknown branch " + pr.branch);
            rc.branch = Half::tail_half(static_cast<int>(it - pg.tail_names.begin()));
        }
        pg.rigid_constraints.push_back(rc);
    }
    return pg;
}

ParsedGraph parse_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw GraphError("cannot open graph file " + path);
    return parse_graph(in);
}

std::string graph_to_text(const ParsedGraph& pg) {
    std::ostringstream os;
    const StableGraph& g = pg.graph;
    os << "graph " << g.genus() << " " << g.tails().size() << "\n";
    auto vname = [&](int v) {
        return v < static_cast<int>(pg.vertex_names.size()) ? pg.vertex_names[v]
                                                            : "v" + std::to_string(v);
    };
    for (int v = 0; v < g.num_vertices(); ++v) os << "vertex " << vname(v) << "\n";
    for (int e = 0; e < static_cast<int>(g.edges().size()); ++e) {
        std::string en = e < static_cast<int>(pg.edge_names.size()) ? pg.edge_names[e]
                                                                    : "e" + std::to_string(e);
        os << "edge " << en << " " << vname(g.edges()[e].from) << " " << vname(g.edges()[e].to)
           << "\n";
    }
    for (int t = 0; t < static_cast<int>(g.tails().size()); ++t) {
        std::string tn = t < static_cast<int>(pg.tail_names.size()) ? pg.tail_names[t]
                                                                    : "t" + std::to_string(t);
        os << "tail " << tn << " " << vname(g.tails()[t].vertex) << " "
           << g.tails()[t].numbering << "\n";
    }
    return os.str();
}

}  // namespace gluecb
