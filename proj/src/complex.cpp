#include "katflow/complex.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace katflow {

namespace {

// Connectivity of the graph with a set of vertices deleted.
bool connected_without(const std::vector<std::vector<int>>& adj, int n,
                       const std::vector<int>& removed) {
    std::vector<char> skip(n, 0), seen(n, 0);
    for (int r : removed) skip[r] = 1;
    int start = -1;
    int alive = 0;
    for (int v = 0; v < n; ++v) {
        if (!skip[v]) {
            ++alive;
            if (start < 0) start = v;
        }
    }
    if (alive == 0) return true;
    std::vector<int> stack{start};
    seen[start] = 1;
    int count = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int u : adj[v]) {
            if (!skip[u] && !seen[u]) {
                seen[u] = 1;
                ++count;
                stack.push_back(u);
            }
        }
    }
    return count == alive;
}

// Articulation points of the graph with vertex `removed` deleted.
bool has_cut_vertex_without(const std::vector<std::vector<int>>& adj, int n, int removed) {
    // Iterative Tarjan lowlink.
    std::vector<int> disc(n, -1), low(n, 0), parent(n, -1), child_count(n, 0);
    int timer = 0;
    for (int root = 0; root < n; ++root) {
        if (root == removed || disc[root] >= 0) continue;
        std::vector<std::pair<int, size_t>> stack{{root, 0}};
        disc[root] = low[root] = timer++;
        while (!stack.empty()) {
            auto& [v, idx] = stack.back();
            if (idx < adj[v].size()) {
                int u = adj[v][idx++];
                if (u == removed) continue;
                if (disc[u] < 0) {
                    parent[u] = v;
                    ++child_count[v];
                    disc[u] = low[u] = timer++;
                    stack.emplace_back(u, 0);
                } else if (u != parent[v]) {
                    low[v] = std::min(low[v], disc[u]);
                }
            } else {
                stack.pop_back();
                if (parent[v] >= 0) {
                    int p = parent[v];
                    low[p] = std::min(low[p], low[v]);
                    if (parent[p] >= 0 && low[v] >= disc[p]) return true;
                }
            }
        }
        if (child_count[root] > 1) return true;
    }
    return false;
}

} // namespace

int TriangulatedPolyhedron::edge_index(int i, int j) const {
    if (i > j) std::swap(i, j);
    const std::array<int, 2> key{i, j};
    auto it = std::lower_bound(edges.begin(), edges.end(), key);
    if (it == edges.end() || *it != key) return -1;
    return static_cast<int>(it - edges.begin());
}

bool TriangulatedPolyhedron::has_face(int i, int j, int k) const {
    std::array<int, 3> key{i, j, k};
    std::sort(key.begin(), key.end());
    for (const auto& f : faces) {
        std::array<int, 3> s = f;
        std::sort(s.begin(), s.end());
        if (s == key) return true;
    }
    return false;
}

TriangulatedPolyhedron build_complex(const std::vector<std::array<int, 3>>& face_list) {
    if (face_list.empty()) fail(ErrorKind::NotTriangulation, "empty face list");

    int n = 0;
    for (const auto& f : face_list) {
        for (int v : f) {
            if (v < 0) fail(ErrorKind::NotTriangulation, "negative vertex index");
            n = std::max(n, v + 1);
        }
        if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2])
            fail(ErrorKind::NotTriangulation, "face with a repeated vertex");
    }

    // Each directed edge must appear in exactly one face, and its reverse in
    // exactly one other face.
    std::map<std::pair<int, int>, int> directed; // directed edge -> face id
    for (int fi = 0; fi < static_cast<int>(face_list.size()); ++fi) {
        const auto& f = face_list[fi];
        for (int s = 0; s < 3; ++s) {
            auto key = std::make_pair(f[s], f[(s + 1) % 3]);
            if (!directed.emplace(key, fi).second)
                fail(ErrorKind::BadOrientation,
                     "directed edge " + std::to_string(key.first) + "->" +
                         std::to_string(key.second) + " appears in two faces");
        }
    }

    TriangulatedPolyhedron p;
    p.n = n;
    p.faces = face_list;

    std::set<std::array<int, 2>> edge_set;
    for (const auto& [de, fi] : directed) {
        auto rev = directed.find({de.second, de.first});
        if (rev == directed.end())
            fail(ErrorKind::NotTriangulation,
                 "edge " + std::to_string(de.first) + "-" + std::to_string(de.second) +
                     " borders only one face");
        edge_set.insert({std::min(de.first, de.second), std::max(de.first, de.second)});
    }
    p.edges.assign(edge_set.begin(), edge_set.end());

    const int m = p.edge_count();
    const int f = p.face_count();
    if (n - m + f != 2 || m != 3 * n - 6)
        fail(ErrorKind::NotTriangulation, "Euler count failed: n=" + std::to_string(n) +
                                              " m=" + std::to_string(m) +
                                              " f=" + std::to_string(f));

    // Cyclic neighbor order: around vertex i, face (i,j,k) links j -> k.
    std::vector<std::map<int, int>> link_next(n);
    for (const auto& face : face_list) {
        for (int s = 0; s < 3; ++s) {
            int i = face[s], j = face[(s + 1) % 3], k = face[(s + 2) % 3];
            if (!link_next[i].emplace(j, k).second)
                fail(ErrorKind::NotTriangulation, "pinched vertex " + std::to_string(i));
        }
    }
    p.neighbors.resize(n);
    for (int i = 0; i < n; ++i) {
        if (link_next[i].empty())
            fail(ErrorKind::NotTriangulation, "isolated vertex " + std::to_string(i));
        int start = link_next[i].begin()->first;
        int cur = start;
        do {
            p.neighbors[i].push_back(cur);
            auto it = link_next[i].find(cur);
            if (it == link_next[i].end())
                fail(ErrorKind::NotTriangulation, "open link at vertex " + std::to_string(i));
            cur = it->second;
            if (p.neighbors[i].size() > link_next[i].size())
                fail(ErrorKind::NotTriangulation,
                     "link of vertex " + std::to_string(i) + " is not a single cycle");
        } while (cur != start);
        if (p.neighbors[i].size() != link_next[i].size())
            fail(ErrorKind::NotTriangulation,
                 "link of vertex " + std::to_string(i) + " is not a single cycle");
    }

    // Adjacency of faces across each edge.
    p.edge_faces.assign(m, {-1, -1});
    for (int fi = 0; fi < f; ++fi) {
        const auto& face = face_list[fi];
        for (int s = 0; s < 3; ++s) {
            int e = p.edge_index(face[s], face[(s + 1) % 3]);
            if (p.edge_faces[e][0] < 0) p.edge_faces[e][0] = fi;
            else p.edge_faces[e][1] = fi;
        }
    }

    std::vector<std::vector<int>> adj(n);
    for (const auto& e : p.edges) {
        adj[e[0]].push_back(e[1]);
        adj[e[1]].push_back(e[0]);
    }
    if (!connected_without(adj, n, {}))
        fail(ErrorKind::NotThreeConnected, "graph is disconnected");
    for (int v = 0; v < n && n > 4; ++v) {
        if (!connected_without(adj, n, {v}) || has_cut_vertex_without(adj, n, v))
            fail(ErrorKind::NotThreeConnected,
                 "graph has a separating pair through vertex " + std::to_string(v));
    }

    // All simple 4-cycles, found via their diagonal pairs.
    std::set<std::array<int, 4>> cycles;
    std::vector<std::set<int>> nb(n);
    for (int v = 0; v < n; ++v) nb[v] = {adj[v].begin(), adj[v].end()};
    for (int i = 0; i < n; ++i) {
        for (int k = i + 1; k < n; ++k) {
            std::vector<int> common;
            for (int j : adj[i])
                if (nb[k].count(j)) common.push_back(j);
            for (size_t x = 0; x < common.size(); ++x) {
                for (size_t y = x + 1; y < common.size(); ++y) {
                    std::array<int, 4> cyc{i, common[x], k, common[y]};
                    // Canonical: smallest vertex first, smaller neighbor second.
                    int mi = 0;
                    for (int s = 1; s < 4; ++s)
                        if (cyc[s] < cyc[mi]) mi = s;
                    std::array<int, 4> rot;
                    for (int s = 0; s < 4; ++s) rot[s] = cyc[(mi + s) % 4];
                    if (rot[3] < rot[1]) std::swap(rot[1], rot[3]);
                    cycles.insert(rot);
                }
            }
        }
    }
    p.four_cycles.assign(cycles.begin(), cycles.end());

    p.is_tetrahedron = (n == 4);
    return p;
}

EdgeWeights EdgeWeights::uniform(const TriangulatedPolyhedron& p, double value) {
    EdgeWeights w;
    w.w.assign(p.edge_count(), value);
    return w;
}

bool EdgeWeights::shallow() const {
    for (double v : w)
        if (!(v >= 0.0 && v <= 1.0)) return false;
    return true;
}

std::vector<std::array<int, 3>> all_three_cycles(const TriangulatedPolyhedron& p) {
    std::vector<std::array<int, 3>> out;
    std::vector<std::set<int>> nb(p.n);
    for (const auto& e : p.edges) {
        nb[e[0]].insert(e[1]);
        nb[e[1]].insert(e[0]);
    }
    for (const auto& e : p.edges) {
        int i = e[0], j = e[1];
        for (int k : nb[i])
            if (k > j && nb[j].count(k)) out.push_back({i, j, k});
    }
    return out;
}

bool four_cycle_bounds_face_pair(const TriangulatedPolyhedron& p, const std::array<int, 4>& c) {
    // Diagonal (c0,c2): faces (c0,c1,c2) and (c0,c2,c3); diagonal (c1,c3)
    // likewise.
    if (p.has_face(c[0], c[1], c[2]) && p.has_face(c[0], c[2], c[3])) return true;
    if (p.has_face(c[1], c[2], c[3]) && p.has_face(c[1], c[3], c[0])) return true;
    return false;
}

KatReport kat_conditions_check(const TriangulatedPolyhedron& p, const EdgeWeights& w) {
    if (!w.shallow()) fail(ErrorKind::InvalidArgument, "weights must lie in [0,1]");
    if (w.size() != p.edge_count())
        fail(ErrorKind::InvalidArgument, "weight vector does not match edge count");

    KatReport report;
    auto angle = [&](int i, int j) { return std::acos(std::clamp(w[p.edge_index(i, j)], -1.0, 1.0)); };

    for (const auto& t : all_three_cycles(p)) {
        const double sum = angle(t[0], t[1]) + angle(t[1], t[2]) + angle(t[2], t[0]);
        if (sum >= std::numbers::pi - kTolAngle && !p.has_face(t[0], t[1], t[2]))
            report.bad_three_cycles.push_back({{t[0], t[1], t[2]}, sum});
    }
    for (const auto& c : p.four_cycles) {
        const double sum = angle(c[0], c[1]) + angle(c[1], c[2]) + angle(c[2], c[3]) + angle(c[3], c[0]);
        if (std::abs(sum - 2.0 * std::numbers::pi) <= kTolAngle && !four_cycle_bounds_face_pair(p, c))
            report.bad_four_cycles.push_back({{c[0], c[1], c[2], c[3]}, sum});
    }
    return report;
}

bool strictly_shallow_check(const TriangulatedPolyhedron& p, const EdgeWeights& w) {
    for (const auto& c : p.four_cycles) {
        bool all_zero = true;
        for (int s = 0; s < 4 && all_zero; ++s)
            all_zero = (w[p.edge_index(c[s], c[(s + 1) % 4])] == 0.0);
        if (all_zero) return false;
    }
    return true;
}

std::string KatReport::describe() const {
    std::ostringstream os;
    for (const auto& v : bad_three_cycles) {
        os << "3-cycle (" << v.vertices[0] << "," << v.vertices[1] << "," << v.vertices[2]
           << ") has overlap angle sum " << v.angle_sum << " >= pi but bounds no face\n";
    }
    for (const auto& v : bad_four_cycles) {
        os << "4-cycle (" << v.vertices[0] << "," << v.vertices[1] << "," << v.vertices[2]
           << "," << v.vertices[3] << ") has overlap angle sum 2*pi but bounds no face pair\n";
    }
    return os.str();
}

} // namespace katflow
