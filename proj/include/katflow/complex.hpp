#pragma once
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "katflow/errors.hpp"

namespace katflow {

/// Abstract triangulated polyhedron: an oriented triangulation of the
/// sphere on vertices 0..n-1, simple and 3-connected. Immutable after
/// build_complex.
struct TriangulatedPolyhedron {
    int n = 0;
    std::vector<std::array<int, 3>> faces;      // oriented vertex triples
    std::vector<std::array<int, 2>> edges;      // canonical {i,j}, i < j, lex sorted
    std::vector<std::vector<int>> neighbors;    // cyclic order around each vertex
    std::vector<std::array<int, 2>> edge_faces; // the two faces bordering each edge
    std::vector<std::array<int, 4>> four_cycles; // all simple 4-cycles, canonical order
    bool is_tetrahedron = false;

    int vertex_count() const { return n; }
    int edge_count() const { return static_cast<int>(edges.size()); }
    int face_count() const { return static_cast<int>(faces.size()); }

    /// Index into edges, or -1 when ij is not an edge.
    int edge_index(int i, int j) const;
    bool has_edge(int i, int j) const { return edge_index(i, j) >= 0; }
    bool has_face(int i, int j, int k) const;
    int degree(int i) const { return static_cast<int>(neighbors[i].size()); }
};

TriangulatedPolyhedron build_complex(const std::vector<std::array<int, 3>>& faces);

/// Per-edge target inversive distances, aligned with
/// TriangulatedPolyhedron::edges.
struct EdgeWeights {
    std::vector<double> w;

    double operator[](int e) const { return w[e]; }
    double& operator[](int e) { return w[e]; }
    int size() const { return static_cast<int>(w.size()); }

    static EdgeWeights uniform(const TriangulatedPolyhedron& p, double value);

    bool shallow() const;
};

struct CycleViolation {
    std::vector<int> vertices; // cycle order
    double angle_sum = 0.0;    // sum of arccos w over the cycle edges
};

/// Outcome of checking the two KAT hypotheses: 3-cycles whose overlap
/// angles sum to >= pi must bound a face, and 4-cycles summing to 2*pi must
/// bound two adjacent faces.
struct KatReport {
    std::vector<CycleViolation> bad_three_cycles;
    std::vector<CycleViolation> bad_four_cycles;
    bool ok() const { return bad_three_cycles.empty() && bad_four_cycles.empty(); }
    std::string describe() const;
};

KatReport kat_conditions_check(const TriangulatedPolyhedron& p, const EdgeWeights& w);

/// True iff no 4-cycle of edges carries weight exactly 0 on all four edges.
bool strictly_shallow_check(const TriangulatedPolyhedron& p, const EdgeWeights& w);

/// All simple 3-cycles, each as an ascending vertex triple.
std::vector<std::array<int, 3>> all_three_cycles(const TriangulatedPolyhedron& p);

/// Whether the 4-cycle (v0 v1 v2 v3) bounds the union of two adjacent
/// faces of p (one of its diagonals carries two faces covering the cycle).
bool four_cycle_bounds_face_pair(const TriangulatedPolyhedron& p, const std::array<int, 4>& cyc);

inline constexpr double kTolAngle = 1e-9;

} // namespace katflow
