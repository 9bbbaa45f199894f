#include <doctest.h>

#include <algorithm>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "katflow/complex.hpp"

using namespace katflow;
using namespace katflow::testing;
using std::numbers::pi;

TEST_CASE("octahedron builds with the right counts") {
    const TriangulatedPolyhedron p = build_complex(octahedron_faces());
    CHECK(p.n == 6);
    CHECK(p.edge_count() == 12);
    CHECK(p.face_count() == 8);
    CHECK_FALSE(p.is_tetrahedron);
    for (int v = 0; v < p.n; ++v) CHECK(p.degree(v) == 4);
    CHECK(p.edge_index(0, 2) >= 0);
    CHECK(p.edge_index(0, 1) == -1); // antipodal vertices are not adjacent
    CHECK(p.has_face(0, 2, 4));
    CHECK_FALSE(p.has_face(0, 1, 2));
}

TEST_CASE("tetrahedron is flagged") {
    const TriangulatedPolyhedron p = build_complex(tetrahedron_faces());
    CHECK(p.is_tetrahedron);
    CHECK(p.edge_count() == 6);
}

TEST_CASE("icosahedron builds") {
    const TriangulatedPolyhedron p = build_complex(icosahedron_faces());
    CHECK(p.n == 12);
    CHECK(p.edge_count() == 30);
    CHECK(p.face_count() == 20);
    for (int v = 0; v < p.n; ++v) CHECK(p.degree(v) == 5);
}

TEST_CASE("bad inputs are rejected") {
    // An edge in three faces.
    auto faces = tetrahedron_faces();
    faces.push_back({0, 1, 2});
    CHECK_THROWS_AS(build_complex(faces), Error);

    // Inconsistent orientation: flip one face of the octahedron.
    auto oct = octahedron_faces();
    std::swap(oct[0][0], oct[0][1]);
    CHECK_THROWS_AS(build_complex(oct), Error);

    // Two tetrahedra sharing no vertex: disconnected.
    std::vector<std::array<int, 3>> two = tetrahedron_faces();
    for (auto f : tetrahedron_faces()) two.push_back({f[0] + 4, f[1] + 4, f[2] + 4});
    CHECK_THROWS_AS(build_complex(two), Error);
}

TEST_CASE("build is independent of face order") {
    auto faces = icosahedron_faces();
    const TriangulatedPolyhedron a = build_complex(faces);
    std::reverse(faces.begin(), faces.end());
    const TriangulatedPolyhedron b = build_complex(faces);
    CHECK(a.edges == b.edges);
    CHECK(a.four_cycles == b.four_cycles);
    // Neighbor cycles agree up to rotation.
    for (int v = 0; v < a.n; ++v) {
        auto na = a.neighbors[v];
        auto nb = b.neighbors[v];
        REQUIRE(na.size() == nb.size());
        auto it = std::find(nb.begin(), nb.end(), na[0]);
        REQUIRE(it != nb.end());
        std::rotate(nb.begin(), it, nb.end());
        CHECK(na == nb);
    }
}

TEST_CASE("random triangulations build") {
    for (unsigned seed = 0; seed < 8; ++seed) {
        const int n = 8 + static_cast<int>(seed) * 3;
        const auto faces = random_triangulation_faces(n, seed);
        const TriangulatedPolyhedron p = build_complex(faces);
        CHECK(p.n == n);
        CHECK(p.edge_count() == 3 * n - 6);
    }
}

TEST_CASE("three-cycle enumeration contains every face") {
    for (const auto& faces : {octahedron_faces(), icosahedron_faces(), bipyramid_faces()}) {
        const TriangulatedPolyhedron p = build_complex(faces);
        const auto tris = all_three_cycles(p);
        for (const auto& f : p.faces) {
            std::array<int, 3> key = f;
            std::sort(key.begin(), key.end());
            CHECK(std::find(tris.begin(), tris.end(), key) != tris.end());
        }
    }
}

TEST_CASE("kat conditions") {
    const TriangulatedPolyhedron oct = build_complex(octahedron_faces());

    SUBCASE("all-ones weights pass for any complex") {
        for (const auto& faces :
             {octahedron_faces(), icosahedron_faces(), bipyramid_faces()}) {
            const TriangulatedPolyhedron p = build_complex(faces);
            CHECK(kat_conditions_check(p, EdgeWeights::uniform(p, 1.0)).ok());
        }
    }

    SUBCASE("non-facial 3-cycle with zero weights is reported") {
        // The bipyramid equator 0-1-2 bounds no face; weights (0,0,0) give
        // an angle sum of 3*pi/2 >= pi.
        const TriangulatedPolyhedron bp = build_complex(bipyramid_faces());
        EdgeWeights w = EdgeWeights::uniform(bp, 1.0);
        w[bp.edge_index(0, 1)] = 0.0;
        w[bp.edge_index(1, 2)] = 0.0;
        w[bp.edge_index(2, 0)] = 0.0;
        const KatReport rep = kat_conditions_check(bp, w);
        REQUIRE(rep.bad_three_cycles.size() == 1);
        CHECK(rep.bad_three_cycles[0].angle_sum == doctest::Approx(3 * pi / 2));
        CHECK(rep.bad_four_cycles.empty());
    }

    SUBCASE("facial 3-cycle with the same weights passes") {
        const TriangulatedPolyhedron bp = build_complex(bipyramid_faces());
        EdgeWeights w = EdgeWeights::uniform(bp, 1.0);
        w[bp.edge_index(3, 0)] = 0.0;
        w[bp.edge_index(3, 1)] = 0.0;
        w[bp.edge_index(0, 1)] = 0.0;
        CHECK(kat_conditions_check(bp, w).ok());
    }

    SUBCASE("non-facial all-zero 4-cycle is reported") {
        // An equatorial 4-cycle of the octahedron (0,2,1,3) bounds no face
        // pair; all-zero weights sum to 2*pi.
        EdgeWeights w = EdgeWeights::uniform(oct, 1.0);
        w[oct.edge_index(0, 2)] = 0.0;
        w[oct.edge_index(2, 1)] = 0.0;
        w[oct.edge_index(1, 3)] = 0.0;
        w[oct.edge_index(3, 0)] = 0.0;
        const KatReport rep = kat_conditions_check(oct, w);
        CHECK(rep.bad_three_cycles.empty());
        REQUIRE(rep.bad_four_cycles.size() == 1);
        CHECK(rep.bad_four_cycles[0].angle_sum == doctest::Approx(2 * pi));
    }

    SUBCASE("facial-pair all-zero 4-cycle passes the kat check") {
        // Faces (0,2,4) and (2,1,4) share the diagonal 2-4; the cycle
        // 0-2-1-4 with zero weights bounds their union.
        EdgeWeights w = EdgeWeights::uniform(oct, 1.0);
        w[oct.edge_index(0, 2)] = 0.0;
        w[oct.edge_index(2, 1)] = 0.0;
        w[oct.edge_index(1, 4)] = 0.0;
        w[oct.edge_index(4, 0)] = 0.0;
        CHECK(kat_conditions_check(oct, w).ok());
        CHECK_FALSE(strictly_shallow_check(oct, w));
    }
}

TEST_CASE("strictly shallow check") {
    const TriangulatedPolyhedron oct = build_complex(octahedron_faces());
    EdgeWeights w = EdgeWeights::uniform(oct, 0.5);
    CHECK(strictly_shallow_check(oct, w));
    w[0] = 0.0;
    CHECK(strictly_shallow_check(oct, w)); // a single zero is fine
    // All-zero equatorial cycle.
    EdgeWeights z = EdgeWeights::uniform(oct, 1.0);
    z[oct.edge_index(0, 2)] = 0.0;
    z[oct.edge_index(2, 1)] = 0.0;
    z[oct.edge_index(1, 3)] = 0.0;
    z[oct.edge_index(3, 0)] = 0.0;
    CHECK_FALSE(strictly_shallow_check(oct, z));
}

TEST_CASE("four-cycle enumeration on the octahedron") {
    const TriangulatedPolyhedron p = build_complex(octahedron_faces());
    // Every 4-cycle of K_{2,2,2}: three equatorial squares plus the cycles
    // bounding two adjacent faces.
    CHECK(p.four_cycles.size() > 3);
    int equatorial = 0;
    for (const auto& c : p.four_cycles)
        if (!four_cycle_bounds_face_pair(p, c)) ++equatorial;
    CHECK(equatorial == 3);
}
