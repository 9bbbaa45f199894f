#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "katflow/geom.hpp"

using namespace katflow;
using namespace katflow::testing;
using std::numbers::pi;

TEST_CASE("lorentz inner product basics") {
    CHECK(lorentz_inner({1, 0, 0, 0}, {1, 0, 0, 0}) == 1.0);
    CHECK(lorentz_inner({0, 1, 0, 0}, {0, 1, 0, 0}) == -1.0);
    CHECK(lorentz_inner({1, 1, 0, 0}, {1, 1, 0, 0}) == 0.0);
    // Symmetry and bilinearity on random vectors.
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    for (int it = 0; it < 100; ++it) {
        const Disk4 u{g(rng), g(rng), g(rng), g(rng)};
        const Disk4 v{g(rng), g(rng), g(rng), g(rng)};
        const Disk4 w{g(rng), g(rng), g(rng), g(rng)};
        CHECK(lorentz_inner(u, v) == doctest::Approx(lorentz_inner(v, u)).epsilon(1e-14));
        const Disk4 uv{u.a + 2 * v.a, u.b + 2 * v.b, u.c + 2 * v.c, u.d + 2 * v.d};
        CHECK(lorentz_inner(uv, w) ==
              doctest::Approx(lorentz_inner(u, w) + 2 * lorentz_inner(v, w)).epsilon(1e-12));
    }
}

TEST_CASE("disk classification") {
    CHECK(classify_disk({0, 1, 0, 0}) == DiskClass::Real);
    CHECK(classify_disk({1, 1, 0, 0}) == DiskClass::Point);
    CHECK(classify_disk({1, 0, 0, 0}) == DiskClass::Imaginary);
    CHECK_THROWS_AS(classify_disk({0, 0, 0, 0}), Error);
}

TEST_CASE("de Sitter normalization") {
    const Disk4 a = normalize_desitter({0, 2, 0, 0});
    CHECK(a.a == 0.0);
    CHECK(a.b == doctest::Approx(1.0).epsilon(1e-15));
    const Disk4 b = normalize_desitter({0, 0, 0, 1});
    CHECK(b.d == doctest::Approx(1.0).epsilon(1e-15));
    // lambda = 1/sqrt(4 - 1)
    const Disk4 c = normalize_desitter({1, 2, 0, 0});
    CHECK(c.a == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
    CHECK(c.b == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-15));
    CHECK(lorentz_inner(c, c) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK_THROWS_AS(normalize_desitter({1, 1, 0, 0}), Error); // point disk
    CHECK_THROWS_AS(normalize_desitter({1, 0, 0, 0}), Error); // imaginary disk
}

TEST_CASE("inversive distance") {
    std::mt19937_64 rng(5);
    for (int it = 0; it < 50; ++it) {
        const Disk4 d = random_disk(rng);
        CHECK(inversive_distance(d, d) == doctest::Approx(-1.0).epsilon(1e-12));
    }
    CHECK(inversive_distance({0, 1, 0, 0}, {0, 0, 1, 0}) == doctest::Approx(0.0));
    // Against the hemisphere (0,0,0,1), d = -d_k for any normalized D_k.
    for (int it = 0; it < 50; ++it) {
        const Disk4 dk = random_disk(rng);
        CHECK(inversive_distance({0, 0, 0, 1, true}, dk) ==
              doctest::Approx(-dk.d).epsilon(1e-12));
    }
    SUBCASE("scaling invariance and antipodal sign flip") {
        std::uniform_real_distribution<double> lam(0.1, 10.0);
        for (int it = 0; it < 200; ++it) {
            const Disk4 d1 = random_disk(rng);
            const Disk4 d2 = random_disk(rng);
            const double l = lam(rng);
            const Disk4 scaled{l * d1.a, l * d1.b, l * d1.c, l * d1.d};
            CHECK(inversive_distance(scaled, d2) ==
                  doctest::Approx(inversive_distance(d1, d2)).epsilon(1e-10));
            CHECK(inversive_distance(d1.complement(), d2) ==
                  doctest::Approx(-inversive_distance(d1, d2)).epsilon(1e-12));
        }
    }
}

TEST_CASE("planar inversive distance") {
    const PlanarDisk u = PlanarDisk::circle(0, 0, 1);
    CHECK(inversive_distance_planar(u, PlanarDisk::circle(2, 0, 1)) == doctest::Approx(1.0));
    CHECK(inversive_distance_planar(u, PlanarDisk::circle(std::sqrt(2.0), 0, 1)) ==
          doctest::Approx(0.0).epsilon(1e-15));
    CHECK(inversive_distance_planar(u, u) == doctest::Approx(-1.0));
    // Half-plane {x >= 1} is tangent to the unit disk.
    const PlanarDisk hp = PlanarDisk::halfplane(1, 0, 1);
    CHECK(inversive_distance_planar(u, hp) == doctest::Approx(1.0));
    // Two half-planes meeting at a right angle.
    CHECK(inversive_distance_planar(PlanarDisk::halfplane(1, 0, 0),
                                    PlanarDisk::halfplane(0, 1, 0)) ==
          doctest::Approx(0.0));
}

TEST_CASE("spherical center and radius") {
    auto [c0, r0] = spherical_center_radius({0, 0, 0, 1});
    CHECK(r0 == doctest::Approx(pi / 2));
    CHECK(c0.z == doctest::Approx(1.0));

    // (1,2,0,0): plane t = 2x meets the sphere in a circle of geodesic
    // radius pi/3 about (1,0,0). Oracle: sample boundary points of the
    // plane x = 1/2 on the sphere and measure geodesic distances.
    auto [c1, r1] = spherical_center_radius({1, 2, 0, 0});
    CHECK(r1 == doctest::Approx(pi / 3).epsilon(1e-12));
    CHECK(c1.x == doctest::Approx(1.0));
    for (int s = 0; s < 8; ++s) {
        const double th = 2 * pi * s / 8;
        const Eigen::Vector3d bd{0.5, std::sqrt(0.75) * std::cos(th),
                                 std::sqrt(0.75) * std::sin(th)};
        CHECK(std::acos(bd.dot(c1.vec())) == doctest::Approx(r1).epsilon(1e-12));
    }
    CHECK_THROWS_AS(spherical_center_radius({1, 1, 0, 0}), Error);

    SUBCASE("round trip against disk_from_center_radius") {
        std::mt19937_64 rng(7);
        for (int it = 0; it < 100; ++it) {
            const Disk4 d = random_disk(rng);
            auto [c, rho] = spherical_center_radius(d);
            const Disk4 back = disk_from_center_radius(c, rho);
            CHECK(back.a == doctest::Approx(d.a).epsilon(1e-9));
            CHECK(back.b == doctest::Approx(d.b).epsilon(1e-9));
        }
    }
}

TEST_CASE("conical caps") {
    const ConicalCap f = conical_cap({1, 2, 0, 0});
    CHECK(f.finite);
    CHECK(f.x == doctest::Approx(2.0));

    const ConicalCap inf = conical_cap({0, 1, 0, 0});
    CHECK_FALSE(inf.finite);
    CHECK(inf.x == doctest::Approx(1.0));

    // Reflection convention: cap of (-1,2,0,0) equals the cap of (1,-2,0,0),
    // and lies on the cone tangent to the sphere along the boundary circle:
    // (cap - p) . p = 0 for boundary points p.
    const ConicalCap r = conical_cap({-1, 2, 0, 0});
    CHECK(r.finite);
    CHECK(r.x == doctest::Approx(-2.0));
    CHECK(r.y == doctest::Approx(0.0));
    auto [c, rho] = spherical_center_radius(Disk4{1, -2, 0, 0});
    for (int s = 0; s < 8; ++s) {
        const double th = 2 * pi * s / 8;
        // Boundary circle of (1,-2,0,0): x = -1/2.
        const Eigen::Vector3d p{-0.5, std::sqrt(0.75) * std::cos(th),
                                std::sqrt(0.75) * std::sin(th)};
        const Eigen::Vector3d cap{r.x, r.y, r.z};
        CHECK((cap - p).dot(p) == doctest::Approx(0.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(conical_cap({1, 0, 0, 0}), Error);
}

TEST_CASE("orthodisk") {
    const OrthoDisk o = orthodisk({0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1});
    CHECK(o.coords.a == doctest::Approx(1.0));
    CHECK(o.coords.b == doctest::Approx(0.0));
    CHECK(o.kind == FamilyType::Elliptic);
    // Odd permutation negates.
    const OrthoDisk swapped = orthodisk({0, 0, 1, 0}, {0, 1, 0, 0}, {0, 0, 0, 1});
    CHECK(swapped.coords.a == doctest::Approx(-1.0));
    CHECK_THROWS_AS(orthodisk({0, 1, 0, 0}, {0, 2, 0, 0}, {0, 0, 1, 0}), Error);

    SUBCASE("orthogonality residual on random well-conditioned triples") {
        std::mt19937_64 rng(23);
        for (int it = 0; it < 1000; ++it) {
            const Disk4 a = random_disk(rng), b = random_disk(rng), c = random_disk(rng);
            OrthoDisk ortho;
            try {
                ortho = orthodisk(a, b, c);
            } catch (const Error&) {
                continue;
            }
            const double scale = std::sqrt(ortho.coords.vec().squaredNorm());
            CHECK(std::abs(lorentz_inner(ortho.coords, a)) / scale < 1e-12);
            CHECK(std::abs(lorentz_inner(ortho.coords, b)) / scale < 1e-12);
            CHECK(std::abs(lorentz_inner(ortho.coords, c)) / scale < 1e-12);
        }
    }
}

TEST_CASE("coplanarity determinant") {
    const Disk4 t1{0, 1, 0, 0}, t2{0, 0, 1, 0}, t3{0, 0, 0, 1};
    CHECK(coplanarity_det(t1, t2, t3, t1) == doctest::Approx(0.0));
    CHECK(coplanarity_det(t1, t2, t3, {1, 0, 0, 0}) == doctest::Approx(1.0));
    const Disk4 sum{0, 1, 1, 1};
    CHECK(coplanarity_det(t1, t2, t3, sum) == doctest::Approx(0.0));
    // Equals the 4x4 determinant det(D4; D1; D2; D3) on random data.
    std::mt19937_64 rng(31);
    for (int it = 0; it < 100; ++it) {
        const Disk4 a = random_disk(rng), b = random_disk(rng), c = random_disk(rng),
                    d = random_disk(rng);
        Eigen::Matrix4d m;
        m.row(0) = d.vec();
        m.row(1) = a.vec();
        m.row(2) = b.vec();
        m.row(3) = c.vec();
        double expected = m.determinant();
        double got = 0.0;
        try {
            got = coplanarity_det(a, b, c, d);
        } catch (const Error&) {
            continue;
        }
        CHECK(got == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("coaxial classification") {
    // Two disjoint latitude caps.
    const Disk4 north = disk_from_center_radius({0, 0, 1}, 0.4);
    const Disk4 south = disk_from_center_radius({0, 0, -1}, 0.4);
    CHECK(coaxial_classify(north, south) == FamilyType::Hyperbolic);
    // Tangent pair.
    const Disk4 a = disk_from_center_radius({1, 0, 0}, pi / 4);
    const Disk4 b = disk_from_center_radius({0, 1, 0}, pi / 4);
    CHECK(coaxial_classify(a, b) == FamilyType::Parabolic);
    CHECK(coaxial_classify({0, 1, 0, 0}, {0, 0, 1, 0}) == FamilyType::Elliptic);
    CHECK_THROWS_AS(coaxial_classify({0, 1, 0, 0}, {0, 2, 0, 0}), Error);
    CHECK_THROWS_AS(coaxial_classify({0, 1, 0, 0}, {0, -1, 0, 0}), Error);
}

TEST_CASE("stereographic lift and drop") {
    // Unit circle interior lifts to the southern hemisphere.
    const Disk4 south = stereographic_lift(PlanarDisk::circle(0, 0, 1));
    CHECK(south.a == doctest::Approx(0.0));
    CHECK(south.d == doctest::Approx(-1.0));

    // Round trip.
    const PlanarDisk p = PlanarDisk::circle(0.3, -1.2, 0.7);
    const PlanarDisk back = stereographic_drop(stereographic_lift(p));
    CHECK_FALSE(back.is_line);
    CHECK(back.x == doctest::Approx(0.3).epsilon(1e-13));
    CHECK(back.y == doctest::Approx(-1.2).epsilon(1e-13));
    CHECK(back.r == doctest::Approx(0.7).epsilon(1e-13));

    SUBCASE("inversive distance preserved on random pairs") {
        std::mt19937_64 rng(41);
        for (int it = 0; it < 1000; ++it) {
            const PlanarDisk p1 = random_planar_disk(rng);
            const PlanarDisk p2 = random_planar_disk(rng);
            const double planar = inversive_distance_planar(p1, p2);
            const double lifted =
                inversive_distance(stereographic_lift(p1), stereographic_lift(p2));
            CHECK(std::abs(planar - lifted) < 1e-10);
        }
    }
    SUBCASE("lines lift consistently") {
        std::mt19937_64 rng(43);
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        for (int it = 0; it < 200; ++it) {
            const PlanarDisk line = PlanarDisk::halfplane(u(rng), u(rng), u(rng));
            const PlanarDisk circ = random_planar_disk(rng);
            const double planar = inversive_distance_planar(circ, line);
            const double lifted =
                inversive_distance(stereographic_lift(circ), stereographic_lift(line));
            CHECK(std::abs(planar - lifted) < 1e-10);
            const PlanarDisk dropped = stereographic_drop(stereographic_lift(line));
            CHECK(dropped.is_line);
        }
    }
}

TEST_CASE("lorentz maps") {
    const LorentzMap id = LorentzMap::identity();
    const Disk4 d{0.2, 1.1, -0.4, 0.3};
    const Disk4 same = apply_lorentz(id, d);
    CHECK(same.b == d.b);

    const LorentzMap rot = LorentzMap::rotation(Eigen::Vector3d::UnitZ(), pi / 2);
    const Disk4 ex = apply_lorentz(rot, {0, 1, 0, 0});
    CHECK(ex.b == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(ex.c == doctest::Approx(1.0));

    SUBCASE("boosts preserve inversive distance") {
        std::mt19937_64 rng(53);
        for (int it = 0; it < 300; ++it) {
            const Disk4 a = random_disk(rng), b = random_disk(rng);
            const LorentzMap m = random_lorentz(rng);
            REQUIRE(m.valid());
            const double before = inversive_distance(a, b);
            const double after = inversive_distance(apply_lorentz(m, a), apply_lorentz(m, b));
            CHECK(std::abs(before - after) < 1e-10);
            CHECK(classify_disk(apply_lorentz(m, a)) == DiskClass::Real);
        }
    }
    SUBCASE("non-lorentz matrix rejected") {
        LorentzMap bad;
        bad.m(1, 1) = 2.0;
        CHECK_THROWS_AS(apply_lorentz(bad, d), Error);
    }
}

TEST_CASE("solve disk given b,c") {
    // Double root: the unique disk orthogonal to (0,0,0,1) with b=1, c=0.
    const auto sols = solve_disk_given_bc({0, 0, 0, 1, true}, 0.0, 1.0, 0.0);
    REQUIRE(sols.size() == 1);
    CHECK(sols[0].a == doctest::Approx(0.0));
    CHECK(sols[0].b == doctest::Approx(1.0));
    CHECK(sols[0].d == doctest::Approx(0.0));

    // Negative discriminant: no solutions. For D = normalized (1,2,0,0) and
    // b' = c' = 2, the quadratic in d' reduces to d'^2 = (u^2 - 7 a^2)/a^2
    // with u = delta + 4/sqrt(3); delta = -4/sqrt(3) makes it negative.
    const auto none =
        solve_disk_given_bc(normalize_desitter({1, 2, 0, 0}), -4.0 / std::sqrt(3.0), 2.0, 2.0);
    CHECK(none.empty());

    SUBCASE("all returned disks verify both constraints") {
        std::mt19937_64 rng(61);
        std::uniform_real_distribution<double> del(-2.0, 2.0);
        std::uniform_real_distribution<double> bc(-2.0, 2.0);
        int found = 0;
        for (int it = 0; it < 500; ++it) {
            const Disk4 d = random_disk(rng);
            const double delta = del(rng);
            const double bp = bc(rng), cp = bc(rng);
            const auto out = solve_disk_given_bc(d, delta, bp, cp);
            CHECK(out.size() <= 2);
            for (const Disk4& sol : out) {
                ++found;
                const double scale = std::max(1.0, sol.vec().squaredNorm());
                CHECK(std::abs(lorentz_inner(sol, sol) + 1.0) < 1e-12 * scale);
                CHECK(std::abs(inversive_distance(d, sol) - delta) < 1e-10 * scale);
                CHECK(sol.b == doctest::Approx(bp));
                CHECK(sol.c == doctest::Approx(cp));
            }
        }
        CHECK(found > 100);
    }
}

TEST_CASE("parabolic triple law: overlaps of a triple through a point sum to pi") {
    // Three half-planes through a common point with pairwise shallow
    // overlaps, lifted to the sphere.
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> jitter(-0.25, 0.25);
    for (int it = 0; it < 300; ++it) {
        const double px = u(rng), py = u(rng);
        // Inward normals near 0, 2pi/3, 4pi/3 keep all pairwise gaps >= pi/2.
        const double base = u(rng) * pi;
        double theta[3];
        for (int s = 0; s < 3; ++s) theta[s] = base + 2 * pi * s / 3 + jitter(rng);
        Disk4 disks[3];
        for (int s = 0; s < 3; ++s) {
            const double nx = std::cos(theta[s]), ny = std::sin(theta[s]);
            disks[s] = stereographic_lift(PlanarDisk::halfplane(nx, ny, nx * px + ny * py));
        }
        double sum = 0.0;
        bool shallow = true;
        for (int a = 0; a < 3; ++a)
            for (int b = a + 1; b < 3; ++b) {
                const double d = inversive_distance(disks[a], disks[b]);
                if (d < -1e-9 || d > 1.0 + 1e-9) shallow = false;
                sum += std::acos(std::clamp(d, -1.0, 1.0));
            }
        if (!shallow) continue;
        CHECK(sum == doctest::Approx(pi).epsilon(1e-8));
    }
}

TEST_CASE("no five shallow disks through a common point") {
    // Five disks whose boundaries share a point always have a pair whose
    // inversive distance leaves [0,1], with margin: among five normals on a
    // circle some gap is at most 2pi/5 < pi/2.
    std::mt19937_64 rng(73);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double min_violation = 1e9;
    for (int it = 0; it < 300; ++it) {
        const double px = u(rng), py = u(rng);
        Disk4 disks[5];
        for (int s = 0; s < 5; ++s) {
            const double th = u(rng) * pi;
            const double nx = std::cos(th), ny = std::sin(th);
            disks[s] = stereographic_lift(PlanarDisk::halfplane(nx, ny, nx * px + ny * py));
        }
        double worst = 0.0;
        for (int a = 0; a < 5; ++a)
            for (int b = a + 1; b < 5; ++b) {
                const double d = inversive_distance(disks[a], disks[b]);
                worst = std::max(worst, std::max(-d, d - 1.0));
            }
        min_violation = std::min(min_violation, worst);
    }
    CHECK(min_violation > 0.0);
}
