#pragma once
#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "katflow/bootstrap.hpp"
#include "katflow/checks.hpp"
#include "katflow/complex.hpp"
#include "katflow/geom.hpp"

namespace katflow::testing {

inline std::vector<std::array<int, 3>> tetrahedron_faces() {
    return {{0, 1, 2}, {0, 2, 3}, {0, 3, 1}, {1, 3, 2}};
}

// Vertices: 0 = +x, 1 = -x, 2 = +y, 3 = -y, 4 = +z, 5 = -z.
inline std::vector<std::array<int, 3>> octahedron_faces() {
    return {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4},
            {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}};
}

inline std::vector<std::array<int, 3>> icosahedron_faces() {
    return {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},  {0, 7, 10}, {0, 10, 11},
            {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
            {3, 9, 4},  {3, 4, 2},  {3, 2, 6},  {3, 6, 8},  {3, 8, 9},
            {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},  {9, 8, 1}};
}

// Two apexes (3, 4) over the triangle (0, 1, 2); the equator 0-1-2 is a
// non-facial 3-cycle.
inline std::vector<std::array<int, 3>> bipyramid_faces() {
    return {{3, 0, 1}, {3, 1, 2}, {3, 2, 0}, {4, 1, 0}, {4, 2, 1}, {4, 0, 2}};
}

// The regular octahedral tangency packing: six caps of radius pi/4 centered
// on the coordinate axes, matching octahedron_faces labels.
inline Configuration regular_octahedron_config() {
    Configuration cfg;
    const double s = std::sqrt(2.0);
    cfg.disks = {
        Disk4{1.0, s, 0.0, 0.0, true},  Disk4{1.0, -s, 0.0, 0.0, true},
        Disk4{1.0, 0.0, s, 0.0, true},  Disk4{1.0, 0.0, -s, 0.0, true},
        Disk4{1.0, 0.0, 0.0, s, true},  Disk4{1.0, 0.0, 0.0, -s, true},
    };
    return cfg;
}

// The regular icosahedral tangency packing: adjacent vertex directions meet
// at angle acos(1/sqrt(5)), so caps of half that radius are tangent.
inline Configuration regular_icosahedron_config() {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    const std::vector<Eigen::Vector3d> verts = {
        {-1, phi, 0}, {1, phi, 0},   {-1, -phi, 0}, {1, -phi, 0},
        {0, -1, phi}, {0, 1, phi},   {0, -1, -phi}, {0, 1, -phi},
        {phi, 0, -1}, {phi, 0, 1},   {-phi, 0, -1}, {-phi, 0, 1}};
    const double rho = 0.5 * std::acos(1.0 / std::sqrt(5.0));
    Configuration cfg;
    for (const auto& v : verts)
        cfg.disks.push_back(disk_from_center_radius(SpherePoint::from_vec(v.normalized()), rho));
    return cfg;
}

// Random triangulation of the sphere: vertex insertions from the
// tetrahedron up to n vertices, then random degree-capped edge flips.
// Insertion always targets a lowest-degree-sum face and flips keep degrees
// in [4, 8], so the triangulation stays quasi-uniform (deeply nested
// insertions make the packing radii collapse exponentially). Always simple
// and 3-connected.
inline std::vector<std::array<int, 3>> random_triangulation_faces(int n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::array<int, 3>> faces = tetrahedron_faces();
    std::vector<int> deg(n, 0);
    for (int v = 0; v < 4; ++v) deg[v] = 3;
    for (int v = 4; v < n; ++v) {
        int best_sum = 1 << 20;
        std::vector<size_t> minima;
        for (size_t i = 0; i < faces.size(); ++i) {
            const int sum = deg[faces[i][0]] + deg[faces[i][1]] + deg[faces[i][2]];
            if (sum < best_sum) { best_sum = sum; minima.clear(); }
            if (sum == best_sum) minima.push_back(i);
        }
        std::uniform_int_distribution<size_t> pick(0, minima.size() - 1);
        const size_t best = minima[pick(rng)];
        const auto f = faces[best];
        faces.erase(faces.begin() + static_cast<long>(best));
        faces.push_back({f[0], f[1], v});
        faces.push_back({f[1], f[2], v});
        faces.push_back({f[2], f[0], v});
        deg[v] = 3;
        for (int u : f) ++deg[u];
    }
    auto has_edge = [&](int a, int b) {
        for (const auto& f : faces)
            for (int s = 0; s < 3; ++s)
                if ((f[s] == a && f[(s + 1) % 3] == b) || (f[s] == b && f[(s + 1) % 3] == a))
                    return true;
        return false;
    };
    const int flips = 2 * n;
    for (int it = 0; it < flips; ++it) {
        std::uniform_int_distribution<size_t> pick(0, faces.size() - 1);
        const auto f1 = faces[pick(rng)];
        const int a = f1[0], b = f1[1];
        // Find the face on the other side of edge (a, b).
        int f2i = -1;
        for (size_t i = 0; i < faces.size(); ++i) {
            const auto& g = faces[i];
            for (int s = 0; s < 3; ++s)
                if (g[s] == b && g[(s + 1) % 3] == a) f2i = static_cast<int>(i);
        }
        if (f2i < 0) continue;
        const auto f2 = faces[f2i];
        int c = -1, d = -1;
        for (int s = 0; s < 3; ++s) {
            if (f1[s] != a && f1[s] != b) c = f1[s];
            if (f2[s] != a && f2[s] != b) d = f2[s];
        }
        if (c == d || has_edge(c, d)) continue;
        if (deg[a] <= 4 || deg[b] <= 4) continue;
        if (deg[c] >= 8 || deg[d] >= 8) continue;
        faces.erase(std::find(faces.begin(), faces.end(), f1));
        faces.erase(std::find(faces.begin(), faces.end(), f2));
        faces.push_back({a, d, c});
        faces.push_back({b, c, d});
        --deg[a];
        --deg[b];
        ++deg[c];
        ++deg[d];
    }
    return faces;
}

inline Disk4 random_disk(std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (;;) {
        Disk4 d{gauss(rng), gauss(rng), gauss(rng), gauss(rng)};
        const double q = d.b * d.b + d.c * d.c + d.d * d.d - d.a * d.a;
        if (q > 0.05) return normalize_desitter(d);
    }
}

inline PlanarDisk random_planar_disk(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> pos(-3.0, 3.0);
    std::uniform_real_distribution<double> rad(0.05, 2.0);
    std::bernoulli_distribution ext(0.2);
    const double r = rad(rng);
    return PlanarDisk::circle(pos(rng), pos(rng), ext(rng) ? -r : r);
}

inline LorentzMap random_lorentz(std::mt19937_64& rng, double boost_scale = 0.5) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
    auto axis = [&] {
        Eigen::Vector3d a{gauss(rng), gauss(rng), gauss(rng)};
        return a.norm() > 1e-6 ? Eigen::Vector3d(a.normalized())
                               : Eigen::Vector3d::UnitX().eval();
    };
    LorentzMap m = LorentzMap::rotation(axis(), ang(rng));
    m = m.compose(LorentzMap::boost(axis(), boost_scale * gauss(rng)));
    m = m.compose(LorentzMap::rotation(axis(), ang(rng)));
    return m;
}

} // namespace katflow::testing
