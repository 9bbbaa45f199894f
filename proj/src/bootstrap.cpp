#include "katflow/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>

namespace katflow {

namespace {

constexpr int kMaxSweeps = 100000;
constexpr double kAngleTol = 1e-13;

// Angle at the disk of radius rv in a tangent triple (rv, ra, rb).
double tangency_angle(double rv, double ra, double rb) {
    const double g2 = (ra * rb) / ((rv + ra) * (rv + rb));
    return 2.0 * std::asin(std::sqrt(std::min(1.0, g2)));
}

double angle_sum(double rv, const std::vector<std::pair<double, double>>& flowers) {
    double s = 0.0;
    for (const auto& [ra, rb] : flowers) s += tangency_angle(rv, ra, rb);
    return s;
}

// Radius at which the flower around a vertex closes up to 2*pi. The angle
// sum is strictly decreasing in rv, from deg*pi down to 0.
double solve_flower(double rv, const std::vector<std::pair<double, double>>& flowers) {
    double lo = 1e-12, hi = rv;
    while (angle_sum(hi, flowers) > 2.0 * std::numbers::pi) hi *= 2.0;
    while (angle_sum(lo, flowers) < 2.0 * std::numbers::pi) lo *= 0.5;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double s = angle_sum(mid, flowers);
        if (std::abs(s - 2.0 * std::numbers::pi) < 1e-15) return mid;
        (s > 2.0 * std::numbers::pi ? lo : hi) = mid;
        if (hi - lo < 1e-16 * hi) break;
    }
    return 0.5 * (lo + hi);
}

int pick_boundary_face(const TriangulatedPolyhedron& p) {
    // First face containing the highest-degree vertex.
    int best_v = 0;
    for (int v = 1; v < p.n; ++v)
        if (p.degree(v) > p.degree(best_v)) best_v = v;
    for (int fi = 0; fi < p.face_count(); ++fi) {
        const auto& f = p.faces[fi];
        if (f[0] == best_v || f[1] == best_v || f[2] == best_v) return fi;
    }
    return 0;
}

double min_spherical_radius(const Configuration& cfg) {
    double worst = M_PI;
    for (const Disk4& d : cfg.disks) {
        auto [c, rho] = spherical_center_radius(d);
        worst = std::min(worst, rho);
    }
    return worst;
}

Configuration transformed(const Configuration& cfg, const Eigen::Matrix4d& m) {
    Configuration out;
    out.disks.reserve(cfg.disks.size());
    for (const Disk4& d : cfg.disks)
        out.disks.push_back(normalize_desitter(Disk4::from_vec(m * d.vec())));
    return out;
}

} // namespace

PlanarPacking tangency_pack(const TriangulatedPolyhedron& p) {
    const int removed_face = pick_boundary_face(p);
    const std::array<int, 3> bface = p.faces[removed_face];
    std::vector<char> boundary(p.n, 0);
    for (int v : bface) boundary[v] = 1;

    // Flowers of the punctured complex: every face except the removed one.
    std::vector<std::vector<std::pair<int, int>>> flowers(p.n);
    for (int fi = 0; fi < p.face_count(); ++fi) {
        if (fi == removed_face) continue;
        const auto& f = p.faces[fi];
        for (int s = 0; s < 3; ++s)
            flowers[f[s]].push_back({f[(s + 1) % 3], f[(s + 2) % 3]});
    }

    // Radius iteration: boundary radii pinned at 1, interior angle sums
    // 2*pi. The sweep error is the residual before each per-vertex solve.
    std::vector<double> radius(p.n, 1.0);
    double err = 1.0;
    int sweep = 0;
    while (err > kAngleTol && sweep++ < kMaxSweeps) {
        err = 0.0;
        for (int v = 0; v < p.n; ++v) {
            if (boundary[v]) continue;
            std::vector<std::pair<double, double>> fl;
            fl.reserve(flowers[v].size());
            for (const auto& [a, b] : flowers[v]) fl.push_back({radius[a], radius[b]});
            err = std::max(err,
                           std::abs(angle_sum(radius[v], fl) - 2.0 * std::numbers::pi));
            radius[v] = solve_flower(radius[v], fl);
        }
    }
    if (err > kTolTangency)
        fail(ErrorKind::NonConvergent,
             "radius iteration stalled at angle error " + std::to_string(err));

    // Breadth-first layout over faces. The first face's edge is placed on
    // the x-axis; every further vertex is the third tangent circle, oriented
    // counterclockwise.
    std::vector<Eigen::Vector2d> center(p.n, Eigen::Vector2d::Zero());
    std::vector<char> placed(p.n, 0);
    std::vector<char> face_done(p.face_count(), 0);

    int f0 = removed_face == 0 ? 1 : 0;
    const auto& first = p.faces[f0];
    center[first[0]] = {0.0, 0.0};
    center[first[1]] = {radius[first[0]] + radius[first[1]], 0.0};
    placed[first[0]] = placed[first[1]] = 1;

    std::deque<int> queue{f0};
    while (!queue.empty()) {
        const int fi = queue.front();
        queue.pop_front();
        if (face_done[fi] || fi == removed_face) continue;
        const auto& f = p.faces[fi];
        int missing = -1, have = 0;
        for (int s = 0; s < 3; ++s)
            placed[f[s]] ? ++have : missing = s;
        if (have < 2) {
            queue.push_back(fi);
            continue;
        }
        if (missing >= 0) {
            const int w = f[missing], u = f[(missing + 1) % 3], v = f[(missing + 2) % 3];
            const Eigen::Vector2d cu = center[u], cv = center[v];
            const double duv = (cv - cu).norm();
            const double ru = radius[u] + radius[w], rv = radius[v] + radius[w];
            const double along = (duv * duv + ru * ru - rv * rv) / (2.0 * duv);
            const double off2 = ru * ru - along * along;
            const double off = std::sqrt(std::max(0.0, off2));
            const Eigen::Vector2d e = (cv - cu) / duv;
            const Eigen::Vector2d eperp{-e.y(), e.x()};
            // Face (w,u,v) keeps the complex's orientation, so w sits on the
            // positive side of u -> v.
            center[w] = cu + along * e + off * eperp;
            placed[w] = 1;
        }
        face_done[fi] = 1;
        for (int s = 0; s < 3; ++s) {
            const int e = p.edge_index(f[s], f[(s + 1) % 3]);
            for (int nf : p.edge_faces[e])
                if (nf != fi && !face_done[nf] && nf != removed_face) queue.push_back(nf);
        }
    }
    for (int v = 0; v < p.n; ++v)
        if (!placed[v]) fail(ErrorKind::NotTriangulation, "layout did not reach every vertex");

    PlanarPacking pp;
    pp.boundary_face = bface;
    pp.disks.reserve(p.n);
    for (int v = 0; v < p.n; ++v)
        pp.disks.push_back(PlanarDisk::circle(center[v].x(), center[v].y(), radius[v]));
    return pp;
}

double planar_tangency_residual(const TriangulatedPolyhedron& p, const PlanarPacking& pp) {
    double worst = 0.0;
    for (const auto& e : p.edges)
        worst = std::max(worst,
                         std::abs(inversive_distance_planar(pp.disks[e[0]], pp.disks[e[1]]) - 1.0));
    return worst;
}

Configuration lift_and_normalize(const PlanarPacking& pp) {
    // Center the packing and scale it to moderate extent; over-shrinking
    // blows up the lifted coordinates of the smallest circles.
    double extent = 0.0;
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (const PlanarDisk& d : pp.disks) {
        if (d.is_line) fail(ErrorKind::InvalidArgument, "packing disks must be circles");
        mean += Eigen::Vector2d{d.x, d.y};
    }
    mean /= static_cast<double>(pp.disks.size());
    for (const PlanarDisk& d : pp.disks)
        extent = std::max(extent, (Eigen::Vector2d{d.x, d.y} - mean).norm() + std::abs(d.r));
    const double scale = 1.5 / extent;

    Configuration cfg;
    cfg.disks.reserve(pp.disks.size());
    for (const PlanarDisk& d : pp.disks)
        cfg.disks.push_back(stereographic_lift(
            PlanarDisk::circle((d.x - mean.x()) * scale, (d.y - mean.y()) * scale, d.r * scale)));

    // Coordinate-descent over boosts along x, y, z maximizing the smallest
    // spherical radius. Minimizing the largest radius is degenerate (a
    // strong boost shrinks every disk toward a point); the maximin
    // objective is bounded and balances the packing. The transform is
    // accumulated as one matrix and always applied to the freshly lifted
    // disks, so renormalization error does not compound across rounds.
    const std::array<Eigen::Vector3d, 3> axes = {Eigen::Vector3d::UnitX(),
                                                 Eigen::Vector3d::UnitY(),
                                                 Eigen::Vector3d::UnitZ()};
    Eigen::Matrix4d total = Eigen::Matrix4d::Identity();
    double current = min_spherical_radius(cfg);
    for (int round = 0; round < 60; ++round) {
        const double before = current;
        for (const auto& axis : axes) {
            auto value = [&](double s) {
                // A probe that degenerates a disk numerically can never be
                // the maximizer.
                try {
                    return min_spherical_radius(
                        transformed(cfg, LorentzMap::boost(axis, s).m * total));
                } catch (const Error&) {
                    return 0.0;
                }
            };
            // Coarse grid, then golden-section refinement.
            double best_s = 0.0, best_v = current;
            for (int g = -20; g <= 20; ++g) {
                const double s = 0.1 * g;
                const double v = value(s);
                if (v > best_v) { best_v = v; best_s = s; }
            }
            double lo = best_s - 0.1, hi = best_s + 0.1;
            const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
            double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
            double f1 = value(x1), f2 = value(x2);
            for (int it = 0; it < 60; ++it) {
                if (f1 > f2) { hi = x2; x2 = x1; f2 = f1; x1 = hi - gr * (hi - lo); f1 = value(x1); }
                else { lo = x1; x1 = x2; f1 = f2; x2 = lo + gr * (hi - lo); f2 = value(x2); }
            }
            const double s_opt = f1 > f2 ? x1 : x2;
            const double v_opt = std::max(f1, f2);
            if (v_opt > current) {
                total = LorentzMap::boost(axis, s_opt).m * total;
                current = v_opt;
            }
        }
        if (current - before < 1e-12) break;
    }

    cfg = transformed(cfg, total);
    for (const Disk4& d : cfg.disks)
        if (!(d.a > 0.0))
            fail(ErrorKind::NormalizationFailed,
                 "boost search left a disk with area >= 2*pi");
    return cfg;
}

Configuration bootstrap_configuration(const TriangulatedPolyhedron& p) {
    return lift_and_normalize(tangency_pack(p));
}

} // namespace katflow
