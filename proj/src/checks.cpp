#include "katflow/checks.hpp"

#include <algorithm>
#include <cmath>

namespace katflow {

namespace {

double triple(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c) {
    return a.cross(b).dot(c);
}

// Proper interior crossing of the minor arcs ab and cd (all unit vectors,
// arcs shorter than pi). Near-zero orientation determinants are treated as
// non-crossing; exact touching is the vertex-on-arc case, resolved by
// incidence first.
bool arcs_cross(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                const Eigen::Vector3d& c, const Eigen::Vector3d& d, double tol) {
    const double acb = -triple(a, b, c);
    const double bda = triple(a, b, d);
    if (std::abs(acb) <= tol || std::abs(bda) <= tol) return false;
    if (acb * bda <= 0.0) return false;
    const double cbd = -triple(c, d, b);
    const double dac = triple(c, d, a);
    if (std::abs(cbd) <= tol || std::abs(dac) <= tol) return false;
    return (acb * cbd > 0.0) && (acb * dac > 0.0);
}

// q lies on the open minor arc between a and b (within tol of its plane).
bool on_minor_arc(const Eigen::Vector3d& q, const Eigen::Vector3d& a,
                  const Eigen::Vector3d& b, double tol) {
    if (std::abs(triple(a, b, q)) > tol) return false;
    const double ab = a.dot(b);
    return q.dot(a) > ab + tol && q.dot(b) > ab + tol;
}

} // namespace

Configuration apply_lorentz(const LorentzMap& m, const Configuration& cfg) {
    Configuration out;
    out.disks.reserve(cfg.disks.size());
    for (const Disk4& d : cfg.disks) out.disks.push_back(apply_lorentz(m, d));
    return out;
}

std::vector<Eigen::Vector3d> disk_centers(const Configuration& cfg) {
    std::vector<Eigen::Vector3d> centers;
    centers.reserve(cfg.disks.size());
    for (const Disk4& d : cfg.disks) {
        auto [c, rho] = spherical_center_radius(d);
        centers.push_back(c.vec());
    }
    return centers;
}

GeodesicCheck is_geodesic(const TriangulatedPolyhedron& p, const Configuration& cfg) {
    if (cfg.size() != p.n) fail(ErrorKind::InvalidArgument, "configuration size mismatch");
    GeodesicCheck out;
    const auto centers = disk_centers(cfg);

    for (int e = 0; e < p.edge_count(); ++e) {
        const auto [i, j] = std::pair{p.edges[e][0], p.edges[e][1]};
        if (centers[i].dot(centers[j]) <= -1.0 + 1e-9)
            fail(ErrorKind::AntipodalEdge, "edge " + std::to_string(i) + "-" +
                                               std::to_string(j) + " joins antipodal centers");
    }

    // No vertex on the interior of a non-incident arc.
    for (int v = 0; v < p.n; ++v) {
        for (int e = 0; e < p.edge_count(); ++e) {
            const int i = p.edges[e][0], j = p.edges[e][1];
            if (v == i || v == j) continue;
            if (on_minor_arc(centers[v], centers[i], centers[j], kTolDet) ||
                centers[v].dot(centers[i]) > 1.0 - kTolDet ||
                centers[v].dot(centers[j]) > 1.0 - kTolDet) {
                out.ok = false;
                out.vertex = v;
                out.edge = e;
                out.detail = "vertex " + std::to_string(v) + " meets arc " +
                             std::to_string(i) + "-" + std::to_string(j);
                return out;
            }
        }
    }

    // No two arcs with disjoint endpoints cross.
    for (int e1 = 0; e1 < p.edge_count(); ++e1) {
        for (int e2 = e1 + 1; e2 < p.edge_count(); ++e2) {
            const int a = p.edges[e1][0], b = p.edges[e1][1];
            const int c = p.edges[e2][0], d = p.edges[e2][1];
            if (a == c || a == d || b == c || b == d) continue;
            if (arcs_cross(centers[a], centers[b], centers[c], centers[d], kTolDet)) {
                out.ok = false;
                out.edge = e1;
                out.edge2 = e2;
                out.detail = "arcs " + std::to_string(a) + "-" + std::to_string(b) + " and " +
                             std::to_string(c) + "-" + std::to_string(d) + " cross";
                return out;
            }
        }
    }

    // Faces must be consistently oriented and non-degenerate.
    double sign0 = 0.0;
    for (int fi = 0; fi < p.face_count(); ++fi) {
        const auto& f = p.faces[fi];
        const double det = triple(centers[f[0]], centers[f[1]], centers[f[2]]);
        if (std::abs(det) <= kTolDet) {
            out.ok = false;
            out.detail = "degenerate face " + std::to_string(fi);
            return out;
        }
        if (sign0 == 0.0) sign0 = det > 0 ? 1.0 : -1.0;
        else if (det * sign0 < 0.0) {
            out.ok = false;
            out.detail = "inconsistently oriented face " + std::to_string(fi);
            return out;
        }
    }
    return out;
}

ConvexCheck is_convex(const TriangulatedPolyhedron& p, const Configuration& cfg) {
    if (cfg.size() != p.n) fail(ErrorKind::InvalidArgument, "configuration size mismatch");
    ConvexCheck out;
    for (int fi = 0; fi < p.face_count(); ++fi) {
        const auto& f = p.faces[fi];
        const OrthoDisk o = orthodisk(cfg[f[0]], cfg[f[1]], cfg[f[2]]);
        const double base = std::sqrt(o.coords.vec().squaredNorm());
        bool pos = false, neg = false;
        for (int v = 0; v < p.n; ++v) {
            if (v == f[0] || v == f[1] || v == f[2]) continue;
            const double det = lorentz_inner(o.coords, cfg[v]);
            const double tol = kTolDet * base * std::sqrt(cfg[v].vec().squaredNorm());
            if (std::abs(det) <= tol) {
                if (out.strict) {
                    out.strict = false;
                    if (out.face < 0) { out.face = fi; out.vertex = v; }
                }
                continue;
            }
            (det > 0 ? pos : neg) = true;
            if (pos && neg) {
                out.ok = false;
                out.strict = false;
                out.face = fi;
                out.vertex = v;
                return out;
            }
        }
    }
    return out;
}

ShallowCheck shallow_bounds_check(const TriangulatedPolyhedron& p, const Configuration& cfg,
                                  ShallowMode mode) {
    if (cfg.size() != p.n) fail(ErrorKind::InvalidArgument, "configuration size mismatch");
    ShallowCheck out;
    std::vector<double> edge_d(p.edge_count());
    for (int e = 0; e < p.edge_count(); ++e) {
        const int i = p.edges[e][0], j = p.edges[e][1];
        const double d = inversive_distance(cfg[i], cfg[j]);
        edge_d[e] = d;
        if (d < -kTolInv || d > 1.0 + kTolInv) {
            out.ok = false;
            out.i = i;
            out.j = j;
            out.value = d;
            out.detail = "edge inversive distance out of [0,1]";
            return out;
        }
    }
    if (mode == ShallowMode::Strict) {
        for (const auto& c : p.four_cycles) {
            bool all_zero = true;
            for (int s = 0; s < 4 && all_zero; ++s)
                all_zero = std::abs(edge_d[p.edge_index(c[s], c[(s + 1) % 4])]) <= kTolInv;
            if (all_zero) {
                out.ok = false;
                out.i = c[0];
                out.j = c[1];
                out.value = 0.0;
                out.detail = "4-cycle of edges all at inversive distance 0";
                return out;
            }
        }
    }
    for (int i = 0; i < p.n; ++i) {
        for (int j = i + 1; j < p.n; ++j) {
            if (p.has_edge(i, j)) continue;
            const double d = inversive_distance(cfg[i], cfg[j]);
            if (d < 1.0 - kTolInv) {
                out.nonedge_ok = false;
                out.i = i;
                out.j = j;
                out.value = d;
                out.detail = "non-edge pair closer than tangency";
                return out;
            }
        }
    }
    return out;
}

double min_radius(const Configuration& cfg) {
    double best = M_PI;
    for (const Disk4& d : cfg.disks) {
        auto [c, rho] = spherical_center_radius(d);
        best = std::min(best, std::min(rho, M_PI - rho));
    }
    return best;
}

MonitorReport run_monitors(const TriangulatedPolyhedron& p, const Configuration& cfg,
                           ShallowMode mode) {
    MonitorReport r;
    r.geodesic = is_geodesic(p, cfg);
    r.convex = is_convex(p, cfg);
    r.shallow = shallow_bounds_check(p, cfg, mode);
    r.min_spherical_radius = min_radius(cfg);
    return r;
}

} // namespace katflow
