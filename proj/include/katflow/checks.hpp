#pragma once
#include <optional>
#include <string>
#include <vector>

#include "katflow/complex.hpp"
#include "katflow/geom.hpp"

namespace katflow {

/// One de Sitter-normalized disk per vertex of an associated complex.
struct Configuration {
    std::vector<Disk4> disks;

    int size() const { return static_cast<int>(disks.size()); }
    const Disk4& operator[](int i) const { return disks[i]; }
    Disk4& operator[](int i) { return disks[i]; }
};

Configuration apply_lorentz(const LorentzMap& m, const Configuration& cfg);

enum class ShallowMode { Shallow, Strict };

struct GeodesicCheck {
    bool ok = true;
    // Witness: either a vertex lying on a non-incident arc, or two crossing
    // arcs. Lexicographically first violation.
    int vertex = -1;
    int edge = -1;
    int edge2 = -1;
    std::string detail;
};

struct ConvexCheck {
    bool ok = true;     // no face separates the configuration
    bool strict = true; // additionally no off-face vertex is coplanar
    int face = -1;      // first offending face
    int vertex = -1;    // first offending vertex
};

struct ShallowCheck {
    bool ok = true;
    bool nonedge_ok = true;
    int i = -1, j = -1; // first offending pair
    double value = 0.0;
    std::string detail;
};

struct MonitorReport {
    GeodesicCheck geodesic;
    ConvexCheck convex;
    ShallowCheck shallow;
    double min_spherical_radius = 0.0;

    bool pass(bool require_strict_convex = true) const {
        return geodesic.ok && convex.ok && (!require_strict_convex || convex.strict) &&
               shallow.ok && shallow.nonedge_ok;
    }
};

/// Whether the centers joined by minor arcs form a geodesic triangulation
/// of the sphere. Throws AntipodalEdge when some edge joins antipodal
/// centers.
GeodesicCheck is_geodesic(const TriangulatedPolyhedron& p, const Configuration& cfg);

ConvexCheck is_convex(const TriangulatedPolyhedron& p, const Configuration& cfg);

/// Edge inversive distances in [0,1] (strict: additionally no 4-cycle of
/// edges simultaneously at 0 within tol) and every non-edge pair at
/// distance >= 1.
ShallowCheck shallow_bounds_check(const TriangulatedPolyhedron& p, const Configuration& cfg,
                                  ShallowMode mode);

/// Minimum over disks of the distance to either point-degeneration,
/// min(rho, pi - rho).
double min_radius(const Configuration& cfg);

MonitorReport run_monitors(const TriangulatedPolyhedron& p, const Configuration& cfg,
                           ShallowMode mode = ShallowMode::Strict);

/// Spherical centers of all disks.
std::vector<Eigen::Vector3d> disk_centers(const Configuration& cfg);

} // namespace katflow
