#pragma once
#include <array>
#include <vector>

#include "katflow/checks.hpp"
#include "katflow/complex.hpp"
#include "katflow/geom.hpp"

namespace katflow {

inline constexpr double kTolTangency = 1e-10;

/// Planar tangency packing of a complex: one disk per vertex, tangent along
/// every edge. The three disks of boundary_face carry the prescribed unit
/// radii; all other circles are interior to the packing's development.
struct PlanarPacking {
    std::vector<PlanarDisk> disks;
    std::array<int, 3> boundary_face{};
};

/// Computes a planar tangency packing realizing the complex, by the
/// classical angle-sum radius iteration on the triangulation with one face
/// removed, followed by a breadth-first layout. Deterministic.
PlanarPacking tangency_pack(const TriangulatedPolyhedron& p);

/// Lifts a planar packing to the sphere and applies a boost search that
/// makes every disk strictly proper (area < 2*pi) while balancing radii.
Configuration lift_and_normalize(const PlanarPacking& pp);

/// tangency_pack followed by lift_and_normalize.
Configuration bootstrap_configuration(const TriangulatedPolyhedron& p);

/// Largest tangency residual max_e |d(e) - 1| of a planar packing.
double planar_tangency_residual(const TriangulatedPolyhedron& p, const PlanarPacking& pp);

} // namespace katflow
