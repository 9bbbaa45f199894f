#pragma once
#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "katflow/checks.hpp"
#include "katflow/complex.hpp"

namespace katflow {

inline constexpr double kTolRank = 1e-8;
inline constexpr double kCondMax = 1e10;

/// Jacobian of the measurement map f: edge rows carry the Lorentz inner
/// product of the endpoint disks, vertex rows half the Minkowski norm.
/// Rows: edges in canonical order, then vertices; columns: the 4n disk
/// coordinates.
struct RigidityMatrix {
    Eigen::MatrixXd m; // (4n-6) x 4n
    int n = 0;

    int edge_row(int e) const { return e; }
    int vertex_row(int i) const { return 3 * n - 6 + i; }
    int col(int vertex, int coord) const { return 4 * vertex + coord; }
};

/// f(cfg): per-edge <D_i,D_j> followed by per-vertex (1/2)<D_i,D_i>.
Eigen::VectorXd measurement_map(const TriangulatedPolyhedron& p, const Configuration& cfg);

RigidityMatrix assemble_rigidity(const TriangulatedPolyhedron& p, const Configuration& cfg);

/// Edge row of the rigidity matrix for a single pair, as the 8 entries
/// under the columns of D_i then D_j.
std::array<double, 8> edge_row_entries(const Disk4& di, const Disk4& dj);

int numeric_rank(const Eigen::MatrixXd& m, double tol_rank = kTolRank);

/// Generator of the one-parameter Moebius flow fixing two disks
/// (the unique direction of so(1,3) annihilating both rays).
Eigen::Matrix4d moebius_flow_fixing(const Disk4& d1, const Disk4& d2);

struct SquareMatrix {
    Eigen::MatrixXd m; // (4n-6) x (4n-6)
    std::array<int, 3> face{};
    int removed_spatial_coord = 0;        // 1, 2 or 3: the dropped coordinate of D_k
    std::array<int, 2> removed_j_coords{}; // the two dropped spatial coordinates of D_j
    std::vector<int> col_map;              // global column index per local column
};

/// Square reduction for a pinned face (i,j,k): drops all spatial columns of
/// D_i, two spatial columns of D_j, and one spatial column of D_k. The D_k
/// column is the coordinate with the largest residual Moebius-flow
/// derivative (or forced via forced_coord in {1,2,3}); the D_j pair starts
/// from (b,c) and falls back across the other pairs, since at symmetric
/// configurations a rotation fixing D_i can move D_j along a single spatial
/// coordinate.
SquareMatrix square_matrix(const RigidityMatrix& j, const std::array<int, 3>& face,
                           const Configuration& cfg, int forced_coord = 0);

struct UnmarkedMatrix {
    Eigen::MatrixXd m; // (4n-12) x (4n-12)
    std::array<int, 3> face{};
    std::vector<int> col_map;      // global column index per local column
    std::vector<int> row_map;      // global row index per local row
    std::vector<int> edge_of_row;  // edge index per local row, -1 for vertex rows
    int free_vertex_count = 0;

    int row_of_edge(int e) const;
};

/// Unmarked reduction: removes the three face-edge rows, the three pinned
/// vertex rows, and all 12 columns of the pinned disks. Nonsingular at
/// strictly convex geodesic strictly shallow configurations.
UnmarkedMatrix unmarked_matrix(const RigidityMatrix& j, const std::array<int, 3>& face,
                               const TriangulatedPolyhedron& p);

/// Velocity of the 4(n-3) unpinned coordinates solving J_u x = v_e, where
/// v_e is -1 at the free edge row: the free edge's inversive distance
/// decreases at unit rate while all other constraints are stationary.
Eigen::VectorXd flow_velocity(const UnmarkedMatrix& ju, int free_edge,
                              double cond_max = kCondMax);

/// Pivot-ratio condition estimate of a full-pivot LU factorization.
/// Infinity when a pivot vanishes.
double lu_cond_estimate(const Eigen::FullPivLU<Eigen::MatrixXd>& lu);

/// Writes row/column labels and entries of J in a plain text format.
std::string dump_matrix(const RigidityMatrix& j, const TriangulatedPolyhedron& p);

} // namespace katflow
