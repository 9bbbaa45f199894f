#include "katflow/rigidity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/LU>
#include <Eigen/SVD>

namespace katflow {

Eigen::VectorXd measurement_map(const TriangulatedPolyhedron& p, const Configuration& cfg) {
    const int m = p.edge_count();
    Eigen::VectorXd f(m + p.n);
    for (int e = 0; e < m; ++e)
        f[e] = lorentz_inner(cfg[p.edges[e][0]], cfg[p.edges[e][1]]);
    for (int i = 0; i < p.n; ++i)
        f[m + i] = 0.5 * lorentz_inner(cfg[i], cfg[i]);
    return f;
}

std::array<double, 8> edge_row_entries(const Disk4& di, const Disk4& dj) {
    return {dj.a, -dj.b, -dj.c, -dj.d, di.a, -di.b, -di.c, -di.d};
}

RigidityMatrix assemble_rigidity(const TriangulatedPolyhedron& p, const Configuration& cfg) {
    if (cfg.size() != p.n) fail(ErrorKind::InvalidArgument, "configuration size mismatch");
    RigidityMatrix j;
    j.n = p.n;
    const int m = p.edge_count();
    j.m.setZero(m + p.n, 4 * p.n);
    for (int e = 0; e < m; ++e) {
        const int a = p.edges[e][0], b = p.edges[e][1];
        const auto row = edge_row_entries(cfg[a], cfg[b]);
        for (int c = 0; c < 4; ++c) {
            j.m(e, 4 * a + c) = row[c];
            j.m(e, 4 * b + c) = row[4 + c];
        }
    }
    for (int i = 0; i < p.n; ++i) {
        const Disk4& d = cfg[i];
        j.m(m + i, 4 * i + 0) = d.a;
        j.m(m + i, 4 * i + 1) = -d.b;
        j.m(m + i, 4 * i + 2) = -d.c;
        j.m(m + i, 4 * i + 3) = -d.d;
    }
    return j;
}

int numeric_rank(const Eigen::MatrixXd& m, double tol_rank) {
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv[0] == 0.0) return 0;
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv[i] > tol_rank * sv[0]) ++rank;
    return rank;
}

Eigen::Matrix4d moebius_flow_fixing(const Disk4& d1, const Disk4& d2) {
    const auto& gens = lorentz_generators();
    Eigen::MatrixXd a(8, 6);
    for (int g = 0; g < 6; ++g) {
        a.block<4, 1>(0, g) = gens[g] * d1.vec();
        a.block<4, 1>(4, g) = gens[g] * d2.vec();
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const Eigen::VectorXd x = svd.matrixV().col(5);
    if (svd.singularValues()[5] > 1e-8 * svd.singularValues()[0])
        fail(ErrorKind::DegenerateTriple, "no Moebius flow fixes the given pair");
    Eigen::Matrix4d k = Eigen::Matrix4d::Zero();
    for (int g = 0; g < 6; ++g) k += x[g] * gens[g];
    return k;
}

namespace {

Eigen::MatrixXd drop_columns(const Eigen::MatrixXd& m, const std::vector<int>& removed,
                             std::vector<int>* col_map) {
    std::vector<char> gone(m.cols(), 0);
    for (int c : removed) gone[c] = 1;
    Eigen::MatrixXd out(m.rows(), m.cols() - static_cast<int>(removed.size()));
    int k = 0;
    for (int c = 0; c < m.cols(); ++c) {
        if (gone[c]) continue;
        out.col(k) = m.col(c);
        if (col_map) col_map->push_back(c);
        ++k;
    }
    return out;
}

bool invertible(const Eigen::MatrixXd& m) {
    return numeric_rank(m) == m.rows();
}

} // namespace

SquareMatrix square_matrix(const RigidityMatrix& j, const std::array<int, 3>& face,
                           const Configuration& cfg, int forced_coord) {
    const int i = face[0], jj = face[1], k = face[2];

    // Candidate spatial columns of D_k, in decreasing magnitude of the
    // residual Moebius flow derivative. The flow fixing D_i and D_j must
    // vary at least one spatial coordinate of D_k.
    std::array<int, 3> order{1, 2, 3};
    Eigen::Vector4d vel = Eigen::Vector4d::Zero();
    try {
        const Eigen::Matrix4d flow = moebius_flow_fixing(cfg[i], cfg[jj]);
        vel = flow * cfg[k].vec();
    } catch (const Error&) {
        // fall through with zero velocity; all columns will be probed
    }
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return std::abs(vel[a]) > std::abs(vel[b]); });

    std::vector<int> candidates;
    if (forced_coord != 0) candidates = {forced_coord};
    else candidates = {order[0], order[1], order[2]};

    static const std::array<std::array<int, 2>, 3> j_pairs = {{{1, 2}, {1, 3}, {2, 3}}};
    for (int coord : candidates) {
        for (const auto& jp : j_pairs) {
            SquareMatrix out;
            out.face = face;
            out.removed_spatial_coord = coord;
            out.removed_j_coords = jp;
            std::vector<int> removed = {4 * i + 1,     4 * i + 2,     4 * i + 3,
                                        4 * jj + jp[0], 4 * jj + jp[1], 4 * k + coord};
            std::sort(removed.begin(), removed.end());
            out.m = drop_columns(j.m, removed, &out.col_map);
            if (invertible(out.m)) return out;
        }
    }
    fail(ErrorKind::SingularAtPin,
         "square rigidity matrix is singular for every spatial column choice at the pin");
}

UnmarkedMatrix unmarked_matrix(const RigidityMatrix& j, const std::array<int, 3>& face,
                               const TriangulatedPolyhedron& p) {
    if (p.n <= 4) fail(ErrorKind::TooSmall, "unmarked matrix needs n >= 5");
    const int m = p.edge_count();
    std::vector<char> pinned(p.n, 0);
    for (int v : face) pinned[v] = 1;

    UnmarkedMatrix out;
    out.face = face;
    out.free_vertex_count = p.n - 3;

    std::vector<int> keep_rows;
    for (int e = 0; e < m; ++e) {
        if (pinned[p.edges[e][0]] && pinned[p.edges[e][1]]) continue;
        keep_rows.push_back(e);
        out.edge_of_row.push_back(e);
    }
    for (int v = 0; v < p.n; ++v) {
        if (pinned[v]) continue;
        keep_rows.push_back(j.vertex_row(v));
        out.edge_of_row.push_back(-1);
    }
    out.row_map = keep_rows;

    std::vector<int> removed_cols;
    for (int v : face)
        for (int c = 0; c < 4; ++c) removed_cols.push_back(4 * v + c);
    std::sort(removed_cols.begin(), removed_cols.end());

    const Eigen::MatrixXd cols = drop_columns(j.m, removed_cols, &out.col_map);
    out.m.resize(static_cast<int>(keep_rows.size()), cols.cols());
    for (int r = 0; r < static_cast<int>(keep_rows.size()); ++r)
        out.m.row(r) = cols.row(keep_rows[r]);
    return out;
}

int UnmarkedMatrix::row_of_edge(int e) const {
    for (int r = 0; r < static_cast<int>(edge_of_row.size()); ++r)
        if (edge_of_row[r] == e) return r;
    return -1;
}

double lu_cond_estimate(const Eigen::FullPivLU<Eigen::MatrixXd>& lu) {
    const Eigen::VectorXd pivots = lu.matrixLU().diagonal().cwiseAbs();
    const double pmax = pivots.maxCoeff();
    const double pmin = pivots.minCoeff();
    if (!(pmin > 0.0)) return std::numeric_limits<double>::infinity();
    return pmax / pmin;
}

Eigen::VectorXd flow_velocity(const UnmarkedMatrix& ju, int free_edge, double cond_max) {
    const int row = ju.row_of_edge(free_edge);
    if (row < 0)
        fail(ErrorKind::InvalidArgument,
             "free edge lies on the pinned face and has no unmarked row");
    Eigen::FullPivLU<Eigen::MatrixXd> lu(ju.m);
    const double cond = lu_cond_estimate(lu);
    if (!(cond < cond_max))
        fail(ErrorKind::IllConditioned,
             "unmarked matrix condition estimate exceeds " + std::to_string(cond_max));
    Eigen::VectorXd ve = Eigen::VectorXd::Zero(ju.m.rows());
    ve[row] = -1.0;
    return lu.solve(ve);
}

std::string dump_matrix(const RigidityMatrix& j, const TriangulatedPolyhedron& p) {
    std::ostringstream os;
    os << "# rigidity matrix, " << j.m.rows() << " x " << j.m.cols() << "\n";
    os << "# columns: vertex coordinate (a,b,c,d) blocks in vertex order\n";
    for (int e = 0; e < p.edge_count(); ++e) {
        os << "edge " << p.edges[e][0] << "-" << p.edges[e][1] << ":";
        for (int c = 0; c < j.m.cols(); ++c)
            if (j.m(e, c) != 0.0) os << " [" << c << "]=" << j.m(e, c);
        os << "\n";
    }
    for (int v = 0; v < p.n; ++v) {
        os << "vertex " << v << ":";
        const int r = j.vertex_row(v);
        for (int c = 0; c < j.m.cols(); ++c)
            if (j.m(r, c) != 0.0) os << " [" << c << "]=" << j.m(r, c);
        os << "\n";
    }
    return os.str();
}

} // namespace katflow
