#include "katflow/geom.hpp"

#include <algorithm>
#include <cmath>

namespace katflow {

namespace {

double sq(double x) { return x * x; }

double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

// Spatial norm^2 minus temporal^2: positive for real (spacelike) disks.
double space_excess(const Disk4& d) { return sq(d.b) + sq(d.c) + sq(d.d) - sq(d.a); }

double coord_scale(const Disk4& d) { return sq(d.a) + sq(d.b) + sq(d.c) + sq(d.d); }

double det3(double a11, double a12, double a13,
            double a21, double a22, double a23,
            double a31, double a32, double a33) {
    return a11 * (a22 * a33 - a23 * a32)
         - a12 * (a21 * a33 - a23 * a31)
         + a13 * (a21 * a32 - a22 * a31);
}

Eigen::Matrix4d minkowski_metric() {
    Eigen::Matrix4d g = Eigen::Matrix4d::Identity();
    g(1, 1) = g(2, 2) = g(3, 3) = -1.0;
    return g;
}

} // namespace

const char* error_kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::ZeroVector: return "ZeroVector";
        case ErrorKind::NotRealDisk: return "NotRealDisk";
        case ErrorKind::DegenerateTriple: return "DegenerateTriple";
        case ErrorKind::SameBoundary: return "SameBoundary";
        case ErrorKind::NotLorentz: return "NotLorentz";
        case ErrorKind::NotTriangulation: return "NotTriangulation";
        case ErrorKind::BadOrientation: return "BadOrientation";
        case ErrorKind::NotThreeConnected: return "NotThreeConnected";
        case ErrorKind::Tetrahedron: return "Tetrahedron";
        case ErrorKind::KatViolation: return "KatViolation";
        case ErrorKind::NotStrictlyShallow: return "NotStrictlyShallow";
        case ErrorKind::AntipodalEdge: return "AntipodalEdge";
        case ErrorKind::SingularAtPin: return "SingularAtPin";
        case ErrorKind::TooSmall: return "TooSmall";
        case ErrorKind::IllConditioned: return "IllConditioned";
        case ErrorKind::MonitorViolation: return "MonitorViolation";
        case ErrorKind::MaxSteps: return "MaxSteps";
        case ErrorKind::NoValidPin: return "NoValidPin";
        case ErrorKind::NonConvergent: return "NonConvergent";
        case ErrorKind::NormalizationFailed: return "NormalizationFailed";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

const char* family_type_name(FamilyType t) {
    switch (t) {
        case FamilyType::Hyperbolic: return "hyperbolic";
        case FamilyType::Parabolic: return "parabolic";
        case FamilyType::Elliptic: return "elliptic";
    }
    return "unknown";
}

double lorentz_inner(const Disk4& u, const Disk4& v) {
    return u.a * v.a - u.b * v.b - u.c * v.c - u.d * v.d;
}

DiskClass classify_disk(const Disk4& d) {
    const double scale = coord_scale(d);
    if (scale == 0.0) fail(ErrorKind::ZeroVector, "classify_disk on the zero vector");
    const double q = space_excess(d);
    if (std::abs(q) <= kTolLight * scale) return DiskClass::Point;
    return q > 0.0 ? DiskClass::Real : DiskClass::Imaginary;
}

Disk4 normalize_desitter(const Disk4& d) {
    const double scale = coord_scale(d);
    if (scale == 0.0) fail(ErrorKind::ZeroVector, "normalize_desitter on the zero vector");
    const double q = space_excess(d);
    if (q <= kTolLight * scale)
        fail(ErrorKind::NotRealDisk, "normalize_desitter needs a real disk");
    const double lambda = 1.0 / std::sqrt(q);
    return {lambda * d.a, lambda * d.b, lambda * d.c, lambda * d.d, true};
}

double inversive_distance(const Disk4& d1, const Disk4& d2) {
    const Disk4 u = d1.normalized ? d1 : normalize_desitter(d1);
    const Disk4 v = d2.normalized ? d2 : normalize_desitter(d2);
    return lorentz_inner(u, v);
}

PlanarDisk PlanarDisk::circle(double x, double y, double r) {
    if (r == 0.0) fail(ErrorKind::InvalidArgument, "planar circle with zero radius");
    PlanarDisk p;
    p.is_line = false;
    p.x = x;
    p.y = y;
    p.r = r;
    return p;
}

PlanarDisk PlanarDisk::halfplane(double nx, double ny, double h) {
    const double n = std::hypot(nx, ny);
    if (n == 0.0) fail(ErrorKind::InvalidArgument, "half-plane with zero normal");
    PlanarDisk p;
    p.is_line = true;
    p.nx = nx / n;
    p.ny = ny / n;
    p.h = h / n;
    return p;
}

double inversive_distance_planar(const PlanarDisk& d1, const PlanarDisk& d2) {
    if (!d1.is_line && !d2.is_line) {
        const double dd = sq(d2.x - d1.x) + sq(d2.y - d1.y);
        return (dd - sq(d1.r) - sq(d2.r)) / (2.0 * d1.r * d2.r);
    }
    if (d1.is_line && d2.is_line) {
        // Cosine of the overlap angle between the half-planes; +-1 for
        // parallel boundary lines.
        return -(d1.nx * d2.nx + d1.ny * d2.ny);
    }
    const PlanarDisk& circ = d1.is_line ? d2 : d1;
    const PlanarDisk& line = d1.is_line ? d1 : d2;
    // Signed center-to-line distance, positive when the center is outside
    // the half-plane. Matches the stereographic lift exactly.
    const double dist = line.h - (line.nx * circ.x + line.ny * circ.y);
    return dist / circ.r;
}

std::pair<SpherePoint, double> spherical_center_radius(const Disk4& d) {
    const Disk4 n = d.normalized ? d : normalize_desitter(d);
    const double vn = std::sqrt(sq(n.b) + sq(n.c) + sq(n.d));
    SpherePoint center{n.b / vn, n.c / vn, n.d / vn};
    const double rho = std::acos(clamp_unit(n.a / vn));
    return {center, rho};
}

ConicalCap conical_cap(const Disk4& d) {
    if (classify_disk(d) != DiskClass::Real)
        fail(ErrorKind::NotRealDisk, "conical_cap needs a real disk");
    ConicalCap cap;
    const double scale = std::sqrt(coord_scale(d));
    if (std::abs(d.a) <= kTolLight * scale) {
        cap.finite = false;
        const double n = std::sqrt(sq(d.b) + sq(d.c) + sq(d.d));
        cap.x = d.b / n;
        cap.y = d.c / n;
        cap.z = d.d / n;
        return cap;
    }
    // For a < 0 this is the cap of the complementary disk, per D* = (-D)*.
    cap.finite = true;
    cap.x = d.b / d.a;
    cap.y = d.c / d.a;
    cap.z = d.d / d.a;
    return cap;
}

OrthoDisk orthodisk(const Disk4& d1, const Disk4& d2, const Disk4& d3) {
    const Disk4* t[3] = {&d1, &d2, &d3};
    // Lorentz normal of the hyperplane spanned by the triple, via the four
    // 3x3 minors of the coordinate matrix.
    const double ma = det3(t[0]->b, t[0]->c, t[0]->d,
                           t[1]->b, t[1]->c, t[1]->d,
                           t[2]->b, t[2]->c, t[2]->d);
    const double mb = det3(t[0]->a, t[0]->c, t[0]->d,
                           t[1]->a, t[1]->c, t[1]->d,
                           t[2]->a, t[2]->c, t[2]->d);
    const double mc = det3(t[0]->a, t[0]->b, t[0]->d,
                           t[1]->a, t[1]->b, t[1]->d,
                           t[2]->a, t[2]->b, t[2]->d);
    const double md = det3(t[0]->a, t[0]->b, t[0]->c,
                           t[1]->a, t[1]->b, t[1]->c,
                           t[2]->a, t[2]->b, t[2]->c);
    const Disk4 c_perp{ma, mb, -mc, md};
    const double row_scale = std::sqrt(coord_scale(d1)) * std::sqrt(coord_scale(d2)) *
                             std::sqrt(coord_scale(d3));
    if (std::sqrt(coord_scale(c_perp)) <= kTolDet * row_scale)
        fail(ErrorKind::DegenerateTriple, "orthodisk of a linearly dependent triple");
    OrthoDisk out;
    out.coords = c_perp;
    const double q = space_excess(c_perp);
    if (std::abs(q) <= kTolLight * coord_scale(c_perp)) out.kind = FamilyType::Parabolic;
    else out.kind = q > 0.0 ? FamilyType::Hyperbolic : FamilyType::Elliptic;
    return out;
}

double coplanarity_det(const Disk4& f1, const Disk4& f2, const Disk4& f3, const Disk4& d4) {
    const OrthoDisk o = orthodisk(f1, f2, f3); // throws DegenerateTriple
    return lorentz_inner(o.coords, d4);
}

FamilyType coaxial_classify(const Disk4& d1, const Disk4& d2) {
    const Disk4 u = d1.normalized ? d1 : normalize_desitter(d1);
    const Disk4 v = d2.normalized ? d2 : normalize_desitter(d2);
    const double same = std::max({std::abs(u.a - v.a), std::abs(u.b - v.b),
                                  std::abs(u.c - v.c), std::abs(u.d - v.d)});
    const double opp = std::max({std::abs(u.a + v.a), std::abs(u.b + v.b),
                                 std::abs(u.c + v.c), std::abs(u.d + v.d)});
    if (std::min(same, opp) <= 1e-9)
        fail(ErrorKind::SameBoundary, "coaxial family needs distinct boundary circles");
    const double ad = std::abs(lorentz_inner(u, v));
    if (std::abs(ad - 1.0) <= kTolInv) return FamilyType::Parabolic;
    return ad > 1.0 ? FamilyType::Hyperbolic : FamilyType::Elliptic;
}

Disk4 stereographic_lift(const PlanarDisk& p) {
    if (p.is_line) {
        // Unit inward normal makes the lift de Sitter-normalized outright.
        return {p.h, p.nx, p.ny, p.h, true};
    }
    const double s = sq(p.x) + sq(p.y);
    const double inv = 1.0 / (2.0 * p.r);
    return {(1.0 + s - sq(p.r)) * inv, 2.0 * p.x * inv, 2.0 * p.y * inv,
            (s - sq(p.r) - 1.0) * inv, true};
}

PlanarDisk stereographic_drop(const Disk4& d) {
    const Disk4 n = d.normalized ? d : normalize_desitter(d);
    const double denom = n.a - n.d;
    if (std::abs(denom) <= kTolLight) {
        // Boundary passes through the north pole: half-plane form.
        return PlanarDisk::halfplane(n.b, n.c, n.a);
    }
    return PlanarDisk::circle(n.b / denom, n.c / denom, 1.0 / denom);
}

LorentzMap LorentzMap::identity() { return LorentzMap{}; }

LorentzMap LorentzMap::rotation(const Eigen::Vector3d& axis, double angle) {
    LorentzMap out;
    Eigen::AngleAxisd rot(angle, axis.normalized());
    out.m.block<3, 3>(1, 1) = rot.toRotationMatrix();
    return out;
}

LorentzMap LorentzMap::boost(const Eigen::Vector3d& axis, double s) {
    const Eigen::Vector3d u = axis.normalized();
    LorentzMap out;
    Eigen::Matrix4d& m = out.m;
    const double ch = std::cosh(s), sh = std::sinh(s);
    m.setIdentity();
    m(0, 0) = ch;
    for (int i = 0; i < 3; ++i) {
        m(0, 1 + i) = sh * u[i];
        m(1 + i, 0) = sh * u[i];
        for (int j = 0; j < 3; ++j)
            m(1 + i, 1 + j) = (i == j ? 1.0 : 0.0) + (ch - 1.0) * u[i] * u[j];
    }
    return out;
}

LorentzMap LorentzMap::compose(const LorentzMap& other) const {
    LorentzMap out;
    out.m = m * other.m;
    return out;
}

bool LorentzMap::valid(double tol) const {
    const Eigen::Matrix4d g = minkowski_metric();
    const double scale = std::max(1.0, m.squaredNorm());
    const double err = (m.transpose() * g * m - g).cwiseAbs().maxCoeff();
    return err <= tol * scale && m(0, 0) > 0.0;
}

Disk4 apply_lorentz(const LorentzMap& m, const Disk4& d) {
    if (!m.valid()) fail(ErrorKind::NotLorentz, "matrix is not a restricted Lorentz map");
    Eigen::Vector4d v = m.m * d.vec();
    return Disk4::from_vec(v, d.normalized);
}

std::vector<Disk4> solve_disk_given_bc(const Disk4& d, double delta, double bp, double cp) {
    const Disk4 n = d.normalized ? d : normalize_desitter(d);
    const double u = delta + n.b * bp + n.c * cp;
    std::vector<Disk4> out;

    auto push_candidate = [&](double sign_a, double dp) {
        const double s2 = sq(bp) + sq(cp) + sq(dp) - 1.0;
        if (s2 < -1e-12) return;
        const double ap = sign_a * std::sqrt(std::max(0.0, s2));
        Disk4 cand{ap, bp, cp, dp, true};
        const double scale = std::max(1.0, sq(dp) + sq(bp) + sq(cp));
        if (std::abs(lorentz_inner(n, cand) - delta) > kTolInv * scale) return;
        for (const Disk4& prev : out) {
            const double diff = std::max({std::abs(prev.a - cand.a), std::abs(prev.b - cand.b),
                                          std::abs(prev.c - cand.c), std::abs(prev.d - cand.d)});
            if (diff <= 1e-9) return;
        }
        out.push_back(cand);
    };

    const double tol = 1e-14;
    if (std::abs(n.a) <= tol) {
        if (std::abs(n.d) <= tol) return out; // degenerate pencil
        const double dp = -u / n.d;
        push_candidate(1.0, dp);
        push_candidate(-1.0, dp);
        return out;
    }

    // <D,D'> = delta with a'^2 = b'^2 + c'^2 + d'^2 - 1 reduces to a
    // quadratic in the fourth coordinate.
    const double A2 = sq(n.a) - sq(n.d);
    const double A1 = -2.0 * u * n.d;
    const double A0 = sq(n.a) * (sq(bp) + sq(cp) - 1.0) - sq(u);
    std::vector<double> roots;
    if (std::abs(A2) <= tol * std::max(1.0, std::abs(A1) + std::abs(A0))) {
        if (std::abs(A1) > tol) roots.push_back(-A0 / A1);
    } else {
        const double disc = sq(A1) - 4.0 * A2 * A0;
        if (disc >= 0.0) {
            const double sd = std::sqrt(disc);
            // Stable quadratic roots.
            const double q = -0.5 * (A1 + (A1 >= 0.0 ? sd : -sd));
            roots.push_back(q / A2);
            if (q != 0.0) roots.push_back(A0 / q);
            else roots.push_back(-A1 / A2 - roots[0]);
        }
    }
    for (double dp : roots) {
        // Polish the root, then pin the time coordinate's sign from the
        // linear relation a a' = u + d d'.
        for (int it = 0; it < 2; ++it) {
            const double pv = (A2 * dp + A1) * dp + A0;
            const double pd = 2.0 * A2 * dp + A1;
            if (pd != 0.0) dp -= pv / pd;
        }
        const double ap = (u + n.d * dp) / n.a;
        push_candidate(ap >= 0.0 ? 1.0 : -1.0, dp);
    }
    return out;
}

const std::array<Eigen::Matrix4d, 6>& lorentz_generators() {
    static const std::array<Eigen::Matrix4d, 6> gens = [] {
        std::array<Eigen::Matrix4d, 6> g;
        for (auto& m : g) m.setZero();
        // Rotations about x, y, z.
        g[0](2, 3) = -1.0; g[0](3, 2) = 1.0;
        g[1](3, 1) = -1.0; g[1](1, 3) = 1.0;
        g[2](1, 2) = -1.0; g[2](2, 1) = 1.0;
        // Boosts along x, y, z.
        g[3](0, 1) = 1.0; g[3](1, 0) = 1.0;
        g[4](0, 2) = 1.0; g[4](2, 0) = 1.0;
        g[5](0, 3) = 1.0; g[5](3, 0) = 1.0;
        return g;
    }();
    return gens;
}

Disk4 disk_from_center_radius(const SpherePoint& center, double rho) {
    if (!(rho > 0.0 && rho < M_PI))
        fail(ErrorKind::InvalidArgument, "spherical radius must lie in (0, pi)");
    const double s = std::sin(rho);
    const Eigen::Vector3d c = center.vec().normalized();
    return {std::cos(rho) / s, c.x() / s, c.y() / s, c.z() / s, true};
}

} // namespace katflow
