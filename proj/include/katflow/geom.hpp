#pragma once
#include <array>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "katflow/errors.hpp"

namespace katflow {

// Default tolerances. Determinant tests additionally scale by row norms at
// the call site.
inline constexpr double kTolNorm  = 1e-12;
inline constexpr double kTolLight = 1e-10;
inline constexpr double kTolOrtho = 1e-10;
inline constexpr double kTolDet   = 1e-10;
inline constexpr double kTolInv   = 1e-10;

/// A disk on S^2, encoded as the Lorentz normal (a,b,c,d) of a hyperplane
/// through the origin of the Minkowski spacetime R^{1,3}. The boundary
/// circle is {(1,x,y,z) on S^2 : a - bx - cy - dz = 0} and the disk interior
/// is the side where a - bx - cy - dz < 0. Positive scalings denote the same
/// disk; negation gives the complementary disk.
struct Disk4 {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
    // Set when the coordinates satisfy <D,D> = -1 (de Sitter form).
    bool normalized = false;

    Disk4() = default;
    Disk4(double a_, double b_, double c_, double d_, bool norm = false)
        : a(a_), b(b_), c(c_), d(d_), normalized(norm) {}

    Eigen::Vector4d vec() const { return {a, b, c, d}; }
    static Disk4 from_vec(const Eigen::Vector4d& v, bool norm = false) {
        return {v[0], v[1], v[2], v[3], norm};
    }

    Disk4 complement() const { return {-a, -b, -c, -d, normalized}; }
};

enum class DiskClass { Real, Point, Imaginary };

enum class FamilyType { Hyperbolic, Parabolic, Elliptic };

const char* family_type_name(FamilyType t);

/// Point on the unit sphere.
struct SpherePoint {
    double x = 0.0, y = 0.0, z = 0.0;
    Eigen::Vector3d vec() const { return {x, y, z}; }
    static SpherePoint from_vec(const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }
};

/// A disk of the extended plane: either the disk bounded by a circle
/// (signed radius r: r > 0 interior, r < 0 exterior) or a half-plane
/// {p : n.p >= h} with unit inward normal n.
struct PlanarDisk {
    bool is_line = false;
    double x = 0.0, y = 0.0, r = 0.0;   // circle form
    double nx = 0.0, ny = 0.0, h = 0.0; // line form

    static PlanarDisk circle(double x, double y, double r);
    static PlanarDisk halfplane(double nx, double ny, double h);
};

/// Disk Lorentz-orthogonal to a triple, classified by the sign of its
/// Minkowski norm (hyperbolic = real orthocircle, parabolic = point,
/// elliptic = imaginary).
struct OrthoDisk {
    Disk4 coords;
    FamilyType kind = FamilyType::Hyperbolic;
};

/// Conical cap of a real disk: the ray (a,b,c,d) in R^{1,3}, viewed in
/// extended Euclidean 3-space. Finite when a != 0 (apex of the tangent
/// cone, with the reflection convention D* = (-D)* for a < 0), otherwise a
/// point at infinity in direction (b,c,d).
struct ConicalCap {
    bool finite = true;
    double x = 0.0, y = 0.0, z = 0.0; // affine point, or unit direction when infinite
};

/// Element of the restricted Lorentz group O+(1,3): m^T G m = G with
/// G = diag(1,-1,-1,-1), and m(0,0) > 0. Acts on S^2 as a Moebius map.
struct LorentzMap {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();

    static LorentzMap identity();
    /// Spatial rotation about a (not necessarily unit) axis.
    static LorentzMap rotation(const Eigen::Vector3d& axis, double angle);
    /// Boost of rapidity s along a spatial axis.
    static LorentzMap boost(const Eigen::Vector3d& axis, double s);
    LorentzMap compose(const LorentzMap& other) const; // this * other
    bool valid(double tol = kTolNorm) const;
};

double lorentz_inner(const Disk4& u, const Disk4& v);

DiskClass classify_disk(const Disk4& d);

Disk4 normalize_desitter(const Disk4& d);

double inversive_distance(const Disk4& d1, const Disk4& d2);

double inversive_distance_planar(const PlanarDisk& d1, const PlanarDisk& d2);

/// Spherical center and geodesic radius rho in (0, pi) of a real disk.
std::pair<SpherePoint, double> spherical_center_radius(const Disk4& d);

ConicalCap conical_cap(const Disk4& d);

OrthoDisk orthodisk(const Disk4& d1, const Disk4& d2, const Disk4& d3);

/// det(O+, D4): zero iff d4 lies in the c-plane spanned by the face triple,
/// sign tells the side. Equals the Lorentz inner product of the triple's
/// orthodisk normal with d4.
double coplanarity_det(const Disk4& f1, const Disk4& f2, const Disk4& f3, const Disk4& d4);

FamilyType coaxial_classify(const Disk4& d1, const Disk4& d2);

Disk4 stereographic_lift(const PlanarDisk& p);
PlanarDisk stereographic_drop(const Disk4& d);

Disk4 apply_lorentz(const LorentzMap& m, const Disk4& d);

/// All real de Sitter-normalized disks with second and third coordinates
/// (bp, cp) at inversive distance delta from the normalized disk d. At most
/// two exist; a degenerate pencil (|a| and |d| both ~0) returns none.
std::vector<Disk4> solve_disk_given_bc(const Disk4& d, double delta, double bp, double cp);

/// Basis of the Lorentz Lie algebra so(1,3): three spatial rotation
/// generators followed by three boost generators.
const std::array<Eigen::Matrix4d, 6>& lorentz_generators();

/// Disk with a given spherical center and geodesic radius rho in (0, pi).
Disk4 disk_from_center_radius(const SpherePoint& center, double rho);

} // namespace katflow
