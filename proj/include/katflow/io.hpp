#pragma once
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "katflow/checks.hpp"
#include "katflow/complex.hpp"
#include "katflow/flow.hpp"

namespace katflow {

inline constexpr const char* kProblemFormat = "katflow-problem/1";
inline constexpr const char* kSolutionFormat = "katflow-solution/1";
inline constexpr const char* kSoftwareVersion = "0.1.0";

struct ProblemOptions {
    double tol_target = 1e-10;
    double rtol = 1e-8;
    unsigned long seed = 0;
    bool trace = false;

    FlowOptions flow_options() const;
};

/// Parsed problem file: the complex, one weight per edge, and options.
/// Unknown fields are rejected; every edge must be weighted exactly once.
struct Problem {
    TriangulatedPolyhedron complex;
    EdgeWeights weights;
    ProblemOptions options;
};

Problem parse_problem(const std::string& json_text);
Problem load_problem(const std::string& path);
std::string write_problem(const std::vector<std::array<int, 3>>& faces,
                          const std::vector<std::array<double, 3>>& ij_value_rows,
                          const ProblemOptions& options = {});

struct SolutionEdge {
    int i = 0, j = 0;
    double target = 0.0;
    double achieved = 0.0;
};

struct Solution {
    Configuration cfg;
    std::vector<SolutionEdge> edges;
    bool geodesic = true;
    bool convex = true;
    bool strictly_convex = true;
    bool shallow = true;
    bool nonedge_separation = true;
    double min_spherical_radius = 0.0;
    std::string input_hash;
    double tol_target = 1e-10;
    unsigned long seed = 0;
};

Solution make_solution(const TriangulatedPolyhedron& p, const EdgeWeights& w,
                       const Configuration& cfg, const std::string& input_hash,
                       const ProblemOptions& options);
std::string write_solution(const Solution& s);
Solution parse_solution(const std::string& json_text);
Solution load_solution(const std::string& path);

std::string write_trace_jsonl(const std::vector<FlowTrace>& traces,
                              const TriangulatedPolyhedron& p);

/// 64-bit FNV-1a of the raw bytes, as "fnv1a64:<hex>".
std::string content_hash(const std::string& bytes);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

struct RenderStyle {
    int width = 800;
    double view_half_extent = 4.0; // view box is [-extent, extent]^2
    int pinned_face = 0;           // rotated to the south pole before projecting
    int free_edge = -1;            // drawn in the highlight style
    // Optional per-vertex disk velocities (one 4-vector per vertex, zeros
    // for pinned disks); drawn as tangent vectors at the disk centers.
    std::vector<std::array<double, 4>> velocities;
};

/// Deterministic SVG: one circle per disk boundary (projected
/// stereographically; circles map to circles or lines), geodesic edges as
/// sampled arcs, the free edge highlighted, velocity vectors when supplied.
std::string render_svg(const TriangulatedPolyhedron& p, const Configuration& cfg,
                       const RenderStyle& style = {});

struct PinConditioning {
    int face = -1;
    double cond = 0.0;
    bool admissible = false;
};

struct CheckOutcome {
    MonitorReport monitors;
    std::vector<double> residuals;
    double max_residual = 0.0;
    bool normalized_ok = true;
    int rank_j = 0;
    int expected_rank = 0;
    std::vector<PinConditioning> pins;

    bool pass(double residual_tol) const;
};

/// Full diagnostic pass over a solved configuration: monitors, per-edge
/// residuals, rank of the rigidity matrix, and cond(J_u) for every
/// admissible pin.
CheckOutcome check_solution(const TriangulatedPolyhedron& p, const EdgeWeights& w,
                            const Configuration& cfg);

} // namespace katflow
