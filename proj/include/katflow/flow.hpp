#pragma once
#include <array>
#include <string>
#include <vector>

#include "katflow/checks.hpp"
#include "katflow/complex.hpp"
#include "katflow/rigidity.hpp"

namespace katflow {

struct FlowOptions {
    double rtol = 1e-8;        // embedded RK error tolerance
    double atol = 1e-12;
    double h0 = 1e-2;          // initial step
    double tol_target = 1e-10; // |d(e) - w(e)| at termination
    double tol_drift = 1e-8;   // allowed drift of non-free edges
    double cond_max = kCondMax;
    int max_steps = 50000;
    int newton_max = 5;
    double newton_tol = 1e-12;
    bool record_trace = true;
    bool check_monitors = true;
};

enum class StopReason { TargetReached, IllConditioned, MonitorViolation, MaxSteps };

const char* stop_reason_name(StopReason r);

struct TraceRecord {
    double t = 0.0;
    double d_e = 0.0;
    double min_radius = 0.0;
    bool monitors_ok = true;
    double step = 0.0;
};

struct FlowTrace {
    std::vector<TraceRecord> records;
    StopReason stop = StopReason::TargetReached;
    std::string detail;
    int free_edge = -1;
    std::array<int, 3> pinned_face{};
};

/// Result of one edge flow: the final configuration (the last good state
/// when the flow aborted) and the step-by-step trace.
struct FlowResult {
    Configuration cfg;
    FlowTrace trace;
    int accepted_steps = 0;
};

/// Integrates the velocity field J_u^{-1} v_e on the unpinned coordinates
/// until the free edge's inversive distance reaches `target`. Every other
/// edge's inversive distance and every vertex norm is held by a Newton
/// projection after each accepted step; the monitors of `checks` must pass
/// at every accepted step. Aborts (recorded in trace.stop) on
/// ill-conditioning, monitor violation, or step exhaustion.
FlowResult integrate_edge_flow(const TriangulatedPolyhedron& p, const Configuration& cfg,
                               int free_edge, double target, int pinned_face,
                               const FlowOptions& opts = {});

struct SolveReport {
    Configuration cfg;
    std::vector<double> residuals; // |d(e) - w(e)| per edge
    int flows = 0;
    long total_steps = 0;
    double wall_seconds = 0.0;
    std::vector<FlowTrace> traces; // per executed flow, when recording
    // epsilon-limit bookkeeping: (epsilon level, residual after the level)
    std::vector<std::pair<double, double>> levels;

    double max_residual() const;
};

/// Drives every edge from its bootstrap value down to w(e), one flow per
/// edge in descending-residual order, keeping the configuration w-bounded.
/// forced_pin >= 0 pins that face for every flow (its own edges must
/// already sit at their targets).
SolveReport schedule_edges(const TriangulatedPolyhedron& p, const EdgeWeights& w,
                           const Configuration& cfg0, const FlowOptions& opts = {},
                           int forced_pin = -1);

/// Limit procedure for shallow weight sets that are not strictly shallow:
/// schedule_edges against w_eps(e) = max(eps, w(e)) for eps = 1, 1/2, 1/4,
/// ... (zero targets on the special face held exactly), reusing each result
/// as the next start, until the residual against the true targets falls
/// below tol_limit or eps reaches eps_min.
SolveReport epsilon_schedule(const TriangulatedPolyhedron& p, const EdgeWeights& w,
                             const Configuration& cfg0, const FlowOptions& opts = {});

inline constexpr double kTolLimit = 1e-6;
inline constexpr double kEpsMin = 1.0 / (1 << 20);

/// Deterministic pin choice: the face not touching the free edge whose
/// three disk centers are pairwise farthest apart.
int pick_pinned_face(const TriangulatedPolyhedron& p, const Configuration& cfg, int free_edge);

} // namespace katflow
