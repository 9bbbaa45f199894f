#include "katflow/flow.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <Eigen/LU>

namespace katflow {

const char* stop_reason_name(StopReason r) {
    switch (r) {
        case StopReason::TargetReached: return "TargetReached";
        case StopReason::IllConditioned: return "IllConditioned";
        case StopReason::MonitorViolation: return "MonitorViolation";
        case StopReason::MaxSteps: return "MaxSteps";
    }
    return "Unknown";
}

namespace {

// Evolving flow state: the 4(n-3) unpinned coordinates, with the pinned
// disks held bitwise constant.
class FlowSystem {
public:
    FlowSystem(const TriangulatedPolyhedron& p, const Configuration& cfg,
               const std::array<int, 3>& face, int free_edge, const FlowOptions& opts)
        : p_(p), base_(cfg), face_(face), free_edge_(free_edge), opts_(opts) {
        const RigidityMatrix j = assemble_rigidity(p, cfg);
        ju_ = unmarked_matrix(j, face, p);
        free_row_ = ju_.row_of_edge(free_edge);
        // Constraint targets: current edge inner products and vertex norms.
        targets_ = rhs_targets(cfg);
    }

    Eigen::VectorXd pack(const Configuration& cfg) const {
        Eigen::VectorXd y(ju_.col_map.size());
        for (size_t c = 0; c < ju_.col_map.size(); ++c) {
            const int g = ju_.col_map[c];
            const Disk4& d = cfg[g / 4];
            y[c] = (g % 4 == 0) ? d.a : (g % 4 == 1 ? d.b : (g % 4 == 2 ? d.c : d.d));
        }
        return y;
    }

    Configuration unpack(const Eigen::VectorXd& y) const {
        Configuration cfg = base_;
        for (size_t c = 0; c < ju_.col_map.size(); ++c) {
            const int g = ju_.col_map[c];
            Disk4& d = cfg[g / 4];
            double& target = (g % 4 == 0) ? d.a : (g % 4 == 1 ? d.b : (g % 4 == 2 ? d.c : d.d));
            target = y[c];
        }
        return cfg;
    }

    Eigen::VectorXd velocity(const Eigen::VectorXd& y) const {
        const Configuration cfg = unpack(y);
        const RigidityMatrix j = assemble_rigidity(p_, cfg);
        const UnmarkedMatrix ju = unmarked_matrix(j, face_, p_);
        return flow_velocity(ju, free_edge_, opts_.cond_max);
    }

    double edge_value(const Eigen::VectorXd& y) const {
        const Configuration cfg = unpack(y);
        return lorentz_inner(cfg[p_.edges[free_edge_][0]], cfg[p_.edges[free_edge_][1]]);
    }

    // Residual of the held constraints (free-edge component zeroed).
    Eigen::VectorXd constraint_residual(const Configuration& cfg) const {
        Eigen::VectorXd g = rhs_targets(cfg) - targets_;
        g[free_row_] = 0.0;
        return g;
    }

    // Newton projection back onto {other edges fixed, vertex norms -1}.
    // Returns the constraint residual after projection.
    double project(Eigen::VectorXd& y) const {
        double res = 0.0;
        for (int it = 0; it < opts_.newton_max; ++it) {
            Configuration cfg = unpack(y);
            Eigen::VectorXd g = constraint_residual(cfg);
            res = g.cwiseAbs().maxCoeff();
            if (res <= opts_.newton_tol) return res;
            const RigidityMatrix j = assemble_rigidity(p_, cfg);
            const UnmarkedMatrix ju = unmarked_matrix(j, face_, p_);
            Eigen::FullPivLU<Eigen::MatrixXd> lu(ju.m);
            if (!(lu_cond_estimate(lu) < opts_.cond_max))
                fail(ErrorKind::IllConditioned, "projection matrix ill-conditioned");
            y -= lu.solve(g);
        }
        Configuration cfg = unpack(y);
        return constraint_residual(cfg).cwiseAbs().maxCoeff();
    }

    const TriangulatedPolyhedron& complex() const { return p_; }

private:
    Eigen::VectorXd rhs_targets(const Configuration& cfg) const {
        Eigen::VectorXd t(ju_.row_map.size());
        for (size_t r = 0; r < ju_.row_map.size(); ++r) {
            const int e = ju_.edge_of_row[r];
            if (e >= 0) t[r] = lorentz_inner(cfg[p_.edges[e][0]], cfg[p_.edges[e][1]]);
            else {
                // Vertex rows follow the edge rows in unmarked order.
                const int global = ju_.row_map[r];
                const int v = global - (3 * p_.n - 6);
                t[r] = 0.5 * (lorentz_inner(cfg[v], cfg[v]) + 1.0);
            }
        }
        return t;
    }

    const TriangulatedPolyhedron& p_;
    Configuration base_;
    std::array<int, 3> face_;
    int free_edge_;
    FlowOptions opts_;
    UnmarkedMatrix ju_;
    int free_row_ = -1;
    Eigen::VectorXd targets_;
};

// Dormand-Prince 4(5) pair.
struct Rk45Step {
    Eigen::VectorXd y5;
    double err = 0.0; // scaled error estimate, accept when <= 1
};

Rk45Step rk45(const FlowSystem& sys, const Eigen::VectorXd& y, double h, double rtol,
              double atol) {
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                        e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                        e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

    const Eigen::VectorXd k1 = sys.velocity(y);
    const Eigen::VectorXd k2 = sys.velocity(y + h * (a21 * k1));
    const Eigen::VectorXd k3 = sys.velocity(y + h * (a31 * k1 + a32 * k2));
    const Eigen::VectorXd k4 = sys.velocity(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Eigen::VectorXd k5 = sys.velocity(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Eigen::VectorXd k6 =
        sys.velocity(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));

    Rk45Step out;
    out.y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Eigen::VectorXd k7 = sys.velocity(out.y5);
    const Eigen::VectorXd diff = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double err = 0.0;
    for (int i = 0; i < y.size(); ++i) {
        const double scale = atol + rtol * std::max(std::abs(y[i]), std::abs(out.y5[i]));
        err = std::max(err, std::abs(diff[i]) / scale);
    }
    out.err = err;
    return out;
}

} // namespace

FlowResult integrate_edge_flow(const TriangulatedPolyhedron& p, const Configuration& cfg,
                               int free_edge, double target, int pinned_face,
                               const FlowOptions& opts) {
    if (free_edge < 0 || free_edge >= p.edge_count())
        fail(ErrorKind::InvalidArgument, "free edge out of range");
    if (pinned_face < 0 || pinned_face >= p.face_count())
        fail(ErrorKind::InvalidArgument, "pinned face out of range");
    if (!(target >= 0.0))
        fail(ErrorKind::InvalidArgument, "flow target must be nonnegative");
    const std::array<int, 3> face = p.faces[pinned_face];
    for (int s = 0; s < 3; ++s) {
        const int e = p.edge_index(face[s], face[(s + 1) % 3]);
        if (e == free_edge)
            fail(ErrorKind::InvalidArgument, "free edge lies on the pinned face");
    }

    FlowResult result;
    result.cfg = cfg;
    result.trace.free_edge = free_edge;
    result.trace.pinned_face = face;

    const double d0 =
        lorentz_inner(cfg[p.edges[free_edge][0]], cfg[p.edges[free_edge][1]]);
    if (d0 - target < -opts.tol_target)
        fail(ErrorKind::InvalidArgument, "flow can only decrease an inversive distance");
    if (std::abs(d0 - target) <= opts.tol_target) {
        result.trace.stop = StopReason::TargetReached;
        return result;
    }

    FlowSystem sys(p, cfg, face, free_edge, opts);
    Eigen::VectorXd y = sys.pack(cfg);
    double d_cur = d0;
    double t = 0.0;
    double h = std::min(opts.h0, d0 - target);
    const double h_min = 1e-14;

    auto abort_with = [&](StopReason reason, std::string detail) {
        result.trace.stop = reason;
        result.trace.detail = std::move(detail);
        return result;
    };

    int steps = 0;
    while (true) {
        if (steps >= opts.max_steps)
            return abort_with(StopReason::MaxSteps, "accepted step limit reached");
        h = std::min(h, d_cur - target); // unit decrease rate
        if (h < h_min)
            return abort_with(StopReason::MaxSteps, "step size underflow");

        Rk45Step step;
        try {
            step = rk45(sys, y, h, opts.rtol, opts.atol);
        } catch (const Error& err) {
            if (err.kind() == ErrorKind::IllConditioned)
                return abort_with(StopReason::IllConditioned, err.detail());
            throw;
        }
        if (step.err > 1.0) {
            h *= std::max(0.2, 0.9 * std::pow(step.err, -0.25));
            continue;
        }

        Eigen::VectorXd y_new = step.y5;
        double proj_res = 0.0;
        try {
            proj_res = sys.project(y_new);
        } catch (const Error& err) {
            if (err.kind() == ErrorKind::IllConditioned)
                return abort_with(StopReason::IllConditioned, err.detail());
            throw;
        }
        if (proj_res > opts.tol_drift)
            return abort_with(StopReason::MonitorViolation,
                              "constraint projection stalled at residual " +
                                  std::to_string(proj_res));

        const double d_new = sys.edge_value(y_new);
        if (!(d_new < d_cur)) { // the free edge must strictly decrease
            h *= 0.5;
            continue;
        }

        Configuration cfg_new = sys.unpack(y_new);
        bool monitors_ok = true;
        double min_rho = 0.0;
        if (opts.check_monitors) {
            const MonitorReport mon = run_monitors(p, cfg_new, ShallowMode::Strict);
            monitors_ok = mon.pass(true);
            min_rho = mon.min_spherical_radius;
            if (!monitors_ok) {
                result.trace.detail = mon.geodesic.ok
                                          ? (mon.convex.ok ? mon.shallow.detail
                                                           : "convexity monitor failed")
                                          : mon.geodesic.detail;
                result.trace.stop = StopReason::MonitorViolation;
                return result;
            }
        } else {
            min_rho = min_radius(cfg_new);
        }

        ++steps;
        t += h;
        y = y_new;
        d_cur = d_new;
        result.cfg = cfg_new;
        result.accepted_steps = steps;
        if (opts.record_trace)
            result.trace.records.push_back({t, d_cur, min_rho, monitors_ok, h});

        if (d_cur - target <= opts.tol_target) {
            result.trace.stop = StopReason::TargetReached;
            return result;
        }
        h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(step.err, 1e-10), -0.2)));
    }
}

int pick_pinned_face(const TriangulatedPolyhedron& p, const Configuration& cfg, int free_edge) {
    const int a = p.edges[free_edge][0], b = p.edges[free_edge][1];
    const auto centers = disk_centers(cfg);
    int best = -1;
    double best_score = -1.0;
    bool best_disjoint = false;
    for (int fi = 0; fi < p.face_count(); ++fi) {
        const auto& f = p.faces[fi];
        bool contains_edge = false;
        int touch = 0;
        for (int s = 0; s < 3; ++s) {
            if (f[s] == a || f[s] == b) ++touch;
            const int e = p.edge_index(f[s], f[(s + 1) % 3]);
            if (e == free_edge) contains_edge = true;
        }
        if (contains_edge) continue;
        const bool disjoint = (touch == 0);
        double score = M_PI;
        for (int s = 0; s < 3; ++s)
            for (int u = s + 1; u < 3; ++u)
                score = std::min(score, std::acos(std::clamp(
                                            centers[f[s]].dot(centers[f[u]]), -1.0, 1.0)));
        // Prefer faces disjoint from the free edge, then the best-spread pin.
        if ((disjoint && !best_disjoint) ||
            (disjoint == best_disjoint && score > best_score)) {
            best = fi;
            best_score = score;
            best_disjoint = disjoint;
        }
    }
    if (best < 0) fail(ErrorKind::NoValidPin, "every face touches the free edge");
    return best;
}

double SolveReport::max_residual() const {
    double worst = 0.0;
    for (double r : residuals) worst = std::max(worst, r);
    return worst;
}

namespace {

std::vector<double> residuals_against(const TriangulatedPolyhedron& p, const EdgeWeights& w,
                                      const Configuration& cfg) {
    std::vector<double> r(p.edge_count());
    for (int e = 0; e < p.edge_count(); ++e)
        r[e] = std::abs(inversive_distance(cfg[p.edges[e][0]], cfg[p.edges[e][1]]) - w[e]);
    return r;
}

} // namespace

SolveReport schedule_edges(const TriangulatedPolyhedron& p, const EdgeWeights& w,
                           const Configuration& cfg0, const FlowOptions& opts, int forced_pin) {
    const auto t_start = std::chrono::steady_clock::now();
    if (p.is_tetrahedron)
        fail(ErrorKind::Tetrahedron, "the tetrahedron is excluded from the solver");
    if (!w.shallow()) fail(ErrorKind::InvalidArgument, "weights must lie in [0,1]");
    if (!strictly_shallow_check(p, w))
        fail(ErrorKind::NotStrictlyShallow,
             "weights carry an all-zero 4-cycle; use the epsilon limit");
    const KatReport kat = kat_conditions_check(p, w);
    if (!kat.ok()) fail(ErrorKind::KatViolation, kat.describe());

    std::vector<char> pinned_edge(p.edge_count(), 0);
    if (forced_pin >= 0) {
        const auto& f = p.faces[forced_pin];
        for (int s = 0; s < 3; ++s) pinned_edge[p.edge_index(f[s], f[(s + 1) % 3])] = 1;
    }

    SolveReport rep;
    rep.cfg = cfg0;
    {
        const MonitorReport mon = run_monitors(p, rep.cfg, ShallowMode::Strict);
        if (!mon.pass(true))
            fail(ErrorKind::MonitorViolation, "starting configuration fails the monitors");
    }
    for (int e = 0; e < p.edge_count(); ++e) {
        const double d = inversive_distance(rep.cfg[p.edges[e][0]], rep.cfg[p.edges[e][1]]);
        if (d < w[e] - opts.tol_target)
            fail(ErrorKind::InvalidArgument, "starting configuration is not w-bounded");
    }

    const int flow_cap = 2 * p.edge_count() + 8;
    while (true) {
        int next = -1;
        double worst = opts.tol_target;
        for (int e = 0; e < p.edge_count(); ++e) {
            if (pinned_edge[e]) continue;
            const double d = inversive_distance(rep.cfg[p.edges[e][0]], rep.cfg[p.edges[e][1]]);
            const double r = d - w[e];
            if (r < -opts.tol_target)
                fail(ErrorKind::MonitorViolation, "w-boundedness lost during scheduling");
            if (r > worst) {
                worst = r;
                next = e;
            }
        }
        if (next < 0) break;
        if (rep.flows >= flow_cap)
            fail(ErrorKind::MaxSteps, "edge scheduler exceeded its flow budget");

        const int pin = forced_pin >= 0 ? forced_pin : pick_pinned_face(p, rep.cfg, next);
        FlowResult fr = integrate_edge_flow(p, rep.cfg, next, w[next], pin, opts);
        if (fr.trace.stop != StopReason::TargetReached) {
            const ErrorKind kind = fr.trace.stop == StopReason::IllConditioned
                                       ? ErrorKind::IllConditioned
                                       : (fr.trace.stop == StopReason::MaxSteps
                                              ? ErrorKind::MaxSteps
                                              : ErrorKind::MonitorViolation);
            fail(kind, "flow on edge " + std::to_string(p.edges[next][0]) + "-" +
                           std::to_string(p.edges[next][1]) + " aborted: " + fr.trace.detail);
        }
        rep.cfg = fr.cfg;
        rep.flows += 1;
        rep.total_steps += fr.accepted_steps;
        if (opts.record_trace) rep.traces.push_back(std::move(fr.trace));
    }

    rep.residuals = residuals_against(p, w, rep.cfg);
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return rep;
}

SolveReport epsilon_schedule(const TriangulatedPolyhedron& p, const EdgeWeights& w,
                             const Configuration& cfg0, const FlowOptions& opts) {
    const auto t_start = std::chrono::steady_clock::now();
    if (!w.shallow()) fail(ErrorKind::InvalidArgument, "weights must lie in [0,1]");
    const KatReport kat = kat_conditions_check(p, w);
    if (!kat.ok()) fail(ErrorKind::KatViolation, kat.describe());
    if (strictly_shallow_check(p, w)) return schedule_edges(p, w, cfg0, opts);

    // The first all-zero 4-cycle; by the 4-cycle hypothesis it bounds two
    // adjacent faces across one of its diagonals.
    std::array<int, 4> cyc{};
    bool found = false;
    for (const auto& c : p.four_cycles) {
        bool all_zero = true;
        for (int s = 0; s < 4 && all_zero; ++s)
            all_zero = (w[p.edge_index(c[s], c[(s + 1) % 4])] == 0.0);
        if (all_zero) {
            cyc = c;
            found = true;
            break;
        }
    }
    if (!found) fail(ErrorKind::InvalidArgument, "no all-zero 4-cycle found");

    // Orient the cycle as i-j-l-k with diagonal jk and special face ijk.
    int vi, vj, vk;
    if (p.has_face(cyc[0], cyc[1], cyc[2]) && p.has_face(cyc[0], cyc[2], cyc[3])) {
        vj = cyc[0]; vk = cyc[2]; vi = cyc[1];
    } else {
        vj = cyc[1]; vk = cyc[3]; vi = cyc[0];
    }
    int special_face = -1;
    for (int fi = 0; fi < p.face_count(); ++fi) {
        std::array<int, 3> s = p.faces[fi];
        std::sort(s.begin(), s.end());
        std::array<int, 3> want{vi, vj, vk};
        std::sort(want.begin(), want.end());
        if (s == want) { special_face = fi; break; }
    }
    if (special_face < 0) fail(ErrorKind::KatViolation, "all-zero 4-cycle bounds no face pair");

    const int e_ij = p.edge_index(vi, vj);
    const int e_ki = p.edge_index(vk, vi);
    const int e_jk = p.edge_index(vj, vk);

    auto stage_weights = [&](double eps, bool first) {
        EdgeWeights we = w;
        for (int e = 0; e < p.edge_count(); ++e) {
            if (e == e_ij || e == e_ki) we[e] = 0.0;
            else if (e == e_jk) we[e] = w[e_jk];
            else we[e] = first ? 1.0 : std::max(eps, w[e]);
        }
        return we;
    };

    SolveReport rep;
    SolveReport stage = schedule_edges(p, stage_weights(1.0, true), cfg0, opts);
    rep.cfg = stage.cfg;
    rep.flows = stage.flows;
    rep.total_steps = stage.total_steps;
    double resid = 0.0;
    for (double r : residuals_against(p, w, rep.cfg)) resid = std::max(resid, r);
    rep.levels.push_back({1.0, resid});

    int stalled = 0;
    for (double eps = 0.5; eps >= kEpsMin; eps *= 0.5) {
        stage = schedule_edges(p, stage_weights(eps, false), rep.cfg, opts, special_face);
        rep.cfg = stage.cfg;
        rep.flows += stage.flows;
        rep.total_steps += stage.total_steps;
        double level_resid = 0.0;
        for (double r : residuals_against(p, w, rep.cfg)) level_resid = std::max(level_resid, r);
        stalled = level_resid < rep.levels.back().second - 1e-15 ? 0 : stalled + 1;
        rep.levels.push_back({eps, level_resid});
        if (level_resid < kTolLimit) break;
        if (stalled >= 3)
            fail(ErrorKind::NonConvergent,
                 "residual stalled at " + std::to_string(level_resid) +
                     " across three halvings");
    }

    rep.residuals = residuals_against(p, w, rep.cfg);
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return rep;
}

} // namespace katflow
