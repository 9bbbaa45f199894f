// Command-line driver: solve, check, render, and bootstrap verbs over the
// JSON problem/solution formats.
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "katflow/bootstrap.hpp"
#include "katflow/flow.hpp"
#include "katflow/io.hpp"
#include "katflow/rigidity.hpp"

namespace {

using katflow::Error;
using katflow::ErrorKind;

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::ParseError: return 2;
        case ErrorKind::NotTriangulation:
        case ErrorKind::BadOrientation:
        case ErrorKind::NotThreeConnected:
        case ErrorKind::InvalidArgument:
        case ErrorKind::ZeroVector:
        case ErrorKind::NotRealDisk:
        case ErrorKind::DegenerateTriple:
        case ErrorKind::SameBoundary:
        case ErrorKind::NotLorentz: return 3;
        case ErrorKind::KatViolation:
        case ErrorKind::NotStrictlyShallow: return 4;
        case ErrorKind::Tetrahedron: return 5;
        case ErrorKind::AntipodalEdge:
        case ErrorKind::SingularAtPin:
        case ErrorKind::TooSmall:
        case ErrorKind::IllConditioned:
        case ErrorKind::MonitorViolation:
        case ErrorKind::MaxSteps:
        case ErrorKind::NoValidPin:
        case ErrorKind::NonConvergent:
        case ErrorKind::NormalizationFailed: return 6;
        case ErrorKind::IoError: return 7;
    }
    return 1;
}

void emit_error(const Error& err) {
    nlohmann::ordered_json j;
    j["error"]["kind"] = katflow::error_kind_name(err.kind());
    j["error"]["exit"] = exit_code_for(err.kind());
    j["error"]["detail"] = err.detail();
    std::cerr << j.dump() << "\n";
}

struct SolvePaths {
    std::string input;
    std::string out;
    std::string svg;
    std::string trace;
    std::string dump_matrices;
    double tol_target = -1.0;
    long seed = -1;
    std::string batch;
};

int solve_one(const SolvePaths& paths, const std::string& input_path) {
    const std::string bytes = katflow::read_file(input_path);
    katflow::Problem prob = katflow::parse_problem(bytes);
    if (paths.tol_target > 0.0) prob.options.tol_target = paths.tol_target;
    if (paths.seed >= 0) prob.options.seed = static_cast<unsigned long>(paths.seed);
    katflow::FlowOptions fopts = prob.options.flow_options();
    fopts.record_trace = fopts.record_trace || !paths.trace.empty();

    if (prob.complex.is_tetrahedron)
        katflow::fail(ErrorKind::Tetrahedron,
                      "tetrahedra bootstrap but are excluded from the solver");
    const katflow::KatReport kat = katflow::kat_conditions_check(prob.complex, prob.weights);
    if (!kat.ok()) katflow::fail(ErrorKind::KatViolation, kat.describe());

    const katflow::Configuration start = katflow::bootstrap_configuration(prob.complex);
    katflow::SolveReport rep;
    if (katflow::strictly_shallow_check(prob.complex, prob.weights))
        rep = katflow::schedule_edges(prob.complex, prob.weights, start, fopts);
    else
        rep = katflow::epsilon_schedule(prob.complex, prob.weights, start, fopts);

    const katflow::Solution sol = katflow::make_solution(
        prob.complex, prob.weights, rep.cfg, katflow::content_hash(bytes), prob.options);
    if (!paths.out.empty()) katflow::write_file(paths.out, katflow::write_solution(sol));
    else std::cout << katflow::write_solution(sol);

    if (!paths.trace.empty())
        katflow::write_file(paths.trace, katflow::write_trace_jsonl(rep.traces, prob.complex));
    if (!paths.svg.empty()) {
        katflow::RenderStyle style;
        katflow::write_file(paths.svg, katflow::render_svg(prob.complex, rep.cfg, style));
    }
    if (!paths.dump_matrices.empty()) {
        const katflow::RigidityMatrix j = katflow::assemble_rigidity(prob.complex, rep.cfg);
        katflow::write_file(paths.dump_matrices, katflow::dump_matrix(j, prob.complex));
    }
    std::fprintf(stderr, "solved %s: %d flows, %ld steps, max residual %.3e\n",
                 input_path.c_str(), rep.flows, rep.total_steps, rep.max_residual());
    return 0;
}

int cmd_solve(const SolvePaths& paths) {
    if (!paths.batch.empty()) {
        std::vector<std::string> inputs;
        for (const auto& entry : std::filesystem::directory_iterator(paths.batch))
            if (entry.path().extension() == ".json") inputs.push_back(entry.path().string());
        std::sort(inputs.begin(), inputs.end());
        int rc = 0;
        for (const std::string& in : inputs) {
            SolvePaths one = paths;
            one.out = in.substr(0, in.size() - 5) + ".solution.json";
            one.svg.clear();
            one.trace.clear();
            try {
                solve_one(one, in);
            } catch (const Error& err) {
                emit_error(err);
                rc = exit_code_for(err.kind());
            }
        }
        return rc;
    }
    return solve_one(paths, paths.input);
}

int cmd_check(const std::string& problem_path, const std::string& solution_path,
              double residual_tol) {
    const katflow::Solution sol = katflow::load_solution(solution_path);
    if (problem_path.empty()) {
        // Solution-only mode: normalization and monitor summary replay.
        bool ok = true;
        for (const katflow::Disk4& d : sol.cfg.disks)
            if (std::abs(katflow::lorentz_inner(d, d) + 1.0) > 1e-9) ok = false;
        std::printf("disks: %d, normalized: %s, min radius: %.6f\n", sol.cfg.size(),
                    ok ? "yes" : "NO", sol.min_spherical_radius);
        return ok ? 0 : 8;
    }
    const katflow::Problem prob = katflow::load_problem(problem_path);
    const katflow::CheckOutcome out =
        katflow::check_solution(prob.complex, prob.weights, sol.cfg);

    std::printf("monitors: geodesic=%s convex=%s strictly_convex=%s shallow=%s nonedge=%s\n",
                out.monitors.geodesic.ok ? "pass" : "FAIL",
                out.monitors.convex.ok ? "pass" : "FAIL",
                out.monitors.convex.strict ? "pass" : "FAIL",
                out.monitors.shallow.ok ? "pass" : "FAIL",
                out.monitors.shallow.nonedge_ok ? "pass" : "FAIL");
    std::printf("min spherical radius: %.6e\n", out.monitors.min_spherical_radius);
    std::printf("rank J: %d (expected %d)\n", out.rank_j, out.expected_rank);
    std::printf("normalization: %s\n", out.normalized_ok ? "pass" : "FAIL");
    std::printf("edge residuals (max %.3e):\n", out.max_residual);
    for (int e = 0; e < static_cast<int>(out.residuals.size()); ++e)
        std::printf("  %d-%d: %.3e\n", prob.complex.edges[e][0], prob.complex.edges[e][1],
                    out.residuals[e]);
    for (const katflow::PinConditioning& pc : out.pins)
        std::printf("pin face %d: cond(J_u) = %.3e%s\n", pc.face, pc.cond,
                    pc.admissible ? "" : " (inadmissible)");
    return out.pass(residual_tol) ? 0 : 8;
}

int cmd_render(const std::string& problem_path, const std::string& solution_path,
               const std::string& out_path, int free_i, int free_j, bool velocities) {
    const katflow::Problem prob = katflow::load_problem(problem_path);
    const katflow::Solution sol = katflow::load_solution(solution_path);
    katflow::RenderStyle style;
    if (free_i >= 0 && free_j >= 0) {
        style.free_edge = prob.complex.edge_index(free_i, free_j);
        if (style.free_edge < 0)
            katflow::fail(ErrorKind::InvalidArgument, "free edge is not an edge of the complex");
        if (velocities) {
            const int pin = katflow::pick_pinned_face(prob.complex, sol.cfg, style.free_edge);
            style.pinned_face = pin;
            const katflow::RigidityMatrix j =
                katflow::assemble_rigidity(prob.complex, sol.cfg);
            const katflow::UnmarkedMatrix ju =
                katflow::unmarked_matrix(j, prob.complex.faces[pin], prob.complex);
            const Eigen::VectorXd vel = katflow::flow_velocity(ju, style.free_edge);
            style.velocities.assign(prob.complex.n, {0.0, 0.0, 0.0, 0.0});
            for (int c = 0; c < vel.size(); ++c) {
                const int g = ju.col_map[c];
                style.velocities[g / 4][g % 4] = vel[c];
            }
        }
    }
    katflow::write_file(out_path, katflow::render_svg(prob.complex, sol.cfg, style));
    return 0;
}

int cmd_bootstrap(const std::string& problem_path, const std::string& out_path) {
    const std::string bytes = katflow::read_file(problem_path);
    const katflow::Problem prob = katflow::parse_problem(bytes);
    const katflow::Configuration cfg = katflow::bootstrap_configuration(prob.complex);
    // The bootstrap realizes the all-ones (tangency) targets.
    const katflow::EdgeWeights ones = katflow::EdgeWeights::uniform(prob.complex, 1.0);
    const katflow::Solution sol = katflow::make_solution(prob.complex, ones, cfg,
                                                         katflow::content_hash(bytes),
                                                         prob.options);
    if (!out_path.empty()) katflow::write_file(out_path, katflow::write_solution(sol));
    else std::cout << katflow::write_solution(sol);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Circle packings on the sphere with prescribed overlap angles"};
    app.require_subcommand(1);

    SolvePaths paths;
    CLI::App* solve = app.add_subcommand("solve", "Solve a problem file");
    solve->add_option("input", paths.input, "Problem JSON file");
    solve->add_option("--out", paths.out, "Solution output path");
    solve->add_option("--svg", paths.svg, "Render the final packing to SVG");
    solve->add_option("--trace", paths.trace, "Stream accepted flow steps as JSON lines");
    solve->add_option("--tol-target", paths.tol_target, "Override target tolerance");
    solve->add_option("--seed", paths.seed, "Override the problem seed");
    solve->add_option("--batch", paths.batch, "Solve every .json file in a directory");
    solve->add_option("--dump-matrices", paths.dump_matrices,
                      "Write the rigidity matrix of the final configuration");

    std::string chk_problem, chk_solution;
    double chk_tol = 1e-8;
    CLI::App* check = app.add_subcommand("check", "Verify a solution file");
    check->add_option("problem", chk_problem, "Problem JSON file (optional)");
    check->add_option("solution", chk_solution, "Solution JSON file");
    check->add_option("--residual-tol", chk_tol, "Residual tolerance");

    std::string r_problem, r_solution, r_out;
    int r_free_i = -1, r_free_j = -1;
    bool r_vel = false;
    CLI::App* render = app.add_subcommand("render", "Render a solution to SVG");
    render->add_option("problem", r_problem)->required();
    render->add_option("solution", r_solution)->required();
    render->add_option("--out", r_out)->required();
    render->add_option("--free-i", r_free_i, "Free edge endpoint");
    render->add_option("--free-j", r_free_j, "Free edge endpoint");
    render->add_flag("--velocities", r_vel, "Draw the flow velocity field");

    std::string b_problem, b_out;
    CLI::App* boot = app.add_subcommand("bootstrap", "Tangency packing only");
    boot->add_option("problem", b_problem)->required();
    boot->add_option("--out", b_out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) {
            if (paths.input.empty() && paths.batch.empty())
                katflow::fail(ErrorKind::InvalidArgument, "solve needs an input or --batch");
            return cmd_solve(paths);
        }
        if (check->parsed()) {
            if (chk_solution.empty()) {
                chk_solution = chk_problem;
                chk_problem.clear();
            }
            return cmd_check(chk_problem, chk_solution, chk_tol);
        }
        if (render->parsed())
            return cmd_render(r_problem, r_solution, r_out, r_free_i, r_free_j, r_vel);
        if (boot->parsed()) return cmd_bootstrap(b_problem, b_out);
    } catch (const Error& err) {
        emit_error(err);
        return exit_code_for(err.kind());
    } catch (const std::exception& ex) {
        std::cerr << "{\"error\":{\"kind\":\"Internal\",\"exit\":1,\"detail\":\""
                  << ex.what() << "\"}}\n";
        return 1;
    }
    return 0;
}
