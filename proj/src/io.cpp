#include "katflow/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "katflow/rigidity.hpp"

namespace katflow {

using json = nlohmann::ordered_json;

namespace {

void require_keys(const json& obj, const char* where, std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) { known = true; break; }
        if (!known)
            fail(ErrorKind::ParseError,
                 std::string("unknown field \"") + it.key() + "\" in " + where);
    }
}

json parse_json(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) fail(ErrorKind::ParseError, "malformed JSON");
    return j;
}

double to_inversive(double value, const std::string& unit) {
    if (unit == "inversive") return value;
    if (unit == "angle_radians") return std::cos(value);
    if (unit == "angle_degrees") return std::cos(value * M_PI / 180.0);
    fail(ErrorKind::ParseError, "unknown weight unit \"" + unit + "\"");
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

} // namespace

FlowOptions ProblemOptions::flow_options() const {
    FlowOptions fo;
    fo.tol_target = tol_target;
    fo.rtol = rtol;
    fo.record_trace = trace;
    return fo;
}

std::string content_hash(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ull;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::IoError, "cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::IoError, "cannot write " + path);
    out << content;
    if (!out) fail(ErrorKind::IoError, "short write to " + path);
}

Problem parse_problem(const std::string& text) {
    const json j = parse_json(text);
    if (!j.is_object()) fail(ErrorKind::ParseError, "problem file must be a JSON object");
    require_keys(j, "problem", {"format", "faces", "weights", "options"});
    if (!j.contains("format") || j["format"] != kProblemFormat)
        fail(ErrorKind::ParseError, std::string("expected format tag ") + kProblemFormat);
    if (!j.contains("faces") || !j["faces"].is_array())
        fail(ErrorKind::ParseError, "missing faces array");

    std::vector<std::array<int, 3>> faces;
    for (const auto& f : j["faces"]) {
        if (!f.is_array() || f.size() != 3)
            fail(ErrorKind::ParseError, "each face must be a triple of vertex indices");
        faces.push_back({f[0].get<int>(), f[1].get<int>(), f[2].get<int>()});
    }

    Problem prob;
    prob.complex = build_complex(faces);

    if (!j.contains("weights") || !j["weights"].is_array())
        fail(ErrorKind::ParseError, "missing weights array");
    const int m = prob.complex.edge_count();
    prob.weights.w.assign(m, -1.0);
    for (const auto& entry : j["weights"]) {
        if (!entry.is_object()) fail(ErrorKind::ParseError, "weight entries must be objects");
        require_keys(entry, "weight entry", {"i", "j", "value", "unit"});
        const int i = entry.at("i").get<int>();
        const int jj = entry.at("j").get<int>();
        const double raw = entry.at("value").get<double>();
        const std::string unit = entry.contains("unit") ? entry["unit"].get<std::string>()
                                                        : std::string("inversive");
        const int e = prob.complex.edge_index(i, jj);
        if (e < 0)
            fail(ErrorKind::ParseError, "weight given for non-edge " + std::to_string(i) + "-" +
                                            std::to_string(jj));
        if (prob.weights[e] >= 0.0)
            fail(ErrorKind::ParseError, "edge " + std::to_string(i) + "-" + std::to_string(jj) +
                                            " weighted twice");
        prob.weights[e] = to_inversive(raw, unit);
    }
    for (int e = 0; e < m; ++e)
        if (prob.weights[e] < 0.0)
            fail(ErrorKind::ParseError,
                 "edge " + std::to_string(prob.complex.edges[e][0]) + "-" +
                     std::to_string(prob.complex.edges[e][1]) + " is unweighted");
    if (!prob.weights.shallow())
        fail(ErrorKind::ParseError, "weights must lie in [0,1]");

    if (j.contains("options")) {
        const json& o = j["options"];
        require_keys(o, "options", {"tol_target", "rtol", "seed", "trace"});
        if (o.contains("tol_target")) prob.options.tol_target = o["tol_target"].get<double>();
        if (o.contains("rtol")) prob.options.rtol = o["rtol"].get<double>();
        if (o.contains("seed")) prob.options.seed = o["seed"].get<unsigned long>();
        if (o.contains("trace")) prob.options.trace = o["trace"].get<bool>();
    }
    return prob;
}

Problem load_problem(const std::string& path) { return parse_problem(read_file(path)); }

std::string write_problem(const std::vector<std::array<int, 3>>& faces,
                          const std::vector<std::array<double, 3>>& rows,
                          const ProblemOptions& options) {
    json j;
    j["format"] = kProblemFormat;
    j["faces"] = json::array();
    for (const auto& f : faces) j["faces"].push_back({f[0], f[1], f[2]});
    j["weights"] = json::array();
    for (const auto& r : rows) {
        json e;
        e["i"] = static_cast<int>(r[0]);
        e["j"] = static_cast<int>(r[1]);
        e["value"] = r[2];
        e["unit"] = "inversive";
        j["weights"].push_back(e);
    }
    json o;
    o["tol_target"] = options.tol_target;
    o["rtol"] = options.rtol;
    o["seed"] = options.seed;
    o["trace"] = options.trace;
    j["options"] = o;
    return j.dump(2) + "\n";
}

Solution make_solution(const TriangulatedPolyhedron& p, const EdgeWeights& w,
                       const Configuration& cfg, const std::string& input_hash,
                       const ProblemOptions& options) {
    Solution s;
    s.cfg = cfg;
    for (int e = 0; e < p.edge_count(); ++e) {
        const int i = p.edges[e][0], j = p.edges[e][1];
        s.edges.push_back({i, j, w[e], inversive_distance(cfg[i], cfg[j])});
    }
    const MonitorReport mon = run_monitors(p, cfg, ShallowMode::Strict);
    s.geodesic = mon.geodesic.ok;
    s.convex = mon.convex.ok;
    s.strictly_convex = mon.convex.strict;
    s.shallow = mon.shallow.ok;
    s.nonedge_separation = mon.shallow.nonedge_ok;
    s.min_spherical_radius = mon.min_spherical_radius;
    s.input_hash = input_hash;
    s.tol_target = options.tol_target;
    s.seed = options.seed;
    return s;
}

std::string write_solution(const Solution& s) {
    json j;
    j["format"] = kSolutionFormat;
    j["disks"] = json::array();
    for (const Disk4& d : s.cfg.disks) j["disks"].push_back({d.a, d.b, d.c, d.d});
    j["edges"] = json::array();
    for (const SolutionEdge& e : s.edges) {
        json row;
        row["i"] = e.i;
        row["j"] = e.j;
        row["target"] = e.target;
        row["achieved"] = e.achieved;
        j["edges"].push_back(row);
    }
    json mon;
    mon["geodesic"] = s.geodesic;
    mon["convex"] = s.convex;
    mon["strictly_convex"] = s.strictly_convex;
    mon["shallow"] = s.shallow;
    mon["nonedge_separation"] = s.nonedge_separation;
    mon["min_spherical_radius"] = s.min_spherical_radius;
    j["monitors"] = mon;
    json prov;
    prov["input_hash"] = s.input_hash;
    prov["tol_target"] = s.tol_target;
    prov["seed"] = s.seed;
    prov["software_version"] = kSoftwareVersion;
    j["provenance"] = prov;
    return j.dump(2) + "\n";
}

Solution parse_solution(const std::string& text) {
    const json j = parse_json(text);
    if (!j.is_object()) fail(ErrorKind::ParseError, "solution file must be a JSON object");
    require_keys(j, "solution", {"format", "disks", "edges", "monitors", "provenance"});
    if (!j.contains("format") || j["format"] != kSolutionFormat)
        fail(ErrorKind::ParseError, std::string("expected format tag ") + kSolutionFormat);

    Solution s;
    for (const auto& row : j.at("disks")) {
        if (!row.is_array() || row.size() != 4)
            fail(ErrorKind::ParseError, "disk rows must be 4-vectors");
        Disk4 d{row[0].get<double>(), row[1].get<double>(), row[2].get<double>(),
                row[3].get<double>()};
        d.normalized = std::abs(lorentz_inner(d, d) + 1.0) <= 1e-9;
        s.cfg.disks.push_back(d);
    }
    for (const auto& row : j.at("edges")) {
        require_keys(row, "edge entry", {"i", "j", "target", "achieved"});
        s.edges.push_back({row.at("i").get<int>(), row.at("j").get<int>(),
                           row.at("target").get<double>(), row.at("achieved").get<double>()});
    }
    const json& mon = j.at("monitors");
    require_keys(mon, "monitors",
                 {"geodesic", "convex", "strictly_convex", "shallow", "nonedge_separation",
                  "min_spherical_radius"});
    s.geodesic = mon.at("geodesic").get<bool>();
    s.convex = mon.at("convex").get<bool>();
    s.strictly_convex = mon.at("strictly_convex").get<bool>();
    s.shallow = mon.at("shallow").get<bool>();
    s.nonedge_separation = mon.at("nonedge_separation").get<bool>();
    s.min_spherical_radius = mon.at("min_spherical_radius").get<double>();
    const json& prov = j.at("provenance");
    require_keys(prov, "provenance", {"input_hash", "tol_target", "seed", "software_version"});
    s.input_hash = prov.at("input_hash").get<std::string>();
    s.tol_target = prov.at("tol_target").get<double>();
    s.seed = prov.at("seed").get<unsigned long>();
    return s;
}

Solution load_solution(const std::string& path) { return parse_solution(read_file(path)); }

std::string write_trace_jsonl(const std::vector<FlowTrace>& traces,
                              const TriangulatedPolyhedron& p) {
    std::ostringstream os;
    for (const FlowTrace& tr : traces) {
        for (const TraceRecord& rec : tr.records) {
            json row;
            row["edge"] = {p.edges[tr.free_edge][0], p.edges[tr.free_edge][1]};
            row["t"] = rec.t;
            row["d_e"] = rec.d_e;
            row["min_radius"] = rec.min_radius;
            row["monitors_ok"] = rec.monitors_ok;
            row["step"] = rec.step;
            os << row.dump() << "\n";
        }
        json end;
        end["edge"] = {p.edges[tr.free_edge][0], p.edges[tr.free_edge][1]};
        end["stop"] = stop_reason_name(tr.stop);
        os << end.dump() << "\n";
    }
    return os.str();
}

namespace {

Eigen::Matrix3d rotation_taking(const Eigen::Vector3d& from, const Eigen::Vector3d& to) {
    const Eigen::Vector3d f = from.normalized(), t = to.normalized();
    const double c = f.dot(t);
    if (c > 1.0 - 1e-12) return Eigen::Matrix3d::Identity();
    Eigen::Vector3d axis = f.cross(t);
    if (axis.norm() < 1e-12) {
        // Antipodal: rotate by pi about any perpendicular axis.
        axis = f.unitOrthogonal();
        return Eigen::AngleAxisd(M_PI, axis).toRotationMatrix();
    }
    return Eigen::AngleAxisd(std::acos(std::clamp(c, -1.0, 1.0)), axis.normalized())
        .toRotationMatrix();
}

struct Projector {
    Eigen::Matrix3d rot = Eigen::Matrix3d::Identity();
    double clamp_box = 100.0;

    Eigen::Vector2d project(const Eigen::Vector3d& s) const {
        const Eigen::Vector3d q = rot * s;
        const double denom = std::max(1e-8, 1.0 - q.z());
        Eigen::Vector2d out{q.x() / denom, q.y() / denom};
        out.x() = std::clamp(out.x(), -clamp_box, clamp_box);
        out.y() = std::clamp(out.y(), -clamp_box, clamp_box);
        return out;
    }
};

} // namespace

std::string render_svg(const TriangulatedPolyhedron& p, const Configuration& cfg,
                       const RenderStyle& style) {
    std::ostringstream svg;
    const double ext = style.view_half_extent;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << style.width << "\" height=\""
        << style.width << "\" viewBox=\"" << fmt(-ext) << " " << fmt(-ext) << " " << fmt(2 * ext)
        << " " << fmt(2 * ext) << "\">\n";
    svg << "<rect x=\"" << fmt(-ext) << "\" y=\"" << fmt(-ext) << "\" width=\"" << fmt(2 * ext)
        << "\" height=\"" << fmt(2 * ext) << "\" fill=\"white\"/>\n";

    if (cfg.size() == 0) {
        svg << "</svg>\n";
        return svg.str();
    }

    Projector proj;
    const auto centers = disk_centers(cfg);
    if (style.pinned_face >= 0 && style.pinned_face < p.face_count() && p.face_count() > 0) {
        const auto& f = p.faces[style.pinned_face];
        const Eigen::Vector3d centroid =
            (centers[f[0]] + centers[f[1]] + centers[f[2]]).normalized();
        proj.rot = rotation_taking(centroid, Eigen::Vector3d{0.0, 0.0, -1.0});
    }

    LorentzMap view;
    view.m.block<3, 3>(1, 1) = proj.rot;

    // Boundary circles.
    for (int v = 0; v < cfg.size(); ++v) {
        const PlanarDisk pd = stereographic_drop(apply_lorentz(view, cfg[v]));
        if (pd.is_line) {
            // Render the boundary line clipped to the viewport.
            const Eigen::Vector2d n{pd.nx, pd.ny}, tdir{-pd.ny, pd.nx};
            const Eigen::Vector2d mid = pd.h * n;
            const Eigen::Vector2d a = mid - 2.0 * ext * tdir, b = mid + 2.0 * ext * tdir;
            svg << "<line class=\"disk\" x1=\"" << fmt(a.x()) << "\" y1=\"" << fmt(a.y())
                << "\" x2=\"" << fmt(b.x()) << "\" y2=\"" << fmt(b.y())
                << "\" stroke=\"#2060a0\" stroke-width=\"0.02\"/>\n";
        } else {
            const double r = std::min(std::abs(pd.r), proj.clamp_box);
            svg << "<circle class=\"disk\" cx=\"" << fmt(pd.x) << "\" cy=\"" << fmt(pd.y)
                << "\" r=\"" << fmt(r)
                << "\" fill=\"none\" stroke=\"#2060a0\" stroke-width=\"0.02\"/>\n";
        }
    }

    // Geodesic edges as sampled minor arcs.
    const int kSamples = 32;
    for (int e = 0; e < p.edge_count(); ++e) {
        const Eigen::Vector3d a = centers[p.edges[e][0]], b = centers[p.edges[e][1]];
        const double ang = std::acos(std::clamp(a.dot(b), -1.0, 1.0));
        std::ostringstream pts;
        for (int s = 0; s <= kSamples; ++s) {
            const double t = static_cast<double>(s) / kSamples;
            Eigen::Vector3d q;
            if (ang < 1e-12) q = a;
            else
                q = (std::sin((1.0 - t) * ang) * a + std::sin(t * ang) * b) / std::sin(ang);
            const Eigen::Vector2d pt = proj.project(q.normalized());
            if (s) pts << " ";
            pts << fmt(pt.x()) << "," << fmt(pt.y());
        }
        const bool is_free = (e == style.free_edge);
        svg << "<polyline class=\"" << (is_free ? "edge free" : "edge") << "\" points=\""
            << pts.str() << "\" fill=\"none\" stroke=\"" << (is_free ? "#999999" : "#222222")
            << "\" stroke-width=\"" << (is_free ? "0.045" : "0.015") << "\"/>\n";
    }

    // Velocity vectors at disk centers.
    if (!style.velocities.empty()) {
        double vmax = 0.0;
        std::vector<Eigen::Vector3d> cdots(cfg.size(), Eigen::Vector3d::Zero());
        for (int v = 0; v < cfg.size(); ++v) {
            if (v >= static_cast<int>(style.velocities.size())) break;
            const auto& dv = style.velocities[v];
            const Eigen::Vector3d spatial{cfg[v].b, cfg[v].c, cfg[v].d};
            const Eigen::Vector3d dspatial{dv[1], dv[2], dv[3]};
            const Eigen::Vector3d c = spatial.normalized();
            const Eigen::Vector3d cdot = (dspatial - c.dot(dspatial) * c) / spatial.norm();
            cdots[v] = cdot;
            vmax = std::max(vmax, cdot.norm());
        }
        const double scale = vmax > 0.0 ? 0.35 / vmax : 0.0;
        for (int v = 0; v < cfg.size(); ++v) {
            if (cdots[v].norm() * scale < 1e-6) continue;
            const Eigen::Vector2d from = proj.project(centers[v]);
            const Eigen::Vector2d to =
                proj.project((centers[v] + scale * cdots[v]).normalized());
            svg << "<line class=\"velocity\" x1=\"" << fmt(from.x()) << "\" y1=\""
                << fmt(from.y()) << "\" x2=\"" << fmt(to.x()) << "\" y2=\"" << fmt(to.y())
                << "\" stroke=\"#119911\" stroke-width=\"0.025\"/>\n";
        }
    }

    svg << "</svg>\n";
    return svg.str();
}

bool CheckOutcome::pass(double residual_tol) const {
    if (!monitors.pass(true) || !normalized_ok) return false;
    if (max_residual > residual_tol) return false;
    if (rank_j != expected_rank) return false;
    for (const PinConditioning& pc : pins)
        if (!pc.admissible) return false;
    return true;
}

CheckOutcome check_solution(const TriangulatedPolyhedron& p, const EdgeWeights& w,
                            const Configuration& cfg) {
    CheckOutcome out;
    out.monitors = run_monitors(p, cfg, ShallowMode::Strict);
    out.residuals.resize(p.edge_count());
    for (int e = 0; e < p.edge_count(); ++e) {
        out.residuals[e] =
            std::abs(inversive_distance(cfg[p.edges[e][0]], cfg[p.edges[e][1]]) - w[e]);
        out.max_residual = std::max(out.max_residual, out.residuals[e]);
    }
    for (const Disk4& d : cfg.disks)
        if (std::abs(lorentz_inner(d, d) + 1.0) > 1e-9) out.normalized_ok = false;

    const RigidityMatrix j = assemble_rigidity(p, cfg);
    out.rank_j = numeric_rank(j.m);
    out.expected_rank = 4 * p.n - 6;
    if (p.n >= 5) {
        for (int fi = 0; fi < p.face_count(); ++fi) {
            PinConditioning pc;
            pc.face = fi;
            const UnmarkedMatrix ju = unmarked_matrix(j, p.faces[fi], p);
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(ju.m);
            const auto& sv = svd.singularValues();
            const double smin = sv[sv.size() - 1];
            pc.cond = smin > 0.0 ? sv[0] / smin : std::numeric_limits<double>::infinity();
            pc.admissible = pc.cond < 1e8;
            out.pins.push_back(pc);
        }
    }
    return out;
}

} // namespace katflow
