#pragma once

#include "emacfem/benchmarks.hpp"
#include "emacfem/io.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <set>

namespace emacfem {

using json = nlohmann::json;

struct MeshSpec {
    std::string type; // "rectangle" or "file"
    int nx = 0, ny = 0;
    std::array<double, 4> bounds = {0.0, 1.0, 0.0, 1.0};
    std::string path;
};

struct SweepSpec {
    std::string parameter; // "h" or "dt"
    std::vector<double> values;
};

struct RunConfig {
    std::string benchmark; // manufactured | gresho | cylinder | custom
    MeshSpec mesh;
    double dt = 0.0;
    double T = 0.0;
    double nu = 0.0;
    bool filter_enabled = true;
    double newton_abs_tol = 1e-10;
    double newton_rel_tol = 1e-8;
    int newton_max_iter = 20;
    double linear_solver_tol = 1e-10;
    std::string output_dir = "emacfem_out";
    int snapshot_every = 100;
    bool emac_pressure_snapshots = false;
    std::optional<SweepSpec> sweep;

    SolverConfig solver_config(double end_time) const {
        SolverConfig s;
        s.dt = dt;
        s.T = end_time;
        s.nu = nu;
        s.newton_abs_tol = newton_abs_tol;
        s.newton_rel_tol = newton_rel_tol;
        s.newton_max_iter = newton_max_iter;
        s.filter_enabled = filter_enabled;
        s.linear_solver_tol = linear_solver_tol;
        return s;
    }
};

namespace detail {

inline double get_number(const json& j, const std::string& key) {
    if (!j.at(key).is_number())
        throw config_error("config: key '" + key + "' must be a number");
    return j.at(key).get<double>();
}

inline int get_integer(const json& j, const std::string& key) {
    if (!j.at(key).is_number_integer())
        throw config_error("config: key '" + key + "' must be an integer");
    return j.at(key).get<int>();
}

inline bool get_boolean(const json& j, const std::string& key) {
    if (!j.at(key).is_boolean())
        throw config_error("config: key '" + key + "' must be a boolean");
    return j.at(key).get<bool>();
}

inline std::string get_string(const json& j, const std::string& key) {
    if (!j.at(key).is_string())
        throw config_error("config: key '" + key + "' must be a string");
    return j.at(key).get<std::string>();
}

inline void reject_unknown(const json& j, const std::set<std::string>& allowed,
                           const std::string& where) {
    for (const auto& [key, value] : j.items())
        if (allowed.find(key) == allowed.end())
            throw config_error("config: unknown key '" + key + "' in " + where);
}

inline MeshSpec parse_mesh_spec(const json& j) {
    reject_unknown(j, {"type", "nx", "ny", "bounds", "path"}, "mesh");
    MeshSpec m;
    m.type = get_string(j, "type");
    if (m.type == "rectangle") {
        m.nx = get_integer(j, "nx");
        m.ny = get_integer(j, "ny");
        if (j.contains("bounds")) {
            if (!j["bounds"].is_array() || j["bounds"].size() != 4)
                throw config_error("config: key 'bounds' must be an array of 4 numbers");
            for (int k = 0; k < 4; ++k) m.bounds[k] = j["bounds"][k].get<double>();
        }
    } else if (m.type == "file") {
        m.path = get_string(j, "path");
        if (!std::filesystem::exists(m.path))
            throw config_error("config: mesh file '" + m.path + "' does not exist");
    } else {
        throw config_error("config: mesh type must be 'rectangle' or 'file'");
    }
    return m;
}

} // namespace detail

// Strict schema: unknown keys are rejected, per-benchmark defaults filled in.
inline RunConfig parse_config_json(const json& j) {
    detail::reject_unknown(j,
                           {"benchmark", "mesh", "dt", "T", "nu", "filter_enabled",
                            "newton_abs_tol", "newton_rel_tol", "newton_max_iter",
                            "linear_solver_tol", "output_dir", "snapshot_every",
                            "emac_pressure_snapshots", "sweep"},
                           "top level");
    if (!j.contains("benchmark"))
        throw config_error("config: missing key 'benchmark' (string)");

    RunConfig c;
    c.benchmark = detail::get_string(j, "benchmark");
    if (c.benchmark == "manufactured") {
        c.nu = 1.0;
        c.dt = 1e-5;
        c.T = 1e-4;
        c.mesh = {"rectangle", 8, 8, {0.0, 1.0, 0.0, 1.0}, ""};
    } else if (c.benchmark == "gresho") {
        c.nu = 0.0;
        c.dt = 0.025;
        c.T = 8.0;
        c.mesh = {"rectangle", 48, 48, {-0.5, 0.5, -0.5, 0.5}, ""};
    } else if (c.benchmark == "cylinder") {
        c.nu = CylinderProblem::nu;
        c.dt = CylinderProblem::dt;
        c.T = CylinderProblem::T;
        c.mesh.type.clear(); // the mesh file is mandatory
    } else if (c.benchmark == "custom") {
        c.mesh.type.clear();
    } else {
        throw config_error("config: benchmark must be one of manufactured, gresho, cylinder, "
                           "custom (got '" + c.benchmark + "')");
    }

    if (j.contains("mesh")) c.mesh = detail::parse_mesh_spec(j["mesh"]);
    if (j.contains("dt")) c.dt = detail::get_number(j, "dt");
    if (j.contains("T")) c.T = detail::get_number(j, "T");
    if (j.contains("nu")) c.nu = detail::get_number(j, "nu");
    if (j.contains("filter_enabled")) c.filter_enabled = detail::get_boolean(j, "filter_enabled");
    if (j.contains("newton_abs_tol")) c.newton_abs_tol = detail::get_number(j, "newton_abs_tol");
    if (j.contains("newton_rel_tol")) c.newton_rel_tol = detail::get_number(j, "newton_rel_tol");
    if (j.contains("newton_max_iter")) c.newton_max_iter = detail::get_integer(j, "newton_max_iter");
    if (j.contains("linear_solver_tol"))
        c.linear_solver_tol = detail::get_number(j, "linear_solver_tol");
    if (j.contains("output_dir")) c.output_dir = detail::get_string(j, "output_dir");
    if (j.contains("snapshot_every")) c.snapshot_every = detail::get_integer(j, "snapshot_every");
    if (j.contains("emac_pressure_snapshots"))
        c.emac_pressure_snapshots = detail::get_boolean(j, "emac_pressure_snapshots");
    if (j.contains("sweep")) {
        detail::reject_unknown(j["sweep"], {"parameter", "values"}, "sweep");
        SweepSpec s;
        s.parameter = detail::get_string(j["sweep"], "parameter");
        if (s.parameter != "h" && s.parameter != "dt")
            throw config_error("config: sweep parameter must be 'h' or 'dt'");
        if (!j["sweep"].contains("values") || !j["sweep"]["values"].is_array() ||
            j["sweep"]["values"].empty())
            throw config_error("config: sweep values must be a non-empty array of numbers");
        for (const auto& v : j["sweep"]["values"]) s.values.push_back(v.get<double>());
        c.sweep = std::move(s);
    }

    if (c.mesh.type.empty())
        throw config_error("config: benchmark '" + c.benchmark + "' requires a mesh section" +
                           (c.benchmark == "cylinder" ? " with a mesh file" : ""));
    if (c.benchmark == "cylinder" && c.mesh.type != "file")
        throw config_error("config: the cylinder benchmark requires a mesh file");
    if (c.benchmark == "custom" && !(j.contains("dt") && j.contains("T") && j.contains("nu")))
        throw config_error("config: custom benchmark requires explicit dt, T, nu");
    if (!(c.dt > 0.0) || !(c.T > 0.0))
        throw config_error("config: dt and T must be positive");
    if (c.snapshot_every < 1) throw config_error("config: snapshot_every must be >= 1");
    return c;
}

inline RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("parse_config: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw config_error("parse_config: " + path + ": " + e.what());
    }
    return parse_config_json(j);
}

namespace detail {

struct BenchmarkSetup {
    Mesh mesh;
    DirichletBC bc;
    std::optional<VelocityFn> forcing;
    VelocityFn initial;
    std::optional<VelocityFn> exact_velocity;
    std::optional<GradFn> exact_gradient;
    bool error_vs_initial = false; // steady reference: drift from the initial field
    std::string force_marker;      // non-empty: report drag/lift on this marker
};

inline BenchmarkSetup make_setup(const RunConfig& c) {
    BenchmarkSetup s;
    s.mesh = (c.mesh.type == "rectangle")
                 ? generate_rectangle(c.mesh.nx, c.mesh.ny, c.mesh.bounds)
                 : load_msh(c.mesh.path);
    const VelocityFn zero = [](double, double, double) { return Vec2{0.0, 0.0}; };
    if (c.benchmark == "manufactured") {
        s.bc = {{"all", ManufacturedProblem::velocity_fn()}};
        s.forcing = ManufacturedProblem::forcing_fn();
        s.initial = ManufacturedProblem::velocity_fn();
        s.exact_velocity = ManufacturedProblem::velocity_fn();
        s.exact_gradient = ManufacturedProblem::gradient_fn();
    } else if (c.benchmark == "gresho") {
        s.bc = {{"all", zero}};
        s.initial = GreshoProblem::velocity_fn();
        s.error_vs_initial = true;
    } else if (c.benchmark == "cylinder") {
        s.bc = CylinderProblem::boundary_conditions();
        s.initial = zero;
        s.force_marker = "cylinder";
    } else { // custom: homogeneous Dirichlet, rest from the config
        s.bc = {{"all", zero}};
        s.initial = zero;
    }
    return s;
}

} // namespace detail

struct RunResult {
    int steps = 0;
    std::string output_dir;
    json summary;
    std::vector<DiagnosticsRecord> records;
};

// Full simulation: per-step CSV diagnostics, VTK snapshots at the configured
// cadence plus first/last, and a summary JSON. A solver failure leaves a
// FAILED marker next to the partial outputs.
inline RunResult run(const RunConfig& c) {
    namespace fs = std::filesystem;
    fs::create_directories(c.output_dir);
    try {
        detail::BenchmarkSetup setup = detail::make_setup(c);
        const TaylorHoodSpace sp = build_taylor_hood(setup.mesh);

        const long long nsteps = std::llround(c.T / c.dt);
        if (nsteps < 1) throw config_error("run: T/dt gives no steps");
        const double t_end = static_cast<double>(nsteps) * c.dt;

        EmacStepper stepper(sp, c.solver_config(t_end), setup.bc, setup.forcing);
        DiagnosticsContext ctx(sp, stepper.mass(), stepper.stiffness_unit());
        History h = History::from_initial(sp, setup.initial);
        const Vector u0 = h.u_prev;

        RunResult out;
        out.output_dir = c.output_dir;

        DiagnosticsCsv csv(c.output_dir + "/diagnostics.csv");
        auto snapshot_path = [&](long long n) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "/snap_%06lld.vtk", n);
            return c.output_dir + buf;
        };

        DiagnosticsRecord first;
        first.t = 0.0;
        first.energy = ctx.kinetic_energy(u0);
        const auto mom0 = ctx.momentum(u0);
        first.momentum_x = mom0[0];
        first.momentum_y = mom0[1];
        first.angular_momentum = ctx.angular_momentum(u0);
        first.g_norm_sq = ctx.g_norm_sq_pair(u0, u0);
        if (setup.exact_velocity)
            first.l2_error = std::sqrt(l2_error_sq(sp, u0, *setup.exact_velocity, 0.0));
        else if (setup.error_vs_initial)
            first.l2_error = 0.0;
        csv.write_row(first);
        out.records.push_back(first);
        write_vtk(sp, u0, Vector::Zero(sp.n_pressure), snapshot_path(0),
                  !c.emac_pressure_snapshots);

        EnergyBalanceAccumulator balance;
        std::optional<ErrorNorm21> err21;
        if (setup.exact_gradient) err21.emplace(*setup.exact_gradient);

        double drift_m1 = 0.0, drift_m2 = 0.0, drift_am = 0.0;
        double cd_max = -1e300, cl_max = -1e300, t_cd = 0.0, t_cl = 0.0;
        long long newton_total = 0;

        for (long long n = 0; n < nsteps; ++n) {
            const Vector level_prev = h.u_prev;   // u^n
            const Vector level_prev2 = h.u_prev2; // u^{n-1}
            AdvanceResult adv = advance(stepper, h);
            const Vector& u_new = adv.state.u;
            newton_total += adv.newton_iters;

            DiagnosticsRecord r;
            r.t = adv.state.t;
            r.newton_iters = adv.newton_iters;
            r.energy = ctx.kinetic_energy(u_new);
            const auto mom = ctx.momentum(u_new);
            r.momentum_x = mom[0];
            r.momentum_y = mom[1];
            r.angular_momentum = ctx.angular_momentum(u_new);
            r.g_norm_sq = ctx.g_norm_sq_pair(u_new, level_prev);
            const auto diss = ctx.dissipation_split(u_new, level_prev, level_prev2, c.nu, c.dt);
            r.numerical_dissipation = diss.first;
            r.physical_dissipation = diss.second;
            balance.add_step(ctx, u_new, level_prev, level_prev2, adv.forcing, c.nu, c.dt);

            if (setup.exact_velocity)
                r.l2_error = std::sqrt(l2_error_sq(sp, u_new, *setup.exact_velocity, r.t));
            else if (setup.error_vs_initial) {
                const Vector diff = u_new - u0;
                r.l2_error = std::sqrt(ctx.l2_norm_sq(diff));
            }
            if (err21) err21->add_state(sp, u_new, r.t);

            if (!setup.force_marker.empty()) {
                const auto fc =
                    drag_lift_from_residual(sp, adv.momentum_residual, setup.force_marker);
                r.drag = fc.drag;
                r.lift = fc.lift;
                if (fc.drag > cd_max) {
                    cd_max = fc.drag;
                    t_cd = r.t;
                }
                if (fc.lift > cl_max) {
                    cl_max = fc.lift;
                    t_cl = r.t;
                }
            }

            drift_m1 = std::max(drift_m1, std::abs(r.momentum_x - first.momentum_x));
            drift_m2 = std::max(drift_m2, std::abs(r.momentum_y - first.momentum_y));
            drift_am = std::max(drift_am, std::abs(r.angular_momentum - first.angular_momentum));

            csv.write_row(r);
            out.records.push_back(r);
            if ((n + 1) % c.snapshot_every == 0 || n + 1 == nsteps)
                write_vtk(sp, u_new, adv.state.P, snapshot_path(n + 1),
                          !c.emac_pressure_snapshots);
        }

        out.steps = static_cast<int>(nsteps);
        out.summary = {
            {"benchmark", c.benchmark},
            {"filter_enabled", c.filter_enabled},
            {"steps", nsteps},
            {"dt", c.dt},
            {"T", t_end},
            {"nu", c.nu},
            {"n_velocity", sp.n_velocity},
            {"n_pressure", sp.n_pressure},
            {"total_dofs", sp.n_velocity + sp.n_pressure},
            {"newton_iters_total", newton_total},
            {"final_energy", out.records.back().energy},
            {"momentum_drift_max", std::max(drift_m1, drift_m2)},
            {"angular_momentum_drift_max", drift_am},
            {"energy_balance_residual", balance.residual()},
        };
        if (err21) out.summary["error_2_1"] = err21->value(c.dt);
        if (setup.exact_velocity || setup.error_vs_initial)
            out.summary["final_l2_error"] = out.records.back().l2_error;
        if (!setup.force_marker.empty()) {
            out.summary["drag_max"] = {{"value", cd_max}, {"t", t_cd}};
            out.summary["lift_max"] = {{"value", cl_max}, {"t", t_cl}};
        }

        std::ofstream js(c.output_dir + "/summary.json");
        if (!js) throw io_error("run: cannot write summary.json");
        js << out.summary.dump(2) << "\n";
        return out;
    } catch (const solver_error& e) {
        std::ofstream marker(c.output_dir + "/FAILED");
        marker << e.what() << "\n";
        throw;
    }
}

struct CompareResult {
    RunResult filtered;
    RunResult unfiltered;
    json summary;
};

// Runs both schemes from identical initial data and emits a side-by-side
// delta table plus a joint summary.
inline CompareResult compare_schemes(const RunConfig& c) {
    RunConfig cf = c;
    cf.filter_enabled = true;
    cf.output_dir = c.output_dir + "/filtered";
    RunConfig cu = c;
    cu.filter_enabled = false;
    cu.output_dir = c.output_dir + "/unfiltered";

    CompareResult out;
    out.filtered = run(cf);
    out.unfiltered = run(cu);

    std::filesystem::create_directories(c.output_dir);
    std::ofstream delta(c.output_dir + "/compare.csv");
    if (!delta) throw io_error("compare: cannot write compare.csv");
    delta << "t,energy_filtered,energy_unfiltered,delta_energy,l2_error_filtered,"
             "l2_error_unfiltered\n";
    const size_t rows = std::min(out.filtered.records.size(), out.unfiltered.records.size());
    for (size_t i = 0; i < rows; ++i) {
        const auto& a = out.filtered.records[i];
        const auto& b = out.unfiltered.records[i];
        delta << detail::fmt17(a.t) << ',' << detail::fmt17(a.energy) << ','
              << detail::fmt17(b.energy) << ',' << detail::fmt17(a.energy - b.energy) << ','
              << detail::fmt17(a.l2_error) << ',' << detail::fmt17(b.l2_error) << '\n';
    }

    out.summary = {{"filtered", out.filtered.summary}, {"unfiltered", out.unfiltered.summary}};
    std::ofstream js(c.output_dir + "/compare_summary.json");
    if (!js) throw io_error("compare: cannot write compare_summary.json");
    js << out.summary.dump(2) << "\n";
    return out;
}

struct SweepResult {
    std::vector<double> values;
    std::vector<double> errors;
    std::vector<double> rates;
    std::vector<json> run_summaries;
    json summary;
};

// Refinement study over h (structured meshes) or dt; errors in the discrete
// L2(0,T;H1) norm, so the benchmark must have an exact solution.
inline SweepResult run_sweep(const RunConfig& c) {
    if (!c.sweep) throw config_error("sweep: config has no sweep section");
    if (c.benchmark != "manufactured")
        throw config_error("sweep: convergence errors need the benchmark with an exact solution");
    if (c.sweep->parameter == "h" && c.mesh.type != "rectangle")
        throw config_error("sweep: h refinement needs a structured rectangle mesh");

    SweepResult out;
    out.values = c.sweep->values;
    for (size_t i = 0; i < out.values.size(); ++i) {
        RunConfig ci = c;
        ci.sweep.reset();
        char sub[48];
        std::snprintf(sub, sizeof sub, "/%s_%02zu", c.sweep->parameter.c_str(), i);
        ci.output_dir = c.output_dir + sub;
        if (c.sweep->parameter == "h") {
            const double v = out.values[i];
            ci.mesh.nx = static_cast<int>(std::lround((c.mesh.bounds[1] - c.mesh.bounds[0]) / v));
            ci.mesh.ny = static_cast<int>(std::lround((c.mesh.bounds[3] - c.mesh.bounds[2]) / v));
            if (ci.mesh.nx < 1 || ci.mesh.ny < 1)
                throw config_error("sweep: h value " + std::to_string(v) + " gives no cells");
        } else {
            ci.dt = out.values[i];
        }
        RunResult r = run(ci);
        out.errors.push_back(r.summary.at("error_2_1").get<double>());
        out.run_summaries.push_back(std::move(r.summary));
    }
    out.rates = convergence_rate(out.errors, out.values);

    std::filesystem::create_directories(c.output_dir);
    std::ofstream table(c.output_dir + "/sweep.csv");
    if (!table) throw io_error("sweep: cannot write sweep.csv");
    table << c.sweep->parameter << ",error_2_1,rate\n";
    for (size_t i = 0; i < out.values.size(); ++i)
        table << detail::fmt17(out.values[i]) << ',' << detail::fmt17(out.errors[i]) << ','
              << (i == 0 ? std::string("nan") : detail::fmt17(out.rates[i - 1])) << '\n';

    out.summary = {{"parameter", c.sweep->parameter},
                   {"values", out.values},
                   {"errors", out.errors},
                   {"rates", out.rates},
                   {"runs", out.run_summaries}};
    std::ofstream js(c.output_dir + "/sweep_summary.json");
    if (!js) throw io_error("sweep: cannot write sweep_summary.json");
    js << out.summary.dump(2) << "\n";
    return out;
}

inline json mesh_info(const std::string& path) {
    const Mesh mesh = load_msh(path);
    const TaylorHoodSpace sp = build_taylor_hood(mesh);
    json markers = json::object();
    std::map<int, int> edge_counts;
    for (const auto& be : mesh.boundary_edges) edge_counts[be.tag]++;
    for (const auto& [tag, name] : mesh.markers)
        markers[name] = {{"tag", tag}, {"boundary_edges", edge_counts[tag]}};
    return {{"path", path},
            {"vertices", mesh.vertices.size()},
            {"triangles", mesh.triangles.size()},
            {"boundary_edges", mesh.boundary_edges.size()},
            {"area", mesh.total_area()},
            {"markers", markers},
            {"n_velocity", sp.n_velocity},
            {"n_pressure", sp.n_pressure},
            {"total_dofs", sp.n_velocity + sp.n_pressure}};
}

} // namespace emacfem
