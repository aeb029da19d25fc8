#include "obstacle/cli.hpp"

#include "obstacle/benchmark.hpp"
#include "obstacle/error.hpp"
#include "obstacle/report.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace obstacle {

namespace {

namespace fs = std::filesystem;

struct CommonOptions {
    int n{5};
    int levels{4};
    int refine{0};
    double r0{0.7};
    double c{1.0};
    int max_iter{100};
    double tol{1e-12};
    std::string out_dir{"."};
    bool per_element{false};
    int quad_degree{0}; // 0 = defaults
    std::string problem{"benchmark"};
    bool no_timings{false};
    bool estimators{false};
    bool verbose{false};
    std::string input;
};

ManufacturedProblem make_problem(const std::string& name, double r0)
{
    if (name == "benchmark") {
        return BenchmarkProblem{r0}.as_problem();
    }
    if (name == "smooth_cubic") {
        return smooth_cubic_problem();
    }
    if (name == "quadratic_patch") {
        return quadratic_patch_problem();
    }
    throw InputError("unknown problem '" + name + "'");
}

void validate(const CommonOptions& o)
{
    if (!(o.r0 > 0.0)) {
        throw InputError("--r0 must be positive");
    }
    if (!(o.c > 0.0)) {
        throw InputError("--c must be positive");
    }
    if (o.n < 1) {
        throw InputError("--n must be >= 1");
    }
    if (o.max_iter < 1) {
        throw InputError("--max-iter must be >= 1");
    }
    if (!(o.tol > 0.0)) {
        throw InputError("--tol must be positive");
    }
    if (o.quad_degree != 0 && (o.quad_degree < 1 || o.quad_degree > kMaxQuadratureDegree)) {
        throw InputError("--quad-degree-override must be in 1.." + std::to_string(kMaxQuadratureDegree));
    }
}

SolverConfig solver_config(const CommonOptions& o)
{
    SolverConfig cfg;
    cfg.c = o.c;
    cfg.max_iterations = o.max_iter;
    cfg.linear_tolerance = o.tol;
    cfg.log_progress = o.verbose;
    return cfg;
}

QuadratureDegrees degrees(const CommonOptions& o)
{
    QuadratureDegrees d;
    if (o.quad_degree != 0) {
        d.load = o.quad_degree;
    }
    return d;
}

fs::path prepare_out_dir(const std::string& dir)
{
    fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) {
        throw InputError("cannot create output directory '" + dir + "': " + ec.message());
    }
    return p;
}

std::ofstream open_output(const fs::path& path)
{
    std::ofstream out(path);
    if (!out) {
        throw InputError("cannot write '" + path.string() + "'");
    }
    return out;
}

TetMesh rebuild_mesh(int n, int refinements)
{
    TetMesh mesh = build_box_mesh(Box{}, n);
    for (int k = 0; k < refinements; ++k) {
        mesh = uniform_refine(mesh);
    }
    return mesh;
}

nlohmann::json multiplier_summary(const MultiplierField& sigma)
{
    double min_v = 0.0;
    double max_v = 0.0;
    if (!sigma.values.empty()) {
        min_v = *std::min_element(sigma.values.begin(), sigma.values.end());
        max_v = *std::max_element(sigma.values.begin(), sigma.values.end());
    }
    return {{"min", min_v}, {"max", max_v}};
}

int run_solve(const CommonOptions& o)
{
    validate(o);
    if (o.refine < 0) {
        throw InputError("--refine must be >= 0");
    }
    const auto problem = make_problem(o.problem, o.r0);
    const auto dir = prepare_out_dir(o.out_dir);
    const TetMesh mesh = rebuild_mesh(o.n, o.refine);
    const DofMap dofs(mesh);
    const auto quad = degrees(o);
    const ConstrainedSystem system = assemble(mesh, dofs, problem.data(), quad);
    const SolveResult solved = pdas_solve(system, solver_config(o));

    const MultiplierField sigma = compute_sigma_h(mesh, dofs, solved.state.alpha, problem.f, quad);
    const EstimatorReport est = estimate(mesh, dofs, solved.state.alpha, problem.f, problem.obstacle, sigma,
                                         problem.exact, problem.exact_gradient, quad);

    std::vector<double> u_vertices(static_cast<std::size_t>(mesh.num_vertices()));
    for (Index v = 0; v < mesh.num_vertices(); ++v) {
        u_vertices[static_cast<std::size_t>(v)] = solved.state.alpha(dofs.vertex_dof(v));
    }
    const std::array<VtkField, 1> point_data{VtkField{"u_h", u_vertices}};
    const std::array<VtkField, 2> cell_data{VtkField{"sigma_h", sigma.values},
                                            VtkField{"eta1", est.eta1.contributions}};
    {
        auto out = open_output(dir / "solution.vtk");
        write_vtk(out, mesh, point_data, cell_data);
    }

    StoredSolution stored{o.problem, o.n, o.refine, o.r0, o.c, solved.state.alpha, solved.state.beta};
    {
        auto out = open_output(dir / "solution.json");
        out << to_json(stored).dump() << '\n';
    }

    nlohmann::json report{{"schema", "obstacle-report"},
                          {"version", kReportSchemaVersion},
                          {"command", "solve"},
                          {"problem", o.problem},
                          {"r0", o.r0},
                          {"n", o.n},
                          {"refinements", o.refine},
                          {"h", mesh.mesh_size()},
                          {"dofs", dofs.size()},
                          {"elements", mesh.num_tets()},
                          {"solver", to_json(solved.report)},
                          {"multiplier", multiplier_summary(sigma)},
                          {"estimators", to_json(est, o.per_element)}};
    if (o.per_element) {
        report["multiplier"]["values"] = sigma.values;
    }
    {
        auto out = open_output(dir / "report.json");
        out << report.dump(2) << '\n';
    }

    std::cout << "h=" << format_sci(mesh.mesh_size()) << " dofs=" << dofs.size()
              << " iterations=" << solved.report.iterations << " status=" << to_string(solved.report.status)
              << " error_h1=" << format_sci(est.error_h1.value_or(0.0)) << " eta1=" << format_sci(est.eta1.total())
              << " eta2=" << format_sci(est.eta2.total()) << '\n';
    return solved.report.converged() ? kExitOk : kExitNotConverged;
}

int run_convergence(const CommonOptions& o)
{
    validate(o);
    if (o.levels < 1) {
        throw InputError("--levels must be >= 1");
    }
    const auto problem = make_problem(o.problem, o.r0);
    const auto dir = prepare_out_dir(o.out_dir);
    StudyConfig cfg;
    cfg.n = o.n;
    cfg.levels = o.levels;
    cfg.solver = solver_config(o);
    cfg.degrees = degrees(o);
    cfg.with_estimators = o.estimators;
    const bool timings = !o.no_timings;

    auto write_results = [&](const std::vector<ConvergenceRow>& rows, bool completed) {
        {
            auto csv = open_output(dir / "convergence.csv");
            write_convergence_csv(csv, rows, timings);
        }
        nlohmann::json levels = nlohmann::json::array();
        for (const auto& row : rows) {
            levels.push_back(to_json(row, timings));
        }
        nlohmann::json j{{"schema", "obstacle-report"},
                         {"version", kReportSchemaVersion},
                         {"command", "convergence"},
                         {"problem", o.problem},
                         {"r0", o.r0},
                         {"c", o.c},
                         {"n", o.n},
                         {"completed", completed},
                         {"levels", levels}};
        auto out = open_output(dir / "convergence.json");
        out << j.dump(2) << '\n';
    };

    const StudyResult result = run_convergence_study(problem, cfg, [&](const std::vector<ConvergenceRow>& rows) {
        const auto& row = rows.back();
        std::cerr << "level=" << row.level << " h=" << format_sci(row.h) << " error_h1=" << format_sci(row.error_h1)
                  << " order=" << (row.order ? format_sci(*row.order) : std::string("-"))
                  << " iterations=" << row.iterations << " status=" << to_string(row.status) << '\n';
        write_results(rows, false);
    });
    write_results(result.rows, result.completed);
    write_convergence_csv(std::cout, result.rows, timings);
    return result.completed ? kExitOk : kExitNotConverged;
}

int run_estimate(const CommonOptions& o)
{
    const fs::path input = o.input.empty() ? fs::path(o.out_dir) / "solution.json" : fs::path(o.input);
    std::ifstream in(input);
    if (!in) {
        throw InputError("cannot read '" + input.string() + "'");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed solution file: ") + e.what());
    }
    const StoredSolution stored = stored_solution_from_json(j);
    CommonOptions check = o;
    check.r0 = stored.r0;
    check.n = std::max(stored.n, 1);
    validate(check);
    const auto problem = make_problem(stored.problem, stored.r0);
    const TetMesh mesh = rebuild_mesh(stored.n, stored.refinements);
    const DofMap dofs(mesh);
    if (stored.alpha.size() != dofs.size()) {
        throw InputError("stored solution does not match the rebuilt mesh");
    }
    const auto quad = degrees(o);
    const MultiplierField sigma = compute_sigma_h(mesh, dofs, stored.alpha, problem.f, quad);
    const EstimatorReport est = estimate(mesh, dofs, stored.alpha, problem.f, problem.obstacle, sigma,
                                         problem.exact, problem.exact_gradient, quad);
    const auto dir = prepare_out_dir(o.out_dir);
    nlohmann::json report{{"schema", "obstacle-report"},
                          {"version", kReportSchemaVersion},
                          {"command", "estimate"},
                          {"problem", stored.problem},
                          {"r0", stored.r0},
                          {"h", mesh.mesh_size()},
                          {"multiplier", multiplier_summary(sigma)},
                          {"estimators", to_json(est, o.per_element)}};
    auto out = open_output(dir / "estimate.json");
    out << report.dump(2) << '\n';
    std::cout << "eta1=" << format_sci(est.eta1.total()) << " eta2=" << format_sci(est.eta2.total())
              << " total=" << format_sci(est.total) << '\n';
    return kExitOk;
}

void add_solver_options(CLI::App* cmd, CommonOptions& o)
{
    cmd->add_option("--r0", o.r0, "Free-boundary radius of the benchmark")->capture_default_str();
    cmd->add_option("--c", o.c, "Complementarity scaling c > 0")->capture_default_str();
    cmd->add_option("--max-iter", o.max_iter, "Maximum active-set iterations")->capture_default_str();
    cmd->add_option("--tol", o.tol, "Relative tolerance of the inner linear solves")->capture_default_str();
    cmd->add_option("--out-dir", o.out_dir, "Output directory")->capture_default_str();
    cmd->add_flag("--per-element", o.per_element, "Include per-element arrays in JSON reports");
    cmd->add_option("--quad-degree-override", o.quad_degree,
                    "Quadrature degree for load, error and estimator integrals");
    cmd->add_option("--problem", o.problem, "benchmark | smooth_cubic | quadratic_patch")->capture_default_str();
    cmd->add_flag("--verbose", o.verbose, "Solver progress as key=value lines on stderr");
}

} // namespace

int cli_main(const std::vector<std::string>& args)
{
    CLI::App app{"P2+bubble finite elements for the 3D obstacle problem", "obstacle_cli"};
    app.require_subcommand(1);
    CommonOptions o;

    auto* solve = app.add_subcommand("solve", "Solve on one mesh; writes VTK, solution and report JSON");
    solve->add_option("--n", o.n, "Subdivisions per axis of the initial Kuhn mesh")->capture_default_str();
    solve->add_option("--refine", o.refine, "Uniform refinements of the initial mesh")->capture_default_str();
    add_solver_options(solve, o);

    auto* conv = app.add_subcommand("convergence", "Convergence study under uniform refinement");
    conv->add_option("--n", o.n, "Subdivisions per axis of the initial Kuhn mesh")->capture_default_str();
    conv->add_option("--levels", o.levels, "Number of mesh levels")->capture_default_str();
    conv->add_flag("--no-timings", o.no_timings, "Write 0 in the seconds column for reproducible output");
    conv->add_flag("--estimators", o.estimators, "Also compute estimators and multiplier errors per level");
    add_solver_options(conv, o);

    auto* est = app.add_subcommand("estimate", "Estimators for a stored solve");
    est->add_option("--input", o.input, "solution.json written by 'solve' (default <out-dir>/solution.json)");
    est->add_option("--out-dir", o.out_dir, "Output directory")->capture_default_str();
    est->add_flag("--per-element", o.per_element, "Include per-element arrays");
    est->add_option("--quad-degree-override", o.quad_degree, "Quadrature degree for estimator integrals");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return kExitInputError;
    }

    try {
        if (solve->parsed()) {
            return run_solve(o);
        }
        if (conv->parsed()) {
            return run_convergence(o);
        }
        return run_estimate(o);
    } catch (const SolverError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNotConverged;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInputError;
    }
}

} // namespace obstacle
