#include "obstacle/benchmark.hpp"

#include "obstacle/error.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace obstacle {

double benchmark_f(const Point3& x, double r0)
{
    const double r2 = dot(x, x);
    const double s2 = r0 * r0;
    if (r2 > s2) {
        return -4.0 * (2.0 * r2 + 3.0 * (r2 - s2));
    }
    return -8.0 * s2 * (1.0 - r2 + s2);
}

double BenchmarkProblem::f(const Point3& x) const { return benchmark_f(x, r0); }

double BenchmarkProblem::u(const Point3& x) const
{
    const double s = std::max(dot(x, x) - r0 * r0, 0.0);
    return s * s;
}

Vec3 BenchmarkProblem::grad_u(const Point3& x) const
{
    const double s = std::max(dot(x, x) - r0 * r0, 0.0);
    return (4.0 * s) * x;
}

double BenchmarkProblem::sigma(const Point3& x) const
{
    return dot(x, x) <= r0 * r0 ? f(x) : 0.0;
}

ManufacturedProblem BenchmarkProblem::as_problem() const
{
    if (!(r0 > 0.0) || !std::isfinite(r0)) {
        throw InputError("benchmark: r0 must be a positive finite number");
    }
    const BenchmarkProblem p = *this;
    ManufacturedProblem out;
    out.name = "benchmark";
    out.f = [p](const Point3& x) { return p.f(x); };
    out.obstacle = {[](const Point3&) { return 0.0; }, [](const Point3&) { return Vec3{}; }};
    out.exact = [p](const Point3& x) { return p.u(x); };
    out.exact_gradient = [p](const Point3& x) { return p.grad_u(x); };
    out.exact_multiplier = [p](const Point3& x) { return p.sigma(x); };
    return out;
}

ManufacturedProblem smooth_cubic_problem()
{
    ManufacturedProblem out;
    out.name = "smooth_cubic";
    // u = x^3 - 2 y^2 z + x y z + 1, Laplace(u) = 6x - 4z
    out.exact = [](const Point3& p) { return p.x * p.x * p.x - 2.0 * p.y * p.y * p.z + p.x * p.y * p.z + 1.0; };
    out.exact_gradient = [](const Point3& p) {
        return Vec3{3.0 * p.x * p.x + p.y * p.z, -4.0 * p.y * p.z + p.x * p.z, -2.0 * p.y * p.y + p.x * p.y};
    };
    out.f = [](const Point3& p) { return -6.0 * p.x + 4.0 * p.z; };
    out.obstacle = {[](const Point3&) { return kInactiveObstacle; }, [](const Point3&) { return Vec3{}; }};
    out.exact_multiplier = [](const Point3&) { return 0.0; };
    return out;
}

ManufacturedProblem quadratic_patch_problem()
{
    ManufacturedProblem out;
    out.name = "quadratic_patch";
    // u = x^2 + y^2 + z^2 + x y - 0.5 z + 2, Laplace(u) = 6
    out.exact = [](const Point3& p) { return dot(p, p) + p.x * p.y - 0.5 * p.z + 2.0; };
    out.exact_gradient = [](const Point3& p) { return Vec3{2.0 * p.x + p.y, 2.0 * p.y + p.x, 2.0 * p.z - 0.5}; };
    out.f = [](const Point3&) { return -6.0; };
    out.obstacle = {[](const Point3&) { return kInactiveObstacle; }, [](const Point3&) { return Vec3{}; }};
    out.exact_multiplier = [](const Point3&) { return 0.0; };
    return out;
}

StudyResult run_convergence_study(const ManufacturedProblem& problem, const StudyConfig& config,
                                  const std::function<void(const std::vector<ConvergenceRow>&)>& on_level)
{
    if (config.levels < 1) {
        throw InputError("convergence study: levels must be >= 1");
    }
    StudyResult result;
    TetMesh mesh = build_box_mesh(Box{}, config.n);
    for (int level = 0; level < config.levels; ++level) {
        if (level > 0) {
            mesh = uniform_refine(mesh);
        }
        const auto start = std::chrono::steady_clock::now();
        const DofMap dofs(mesh);
        const ConstrainedSystem system = assemble(mesh, dofs, problem.data(), config.degrees);
        const SolveResult solved = pdas_solve(system, config.solver);

        ConvergenceRow row;
        row.level = level;
        row.h = mesh.mesh_size();
        row.dofs = dofs.size();
        row.elements = mesh.num_tets();
        row.iterations = solved.report.iterations;
        row.status = solved.report.status;
        row.active_elements = solved.report.active_count;
        row.complementarity = solved.report.complementarity_residual;
        row.error_h1 = error_norms(mesh, dofs, solved.state.alpha, problem.exact, problem.exact_gradient,
                                   config.degrees)
                           .h1_seminorm;
        if (!result.rows.empty()) {
            const double prev = result.rows.back().error_h1;
            row.order = std::log2(prev / row.error_h1);
        }
        if (config.with_estimators) {
            const MultiplierField sigma{std::vector<double>(solved.state.beta.data(),
                                                            solved.state.beta.data() + solved.state.beta.size())};
            row.estimators = estimate(mesh, dofs, solved.state.alpha, problem.f, problem.obstacle, sigma,
                                      problem.exact, problem.exact_gradient, config.degrees);
            if (problem.exact_multiplier) {
                row.multiplier_l2_error = multiplier_l2_error(mesh, sigma, problem.exact_multiplier, config.degrees);
            }
        }
        row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        result.rows.push_back(row);
        if (on_level) {
            on_level(result.rows);
        }
        if (!solved.report.converged()) {
            return result;
        }
    }
    result.completed = true;
    return result;
}

std::string format_sci(double value)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.5e", value);
    return buf;
}

void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows, bool timings)
{
    out << "h,error_h1,order,dofs,iters,seconds\n";
    for (const auto& row : rows) {
        out << format_sci(row.h) << ',' << format_sci(row.error_h1) << ','
            << (row.order ? format_sci(*row.order) : std::string{}) << ',' << row.dofs << ',' << row.iterations << ','
            << format_sci(timings ? row.seconds : 0.0) << '\n';
    }
}

} // namespace obstacle
