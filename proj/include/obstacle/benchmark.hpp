#pragma once

#include "obstacle/assembly.hpp"
#include "obstacle/estimators.hpp"
#include "obstacle/solver.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace obstacle {

/// Obstacle problem with known exact solution and multiplier on the unit cube.
struct ManufacturedProblem {
    std::string name;
    ScalarField f;
    ObstacleField obstacle;
    ScalarField exact;
    VectorField exact_gradient;
    ScalarField exact_multiplier; // sigma = f + Laplace(u)

    [[nodiscard]] ProblemData data() const { return {f, obstacle.value, exact}; }
};

/// Radially symmetric contact problem with free boundary on the sphere r = r0:
/// u = (max(r^2 - r0^2, 0))^2, chi = 0, sigma = f on {r <= r0}.
struct BenchmarkProblem {
    double r0{0.7};

    [[nodiscard]] double f(const Point3& x) const;
    [[nodiscard]] double u(const Point3& x) const;
    [[nodiscard]] Vec3 grad_u(const Point3& x) const;
    [[nodiscard]] double sigma(const Point3& x) const;
    [[nodiscard]] ManufacturedProblem as_problem() const;
};

double benchmark_f(const Point3& x, double r0);

/// Obstacle far below the solution so that no constraint is ever active.
inline constexpr double kInactiveObstacle = -1e9;

/// Contact-free problem with cubic exact solution.
ManufacturedProblem smooth_cubic_problem();

/// Contact-free problem with a (non-harmonic) quadratic exact solution.
ManufacturedProblem quadratic_patch_problem();

struct ConvergenceRow {
    int level{0};
    double h{0.0};
    double error_h1{0.0};
    std::optional<double> order;
    Index dofs{0};
    Index elements{0};
    int iterations{0};
    double seconds{0.0};
    SolveStatus status{SolveStatus::Converged};
    Index active_elements{0};
    double complementarity{0.0};
    std::optional<EstimatorReport> estimators;
    std::optional<double> multiplier_l2_error;
};

struct StudyConfig {
    int n{5};
    int levels{4};
    SolverConfig solver{};
    QuadratureDegrees degrees{};
    bool with_estimators{false};
};

struct StudyResult {
    std::vector<ConvergenceRow> rows;
    bool completed{false};
};

/// Solves `problem` on the Kuhn mesh with `config.n` subdivisions and on
/// `config.levels - 1` uniform refinements of it. Stops early (completed =
/// false) when the solver does not converge on a level. `on_level` is called
/// after each level with the rows so far.
StudyResult run_convergence_study(const ManufacturedProblem& problem, const StudyConfig& config,
                                  const std::function<void(const std::vector<ConvergenceRow>&)>& on_level = {});

/// CSV with header h,error_h1,order,dofs,iters,seconds. When `timings` is
/// false the seconds column is written as 0 so output is reproducible.
void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows, bool timings = true);

/// Scientific notation with 6 significant digits.
std::string format_sci(double value);

} // namespace obstacle
