#pragma once

#include "obstacle/assembly.hpp"

#include <Eigen/Core>

#include <span>
#include <string>
#include <vector>

namespace obstacle {

enum class InitMode {
    Unconstrained, // alpha^0 solves A alpha = b, beta^0 = 0
    Zero,          // alpha^0 = Dirichlet data, zero elsewhere; beta^0 = 0
};

struct SolverConfig {
    double c{1.0};
    int max_iterations{100};
    double linear_tolerance{1e-12};
    InitMode init{InitMode::Unconstrained};
    bool log_progress{false}; // key=value lines on stderr
};

struct ActiveSetState {
    Eigen::VectorXd alpha;
    Eigen::VectorXd beta;
    std::vector<Index> active;
    std::vector<Index> inactive;
};

struct InnerSolveStats {
    Index active_count{0};
    int cg_iterations{0};
    double cg_relative_residual{0.0};
    double relative_residual{0.0}; // ||A alpha + B D beta - b|| / ||b|| on free DOFs
};

enum class SolveStatus { Converged, MaxIterations, Cycling };

struct SolveReport {
    SolveStatus status{SolveStatus::MaxIterations};
    int iterations{0};
    double complementarity_residual{0.0}; // max-norm of C(alpha, beta), recomputed at exit
    Index active_count{0};
    std::vector<InnerSolveStats> inner;

    [[nodiscard]] bool converged() const noexcept { return status == SolveStatus::Converged; }
};

std::string to_string(SolveStatus status);

struct SolveResult {
    ActiveSetState state;
    SolveReport report;
};

struct Step2Result {
    Eigen::VectorXd alpha;
    Eigen::VectorXd beta;
    InnerSolveStats stats;
};

/// Equality-constrained solve with the constraints of `active` imposed and
/// beta = 0 elsewhere. `initial_guess` (optional, length N) warm-starts CG.
Step2Result step2_solve(const ConstrainedSystem& system, std::span<const Index> active,
                        double linear_tolerance = 1e-12, const Eigen::VectorXd* initial_guess = nullptr);

/// Primal-dual active set iteration; terminates when the active set repeats.
SolveResult pdas_solve(const ConstrainedSystem& system, const SolverConfig& config = {});

/// C(alpha, beta) = beta - min(0, beta + c (B^T alpha - gamma)).
Eigen::VectorXd complementarity_residual(const ConstrainedSystem& system, const Eigen::VectorXd& alpha,
                                         const Eigen::VectorXd& beta, double c);

struct KktReport {
    double primal_violation{0.0};  // max(0, gamma - B^T alpha)
    double dual_violation{0.0};    // max(0, beta)
    double complementarity{0.0};   // |beta^T (B^T alpha - gamma)|
    double stationarity{0.0};      // ||A alpha + B D beta - b|| on free DOFs
};

KktReport kkt_check(const ConstrainedSystem& system, const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta);

} // namespace obstacle
