#pragma once

#include "obstacle/benchmark.hpp"
#include "obstacle/estimators.hpp"
#include "obstacle/solver.hpp"

#include <json.hpp>

#include <string>

namespace obstacle {

inline constexpr int kReportSchemaVersion = 1;

nlohmann::json to_json(const EstimatorReport& report, bool per_element);
nlohmann::json to_json(const SolveReport& report);
nlohmann::json to_json(const ConvergenceRow& row, bool timings);

/// Everything needed to rebuild the mesh and the discrete solution of one solve.
struct StoredSolution {
    std::string problem{"benchmark"};
    int n{0};
    int refinements{0};
    double r0{0.7};
    double c{1.0};
    Eigen::VectorXd alpha;
    Eigen::VectorXd beta;
};

nlohmann::json to_json(const StoredSolution& solution);
StoredSolution stored_solution_from_json(const nlohmann::json& j);

} // namespace obstacle
