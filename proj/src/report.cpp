#include "obstacle/report.hpp"

#include "obstacle/error.hpp"

namespace obstacle {

namespace {

nlohmann::json optional_number(const std::optional<double>& v)
{
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

} // namespace

nlohmann::json to_json(const EstimatorReport& report, bool per_element)
{
    nlohmann::json j;
    j["eta1"] = report.eta1.total();
    j["eta2"] = report.eta2.total();
    j["obstacle_gradient_term"] = report.obstacle.gradient_term;
    j["obstacle_violation_term"] = report.obstacle.violation_term;
    j["contact_elements"] = report.obstacle.contact_elements;
    j["total"] = report.total;
    j["error_h1"] = optional_number(report.error_h1);
    j["effectivity_ratio"] = optional_number(report.effectivity_ratio);
    j["effectivity_index"] = optional_number(report.effectivity_index);
    if (per_element) {
        j["eta1_elements"] = report.eta1.contributions;
        j["eta2_faces"] = report.eta2.contributions;
    }
    return j;
}

nlohmann::json to_json(const SolveReport& report)
{
    nlohmann::json inner = nlohmann::json::array();
    for (const auto& s : report.inner) {
        inner.push_back({{"active", s.active_count},
                         {"cg_iterations", s.cg_iterations},
                         {"cg_relative_residual", s.cg_relative_residual},
                         {"relative_residual", s.relative_residual}});
    }
    return {{"status", to_string(report.status)},
            {"iterations", report.iterations},
            {"complementarity_residual", report.complementarity_residual},
            {"active_elements", report.active_count},
            {"inner_solves", inner}};
}

nlohmann::json to_json(const ConvergenceRow& row, bool timings)
{
    nlohmann::json j{{"level", row.level},
                     {"h", row.h},
                     {"error_h1", row.error_h1},
                     {"order", optional_number(row.order)},
                     {"dofs", row.dofs},
                     {"elements", row.elements},
                     {"iterations", row.iterations},
                     {"seconds", timings ? row.seconds : 0.0},
                     {"status", to_string(row.status)},
                     {"active_elements", row.active_elements},
                     {"complementarity_residual", row.complementarity},
                     {"multiplier_l2_error", optional_number(row.multiplier_l2_error)}};
    if (row.estimators) {
        j["estimators"] = to_json(*row.estimators, false);
    }
    return j;
}

nlohmann::json to_json(const StoredSolution& s)
{
    return {{"schema", "obstacle-solution"},
            {"version", kReportSchemaVersion},
            {"problem", s.problem},
            {"n", s.n},
            {"refinements", s.refinements},
            {"r0", s.r0},
            {"c", s.c},
            {"alpha", std::vector<double>(s.alpha.data(), s.alpha.data() + s.alpha.size())},
            {"beta", std::vector<double>(s.beta.data(), s.beta.data() + s.beta.size())}};
}

StoredSolution stored_solution_from_json(const nlohmann::json& j)
{
    try {
        if (j.at("schema").get<std::string>() != "obstacle-solution") {
            throw InputError("stored solution: unexpected schema");
        }
        if (j.at("version").get<int>() != kReportSchemaVersion) {
            throw InputError("stored solution: unsupported version");
        }
        StoredSolution s;
        s.problem = j.at("problem").get<std::string>();
        s.n = j.at("n").get<int>();
        s.refinements = j.at("refinements").get<int>();
        s.r0 = j.at("r0").get<double>();
        s.c = j.at("c").get<double>();
        const auto alpha = j.at("alpha").get<std::vector<double>>();
        const auto beta = j.at("beta").get<std::vector<double>>();
        s.alpha = Eigen::Map<const Eigen::VectorXd>(alpha.data(), static_cast<Index>(alpha.size()));
        s.beta = Eigen::Map<const Eigen::VectorXd>(beta.data(), static_cast<Index>(beta.size()));
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("stored solution: ") + e.what());
    }
}

} // namespace obstacle
