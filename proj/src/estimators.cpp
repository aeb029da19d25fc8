#include "obstacle/estimators.hpp"

#include "obstacle/error.hpp"

#include <algorithm>

namespace obstacle {

namespace {

void check_coefficients(const DofMap& dofs, const Eigen::VectorXd& alpha)
{
    if (alpha.size() != dofs.size()) {
        throw InputError("coefficient vector length " + std::to_string(alpha.size()) + " does not match " +
                         std::to_string(dofs.size()) + " DOFs");
    }
}

void check_sigma(const TetMesh& mesh, const MultiplierField& sigma_h)
{
    if (static_cast<Index>(sigma_h.values.size()) != mesh.num_tets()) {
        throw InputError("multiplier field must hold one value per tet");
    }
}

double local_mean(const LocalVector& coeffs) noexcept
{
    double s = 0.0;
    for (std::size_t a = 0; a < kLocalDofs; ++a) {
        s += kElementMeans[a] * coeffs[a];
    }
    return s;
}

Bary face_to_tet(const Tet& tet, const std::array<Index, 3>& face, const std::array<double, 3>& bary)
{
    Bary out{};
    for (std::size_t k = 0; k < 3; ++k) {
        const auto it = std::find(tet.v.begin(), tet.v.end(), face[k]);
        out[static_cast<std::size_t>(it - tet.v.begin())] = bary[k];
    }
    return out;
}

} // namespace

MultiplierField compute_sigma_h(const TetMesh& mesh, const DofMap& dofs, const Eigen::VectorXd& alpha,
                                const ScalarField& f, const QuadratureDegrees& degrees)
{
    check_coefficients(dofs, alpha);
    const auto& rule = tet_rule(degrees.load);
    MultiplierField sigma{std::vector<double>(static_cast<std::size_t>(mesh.num_tets()))};
    for (Index t = 0; t < mesh.num_tets(); ++t) {
        const auto geom = element_geometry(mesh, t);
        const auto coeffs = local_coefficients(dofs, alpha, t);

        double f_bubble = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const auto& l = rule.points[q];
            f_bubble += rule.weights[q] * f(geom.point(l)) * 256.0 * l[0] * l[1] * l[2] * l[3];
        }
        f_bubble *= geom.volume;

        const auto k = element_stiffness(geom, degrees.stiffness);
        double grad_bubble = 0.0;
        for (std::size_t a = 0; a < kLocalDofs; ++a) {
            grad_bubble += k[kBubbleLocal][a] * coeffs[a];
        }
        const double bubble_integral = kElementMeans[kBubbleLocal] * geom.volume;
        sigma.values[static_cast<std::size_t>(t)] = (f_bubble - grad_bubble) / bubble_integral;
    }
    return sigma;
}

EstimatorPart estimator_eta1(const TetMesh& mesh, const DofMap& dofs, const Eigen::VectorXd& alpha,
                             const ScalarField& f, const MultiplierField& sigma_h, const QuadratureDegrees& degrees)
{
    check_coefficients(dofs, alpha);
    check_sigma(mesh, sigma_h);
    const auto& rule = tet_rule(degrees.load);
    EstimatorPart part;
    part.contributions.resize(static_cast<std::size_t>(mesh.num_tets()));
    for (Index t = 0; t < mesh.num_tets(); ++t) {
        const auto geom = element_geometry(mesh, t);
        const auto coeffs = local_coefficients(dofs, alpha, t);
        const double sigma = sigma_h.values[static_cast<std::size_t>(t)];
        double integral = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const auto lap = basis_laplacians(geom, rule.points[q]);
            double lap_u = 0.0;
            for (std::size_t a = 0; a < kLocalDofs; ++a) {
                lap_u += coeffs[a] * lap[a];
            }
            const double r = lap_u + f(geom.point(rule.points[q])) - sigma;
            integral += rule.weights[q] * r * r;
        }
        const double contribution = geom.diameter * geom.diameter * integral * geom.volume;
        part.contributions[static_cast<std::size_t>(t)] = contribution;
        part.squared_total += contribution;
    }
    return part;
}

EstimatorPart estimator_eta2(const TetMesh& mesh, const DofMap& dofs, const Eigen::VectorXd& alpha,
                             const QuadratureDegrees& degrees)
{
    check_coefficients(dofs, alpha);
    const auto& rule = tri_rule(degrees.face);
    const auto faces = interior_faces(mesh);
    EstimatorPart part;
    part.contributions.resize(faces.size());
    for (std::size_t fi = 0; fi < faces.size(); ++fi) {
        const auto& face = faces[fi];
        const auto geom_minus = element_geometry(mesh, face.tet_minus);
        const auto geom_plus = element_geometry(mesh, face.tet_plus);
        const auto c_minus = local_coefficients(dofs, alpha, face.tet_minus);
        const auto c_plus = local_coefficients(dofs, alpha, face.tet_plus);
        const Tet& tet_minus = mesh.tet(face.tet_minus);
        const Tet& tet_plus = mesh.tet(face.tet_plus);
        double integral = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const auto g_minus = combine(eval_basis(geom_minus, face_to_tet(tet_minus, face.v, rule.points[q])), c_minus);
            const auto g_plus = combine(eval_basis(geom_plus, face_to_tet(tet_plus, face.v, rule.points[q])), c_plus);
            // grad v_- . n_- + grad v_+ . n_+ with n_+ = -n_-
            const double jump = dot(g_minus.grad - g_plus.grad, face.normal);
            integral += rule.weights[q] * jump * jump;
        }
        const double contribution = face.diameter * integral * face.area;
        part.contributions[fi] = contribution;
        part.squared_total += contribution;
    }
    return part;
}

ObstacleTerms obstacle_terms(const TetMesh& mesh, const DofMap& dofs, const Eigen::VectorXd& alpha,
                             const ObstacleField& obstacle, const MultiplierField& sigma_h,
                             const QuadratureDegrees& degrees)
{
    check_coefficients(dofs, alpha);
    check_sigma(mesh, sigma_h);
    if (!obstacle.value || !obstacle.gradient) {
        throw InputError("obstacle_terms: obstacle value and gradient are required");
    }
    const auto& rule = tet_rule(degrees.load);
    const Index m = mesh.num_tets();

    std::vector<double> mean_u(static_cast<std::size_t>(m));
    std::vector<double> mean_chi(static_cast<std::size_t>(m));
    double scale = 1.0;
    for (Index t = 0; t < m; ++t) {
        const auto geom = element_geometry(mesh, t);
        mean_u[static_cast<std::size_t>(t)] = local_mean(local_coefficients(dofs, alpha, t));
        mean_chi[static_cast<std::size_t>(t)] = integrate_tet(geom, rule, obstacle.value) / geom.volume;
        scale = std::max({scale, std::abs(mean_u[static_cast<std::size_t>(t)]),
                          std::abs(mean_chi[static_cast<std::size_t>(t)])});
    }

    ObstacleTerms out;
    for (Index t = 0; t < m; ++t) {
        const auto geom = element_geometry(mesh, t);
        const auto coeffs = local_coefficients(dofs, alpha, t);
        const bool in_contact = std::abs(mean_u[static_cast<std::size_t>(t)] - mean_chi[static_cast<std::size_t>(t)]) <=
                                kContactTolerance * scale;
        if (in_contact) {
            ++out.contact_elements;
        }
        const double sigma = sigma_h.values[static_cast<std::size_t>(t)];
        double grad_term = 0.0;
        double violation = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Point3 x = geom.point(rule.points[q]);
            const auto u = combine(eval_basis(geom, rule.points[q]), coeffs);
            const double diff = obstacle.value(x) - u.value;
            if (diff > 0.0) {
                const Vec3 g = obstacle.gradient(x) - u.grad;
                grad_term += rule.weights[q] * dot(g, g);
            } else if (in_contact) {
                violation += rule.weights[q] * sigma * (-diff);
            }
        }
        out.gradient_term += grad_term * geom.volume;
        out.violation_term -= violation * geom.volume;
    }
    return out;
}

ErrorNorms error_norms(const TetMesh& mesh, const DofMap& dofs, const Eigen::VectorXd& alpha,
                       const ScalarField& exact, const VectorField& exact_gradient, const QuadratureDegrees& degrees)
{
    check_coefficients(dofs, alpha);
    const auto& rule = tet_rule(degrees.load);
    double l2 = 0.0;
    double h1 = 0.0;
    for (Index t = 0; t < mesh.num_tets(); ++t) {
        const auto geom = element_geometry(mesh, t);
        const auto coeffs = local_coefficients(dofs, alpha, t);
        double el2 = 0.0;
        double eh1 = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Point3 x = geom.point(rule.points[q]);
            const auto u = combine(eval_basis(geom, rule.points[q]), coeffs);
            const double e = exact(x) - u.value;
            const Vec3 g = exact_gradient(x) - u.grad;
            el2 += rule.weights[q] * e * e;
            eh1 += rule.weights[q] * dot(g, g);
        }
        l2 += el2 * geom.volume;
        h1 += eh1 * geom.volume;
    }
    return {std::sqrt(l2), std::sqrt(h1)};
}

double multiplier_l2_error(const TetMesh& mesh, const MultiplierField& sigma_h, const ScalarField& sigma,
                           const QuadratureDegrees& degrees)
{
    check_sigma(mesh, sigma_h);
    const auto& rule = tet_rule(degrees.load);
    double sum = 0.0;
    for (Index t = 0; t < mesh.num_tets(); ++t) {
        const auto geom = element_geometry(mesh, t);
        const double s = sigma_h.values[static_cast<std::size_t>(t)];
        sum += integrate_tet(geom, rule, [&](const Point3& x) {
            const double d = sigma(x) - s;
            return d * d;
        });
    }
    return std::sqrt(sum);
}

EstimatorReport estimate(const TetMesh& mesh, const DofMap& dofs, const Eigen::VectorXd& alpha, const ScalarField& f,
                         const ObstacleField& obstacle, const MultiplierField& sigma_h, const ScalarField& exact,
                         const VectorField& exact_gradient, const QuadratureDegrees& degrees)
{
    EstimatorReport report;
    report.eta1 = estimator_eta1(mesh, dofs, alpha, f, sigma_h, degrees);
    report.eta2 = estimator_eta2(mesh, dofs, alpha, degrees);
    report.obstacle = obstacle_terms(mesh, dofs, alpha, obstacle, sigma_h, degrees);
    report.total = report.eta1.squared_total + report.eta2.squared_total + report.obstacle.gradient_term +
                   report.obstacle.violation_term;
    if (exact && exact_gradient) {
        const double err = error_norms(mesh, dofs, alpha, exact, exact_gradient, degrees).h1_seminorm;
        report.error_h1 = err;
        if (report.total > 0.0) {
            report.effectivity_ratio = err * err / report.total;
            report.effectivity_index = err / std::sqrt(report.total);
        }
    }
    return report;
}

} // namespace obstacle
