#include "obstacle/quadrature.hpp"

#include "obstacle/error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

namespace obstacle {

namespace {

struct Gauss1D {
    std::vector<double> nodes;   // on [0, 1]
    std::vector<double> weights; // for the weight (1 - t)^alpha on [0, 1]
};

// Golub-Welsch for the Jacobi weight (1 - x)^alpha on [-1, 1], mapped to [0, 1].
Gauss1D gauss_jacobi(int npoints, int alpha)
{
    const double a = alpha;
    const double b = 0.0;
    Eigen::VectorXd diag(npoints);
    Eigen::VectorXd sub(std::max(npoints - 1, 1));
    for (int k = 0; k < npoints; ++k) {
        const double s = 2.0 * k + a + b;
        diag(k) = (k == 0) ? (b - a) / (a + b + 2.0) : (b * b - a * a) / (s * (s + 2.0));
    }
    for (int k = 1; k < npoints; ++k) {
        const double s = 2.0 * k + a + b;
        const double num = 4.0 * k * (k + a) * (k + b) * (k + a + b);
        const double den = s * s * (s + 1.0) * (s - 1.0);
        sub(k - 1) = std::sqrt(num / den);
    }
    const double mu0 = std::pow(2.0, a + b + 1.0) * std::tgamma(a + 1.0) * std::tgamma(b + 1.0) /
                       std::tgamma(a + b + 2.0);

    Gauss1D rule;
    if (npoints == 1) {
        rule.nodes.push_back(0.5 * (1.0 + diag(0)));
        rule.weights.push_back(mu0 / std::pow(2.0, a + 1.0));
        return rule;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
    eig.computeFromTridiagonal(diag, sub.head(npoints - 1), Eigen::ComputeEigenvectors);
    for (int i = 0; i < npoints; ++i) {
        const double x = eig.eigenvalues()(i);
        const double v0 = eig.eigenvectors()(0, i);
        rule.nodes.push_back(0.5 * (1.0 + x));
        rule.weights.push_back(mu0 * v0 * v0 / std::pow(2.0, a + 1.0));
    }
    return rule;
}

void check_degree(int degree, const char* who)
{
    if (degree < 1 || degree > kMaxQuadratureDegree) {
        throw InputError(std::string(who) + ": unsupported degree " + std::to_string(degree) +
                         " (supported 1.." + std::to_string(kMaxQuadratureDegree) + ")");
    }
}

// Conical product (collapsed coordinate) rule:
//   x1 = t1, x2 = (1 - t1) t2, x3 = (1 - t1)(1 - t2) t3
// with Gauss-Jacobi factors absorbing the Jacobian (1 - t1)^2 (1 - t2).
TetRule make_tet_rule(int degree)
{
    const int q = (degree + 2) / 2;
    const Gauss1D g1 = gauss_jacobi(q, 2);
    const Gauss1D g2 = gauss_jacobi(q, 1);
    const Gauss1D g3 = gauss_jacobi(q, 0);
    TetRule rule;
    rule.degree = degree;
    double total = 0.0;
    for (int i = 0; i < q; ++i) {
        for (int j = 0; j < q; ++j) {
            for (int k = 0; k < q; ++k) {
                const double t1 = g1.nodes[static_cast<std::size_t>(i)];
                const double t2 = g2.nodes[static_cast<std::size_t>(j)];
                const double t3 = g3.nodes[static_cast<std::size_t>(k)];
                const double x1 = t1;
                const double x2 = (1.0 - t1) * t2;
                const double x3 = (1.0 - t1) * (1.0 - t2) * t3;
                const double w = g1.weights[static_cast<std::size_t>(i)] * g2.weights[static_cast<std::size_t>(j)] *
                                 g3.weights[static_cast<std::size_t>(k)];
                rule.points.push_back({1.0 - x1 - x2 - x3, x1, x2, x3});
                rule.weights.push_back(w);
                total += w;
            }
        }
    }
    for (double& w : rule.weights) {
        w /= total;
    }
    return rule;
}

TriRule make_tri_rule(int degree)
{
    const int q = (degree + 2) / 2;
    const Gauss1D g1 = gauss_jacobi(q, 1);
    const Gauss1D g2 = gauss_jacobi(q, 0);
    TriRule rule;
    rule.degree = degree;
    double total = 0.0;
    for (int i = 0; i < q; ++i) {
        for (int j = 0; j < q; ++j) {
            const double t1 = g1.nodes[static_cast<std::size_t>(i)];
            const double t2 = g2.nodes[static_cast<std::size_t>(j)];
            const double x1 = t1;
            const double x2 = (1.0 - t1) * t2;
            const double w = g1.weights[static_cast<std::size_t>(i)] * g2.weights[static_cast<std::size_t>(j)];
            rule.points.push_back({1.0 - x1 - x2, x1, x2});
            rule.weights.push_back(w);
            total += w;
        }
    }
    for (double& w : rule.weights) {
        w /= total;
    }
    return rule;
}

template <typename Rule, typename Make>
const Rule& cached(int degree, Make make)
{
    static const auto table = [&make] {
        std::array<Rule, kMaxQuadratureDegree + 1> rules{};
        for (int d = 1; d <= kMaxQuadratureDegree; ++d) {
            rules[static_cast<std::size_t>(d)] = make(d);
        }
        return rules;
    }();
    return table[static_cast<std::size_t>(degree)];
}

} // namespace

const TetRule& tet_rule(int degree)
{
    check_degree(degree, "tet_rule");
    return cached<TetRule>(degree, make_tet_rule);
}

const TriRule& tri_rule(int degree)
{
    check_degree(degree, "tri_rule");
    return cached<TriRule>(degree, make_tri_rule);
}

double integrate_tet(const ElementGeometry& geom, const TetRule& rule, const ScalarField& f)
{
    double sum = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
        sum += rule.weights[q] * f(geom.point(rule.points[q]));
    }
    return sum * geom.volume;
}

double integrate_tet(const TetMesh& mesh, Index t, const TetRule& rule, const ScalarField& f)
{
    return integrate_tet(element_geometry(mesh, t), rule, f);
}

} // namespace obstacle
