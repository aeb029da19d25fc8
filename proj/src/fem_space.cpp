#include "obstacle/fem_space.hpp"

#include "obstacle/error.hpp"

#include <string>

namespace obstacle {

namespace {

constexpr double kBubbleScale = 256.0;

// Product of the barycentric coordinates with indices i and k left out (k may equal i).
double product_except(const Bary& l, int i, int k) noexcept
{
    double p = 1.0;
    for (int j = 0; j < 4; ++j) {
        if (j != i && j != k) {
            p *= l[static_cast<std::size_t>(j)];
        }
    }
    return p;
}

} // namespace

std::array<std::array<double, 4>, kLocalDofs> basis_lambda_derivatives(const Bary& l) noexcept
{
    std::array<std::array<double, 4>, kLocalDofs> d{};
    for (std::size_t i = 0; i < 4; ++i) {
        d[i][i] = 4.0 * l[i] - 1.0;
    }
    for (std::size_t e = 0; e < 6; ++e) {
        const auto i = static_cast<std::size_t>(kLocalEdges[e][0]);
        const auto j = static_cast<std::size_t>(kLocalEdges[e][1]);
        d[4 + e][i] = 4.0 * l[j];
        d[4 + e][j] = 4.0 * l[i];
    }
    for (int i = 0; i < 4; ++i) {
        d[kBubbleLocal][static_cast<std::size_t>(i)] = kBubbleScale * product_except(l, i, i);
    }
    return d;
}

std::array<std::array<std::array<double, 4>, 4>, kLocalDofs> basis_lambda_hessians(const Bary& l) noexcept
{
    std::array<std::array<std::array<double, 4>, 4>, kLocalDofs> h{};
    for (std::size_t i = 0; i < 4; ++i) {
        h[i][i][i] = 4.0;
    }
    for (std::size_t e = 0; e < 6; ++e) {
        const auto i = static_cast<std::size_t>(kLocalEdges[e][0]);
        const auto j = static_cast<std::size_t>(kLocalEdges[e][1]);
        h[4 + e][i][j] = 4.0;
        h[4 + e][j][i] = 4.0;
    }
    for (int i = 0; i < 4; ++i) {
        for (int k = 0; k < 4; ++k) {
            if (i != k) {
                h[kBubbleLocal][static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] =
                    kBubbleScale * product_except(l, i, k);
            }
        }
    }
    return h;
}

BasisValue eval_basis(const ElementGeometry& geom, const Bary& l)
{
    BasisValue out;
    for (std::size_t i = 0; i < 4; ++i) {
        out.value[i] = l[i] * (2.0 * l[i] - 1.0);
    }
    for (std::size_t e = 0; e < 6; ++e) {
        out.value[4 + e] = 4.0 * l[static_cast<std::size_t>(kLocalEdges[e][0])] *
                           l[static_cast<std::size_t>(kLocalEdges[e][1])];
    }
    out.value[kBubbleLocal] = kBubbleScale * l[0] * l[1] * l[2] * l[3];

    const auto d = basis_lambda_derivatives(l);
    for (std::size_t a = 0; a < kLocalDofs; ++a) {
        Vec3 g{};
        for (std::size_t i = 0; i < 4; ++i) {
            g += d[a][i] * geom.grad_lambda[i];
        }
        out.grad[a] = g;
    }
    return out;
}

LocalVector basis_laplacians(const ElementGeometry& geom, const Bary& l)
{
    std::array<std::array<double, 4>, 4> gram{};
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            gram[i][j] = dot(geom.grad_lambda[i], geom.grad_lambda[j]);
        }
    }
    const auto h = basis_lambda_hessians(l);
    LocalVector lap{};
    for (std::size_t a = 0; a < kLocalDofs; ++a) {
        double s = 0.0;
        for (std::size_t i = 0; i < 4; ++i) {
            for (std::size_t j = 0; j < 4; ++j) {
                s += h[a][i][j] * gram[i][j];
            }
        }
        lap[a] = s;
    }
    return lap;
}

const std::array<double, kLocalDofs>& element_means(const ElementGeometry&) noexcept
{
    return kElementMeans;
}

DofMap::DofMap(const TetMesh& mesh)
    : num_vertices_(mesh.num_vertices()), num_edges_(mesh.num_edges()), num_tets_(mesh.num_tets())
{
    local_dofs_.resize(static_cast<std::size_t>(num_tets_));
    for (Index t = 0; t < num_tets_; ++t) {
        auto& ld = local_dofs_[static_cast<std::size_t>(t)];
        const auto& tet = mesh.tet(t);
        const auto& te = mesh.tet_edges(t);
        for (std::size_t i = 0; i < 4; ++i) {
            ld[i] = vertex_dof(tet.v[i]);
        }
        for (std::size_t e = 0; e < 6; ++e) {
            ld[4 + e] = edge_dof(te[e]);
        }
        ld[kBubbleLocal] = bubble_dof(t);
    }

    dirichlet_.assign(static_cast<std::size_t>(size()), 0);
    nodes_.reserve(static_cast<std::size_t>(num_p2()));
    for (Index v = 0; v < num_vertices_; ++v) {
        dirichlet_[static_cast<std::size_t>(vertex_dof(v))] = mesh.vertex_on_boundary(v) ? 1 : 0;
        nodes_.push_back(mesh.vertex(v));
    }
    for (Index e = 0; e < num_edges_; ++e) {
        dirichlet_[static_cast<std::size_t>(edge_dof(e))] = mesh.edge_on_boundary(e) ? 1 : 0;
        nodes_.push_back(mesh.edge_midpoint(e));
    }
}

LocalVector local_coefficients(const DofMap& dofs, const Eigen::VectorXd& alpha, Index t)
{
    LocalVector c{};
    const auto& ld = dofs.local_dofs(t);
    for (std::size_t a = 0; a < kLocalDofs; ++a) {
        c[a] = alpha(ld[a]);
    }
    return c;
}

FunctionValue combine(const BasisValue& basis, const LocalVector& coeffs) noexcept
{
    FunctionValue out;
    for (std::size_t a = 0; a < kLocalDofs; ++a) {
        out.value += coeffs[a] * basis.value[a];
        out.grad += coeffs[a] * basis.grad[a];
    }
    return out;
}

FunctionValue eval_function(const TetMesh& mesh, const DofMap& dofs, const Eigen::VectorXd& alpha, Index t,
                            const Bary& bary)
{
    if (alpha.size() != dofs.size()) {
        throw InputError("eval_function: coefficient vector has wrong length");
    }
    const auto geom = element_geometry(mesh, t);
    return combine(eval_basis(geom, bary), local_coefficients(dofs, alpha, t));
}

std::vector<double> element_averages(const TetMesh& mesh, const ScalarField& v, int degree)
{
    const auto& rule = tet_rule(degree);
    std::vector<double> means(static_cast<std::size_t>(mesh.num_tets()));
    for (Index t = 0; t < mesh.num_tets(); ++t) {
        const auto geom = element_geometry(mesh, t);
        means[static_cast<std::size_t>(t)] = integrate_tet(geom, rule, v) / geom.volume;
    }
    return means;
}

FeFunction interpolate(const TetMesh& mesh, const DofMap& dofs, const ScalarField& v,
                       std::span<const double> v_means)
{
    if (static_cast<Index>(v_means.size()) != mesh.num_tets()) {
        throw InputError("interpolate: expected one mean per tet");
    }
    FeFunction out{Eigen::VectorXd::Zero(dofs.size())};
    for (Index i = 0; i < dofs.num_p2(); ++i) {
        out.coefficients(i) = v(dofs.node(i));
    }
    constexpr double bubble_mean = kElementMeans[kBubbleLocal];
    for (Index t = 0; t < mesh.num_tets(); ++t) {
        const auto& ld = dofs.local_dofs(t);
        double p2_mean = 0.0;
        for (std::size_t a = 0; a < kP2LocalDofs; ++a) {
            p2_mean += kElementMeans[a] * out.coefficients(ld[a]);
        }
        out.coefficients(ld[kBubbleLocal]) = (v_means[static_cast<std::size_t>(t)] - p2_mean) / bubble_mean;
    }
    return out;
}

FeFunction interpolate(const TetMesh& mesh, const DofMap& dofs, const ScalarField& v)
{
    const auto means = element_averages(mesh, v);
    return interpolate(mesh, dofs, v, means);
}

} // namespace obstacle
