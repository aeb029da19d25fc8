#pragma once

#include "obstacle/mesh.hpp"
#include "obstacle/quadrature.hpp"

#include <Eigen/Core>

#include <array>
#include <span>
#include <vector>

namespace obstacle {

/// Local DOFs per tet: 4 vertex, 6 edge (kLocalEdges order), 1 bubble.
inline constexpr int kLocalDofs = 11;
inline constexpr int kP2LocalDofs = 10;
inline constexpr int kBubbleLocal = 10;

/// A_T of each local basis function. Independent of the element.
inline constexpr std::array<double, kLocalDofs> kElementMeans{
    -1.0 / 20.0, -1.0 / 20.0, -1.0 / 20.0, -1.0 / 20.0,
    1.0 / 5.0, 1.0 / 5.0, 1.0 / 5.0, 1.0 / 5.0, 1.0 / 5.0, 1.0 / 5.0,
    32.0 / 105.0};

using Bary = std::array<double, 4>;
using LocalVector = std::array<double, kLocalDofs>;

struct BasisValue {
    LocalVector value{};
    std::array<Vec3, kLocalDofs> grad{};
};

/// d(phi_a)/d(lambda_i), treating the barycentric coordinates as independent.
std::array<std::array<double, 4>, kLocalDofs> basis_lambda_derivatives(const Bary& bary) noexcept;

/// d^2(phi_a)/d(lambda_i)d(lambda_j).
std::array<std::array<std::array<double, 4>, 4>, kLocalDofs> basis_lambda_hessians(const Bary& bary) noexcept;

BasisValue eval_basis(const ElementGeometry& geom, const Bary& bary);

/// Laplacians of the 11 local basis functions at `bary`.
LocalVector basis_laplacians(const ElementGeometry& geom, const Bary& bary);

/// Element means A_T(phi_a) of the local basis functions.
const std::array<double, kLocalDofs>& element_means(const ElementGeometry& geom) noexcept;

/// Global DOF numbering laid out as [vertices | edge midpoints | bubbles].
///
/// The Dirichlet mask covers vertex and midpoint DOFs on the boundary;
/// bubble DOFs are never constrained.
class DofMap {
public:
    explicit DofMap(const TetMesh& mesh);

    [[nodiscard]] Index size() const noexcept { return num_vertices_ + num_edges_ + num_tets_; }
    [[nodiscard]] Index num_p2() const noexcept { return num_vertices_ + num_edges_; }
    [[nodiscard]] Index num_tets() const noexcept { return num_tets_; }

    [[nodiscard]] Index vertex_dof(Index v) const noexcept { return v; }
    [[nodiscard]] Index edge_dof(Index e) const noexcept { return num_vertices_ + e; }
    [[nodiscard]] Index bubble_dof(Index t) const noexcept { return num_vertices_ + num_edges_ + t; }
    [[nodiscard]] bool is_bubble(Index dof) const noexcept { return dof >= num_p2(); }

    [[nodiscard]] const std::array<Index, kLocalDofs>& local_dofs(Index t) const
    {
        return local_dofs_.at(static_cast<std::size_t>(t));
    }

    [[nodiscard]] bool is_dirichlet(Index dof) const { return dirichlet_.at(static_cast<std::size_t>(dof)) != 0; }
    [[nodiscard]] std::span<const char> dirichlet_mask() const noexcept { return dirichlet_; }

    /// Coordinates of a vertex or midpoint DOF.
    [[nodiscard]] const Point3& node(Index dof) const { return nodes_.at(static_cast<std::size_t>(dof)); }

private:
    Index num_vertices_;
    Index num_edges_;
    Index num_tets_;
    std::vector<std::array<Index, kLocalDofs>> local_dofs_;
    std::vector<char> dirichlet_;
    std::vector<Point3> nodes_;
};

/// u_h = sum_i alpha_i phi_i over a DofMap.
struct FeFunction {
    Eigen::VectorXd coefficients;
};

struct FunctionValue {
    double value{0.0};
    Vec3 grad{};
};

LocalVector local_coefficients(const DofMap& dofs, const Eigen::VectorXd& alpha, Index t);

FunctionValue combine(const BasisValue& basis, const LocalVector& coeffs) noexcept;

FunctionValue eval_function(const TetMesh& mesh, const DofMap& dofs, const Eigen::VectorXd& alpha, Index t,
                            const Bary& bary);

/// Per-element means of `v` computed with the rule of `degree`.
std::vector<double> element_averages(const TetMesh& mesh, const ScalarField& v, int degree = 8);

/// I_h v: point values at vertices and midpoints, bubble coefficients fixing A_T(I_h v) = A_T(v).
FeFunction interpolate(const TetMesh& mesh, const DofMap& dofs, const ScalarField& v,
                       std::span<const double> v_means);
FeFunction interpolate(const TetMesh& mesh, const DofMap& dofs, const ScalarField& v);

} // namespace obstacle
