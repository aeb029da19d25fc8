#pragma once

#include "obstacle/fem_space.hpp"
#include "obstacle/mesh.hpp"
#include "obstacle/quadrature.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <iosfwd>
#include <vector>

namespace obstacle {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;
using SparseColMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

struct QuadratureDegrees {
    int stiffness{6}; // grad(b_T).grad(b_T) is degree 6
    int load{8};      // load, obstacle means, error norms, volume estimators
    int face{6};      // jump integrals
};

/// Data of the obstacle problem: -Laplace(u) = f where u > chi, u >= chi, u = g on the boundary.
struct ProblemData {
    ScalarField f;
    ScalarField obstacle;
    ScalarField boundary;
};

/// Discrete obstacle problem on the P2+bubble space.
///
/// The multiplier pairing is A alpha + B diag(volumes) beta = b, so that
/// beta_j is the value of the piecewise constant multiplier sigma_h on T_j.
/// Dirichlet DOFs are eliminated symmetrically: their rows and columns of A
/// are replaced by identity and b holds the prescribed value on those rows.
/// B keeps its entries on Dirichlet rows, so B^T alpha is the vector of
/// element means of u_h including the boundary values.
struct ConstrainedSystem {
    SparseMatrix A;             // N x N
    SparseColMatrix B;          // N x M, B(i, j) = A_{T_j}(phi_i)
    Eigen::VectorXd b;          // N
    Eigen::VectorXd gamma;      // M, element means of the obstacle
    Eigen::VectorXd volumes;    // M
    std::vector<char> dirichlet_mask;
    Eigen::VectorXd dirichlet_values; // N, zero on free DOFs
    std::vector<Index> free_dofs;     // sorted
    std::vector<std::array<Index, kLocalDofs>> element_dofs;
    Index num_p2{0};

    [[nodiscard]] Index num_dofs() const noexcept { return static_cast<Index>(b.size()); }
    [[nodiscard]] Index num_elements() const noexcept { return static_cast<Index>(gamma.size()); }
    [[nodiscard]] bool is_dirichlet(Index dof) const { return dirichlet_mask.at(static_cast<std::size_t>(dof)) != 0; }
};

/// 11x11 element stiffness matrix of the local basis.
std::array<std::array<double, kLocalDofs>, kLocalDofs> element_stiffness(const ElementGeometry& geom,
                                                                         int degree = 6);

/// Global stiffness matrix without boundary conditions.
SparseMatrix assemble_stiffness(const TetMesh& mesh, const DofMap& dofs, int degree = 6);

ConstrainedSystem assemble(const TetMesh& mesh, const DofMap& dofs, const ProblemData& data,
                           const QuadratureDegrees& degrees = {});

Eigen::VectorXd stiffness_action(const SparseMatrix& A, const Eigen::VectorXd& alpha);
double energy(const SparseMatrix& A, const Eigen::VectorXd& alpha);

void write_matrix_market(std::ostream& out, const SparseMatrix& matrix);
void write_matrix_market(std::ostream& out, const SparseColMatrix& matrix);

} // namespace obstacle
