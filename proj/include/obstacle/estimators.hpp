#pragma once

#include "obstacle/assembly.hpp"
#include "obstacle/fem_space.hpp"
#include "obstacle/mesh.hpp"

#include <Eigen/Core>

#include <cmath>
#include <optional>
#include <vector>

namespace obstacle {

/// Piecewise constant discrete multiplier, one value per tet.
struct MultiplierField {
    std::vector<double> values;
};

struct ObstacleField {
    ScalarField value;
    VectorField gradient;
};

/// Per-entity contributions (already squared) of one residual estimator.
struct EstimatorPart {
    std::vector<double> contributions;
    double squared_total{0.0};

    [[nodiscard]] double total() const { return std::sqrt(squared_total); }
};

struct ObstacleTerms {
    double gradient_term{0.0};  // ||grad (chi - u_h)^+||^2
    double violation_term{0.0}; // -sum over contact tets of int sigma_h (chi - u_h)^-
    Index contact_elements{0};
};

struct ErrorNorms {
    double l2{0.0};
    double h1_seminorm{0.0};
};

struct EstimatorReport {
    EstimatorPart eta1;
    EstimatorPart eta2; // indexed like interior_faces(mesh)
    ObstacleTerms obstacle;
    double total{0.0}; // eta1^2 + eta2^2 + gradient_term + violation_term
    std::optional<double> error_h1;
    std::optional<double> effectivity_ratio; // error_h1^2 / total
    std::optional<double> effectivity_index; // error_h1 / sqrt(total)
};

/// sigma_h|_T = (int_T f b_T - int_T grad u_h . grad b_T) / int_T b_T.
MultiplierField compute_sigma_h(const TetMesh& mesh, const DofMap& dofs, const Eigen::VectorXd& alpha,
                                const ScalarField& f, const QuadratureDegrees& degrees = {});

/// h_T^2 ||Laplace(u_h) + f - sigma_h||^2 per tet.
EstimatorPart estimator_eta1(const TetMesh& mesh, const DofMap& dofs, const Eigen::VectorXd& alpha,
                             const ScalarField& f, const MultiplierField& sigma_h,
                             const QuadratureDegrees& degrees = {});

/// h_e ||[[grad u_h]]||^2 per interior face.
EstimatorPart estimator_eta2(const TetMesh& mesh, const DofMap& dofs, const Eigen::VectorXd& alpha,
                             const QuadratureDegrees& degrees = {});

/// Relative tolerance deciding A_T(u_h) == A_T(chi) for the contact set.
inline constexpr double kContactTolerance = 1e-9;

ObstacleTerms obstacle_terms(const TetMesh& mesh, const DofMap& dofs, const Eigen::VectorXd& alpha,
                             const ObstacleField& obstacle, const MultiplierField& sigma_h,
                             const QuadratureDegrees& degrees = {});

ErrorNorms error_norms(const TetMesh& mesh, const DofMap& dofs, const Eigen::VectorXd& alpha,
                       const ScalarField& exact, const VectorField& exact_gradient,
                       const QuadratureDegrees& degrees = {});

/// ||sigma - sigma_h||_{L^2} for a known pointwise multiplier sigma.
double multiplier_l2_error(const TetMesh& mesh, const MultiplierField& sigma_h, const ScalarField& sigma,
                           const QuadratureDegrees& degrees = {});

/// All estimator parts; fills the error fields when `exact` and `exact_gradient` are given.
EstimatorReport estimate(const TetMesh& mesh, const DofMap& dofs, const Eigen::VectorXd& alpha,
                         const ScalarField& f, const ObstacleField& obstacle, const MultiplierField& sigma_h,
                         const ScalarField& exact = {}, const VectorField& exact_gradient = {},
                         const QuadratureDegrees& degrees = {});

} // namespace obstacle
