#pragma once

#include "obstacle/mesh.hpp"

#include <array>
#include <functional>
#include <vector>

namespace obstacle {

/// Quadrature rule on the reference simplex of dimension `Dim`.
///
/// Points are barycentric coordinates; weights are relative to the simplex
/// measure and sum to one.
template <int Dim>
struct SimplexRule {
    int degree{0};
    std::vector<std::array<double, Dim + 1>> points;
    std::vector<double> weights;

    [[nodiscard]] std::size_t size() const noexcept { return weights.size(); }
};

using TetRule = SimplexRule<3>;
using TriRule = SimplexRule<2>;

inline constexpr int kMaxQuadratureDegree = 8;

/// Rule exact for polynomials of total degree <= `degree` on a tetrahedron.
/// Throws InputError outside [1, kMaxQuadratureDegree].
const TetRule& tet_rule(int degree);

/// Rule exact for polynomials of total degree <= `degree` on a triangle.
const TriRule& tri_rule(int degree);

using ScalarField = std::function<double(const Point3&)>;
using VectorField = std::function<Vec3(const Point3&)>;

double integrate_tet(const ElementGeometry& geom, const TetRule& rule, const ScalarField& f);
double integrate_tet(const TetMesh& mesh, Index t, const TetRule& rule, const ScalarField& f);

} // namespace obstacle
