#include "obstacle/assembly.hpp"
#include "obstacle/error.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

using namespace obstacle;

namespace {

ProblemData simple_data()
{
    return {[](const Point3& p) { return 1.0 + p.x * p.y; }, [](const Point3& p) { return -0.2 + 0.1 * p.z; },
            [](const Point3& p) { return p.x - p.y; }};
}

} // namespace

TEST(Assembly, ElementStiffnessMatchesDirectQuadrature)
{
    const TetMesh mesh({{0.1, -0.2, 0.3}, {1.3, 0.1, 0.2}, {0.4, 0.9, -0.1}, {0.2, 0.3, 1.1}}, {Tet{{0, 1, 2, 3}}});
    const auto g = element_geometry(mesh, 0);
    const auto K = element_stiffness(g);
    const TetRule& rule = tet_rule(8);
    for (std::size_t a = 0; a < kLocalDofs; ++a) {
        for (std::size_t b = 0; b < kLocalDofs; ++b) {
            double direct = 0.0;
            for (std::size_t q = 0; q < rule.size(); ++q) {
                const BasisValue v = eval_basis(g, rule.points[q]);
                direct += rule.weights[q] * g.volume * dot(v.grad[a], v.grad[b]);
            }
            EXPECT_NEAR(K[a][b], direct, 1e-12 * std::max(1.0, std::abs(direct)));
            EXPECT_DOUBLE_EQ(K[a][b], K[b][a]);
        }
    }
}

TEST(Assembly, RawStiffnessAnnihilatesConstants)
{
    const TetMesh mesh = build_box_mesh(Box{}, 2);
    const DofMap dofs(mesh);
    const SparseMatrix A = assemble_stiffness(mesh, dofs);
    Eigen::VectorXd one = Eigen::VectorXd::Zero(dofs.size());
    one.head(dofs.num_p2()).setOnes();
    EXPECT_LT((A * one).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Assembly, EnergyOfLinearFunction)
{
    const TetMesh mesh = build_box_mesh(Box{{0, 0, 0}, {2.0, 1.0, 0.5}}, 3);
    const DofMap dofs(mesh);
    const SparseMatrix A = assemble_stiffness(mesh, dofs);
    const Vec3 grad{0.3, -1.2, 2.0};
    const auto alpha = interpolate(mesh, dofs, [&](const Point3& p) { return dot(grad, p) + 4.0; }).coefficients;
    EXPECT_NEAR(energy(A, alpha), 1.0 * dot(grad, grad), 1e-11);
}

TEST(Assembly, StiffnessIsSymmetricAndFreeBlockIsSpd)
{
    const TetMesh mesh = build_box_mesh(Box{}, 2);
    const DofMap dofs(mesh);
    const ConstrainedSystem sys = assemble(mesh, dofs, simple_data());
    const Eigen::MatrixXd A(sys.A);
    EXPECT_LT((A - A.transpose()).cwiseAbs().maxCoeff(), 1e-12 * A.cwiseAbs().maxCoeff());
    Eigen::MatrixXd K(sys.free_dofs.size(), sys.free_dofs.size());
    for (std::size_t i = 0; i < sys.free_dofs.size(); ++i) {
        for (std::size_t j = 0; j < sys.free_dofs.size(); ++j) {
            K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = A(sys.free_dofs[i], sys.free_dofs[j]);
        }
    }
    EXPECT_EQ(Eigen::LLT<Eigen::MatrixXd>(K).info(), Eigen::Success);
    for (Index i = 0; i < sys.num_dofs(); ++i) {
        if (sys.is_dirichlet(i)) {
            EXPECT_EQ(A(i, i), 1.0);
            EXPECT_EQ(A.row(i).cwiseAbs().sum(), 1.0);
            EXPECT_EQ(sys.b(i), sys.dirichlet_values(i));
        }
    }
}

TEST(Assembly, MultiplierColumnStructure)
{
    const TetMesh mesh = build_box_mesh(Box{}, 2);
    const DofMap dofs(mesh);
    const ConstrainedSystem sys = assemble(mesh, dofs, simple_data());
    ASSERT_EQ(sys.B.cols(), mesh.num_tets());
    for (Index t = 0; t < mesh.num_tets(); ++t) {
        EXPECT_LE(sys.B.col(t).nonZeros(), kLocalDofs);
        const auto& ld = dofs.local_dofs(t);
        double p2 = 0.0;
        for (std::size_t a = 0; a < kLocalDofs; ++a) {
            const double entry = sys.B.coeff(ld[a], t);
            EXPECT_EQ(entry, kElementMeans[a]);
            if (a < kP2LocalDofs) {
                p2 += entry;
            }
        }
        EXPECT_NEAR(p2, 1.0, 1e-15);
        EXPECT_NEAR(sys.volumes(t), element_geometry(mesh, t).volume, 1e-16);
    }
}

TEST(Assembly, MeansOfInterpolantThroughB)
{
    const TetMesh mesh = build_box_mesh(Box{}, 2);
    const DofMap dofs(mesh);
    const ConstrainedSystem sys = assemble(mesh, dofs, simple_data());
    const ScalarField v = [](const Point3& p) { return std::exp(p.x) * std::cos(2.0 * p.y) + p.z; };
    const auto alpha = interpolate(mesh, dofs, v).coefficients;
    const Eigen::VectorXd means = sys.B.transpose() * alpha;
    const auto expected = element_averages(mesh, v);
    for (Index t = 0; t < mesh.num_tets(); ++t) {
        EXPECT_NEAR(means(t), expected[static_cast<std::size_t>(t)], 1e-13);
    }
    const auto chi_means = element_averages(mesh, simple_data().obstacle);
    for (Index t = 0; t < mesh.num_tets(); ++t) {
        EXPECT_NEAR(sys.gamma(t), chi_means[static_cast<std::size_t>(t)], 1e-15);
    }
}

TEST(Assembly, LoadVectorOfConstant)
{
    const TetMesh mesh = build_box_mesh(Box{}, 2);
    const DofMap dofs(mesh);
    const ProblemData data{[](const Point3&) { return 2.0; }, [](const Point3&) { return 0.0; },
                           [](const Point3&) { return 0.0; }};
    const ConstrainedSystem sys = assemble(mesh, dofs, data);
    for (Index t = 0; t < mesh.num_tets(); ++t) {
        // Bubble load is f |T| 32/105.
        EXPECT_NEAR(sys.b(dofs.bubble_dof(t)), 2.0 * sys.volumes(t) * 32.0 / 105.0, 1e-15);
    }
}

TEST(Assembly, ZeroProblemGivesZeroRightHandSide)
{
    const TetMesh mesh = build_box_mesh(Box{}, 2);
    const DofMap dofs(mesh);
    const ProblemData zero{[](const Point3&) { return 0.0; }, [](const Point3&) { return 0.0; },
                           [](const Point3&) { return 0.0; }};
    const ConstrainedSystem sys = assemble(mesh, dofs, zero);
    EXPECT_EQ(sys.b.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(sys.gamma.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Assembly, Deterministic)
{
    const TetMesh mesh = uniform_refine(build_box_mesh(Box{}, 2));
    const DofMap dofs(mesh);
    const ConstrainedSystem a = assemble(mesh, dofs, simple_data());
    const ConstrainedSystem b = assemble(mesh, dofs, simple_data());
    ASSERT_EQ(a.A.nonZeros(), b.A.nonZeros());
    for (Index k = 0; k < a.A.nonZeros(); ++k) {
        EXPECT_EQ(a.A.innerIndexPtr()[k], b.A.innerIndexPtr()[k]);
        EXPECT_EQ(a.A.valuePtr()[k], b.A.valuePtr()[k]);
    }
    EXPECT_EQ(a.b, b.b);
    EXPECT_EQ(a.gamma, b.gamma);
}

TEST(Assembly, NoDuplicateEntries)
{
    const TetMesh mesh = build_box_mesh(Box{}, 2);
    const DofMap dofs(mesh);
    const SparseMatrix A = assemble_stiffness(mesh, dofs);
    for (Index r = 0; r < A.outerSize(); ++r) {
        Index last = -1;
        for (SparseMatrix::InnerIterator it(A, r); it; ++it) {
            EXPECT_GT(it.col(), last);
            last = it.col();
        }
    }
}

TEST(Assembly, NonFiniteDataReportsElement)
{
    const TetMesh mesh = build_box_mesh(Box{}, 2);
    const DofMap dofs(mesh);
    ProblemData data = simple_data();
    data.f = [](const Point3& p) { return p.x > 0.9 && p.y > 0.9 && p.z > 0.9 ? std::nan("") : 1.0; };
    try {
        assemble(mesh, dofs, data);
        FAIL() << "expected NonFiniteDataError";
    } catch (const NonFiniteDataError& e) {
        EXPECT_GE(e.tet(), 0);
        EXPECT_LT(e.tet(), mesh.num_tets());
        EXPECT_NE(std::string(e.what()).find(std::to_string(e.tet())), std::string::npos);
    }
    data = simple_data();
    data.obstacle = [](const Point3&) { return std::numeric_limits<double>::infinity(); };
    EXPECT_THROW(assemble(mesh, dofs, data), NonFiniteDataError);
    data = simple_data();
    data.boundary = {};
    EXPECT_THROW(assemble(mesh, dofs, data), InputError);
}

TEST(Assembly, DimensionMismatchThrows)
{
    const TetMesh mesh = build_box_mesh(Box{}, 1);
    const DofMap dofs(mesh);
    const SparseMatrix A = assemble_stiffness(mesh, dofs);
    EXPECT_THROW(stiffness_action(A, Eigen::VectorXd::Zero(3)), InputError);
    EXPECT_THROW(element_stiffness(element_geometry(mesh, 0), 0), InputError);
}

TEST(Assembly, MatrixMarketExport)
{
    const TetMesh mesh = build_box_mesh(Box{}, 1);
    const DofMap dofs(mesh);
    const ConstrainedSystem sys = assemble(mesh, dofs, simple_data());
    std::ostringstream out;
    write_matrix_market(out, sys.A);
    std::istringstream in(out.str());
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "%%MatrixMarket matrix coordinate real general");
    Index rows = 0, cols = 0, nnz = 0;
    in >> rows >> cols >> nnz;
    EXPECT_EQ(rows, sys.num_dofs());
    EXPECT_EQ(cols, sys.num_dofs());
    EXPECT_EQ(nnz, sys.A.nonZeros());
    Eigen::MatrixXd back = Eigen::MatrixXd::Zero(rows, cols);
    for (Index k = 0; k < nnz; ++k) {
        Index i = 0, j = 0;
        double v = 0.0;
        in >> i >> j >> v;
        back(i - 1, j - 1) = v;
    }
    EXPECT_EQ(back, Eigen::MatrixXd(sys.A));
    std::ostringstream bout;
    write_matrix_market(bout, sys.B);
    EXPECT_NE(bout.str().find(std::to_string(sys.num_dofs()) + " 6 "), std::string::npos);
}
