#include "obstacle/error.hpp"
#include "obstacle/mesh.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>
#include <tuple>

using namespace obstacle;

namespace {

void expect_conforming(const TetMesh& mesh)
{
    const auto count = oracle::face_multiplicity(mesh);
    Index boundary = 0;
    for (const auto& [key, k] : count) {
        ASSERT_TRUE(k == 1 || k == 2) << "face shared by " << k << " tets";
        boundary += k == 1 ? 1 : 0;
    }
    EXPECT_EQ(static_cast<Index>(count.size()), mesh.num_faces());
    Index mesh_boundary = 0;
    for (const auto& f : mesh.faces()) {
        mesh_boundary += f.is_boundary() ? 1 : 0;
    }
    EXPECT_EQ(boundary, mesh_boundary);
}

void expect_positive(const TetMesh& mesh)
{
    for (const auto& t : mesh.tets()) {
        const auto& p = mesh.vertices();
        EXPECT_GT(signed_volume(p[t.v[0]], p[t.v[1]], p[t.v[2]], p[t.v[3]]), 0.0);
    }
}

void expect_unique_midpoints(const TetMesh& mesh)
{
    const double tol = 1e-12 * mesh.mesh_size();
    std::set<std::tuple<long long, long long, long long>> seen;
    for (Index e = 0; e < mesh.num_edges(); ++e) {
        const Point3 m = mesh.edge_midpoint(e);
        const auto key = std::make_tuple(std::llround(m.x / tol), std::llround(m.y / tol), std::llround(m.z / tol));
        EXPECT_TRUE(seen.insert(key).second) << "duplicate midpoint of edge " << e;
    }
}

} // namespace

TEST(Mesh, SingleCubeCounts)
{
    const TetMesh mesh = build_box_mesh(Box{}, 1);
    EXPECT_EQ(mesh.num_vertices(), 8);
    EXPECT_EQ(mesh.num_tets(), 6);
    for (Index t = 0; t < mesh.num_tets(); ++t) {
        EXPECT_NEAR(element_geometry(mesh, t).volume, 1.0 / 6.0, 1e-15);
    }
    EXPECT_NEAR(mesh.mesh_size(), std::sqrt(3.0), 1e-14);
    // Euler characteristic of a ball: V - E + F - T = 1.
    EXPECT_EQ(mesh.num_vertices() - mesh.num_edges() + mesh.num_faces() - mesh.num_tets(), 1);
}

TEST(Mesh, KuhnMeshCountsAndConformity)
{
    for (int n : {2, 3, 5}) {
        const TetMesh mesh = build_box_mesh(Box{}, n);
        EXPECT_EQ(mesh.num_vertices(), (n + 1) * (n + 1) * (n + 1));
        EXPECT_EQ(mesh.num_tets(), 6 * n * n * n);
        EXPECT_NEAR(mesh.total_volume(), 1.0, 1e-13);
        EXPECT_NEAR(mesh.mesh_size(), std::sqrt(3.0) / n, 1e-14);
        EXPECT_EQ(mesh.num_vertices() - mesh.num_edges() + mesh.num_faces() - mesh.num_tets(), 1);
        expect_conforming(mesh);
        expect_positive(mesh);
        expect_unique_midpoints(mesh);
        // 12 n^2 boundary triangles on the cube surface.
        EXPECT_EQ(static_cast<Index>(interior_faces(mesh).size()), mesh.num_faces() - 12 * n * n);
    }
}

TEST(Mesh, NonUnitBox)
{
    const TetMesh mesh = build_box_mesh(Box{{-1.0, 0.0, 2.0}, {1.0, 0.5, 3.0}}, 3);
    EXPECT_NEAR(mesh.total_volume(), 1.0, 1e-13);
    expect_conforming(mesh);
    expect_positive(mesh);
}

TEST(Mesh, RefinementInvariants)
{
    TetMesh mesh = build_box_mesh(Box{}, 1);
    for (int level = 1; level <= 3; ++level) {
        const TetMesh fine = uniform_refine(mesh);
        EXPECT_EQ(fine.num_tets(), 8 * mesh.num_tets());
        EXPECT_EQ(fine.num_vertices(), mesh.num_vertices() + mesh.num_edges());
        EXPECT_NEAR(fine.total_volume(), mesh.total_volume(), 1e-12);
        EXPECT_NEAR(fine.mesh_size(), 0.5 * mesh.mesh_size(), 1e-12);
        expect_conforming(fine);
        expect_positive(fine);
        expect_unique_midpoints(fine);
        mesh = fine;
    }
}

TEST(Mesh, ChildrenConserveParentVolume)
{
    const TetMesh coarse({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {Tet{{0, 1, 2, 3}}});
    const TetMesh fine = uniform_refine(coarse);
    ASSERT_EQ(fine.num_tets(), 8);
    double sum = 0.0;
    for (Index t = 0; t < fine.num_tets(); ++t) {
        const double v = element_geometry(fine, t).volume;
        EXPECT_GT(v, 0.0);
        sum += v;
    }
    EXPECT_NEAR(sum, 1.0 / 6.0, 1e-15);
    expect_conforming(fine);
}

TEST(Mesh, RefinementIsDeterministic)
{
    const TetMesh a = uniform_refine(build_box_mesh(Box{}, 2));
    const TetMesh b = uniform_refine(build_box_mesh(Box{}, 2));
    ASSERT_EQ(a.num_tets(), b.num_tets());
    for (Index t = 0; t < a.num_tets(); ++t) {
        EXPECT_EQ(a.tet(t).v, b.tet(t).v);
    }
}

TEST(Mesh, OrientationFixedAtConstruction)
{
    const TetMesh mesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {Tet{{0, 1, 3, 2}}});
    expect_positive(mesh);
    EXPECT_NEAR(element_geometry(mesh, 0).volume, 1.0 / 6.0, 1e-15);
}

TEST(Mesh, ReferenceGeometry)
{
    const TetMesh mesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {Tet{{0, 1, 2, 3}}});
    const ElementGeometry g = element_geometry(mesh, 0);
    EXPECT_NEAR(g.grad_lambda[0].x, -1.0, 1e-15);
    EXPECT_NEAR(g.grad_lambda[0].y, -1.0, 1e-15);
    EXPECT_NEAR(g.grad_lambda[0].z, -1.0, 1e-15);
    EXPECT_NEAR(g.grad_lambda[1].x, 1.0, 1e-15);
    EXPECT_NEAR(g.diameter, std::sqrt(2.0), 1e-15);
    Vec3 sum{};
    for (const auto& d : g.grad_lambda) {
        sum += d;
    }
    EXPECT_LT(norm(sum), 1e-14);
    EXPECT_TRUE(interior_faces(mesh).empty());
    for (Index v = 0; v < 4; ++v) {
        EXPECT_TRUE(mesh.vertex_on_boundary(v));
    }
}

TEST(Mesh, GradientsOfBarycentricsSumToZeroOnDistortedTets)
{
    const TetMesh mesh = uniform_refine(build_box_mesh(Box{{0, 0, 0}, {2.0, 1.0, 0.3}}, 2));
    for (Index t = 0; t < mesh.num_tets(); t += 7) {
        const auto g = element_geometry(mesh, t);
        Vec3 sum{};
        for (const auto& d : g.grad_lambda) {
            sum += d;
        }
        EXPECT_LT(norm(sum), 1e-12);
        // grad(lambda_i) . (x_j - x_0) = delta_ij - delta_i0
        for (int i = 0; i < 4; ++i) {
            for (int j = 1; j < 4; ++j) {
                const double expected = (i == j ? 1.0 : 0.0) - (i == 0 ? 1.0 : 0.0);
                EXPECT_NEAR(dot(g.grad_lambda[i], g.vertices[j] - g.vertices[0]), expected, 1e-12);
            }
        }
    }
}

TEST(Mesh, InteriorFaceNormalsPointIntoPlusSide)
{
    const TetMesh mesh = build_box_mesh(Box{}, 2);
    for (const auto& f : interior_faces(mesh)) {
        EXPECT_LT(f.tet_minus, f.tet_plus);
        EXPECT_NEAR(norm(f.normal), 1.0, 1e-14);
        const auto gm = element_geometry(mesh, f.tet_minus);
        const auto gp = element_geometry(mesh, f.tet_plus);
        Point3 cm{}, cp{};
        for (int i = 0; i < 4; ++i) {
            cm += 0.25 * gm.vertices[i];
            cp += 0.25 * gp.vertices[i];
        }
        EXPECT_GT(dot(f.normal, cp - cm), 0.0);
        EXPECT_GT(f.area, 0.0);
    }
}

TEST(Mesh, BoundaryClassificationByAdjacency)
{
    const TetMesh mesh = build_box_mesh(Box{}, 3);
    for (Index v = 0; v < mesh.num_vertices(); ++v) {
        const Point3& p = mesh.vertex(v);
        const bool geometric = p.x == 0.0 || p.x == 1.0 || p.y == 0.0 || p.y == 1.0 || p.z == 0.0 || p.z == 1.0;
        EXPECT_EQ(mesh.vertex_on_boundary(v), geometric);
    }
}

TEST(Mesh, InvalidInputThrows)
{
    EXPECT_THROW(build_box_mesh(Box{}, 0), InputError);
    EXPECT_THROW(build_box_mesh(Box{{0, 0, 0}, {1, 0, 1}}, 2), Error);
    EXPECT_THROW(TetMesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}}, {Tet{{0, 1, 2, 3}}}), DegenerateElementError);
    EXPECT_THROW(TetMesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {Tet{{0, 1, 2, 2}}}), InputError);
    EXPECT_THROW(TetMesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {Tet{{0, 1, 2, 7}}}), InputError);
    // Three tets on one face.
    EXPECT_THROW(TetMesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0, 0, -1}, {1, 1, 1}},
                         {Tet{{0, 1, 2, 3}}, Tet{{0, 1, 2, 4}}, Tet{{0, 1, 2, 5}}}),
                 InputError);
}

TEST(Mesh, DegenerateTetReportsIndex)
{
    try {
        TetMesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}}, {Tet{{0, 1, 2, 3}}, Tet{{0, 1, 2, 4}}});
        FAIL() << "expected DegenerateElementError";
    } catch (const DegenerateElementError& e) {
        EXPECT_EQ(e.tet(), 1);
    }
}

TEST(Mesh, VtkStructure)
{
    const TetMesh mesh = build_box_mesh(Box{}, 1);
    std::vector<double> pv(8, 1.5), cv(6, -2.0);
    const VtkField pf{"u_h", pv};
    const VtkField cf{"sigma_h", cv};
    std::ostringstream out;
    write_vtk(out, mesh, std::span<const VtkField>(&pf, 1), std::span<const VtkField>(&cf, 1));
    const std::string s = out.str();
    EXPECT_EQ(s.rfind("# vtk DataFile Version 3.0", 0), 0u);
    EXPECT_NE(s.find("ASCII"), std::string::npos);
    EXPECT_NE(s.find("DATASET UNSTRUCTURED_GRID"), std::string::npos);
    EXPECT_NE(s.find("POINTS 8 double"), std::string::npos);
    EXPECT_NE(s.find("CELLS 6 30"), std::string::npos);
    EXPECT_NE(s.find("CELL_TYPES 6"), std::string::npos);
    EXPECT_NE(s.find("POINT_DATA 8"), std::string::npos);
    EXPECT_NE(s.find("SCALARS u_h double 1"), std::string::npos);
    EXPECT_NE(s.find("CELL_DATA 6"), std::string::npos);
    EXPECT_NE(s.find("SCALARS sigma_h double 1"), std::string::npos);
    const std::vector<double> wrong(3, 0.0);
    const VtkField bad{"bad", wrong};
    std::ostringstream sink;
    EXPECT_THROW(write_vtk(sink, mesh, std::span<const VtkField>(&bad, 1)), InputError);
}
