#pragma once

#include "obstacle/vec3.hpp"

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace obstacle {

using Index = int;

/// Tetrahedron given by four vertex indices with positive signed volume.
struct Tet {
    std::array<Index, 4> v{};
};

struct Edge {
    std::array<Index, 2> v{}; // v[0] < v[1]
};

/// A triangular face. `tet_plus` is -1 on the boundary; otherwise tet_minus < tet_plus.
struct Face {
    std::array<Index, 3> v{}; // sorted
    Index tet_minus{-1};
    Index tet_plus{-1};

    [[nodiscard]] bool is_boundary() const noexcept { return tet_plus < 0; }
};

struct Box {
    Point3 lo{0.0, 0.0, 0.0};
    Point3 hi{1.0, 1.0, 1.0};
};

/// Local edge numbering used everywhere: (0,1),(0,2),(0,3),(1,2),(1,3),(2,3).
inline constexpr std::array<std::array<int, 2>, 6> kLocalEdges{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

/// Conforming tetrahedral mesh with derived edge and face connectivity.
///
/// Immutable once constructed. Negatively oriented input tets are reordered
/// (last two vertices swapped) so that every stored tet has positive volume.
/// Boundary classification comes from face adjacency: a face with a single
/// neighbouring tet is a boundary face, and its vertices and edges are
/// boundary entities.
class TetMesh {
public:
    TetMesh(std::vector<Point3> vertices, std::vector<Tet> tets);

    [[nodiscard]] std::span<const Point3> vertices() const noexcept { return vertices_; }
    [[nodiscard]] std::span<const Tet> tets() const noexcept { return tets_; }
    [[nodiscard]] std::span<const Edge> edges() const noexcept { return edges_; }
    [[nodiscard]] std::span<const Face> faces() const noexcept { return faces_; }

    [[nodiscard]] Index num_vertices() const noexcept { return static_cast<Index>(vertices_.size()); }
    [[nodiscard]] Index num_tets() const noexcept { return static_cast<Index>(tets_.size()); }
    [[nodiscard]] Index num_edges() const noexcept { return static_cast<Index>(edges_.size()); }
    [[nodiscard]] Index num_faces() const noexcept { return static_cast<Index>(faces_.size()); }

    [[nodiscard]] const Tet& tet(Index t) const { return tets_.at(static_cast<std::size_t>(t)); }
    [[nodiscard]] const Point3& vertex(Index v) const { return vertices_.at(static_cast<std::size_t>(v)); }

    /// Global edge ids of tet `t` in kLocalEdges order.
    [[nodiscard]] const std::array<Index, 6>& tet_edges(Index t) const
    {
        return tet_edges_.at(static_cast<std::size_t>(t));
    }

    [[nodiscard]] bool vertex_on_boundary(Index v) const { return vertex_boundary_.at(static_cast<std::size_t>(v)) != 0; }
    [[nodiscard]] bool edge_on_boundary(Index e) const { return edge_boundary_.at(static_cast<std::size_t>(e)) != 0; }

    [[nodiscard]] Point3 edge_midpoint(Index e) const;

    /// Largest tet diameter.
    [[nodiscard]] double mesh_size() const;
    [[nodiscard]] double total_volume() const;

private:
    std::vector<Point3> vertices_;
    std::vector<Tet> tets_;
    std::vector<Edge> edges_;
    std::vector<std::array<Index, 6>> tet_edges_;
    std::vector<Face> faces_;
    std::vector<char> vertex_boundary_;
    std::vector<char> edge_boundary_;
};

struct ElementGeometry {
    std::array<Point3, 4> vertices{};
    double volume{0.0};
    double diameter{0.0};
    std::array<Vec3, 4> grad_lambda{};

    /// Physical point of the barycentric coordinates `bary`.
    [[nodiscard]] Point3 point(const std::array<double, 4>& bary) const noexcept
    {
        Point3 p{};
        for (int i = 0; i < 4; ++i) {
            p += bary[static_cast<std::size_t>(i)] * vertices[static_cast<std::size_t>(i)];
        }
        return p;
    }
};

struct InteriorFace {
    Index face{-1};
    std::array<Index, 3> v{};
    Index tet_minus{-1};
    Index tet_plus{-1};
    Vec3 normal{}; // unit, pointing from tet_minus into tet_plus
    double diameter{0.0};
    double area{0.0};
};

double signed_volume(const Point3& a, const Point3& b, const Point3& c, const Point3& d) noexcept;

/// Kuhn (Freudenthal) mesh of `box`: n^3 subcubes, six tets each.
TetMesh build_box_mesh(const Box& box, int n);

/// Red refinement: each tet is split into four corner tets and four tets
/// of the inner octahedron cut along its shortest diagonal.
TetMesh uniform_refine(const TetMesh& mesh);

ElementGeometry element_geometry(const TetMesh& mesh, Index t);

std::vector<InteriorFace> interior_faces(const TetMesh& mesh);

struct VtkField {
    std::string name;
    std::span<const double> values;
};

/// Legacy VTK unstructured grid (ASCII) with optional point and cell scalars.
void write_vtk(std::ostream& out, const TetMesh& mesh,
               std::span<const VtkField> point_data = {},
               std::span<const VtkField> cell_data = {});

} // namespace obstacle
