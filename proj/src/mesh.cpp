#include "obstacle/mesh.hpp"

#include "obstacle/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <tuple>
#include <utility>

namespace obstacle {

namespace {

constexpr double kDegenerateRatio = 1e-10;

double tet_diameter(const std::array<Point3, 4>& p) noexcept
{
    double h = 0.0;
    for (const auto& [i, j] : kLocalEdges) {
        h = std::max(h, norm(p[static_cast<std::size_t>(j)] - p[static_cast<std::size_t>(i)]));
    }
    return h;
}

std::array<Point3, 4> tet_points(const std::vector<Point3>& vertices, const Tet& tet)
{
    return {vertices[static_cast<std::size_t>(tet.v[0])], vertices[static_cast<std::size_t>(tet.v[1])],
            vertices[static_cast<std::size_t>(tet.v[2])], vertices[static_cast<std::size_t>(tet.v[3])]};
}

} // namespace

double signed_volume(const Point3& a, const Point3& b, const Point3& c, const Point3& d) noexcept
{
    return dot(b - a, cross(c - a, d - a)) / 6.0;
}

TetMesh::TetMesh(std::vector<Point3> vertices, std::vector<Tet> tets)
    : vertices_(std::move(vertices)), tets_(std::move(tets))
{
    const auto nv = static_cast<Index>(vertices_.size());
    for (const auto& p : vertices_) {
        if (!is_finite(p)) {
            throw InputError("TetMesh: non-finite vertex coordinate");
        }
    }

    for (std::size_t t = 0; t < tets_.size(); ++t) {
        auto& tet = tets_[t];
        for (int i = 0; i < 4; ++i) {
            const Index vi = tet.v[static_cast<std::size_t>(i)];
            if (vi < 0 || vi >= nv) {
                throw InputError("TetMesh: tet " + std::to_string(t) + " references vertex " +
                                 std::to_string(vi) + " out of range");
            }
            for (int j = 0; j < i; ++j) {
                if (tet.v[static_cast<std::size_t>(j)] == vi) {
                    throw InputError("TetMesh: tet " + std::to_string(t) + " has repeated vertices");
                }
            }
        }
        const auto p = tet_points(vertices_, tet);
        const double vol = signed_volume(p[0], p[1], p[2], p[3]);
        const double h = tet_diameter(p);
        if (!(std::abs(vol) > kDegenerateRatio * h * h * h)) {
            throw DegenerateElementError(static_cast<Index>(t),
                                         "TetMesh: degenerate tet " + std::to_string(t));
        }
        if (vol < 0.0) {
            std::swap(tet.v[2], tet.v[3]);
        }
    }

    // Edges: collect all tet-local edges, sort, deduplicate.
    struct EdgeRef {
        Index a, b, tet;
        int local;
    };
    std::vector<EdgeRef> refs;
    refs.reserve(tets_.size() * 6);
    for (std::size_t t = 0; t < tets_.size(); ++t) {
        for (int e = 0; e < 6; ++e) {
            const auto& le = kLocalEdges[static_cast<std::size_t>(e)];
            Index a = tets_[t].v[static_cast<std::size_t>(le[0])];
            Index b = tets_[t].v[static_cast<std::size_t>(le[1])];
            if (a > b) {
                std::swap(a, b);
            }
            refs.push_back({a, b, static_cast<Index>(t), e});
        }
    }
    std::sort(refs.begin(), refs.end(), [](const EdgeRef& l, const EdgeRef& r) {
        return std::tie(l.a, l.b, l.tet, l.local) < std::tie(r.a, r.b, r.tet, r.local);
    });
    tet_edges_.assign(tets_.size(), {});
    for (std::size_t i = 0; i < refs.size(); ++i) {
        if (i == 0 || refs[i].a != refs[i - 1].a || refs[i].b != refs[i - 1].b) {
            edges_.push_back({{refs[i].a, refs[i].b}});
        }
        tet_edges_[static_cast<std::size_t>(refs[i].tet)][static_cast<std::size_t>(refs[i].local)] =
            static_cast<Index>(edges_.size() - 1);
    }

    // Faces: face opposite local vertex i, keyed by its sorted vertex triple.
    struct FaceRef {
        std::array<Index, 3> v;
        Index tet;
    };
    std::vector<FaceRef> frefs;
    frefs.reserve(tets_.size() * 4);
    for (std::size_t t = 0; t < tets_.size(); ++t) {
        for (int skip = 0; skip < 4; ++skip) {
            std::array<Index, 3> f{};
            int k = 0;
            for (int i = 0; i < 4; ++i) {
                if (i != skip) {
                    f[static_cast<std::size_t>(k++)] = tets_[t].v[static_cast<std::size_t>(i)];
                }
            }
            std::sort(f.begin(), f.end());
            frefs.push_back({f, static_cast<Index>(t)});
        }
    }
    std::sort(frefs.begin(), frefs.end(), [](const FaceRef& l, const FaceRef& r) {
        return std::tie(l.v, l.tet) < std::tie(r.v, r.tet);
    });
    vertex_boundary_.assign(vertices_.size(), 0);
    for (std::size_t i = 0; i < frefs.size();) {
        std::size_t j = i + 1;
        while (j < frefs.size() && frefs[j].v == frefs[i].v) {
            ++j;
        }
        if (j - i > 2) {
            throw InputError("TetMesh: non-conforming mesh, face shared by more than two tets");
        }
        Face face{frefs[i].v, frefs[i].tet, j - i == 2 ? frefs[i + 1].tet : -1};
        if (face.is_boundary()) {
            for (Index v : face.v) {
                vertex_boundary_[static_cast<std::size_t>(v)] = 1;
            }
        }
        faces_.push_back(face);
        i = j;
    }

    edge_boundary_.assign(edges_.size(), 0);
    // An edge lies on the boundary iff it belongs to some boundary face.
    for (const auto& face : faces_) {
        if (!face.is_boundary()) {
            continue;
        }
        const auto& tet = tets_[static_cast<std::size_t>(face.tet_minus)];
        const auto& te = tet_edges_[static_cast<std::size_t>(face.tet_minus)];
        for (int e = 0; e < 6; ++e) {
            const auto& le = kLocalEdges[static_cast<std::size_t>(e)];
            const Index a = tet.v[static_cast<std::size_t>(le[0])];
            const Index b = tet.v[static_cast<std::size_t>(le[1])];
            const bool in_face = std::find(face.v.begin(), face.v.end(), a) != face.v.end() &&
                                 std::find(face.v.begin(), face.v.end(), b) != face.v.end();
            if (in_face) {
                edge_boundary_[static_cast<std::size_t>(te[static_cast<std::size_t>(e)])] = 1;
            }
        }
    }
}

Point3 TetMesh::edge_midpoint(Index e) const
{
    const auto& edge = edges_.at(static_cast<std::size_t>(e));
    return 0.5 * (vertices_[static_cast<std::size_t>(edge.v[0])] + vertices_[static_cast<std::size_t>(edge.v[1])]);
}

double TetMesh::mesh_size() const
{
    double h = 0.0;
    for (const auto& tet : tets_) {
        h = std::max(h, tet_diameter(tet_points(vertices_, tet)));
    }
    return h;
}

double TetMesh::total_volume() const
{
    double vol = 0.0;
    for (const auto& tet : tets_) {
        const auto p = tet_points(vertices_, tet);
        vol += signed_volume(p[0], p[1], p[2], p[3]);
    }
    return vol;
}

TetMesh build_box_mesh(const Box& box, int n)
{
    if (n < 1) {
        throw InputError("build_box_mesh: n must be >= 1");
    }
    const Vec3 ext = box.hi - box.lo;
    if (!is_finite(box.lo) || !is_finite(box.hi) || !(ext.x > 0.0) || !(ext.y > 0.0) || !(ext.z > 0.0)) {
        throw InputError("build_box_mesh: degenerate box");
    }

    const int m = n + 1;
    std::vector<Point3> vertices;
    vertices.reserve(static_cast<std::size_t>(m) * m * m);
    for (int k = 0; k < m; ++k) {
        for (int j = 0; j < m; ++j) {
            for (int i = 0; i < m; ++i) {
                vertices.push_back({box.lo.x + ext.x * i / n, box.lo.y + ext.y * j / n, box.lo.z + ext.z * k / n});
            }
        }
    }
    auto id = [m](int i, int j, int k) { return static_cast<Index>(i + m * (j + m * k)); };

    // Each subcube is cut into the six simplices along its main diagonal,
    // one per axis ordering of the monotone path from corner 000 to 111.
    constexpr std::array<std::array<int, 3>, 6> perms{{{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
    std::vector<Tet> tets;
    tets.reserve(static_cast<std::size_t>(6) * n * n * n);
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                for (const auto& perm : perms) {
                    std::array<int, 3> c{i, j, k};
                    Tet tet;
                    tet.v[0] = id(c[0], c[1], c[2]);
                    for (int s = 0; s < 3; ++s) {
                        ++c[static_cast<std::size_t>(perm[static_cast<std::size_t>(s)])];
                        tet.v[static_cast<std::size_t>(s + 1)] = id(c[0], c[1], c[2]);
                    }
                    tets.push_back(tet);
                }
            }
        }
    }
    return TetMesh(std::move(vertices), std::move(tets));
}

TetMesh uniform_refine(const TetMesh& mesh)
{
    const Index nv = mesh.num_vertices();
    std::vector<Point3> vertices(mesh.vertices().begin(), mesh.vertices().end());
    vertices.reserve(static_cast<std::size_t>(nv + mesh.num_edges()));
    for (Index e = 0; e < mesh.num_edges(); ++e) {
        vertices.push_back(mesh.edge_midpoint(e));
    }

    // Opposite edge pairs in local edge numbering; each defines one octahedron diagonal.
    constexpr std::array<std::array<int, 2>, 3> diagonals{{{0, 5}, {1, 4}, {2, 3}}};

    std::vector<Tet> tets;
    tets.reserve(static_cast<std::size_t>(mesh.num_tets()) * 8);
    for (Index t = 0; t < mesh.num_tets(); ++t) {
        const auto& v = mesh.tet(t).v;
        const auto& te = mesh.tet_edges(t);
        std::array<Index, 6> mid{};
        for (std::size_t e = 0; e < 6; ++e) {
            mid[e] = nv + te[e];
        }
        // mid: m01, m02, m03, m12, m13, m23
        tets.push_back({{v[0], mid[0], mid[1], mid[2]}});
        tets.push_back({{mid[0], v[1], mid[3], mid[4]}});
        tets.push_back({{mid[1], mid[3], v[2], mid[5]}});
        tets.push_back({{mid[2], mid[4], mid[5], v[3]}});

        // Shortest diagonal; ties go to the lexicographically lowest vertex pair.
        std::array<double, 3> len{};
        std::array<std::pair<Index, Index>, 3> key{};
        for (std::size_t d = 0; d < 3; ++d) {
            const Index a = mid[static_cast<std::size_t>(diagonals[d][0])];
            const Index b = mid[static_cast<std::size_t>(diagonals[d][1])];
            len[d] = norm(vertices[static_cast<std::size_t>(a)] - vertices[static_cast<std::size_t>(b)]);
            key[d] = {std::min(a, b), std::max(a, b)};
        }
        const double shortest = *std::min_element(len.begin(), len.end());
        int best = -1;
        for (std::size_t d = 0; d < 3; ++d) {
            if (len[d] <= shortest * (1.0 + 1e-12) &&
                (best < 0 || key[d] < key[static_cast<std::size_t>(best)])) {
                best = static_cast<int>(d);
            }
        }
        const auto& diag = diagonals[static_cast<std::size_t>(best)];
        const auto& other1 = diagonals[static_cast<std::size_t>((best + 1) % 3)];
        const auto& other2 = diagonals[static_cast<std::size_t>((best + 2) % 3)];
        const Index a = mid[static_cast<std::size_t>(diag[0])];
        const Index b = mid[static_cast<std::size_t>(diag[1])];
        // Equator cycle p, q, p', q' alternates between the two other opposite pairs.
        const std::array<Index, 4> ring{mid[static_cast<std::size_t>(other1[0])], mid[static_cast<std::size_t>(other2[0])],
                                        mid[static_cast<std::size_t>(other1[1])], mid[static_cast<std::size_t>(other2[1])]};
        for (std::size_t s = 0; s < 4; ++s) {
            tets.push_back({{a, b, ring[s], ring[(s + 1) % 4]}});
        }
    }
    return TetMesh(std::move(vertices), std::move(tets));
}

ElementGeometry element_geometry(const TetMesh& mesh, Index t)
{
    if (t < 0 || t >= mesh.num_tets()) {
        throw InputError("element_geometry: tet id " + std::to_string(t) + " out of range");
    }
    ElementGeometry g;
    const auto& tet = mesh.tet(t);
    for (std::size_t i = 0; i < 4; ++i) {
        g.vertices[i] = mesh.vertex(tet.v[i]);
    }
    const Vec3 a = g.vertices[1] - g.vertices[0];
    const Vec3 b = g.vertices[2] - g.vertices[0];
    const Vec3 c = g.vertices[3] - g.vertices[0];
    const double det = dot(a, cross(b, c));
    g.diameter = tet_diameter(g.vertices);
    g.volume = std::abs(det) / 6.0;
    if (!(g.volume > kDegenerateRatio * g.diameter * g.diameter * g.diameter)) {
        throw DegenerateElementError(t, "element_geometry: degenerate tet " + std::to_string(t));
    }
    // Rows of the inverse Jacobian are the gradients of lambda_1..lambda_3.
    g.grad_lambda[1] = (1.0 / det) * cross(b, c);
    g.grad_lambda[2] = (1.0 / det) * cross(c, a);
    g.grad_lambda[3] = (1.0 / det) * cross(a, b);
    g.grad_lambda[0] = -1.0 * (g.grad_lambda[1] + g.grad_lambda[2] + g.grad_lambda[3]);
    return g;
}

std::vector<InteriorFace> interior_faces(const TetMesh& mesh)
{
    std::vector<InteriorFace> out;
    for (Index f = 0; f < mesh.num_faces(); ++f) {
        const auto& face = mesh.faces()[static_cast<std::size_t>(f)];
        if (face.is_boundary()) {
            continue;
        }
        InteriorFace iface;
        iface.face = f;
        iface.v = face.v;
        iface.tet_minus = face.tet_minus;
        iface.tet_plus = face.tet_plus;
        const Point3& p0 = mesh.vertex(face.v[0]);
        const Point3& p1 = mesh.vertex(face.v[1]);
        const Point3& p2 = mesh.vertex(face.v[2]);
        Vec3 n = cross(p1 - p0, p2 - p0);
        const double twice_area = norm(n);
        iface.area = 0.5 * twice_area;
        n *= 1.0 / twice_area;
        Point3 opposite{};
        for (Index v : mesh.tet(face.tet_minus).v) {
            if (std::find(face.v.begin(), face.v.end(), v) == face.v.end()) {
                opposite = mesh.vertex(v);
            }
        }
        if (dot(n, opposite - p0) > 0.0) {
            n *= -1.0;
        }
        iface.normal = n;
        iface.diameter = std::max({norm(p1 - p0), norm(p2 - p0), norm(p2 - p1)});
        out.push_back(iface);
    }
    return out;
}

void write_vtk(std::ostream& out, const TetMesh& mesh, std::span<const VtkField> point_data,
               std::span<const VtkField> cell_data)
{
    const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
    out << "# vtk DataFile Version 3.0\n"
        << "obstacle P2+bubble solution\n"
        << "ASCII\n"
        << "DATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << mesh.num_vertices() << " double\n";
    for (const auto& p : mesh.vertices()) {
        out << p.x << ' ' << p.y << ' ' << p.z << '\n';
    }
    out << "CELLS " << mesh.num_tets() << ' ' << 5 * mesh.num_tets() << '\n';
    for (const auto& tet : mesh.tets()) {
        out << 4 << ' ' << tet.v[0] << ' ' << tet.v[1] << ' ' << tet.v[2] << ' ' << tet.v[3] << '\n';
    }
    out << "CELL_TYPES " << mesh.num_tets() << '\n';
    for (Index t = 0; t < mesh.num_tets(); ++t) {
        out << "10\n";
    }
    auto write_fields = [&out](const char* section, Index count, std::span<const VtkField> fields) {
        if (fields.empty()) {
            return;
        }
        out << section << ' ' << count << '\n';
        for (const auto& field : fields) {
            if (static_cast<Index>(field.values.size()) != count) {
                throw InputError("write_vtk: field '" + field.name + "' has wrong length");
            }
            out << "SCALARS " << field.name << " double 1\nLOOKUP_TABLE default\n";
            for (double v : field.values) {
                out << v << '\n';
            }
        }
    };
    write_fields("POINT_DATA", mesh.num_vertices(), point_data);
    write_fields("CELL_DATA", mesh.num_tets(), cell_data);
    out.precision(old_precision);
}

} // namespace obstacle
