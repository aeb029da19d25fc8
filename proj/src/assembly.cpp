#include "obstacle/assembly.hpp"

#include "obstacle/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

namespace obstacle {

namespace {

// (1/|T|) * integral of d(phi_a)/d(lambda_i) * d(phi_b)/d(lambda_j); independent of T.
using ReferenceTensor = std::array<std::array<std::array<std::array<double, 4>, 4>, kLocalDofs>, kLocalDofs>;

const ReferenceTensor& reference_stiffness(int degree)
{
    static const auto tables = [] {
        std::array<ReferenceTensor, kMaxQuadratureDegree + 1> all{};
        for (int d = 1; d <= kMaxQuadratureDegree; ++d) {
            const auto& rule = tet_rule(d);
            auto& tensor = all[static_cast<std::size_t>(d)];
            for (std::size_t q = 0; q < rule.size(); ++q) {
                const auto der = basis_lambda_derivatives(rule.points[q]);
                const double w = rule.weights[q];
                for (std::size_t a = 0; a < kLocalDofs; ++a) {
                    for (std::size_t b = 0; b < kLocalDofs; ++b) {
                        for (std::size_t i = 0; i < 4; ++i) {
                            for (std::size_t j = 0; j < 4; ++j) {
                                tensor[a][b][i][j] += w * der[a][i] * der[b][j];
                            }
                        }
                    }
                }
            }
        }
        return all;
    }();
    if (degree < 1 || degree > kMaxQuadratureDegree) {
        throw InputError("stiffness quadrature degree " + std::to_string(degree) + " unsupported");
    }
    return tables[static_cast<std::size_t>(degree)];
}

void require_finite(double v, Index t, const char* what)
{
    if (!std::isfinite(v)) {
        throw NonFiniteDataError(t, std::string("assemble: non-finite ") + what + " on element " + std::to_string(t));
    }
}

// Compressed-row pattern of the coupling graph: (i, j) present iff some tet holds both DOFs.
struct Pattern {
    std::vector<int> outer;
    std::vector<int> inner;
};

Pattern build_pattern(const DofMap& dofs)
{
    const auto n = static_cast<std::size_t>(dofs.size());
    std::vector<int> count(n + 1, 0);
    for (Index t = 0; t < dofs.num_tets(); ++t) {
        for (Index d : dofs.local_dofs(t)) {
            ++count[static_cast<std::size_t>(d) + 1];
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        count[i + 1] += count[i];
    }
    std::vector<Index> adjacency(static_cast<std::size_t>(count[n]));
    std::vector<int> fill(count.begin(), count.end() - 1);
    for (Index t = 0; t < dofs.num_tets(); ++t) {
        for (Index d : dofs.local_dofs(t)) {
            adjacency[static_cast<std::size_t>(fill[static_cast<std::size_t>(d)]++)] = t;
        }
    }

    Pattern p;
    p.outer.reserve(n + 1);
    p.outer.push_back(0);
    std::vector<Index> row;
    for (std::size_t i = 0; i < n; ++i) {
        row.clear();
        for (int k = count[i]; k < count[i + 1]; ++k) {
            const auto& ld = dofs.local_dofs(adjacency[static_cast<std::size_t>(k)]);
            row.insert(row.end(), ld.begin(), ld.end());
        }
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
        p.inner.insert(p.inner.end(), row.begin(), row.end());
        p.outer.push_back(static_cast<int>(p.inner.size()));
    }
    return p;
}

} // namespace

std::array<std::array<double, kLocalDofs>, kLocalDofs> element_stiffness(const ElementGeometry& geom, int degree)
{
    const auto& ref = reference_stiffness(degree);
    std::array<std::array<double, 4>, 4> gram{};
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            gram[i][j] = dot(geom.grad_lambda[i], geom.grad_lambda[j]);
        }
    }
    std::array<std::array<double, kLocalDofs>, kLocalDofs> k{};
    for (std::size_t a = 0; a < kLocalDofs; ++a) {
        for (std::size_t b = a; b < kLocalDofs; ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < 4; ++i) {
                for (std::size_t j = 0; j < 4; ++j) {
                    s += ref[a][b][i][j] * gram[i][j];
                }
            }
            k[a][b] = s * geom.volume;
            k[b][a] = k[a][b];
        }
    }
    return k;
}

SparseMatrix assemble_stiffness(const TetMesh& mesh, const DofMap& dofs, int degree)
{
    const Pattern pattern = build_pattern(dofs);
    std::vector<double> values(pattern.inner.size(), 0.0);
    for (Index t = 0; t < mesh.num_tets(); ++t) {
        const auto k = element_stiffness(element_geometry(mesh, t), degree);
        const auto& ld = dofs.local_dofs(t);
        for (std::size_t a = 0; a < kLocalDofs; ++a) {
            const auto row = static_cast<std::size_t>(ld[a]);
            const auto first = pattern.inner.begin() + pattern.outer[row];
            const auto last = pattern.inner.begin() + pattern.outer[row + 1];
            for (std::size_t b = 0; b < kLocalDofs; ++b) {
                const auto pos = std::lower_bound(first, last, ld[b]);
                values[static_cast<std::size_t>(pos - pattern.inner.begin())] += k[a][b];
            }
        }
    }
    const Index n = dofs.size();
    const Eigen::Map<const SparseMatrix> view(n, n, static_cast<Index>(values.size()), pattern.outer.data(),
                                              pattern.inner.data(), values.data());
    return SparseMatrix(view);
}

ConstrainedSystem assemble(const TetMesh& mesh, const DofMap& dofs, const ProblemData& data,
                           const QuadratureDegrees& degrees)
{
    if (!data.f || !data.obstacle || !data.boundary) {
        throw InputError("assemble: f, obstacle and boundary data must all be set");
    }
    const Index n = dofs.size();
    const Index m = mesh.num_tets();

    ConstrainedSystem sys;
    sys.num_p2 = dofs.num_p2();
    sys.A = assemble_stiffness(mesh, dofs, degrees.stiffness);
    sys.b = Eigen::VectorXd::Zero(n);
    sys.gamma = Eigen::VectorXd::Zero(m);
    sys.volumes = Eigen::VectorXd::Zero(m);
    sys.dirichlet_mask.assign(dofs.dirichlet_mask().begin(), dofs.dirichlet_mask().end());
    sys.dirichlet_values = Eigen::VectorXd::Zero(n);
    sys.element_dofs.reserve(static_cast<std::size_t>(m));

    std::vector<char> boundary_done(static_cast<std::size_t>(n), 0);
    std::vector<Eigen::Triplet<double, int>> b_entries;
    b_entries.reserve(static_cast<std::size_t>(m) * kLocalDofs);

    const auto& rule = tet_rule(degrees.load);
    for (Index t = 0; t < m; ++t) {
        const auto geom = element_geometry(mesh, t);
        const auto& ld = dofs.local_dofs(t);
        sys.element_dofs.push_back(ld);
        sys.volumes(t) = geom.volume;

        LocalVector load{};
        double chi_integral = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const auto& bary = rule.points[q];
            const Point3 x = geom.point(bary);
            const double fx = data.f(x);
            const double chi = data.obstacle(x);
            require_finite(fx, t, "load f");
            require_finite(chi, t, "obstacle");
            const BasisValue basis = eval_basis(geom, bary);
            const double w = rule.weights[q] * geom.volume;
            for (std::size_t a = 0; a < kLocalDofs; ++a) {
                load[a] += w * fx * basis.value[a];
            }
            chi_integral += w * chi;
        }
        for (std::size_t a = 0; a < kLocalDofs; ++a) {
            sys.b(ld[a]) += load[a];
            b_entries.emplace_back(ld[a], t, kElementMeans[a]);
        }
        sys.gamma(t) = chi_integral / geom.volume;

        for (std::size_t a = 0; a < kP2LocalDofs; ++a) {
            const Index d = ld[a];
            if (dofs.is_dirichlet(d) && !boundary_done[static_cast<std::size_t>(d)]) {
                const double g = data.boundary(dofs.node(d));
                require_finite(g, t, "boundary value");
                sys.dirichlet_values(d) = g;
                boundary_done[static_cast<std::size_t>(d)] = 1;
            }
        }
    }
    sys.B.resize(n, m);
    sys.B.setFromTriplets(b_entries.begin(), b_entries.end());

    // Symmetric elimination of Dirichlet DOFs; the sparsity pattern is kept.
    for (Index i = 0; i < n; ++i) {
        const bool row_fixed = sys.is_dirichlet(i);
        if (!row_fixed) {
            sys.free_dofs.push_back(i);
        }
        for (SparseMatrix::InnerIterator it(sys.A, i); it; ++it) {
            const Index j = it.col();
            if (row_fixed) {
                it.valueRef() = (j == i) ? 1.0 : 0.0;
            } else if (sys.is_dirichlet(j)) {
                sys.b(i) -= it.value() * sys.dirichlet_values(j);
                it.valueRef() = 0.0;
            }
        }
        if (row_fixed) {
            sys.b(i) = sys.dirichlet_values(i);
        }
    }
    return sys;
}

Eigen::VectorXd stiffness_action(const SparseMatrix& A, const Eigen::VectorXd& alpha)
{
    if (A.cols() != alpha.size()) {
        throw InputError("stiffness_action: dimension mismatch (" + std::to_string(A.cols()) + " vs " +
                         std::to_string(alpha.size()) + ")");
    }
    return A * alpha;
}

double energy(const SparseMatrix& A, const Eigen::VectorXd& alpha)
{
    return alpha.dot(stiffness_action(A, alpha));
}

namespace {

template <typename Matrix>
void write_market(std::ostream& out, const Matrix& matrix)
{
    const auto old = out.precision(std::numeric_limits<double>::max_digits10);
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << matrix.rows() << ' ' << matrix.cols() << ' ' << matrix.nonZeros() << '\n';
    for (Index k = 0; k < matrix.outerSize(); ++k) {
        for (typename Matrix::InnerIterator it(matrix, k); it; ++it) {
            out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
        }
    }
    out.precision(old);
}

} // namespace

void write_matrix_market(std::ostream& out, const SparseMatrix& matrix) { write_market(out, matrix); }
void write_matrix_market(std::ostream& out, const SparseColMatrix& matrix) { write_market(out, matrix); }

} // namespace obstacle
