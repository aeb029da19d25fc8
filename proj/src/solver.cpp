#include "obstacle/solver.hpp"

#include "obstacle/error.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <algorithm>
#include <cmath>
#include <deque>
#include <iostream>

namespace obstacle {

namespace {

constexpr double kInverseBubbleMean = 105.0 / 32.0;

using P2Matrix = std::array<std::array<double, kP2LocalDofs>, kP2LocalDofs>;
using P2Vector = std::array<double, kP2LocalDofs>;

// Bubble row of one element: A(b, b), A(b, p) for its 10 P2 DOFs, and b(b).
struct BubbleRow {
    double diag{0.0};
    P2Vector coupling{};
    double load{0.0};
};

// Step 2 with every bubble DOF eliminated element by element.
//
// Inactive element: the bubble row  d c + a.x = r  gives c = (r - a.x) / d.
// Active element: the mean constraint gives c = k (gamma - m.x) with
// k = 105/32, and the bubble row then determines beta. Substituting c (and
// beta) into the P2 rows leaves a symmetric positive definite system for the
// P2 unknowns x alone.
class CondensedSystem {
public:
    explicit CondensedSystem(const ConstrainedSystem& sys) : sys_(sys)
    {
        compact_.assign(static_cast<std::size_t>(sys.num_p2), -1);
        for (Index d = 0; d < sys.num_p2; ++d) {
            if (!sys.is_dirichlet(d)) {
                compact_[static_cast<std::size_t>(d)] = static_cast<Index>(free_p2_.size());
                free_p2_.push_back(d);
            }
        }
        const auto nf = static_cast<Index>(free_p2_.size());

        std::vector<int> outer{0};
        std::vector<int> inner;
        std::vector<double> values;
        base_rhs_.resize(nf);
        for (Index fi = 0; fi < nf; ++fi) {
            const Index row = free_p2_[static_cast<std::size_t>(fi)];
            for (SparseMatrix::InnerIterator it(sys.A, row); it; ++it) {
                if (it.col() < sys.num_p2) {
                    const Index fj = compact_[static_cast<std::size_t>(it.col())];
                    if (fj >= 0) {
                        inner.push_back(fj);
                        values.push_back(it.value());
                    }
                }
            }
            outer.push_back(static_cast<int>(inner.size()));
            base_rhs_(fi) = sys.b(row);
        }
        const Eigen::Map<const SparseMatrix> view(nf, nf, static_cast<Index>(values.size()), outer.data(),
                                                  inner.data(), values.data());
        base_ = SparseMatrix(view);

        rows_.resize(static_cast<std::size_t>(sys.num_elements()));
        for (Index t = 0; t < sys.num_elements(); ++t) {
            const auto& ld = sys.element_dofs[static_cast<std::size_t>(t)];
            const Index bubble = ld[kBubbleLocal];
            BubbleRow& row = rows_[static_cast<std::size_t>(t)];
            for (SparseMatrix::InnerIterator it(sys.A, bubble); it; ++it) {
                if (it.col() == bubble) {
                    row.diag = it.value();
                    continue;
                }
                for (std::size_t a = 0; a < kP2LocalDofs; ++a) {
                    if (ld[a] == it.col()) {
                        row.coupling[a] = it.value();
                    }
                }
            }
            row.load = sys.b(bubble);
            if (!(row.diag > 0.0)) {
                throw SolverError("step2: non-positive bubble diagonal on element " + std::to_string(t));
            }
        }
    }

    Step2Result solve(const std::vector<char>& active, double tolerance, const Eigen::VectorXd* guess) const
    {
        SparseMatrix K = base_;
        Eigen::VectorXd rhs = base_rhs_;
        double* kv = K.valuePtr();
        const int* ko = K.outerIndexPtr();
        const int* ki = K.innerIndexPtr();
        const auto& m = kElementMeans;
        const double k = kInverseBubbleMean;
        Index active_count = 0;

        for (Index t = 0; t < sys_.num_elements(); ++t) {
            const auto& ld = sys_.element_dofs[static_cast<std::size_t>(t)];
            const BubbleRow& row = rows_[static_cast<std::size_t>(t)];
            const auto& a = row.coupling;
            const double d = row.diag;
            P2Matrix S{};
            P2Vector s{};
            if (active[static_cast<std::size_t>(t)]) {
                ++active_count;
                const double g = sys_.gamma(t);
                for (std::size_t i = 0; i < kP2LocalDofs; ++i) {
                    for (std::size_t j = 0; j < kP2LocalDofs; ++j) {
                        S[i][j] = k * k * d * m[i] * m[j] - k * (a[i] * m[j] + m[i] * a[j]);
                    }
                    s[i] = -(k * a[i] * g + k * m[i] * row.load - k * k * d * m[i] * g);
                }
            } else {
                for (std::size_t i = 0; i < kP2LocalDofs; ++i) {
                    for (std::size_t j = 0; j < kP2LocalDofs; ++j) {
                        S[i][j] = -a[i] * a[j] / d;
                    }
                    s[i] = -a[i] * row.load / d;
                }
            }
            for (std::size_t i = 0; i < kP2LocalDofs; ++i) {
                const Index fi = compact_[static_cast<std::size_t>(ld[i])];
                if (fi < 0) {
                    continue;
                }
                rhs(fi) += s[i];
                for (std::size_t j = 0; j < kP2LocalDofs; ++j) {
                    const Index fj = compact_[static_cast<std::size_t>(ld[j])];
                    if (fj < 0) {
                        rhs(fi) -= S[i][j] * sys_.dirichlet_values(ld[j]);
                        continue;
                    }
                    const int* pos = std::lower_bound(ki + ko[fi], ki + ko[fi + 1], fj);
                    kv[pos - ki] += S[i][j];
                }
            }
        }

        Step2Result out;
        out.stats.active_count = active_count;
        out.alpha = sys_.dirichlet_values;
        if (K.rows() > 0) {
            Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper,
                                     Eigen::IncompleteCholesky<double, Eigen::Lower, Eigen::AMDOrdering<int>>>
                cg;
            cg.setTolerance(tolerance);
            cg.setMaxIterations(std::max<Index>(1000, 2 * static_cast<Index>(K.rows())));
            cg.compute(K);
            if (cg.info() != Eigen::Success) {
                throw SolverError("step2: preconditioner setup failed with " + std::to_string(active_count) +
                                  " active constraints");
            }
            Eigen::VectorXd x;
            if (guess != nullptr && guess->size() == sys_.num_dofs()) {
                Eigen::VectorXd x0(K.rows());
                for (Index fi = 0; fi < K.rows(); ++fi) {
                    x0(fi) = (*guess)(free_p2_[static_cast<std::size_t>(fi)]);
                }
                x = cg.solveWithGuess(rhs, x0);
            } else {
                x = cg.solve(rhs);
            }
            if (cg.info() != Eigen::Success || !x.allFinite()) {
                throw SolverError("step2: reduced system is singular or CG failed to converge with " +
                                  std::to_string(active_count) + " active constraints");
            }
            out.stats.cg_iterations = static_cast<int>(cg.iterations());
            out.stats.cg_relative_residual = cg.error();
            for (Index fi = 0; fi < K.rows(); ++fi) {
                out.alpha(free_p2_[static_cast<std::size_t>(fi)]) = x(fi);
            }
        }

        out.beta = Eigen::VectorXd::Zero(sys_.num_elements());
        for (Index t = 0; t < sys_.num_elements(); ++t) {
            const auto& ld = sys_.element_dofs[static_cast<std::size_t>(t)];
            const BubbleRow& row = rows_[static_cast<std::size_t>(t)];
            double coupling = 0.0;
            double p2_mean = 0.0;
            for (std::size_t i = 0; i < kP2LocalDofs; ++i) {
                coupling += row.coupling[i] * out.alpha(ld[i]);
                p2_mean += m[i] * out.alpha(ld[i]);
            }
            if (active[static_cast<std::size_t>(t)]) {
                const double c = k * (sys_.gamma(t) - p2_mean);
                out.alpha(ld[kBubbleLocal]) = c;
                out.beta(t) = k * (row.load - row.diag * c - coupling) / sys_.volumes(t);
            } else {
                out.alpha(ld[kBubbleLocal]) = (row.load - coupling) / row.diag;
            }
        }
        out.stats.relative_residual = relative_residual(out.alpha, out.beta);
        return out;
    }

    [[nodiscard]] double relative_residual(const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta) const
    {
        const Eigen::VectorXd scaled = beta.cwiseProduct(sys_.volumes);
        Eigen::VectorXd r = sys_.A * alpha + sys_.B * scaled - sys_.b;
        double rn = 0.0;
        double bn = 0.0;
        for (Index i = 0; i < r.size(); ++i) {
            if (!sys_.is_dirichlet(i)) {
                rn += r(i) * r(i);
                bn += sys_.b(i) * sys_.b(i);
            }
        }
        return bn > 0.0 ? std::sqrt(rn / bn) : std::sqrt(rn);
    }

private:
    const ConstrainedSystem& sys_;
    std::vector<Index> compact_;
    std::vector<Index> free_p2_;
    SparseMatrix base_;
    Eigen::VectorXd base_rhs_;
    std::vector<BubbleRow> rows_;
};

std::vector<char> active_mask(const ConstrainedSystem& system, std::span<const Index> active)
{
    std::vector<char> mask(static_cast<std::size_t>(system.num_elements()), 0);
    for (Index j : active) {
        if (j < 0 || j >= system.num_elements()) {
            throw InputError("step2: active index " + std::to_string(j) + " out of range");
        }
        if (mask[static_cast<std::size_t>(j)]) {
            throw SolverError("step2: rank-deficient active constraints (element " + std::to_string(j) +
                              " listed twice, " + std::to_string(active.size()) + " active)");
        }
        mask[static_cast<std::size_t>(j)] = 1;
    }
    return mask;
}

void check_system(const ConstrainedSystem& system)
{
    const Index n = system.num_dofs();
    const Index m = system.num_elements();
    if (system.A.rows() != n || system.A.cols() != n || system.B.rows() != n || system.B.cols() != m ||
        system.volumes.size() != m || static_cast<Index>(system.element_dofs.size()) != m) {
        throw InputError("solver: inconsistent ConstrainedSystem dimensions");
    }
}

std::size_t hash_mask(const std::vector<char>& mask) noexcept
{
    std::size_t h = 1469598103934665603ULL;
    for (std::size_t j = 0; j < mask.size(); ++j) {
        if (mask[j]) {
            h = (h ^ j) * 1099511628211ULL;
        }
    }
    return h;
}

} // namespace

std::string to_string(SolveStatus status)
{
    switch (status) {
    case SolveStatus::Converged:
        return "converged";
    case SolveStatus::MaxIterations:
        return "max_iterations";
    case SolveStatus::Cycling:
        return "cycling";
    }
    return "unknown";
}

Step2Result step2_solve(const ConstrainedSystem& system, std::span<const Index> active, double linear_tolerance,
                        const Eigen::VectorXd* initial_guess)
{
    check_system(system);
    const auto mask = active_mask(system, active);
    return CondensedSystem(system).solve(mask, linear_tolerance, initial_guess);
}

Eigen::VectorXd complementarity_residual(const ConstrainedSystem& system, const Eigen::VectorXd& alpha,
                                         const Eigen::VectorXd& beta, double c)
{
    if (!(c > 0.0)) {
        throw InputError("complementarity_residual: c must be positive");
    }
    if (alpha.size() != system.num_dofs() || beta.size() != system.num_elements()) {
        throw InputError("complementarity_residual: dimension mismatch");
    }
    const Eigen::VectorXd gap = system.B.transpose() * alpha - system.gamma;
    Eigen::VectorXd out(beta.size());
    for (Index j = 0; j < beta.size(); ++j) {
        out(j) = beta(j) - std::min(0.0, beta(j) + c * gap(j));
    }
    return out;
}

KktReport kkt_check(const ConstrainedSystem& system, const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta)
{
    if (alpha.size() != system.num_dofs() || beta.size() != system.num_elements()) {
        throw InputError("kkt_check: dimension mismatch");
    }
    KktReport r;
    const Eigen::VectorXd gap = system.B.transpose() * alpha - system.gamma;
    for (Index j = 0; j < gap.size(); ++j) {
        r.primal_violation = std::max(r.primal_violation, -gap(j));
        r.dual_violation = std::max(r.dual_violation, beta(j));
    }
    r.complementarity = std::abs(beta.dot(gap));
    Eigen::VectorXd res = system.A * alpha + system.B * beta.cwiseProduct(system.volumes) - system.b;
    double s = 0.0;
    for (Index i = 0; i < res.size(); ++i) {
        if (!system.is_dirichlet(i)) {
            s += res(i) * res(i);
        }
    }
    r.stationarity = std::sqrt(s);
    return r;
}

SolveResult pdas_solve(const ConstrainedSystem& system, const SolverConfig& config)
{
    if (!(config.c > 0.0)) {
        throw InputError("pdas_solve: c must be positive");
    }
    if (config.max_iterations < 1) {
        throw InputError("pdas_solve: max_iterations must be >= 1");
    }
    check_system(system);
    const CondensedSystem condensed(system);
    const Index m = system.num_elements();

    SolveResult result;
    auto& state = result.state;
    auto& report = result.report;
    std::vector<char> mask(static_cast<std::size_t>(m), 0);

    if (config.init == InitMode::Unconstrained) {
        auto init = condensed.solve(mask, config.linear_tolerance, nullptr);
        state.alpha = std::move(init.alpha);
        if (config.log_progress) {
            std::cerr << "pdas event=init cg_iters=" << init.stats.cg_iterations
                      << " residual=" << init.stats.relative_residual << '\n';
        }
    } else {
        state.alpha = system.dirichlet_values;
    }
    state.beta = Eigen::VectorXd::Zero(m);

    std::vector<char> previous;
    std::deque<std::pair<std::size_t, std::vector<char>>> history;
    report.status = SolveStatus::MaxIterations;

    for (int k = 1;; ++k) {
        const Eigen::VectorXd gap = system.B.transpose() * state.alpha - system.gamma;
        for (Index j = 0; j < m; ++j) {
            // Exact ties belong to the inactive set.
            mask[static_cast<std::size_t>(j)] = (state.beta(j) + config.c * gap(j) < 0.0) ? 1 : 0;
        }
        if (k > 1 && mask == previous) {
            report.status = SolveStatus::Converged;
            break;
        }
        const std::size_t h = hash_mask(mask);
        const bool revisited = std::any_of(history.begin(), history.end(), [&](const auto& entry) {
            return entry.first == h && entry.second == mask;
        });
        if (revisited) {
            report.status = SolveStatus::Cycling;
            break;
        }
        if (k > config.max_iterations) {
            break;
        }

        auto step = condensed.solve(mask, config.linear_tolerance, &state.alpha);
        state.alpha = std::move(step.alpha);
        state.beta = std::move(step.beta);
        report.iterations = k;
        report.inner.push_back(step.stats);

        history.emplace_back(h, mask);
        if (history.size() > 10) {
            history.pop_front();
        }
        previous = mask;

        if (config.log_progress) {
            const Eigen::VectorXd cres = complementarity_residual(system, state.alpha, state.beta, config.c);
            std::cerr << "pdas iter=" << k << " active=" << step.stats.active_count
                      << " complementarity=" << cres.lpNorm<Eigen::Infinity>()
                      << " cg_iters=" << step.stats.cg_iterations
                      << " residual=" << step.stats.relative_residual << '\n';
        }
    }

    state.active.clear();
    state.inactive.clear();
    for (Index j = 0; j < m; ++j) {
        (previous.empty() || !previous[static_cast<std::size_t>(j)] ? state.inactive : state.active).push_back(j);
    }
    report.active_count = static_cast<Index>(state.active.size());
    report.complementarity_residual =
        complementarity_residual(system, state.alpha, state.beta, config.c).lpNorm<Eigen::Infinity>();
    if (config.log_progress) {
        std::cerr << "pdas event=done status=" << to_string(report.status) << " iterations=" << report.iterations
                  << " active=" << report.active_count
                  << " complementarity=" << report.complementarity_residual << '\n';
    }
    return result;
}

} // namespace obstacle
