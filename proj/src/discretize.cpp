#include "confront/discretize.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#include <cmath>
#include <vector>

#include "confront/errors.hpp"

namespace confront {

double SparseOperator::gershgorin_lower_bound() const {
    double lo = std::numeric_limits<double>::infinity();
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(matrix.rows());
    Eigen::VectorXd offsum = Eigen::VectorXd::Zero(matrix.rows());
    for (int k = 0; k < matrix.outerSize(); ++k) {
        for (SpMat::InnerIterator it(matrix, k); it; ++it) {
            if (it.row() == it.col()) {
                diag[it.row()] = it.value();
            } else {
                offsum[it.row()] += std::abs(it.value());
            }
        }
    }
    for (int i = 0; i < matrix.rows(); ++i) lo = std::min(lo, diag[i] - offsum[i]);
    return lo;
}

SparseOperator SparseOperator::shifted(double s) const {
    SparseOperator out = *this;
    SpMat id(matrix.rows(), matrix.cols());
    id.setIdentity();
    out.matrix = matrix + s * id;
    return out;
}

namespace {

/// Stencil coefficients of -Delta_y at one transverse node.
struct TransverseRow {
    double diag;
    double left;   // coefficient on the unknown at node j-1 (0 if none)
    double right;  // coefficient on the unknown at node j+1 (0 if none)
};

TransverseRow transverse_row(const TransverseGrid& g, int node) {
    const double h2 = g.hy * g.hy;
    if (!g.radial()) return {2.0 / h2, -1.0 / h2, -1.0 / h2};
    const int d = g.dims;
    if (node == 0) {
        // Symmetry at the origin: Delta phi(0) = d * phi''(0).
        return {2.0 * d / h2, 0.0, -2.0 * d / h2};
    }
    const double r = g.node(node);
    const double adv = (d - 1) / (2.0 * g.hy * r);
    return {2.0 / h2, -1.0 / h2 + adv, -1.0 / h2 - adv};
}

}  // namespace

SparseOperator assemble_transverse_coeff(const TransverseGrid& grid,
                                         const Eigen::VectorXd& coeff_at_nodes, double shift) {
    const int m = grid.interior_count();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(3 * m);
    for (int k = 0; k < m; ++k) {
        const int j = grid.node_of_unknown(k);
        const TransverseRow row = transverse_row(grid, j);
        trip.emplace_back(k, k, row.diag + coeff_at_nodes[j] + shift);
        if (k > 0 && row.left != 0.0) trip.emplace_back(k, k - 1, row.left);
        if (k + 1 < m && row.right != 0.0) trip.emplace_back(k, k + 1, row.right);
    }
    SparseOperator A;
    A.matrix.resize(m, m);
    A.matrix.setFromTriplets(trip.begin(), trip.end());
    A.matrix.makeCompressed();
    A.symmetric = !grid.radial();
    A.note = "-Delta_y + diag(coeff) + shift, Dirichlet at |y| = R";
    return A;
}

SparseOperator assemble_transverse(const TransverseGrid& grid, const Potential& g, double alpha,
                                   double shift) {
    if (alpha < 0.0) throw ConfigError("transverse operator needs alpha >= 0");
    Eigen::VectorXd coeff = alpha * eval_potential(g, grid);
    return assemble_transverse_coeff(grid, coeff, shift);
}

SlabOperator assemble_slab(const SlabGrid& grid, const Eigen::VectorXd& absorption_at_nodes,
                           double c, double shift) {
    const TransverseGrid& t = grid.transverse;
    const int mt = t.interior_count();
    const int m = grid.unknown_count();
    const double hx = grid.hx;
    const double hx2 = hx * hx;

    SlabOperator s;
    s.c = c;
    s.nx = grid.nx;
    s.mt = mt;
    s.upwind = std::abs(c) * hx / 2.0 > 1.0;

    // x1-direction stencil of -d^2/dx1^2 - c d/dx1.
    double x_diag, x_left, x_right;
    if (!s.upwind) {
        x_diag = 2.0 / hx2;
        x_left = -1.0 / hx2 + c / (2.0 * hx);
        x_right = -1.0 / hx2 - c / (2.0 * hx);
    } else if (c > 0.0) {
        x_diag = 2.0 / hx2 + c / hx;
        x_left = -1.0 / hx2;
        x_right = -1.0 / hx2 - c / hx;
    } else {
        x_diag = 2.0 / hx2 - c / hx;
        x_left = -1.0 / hx2 + c / hx;
        x_right = -1.0 / hx2;
    }
    s.left_coef = -x_left;
    s.right_coef = -x_right;

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(5 * m);
    for (int ix = 1; ix + 1 < grid.nx; ++ix) {
        for (int kt = 0; kt < mt; ++kt) {
            const int row = grid.unknown_index(ix, kt);
            const int j = t.node_of_unknown(kt);
            const TransverseRow tr = transverse_row(t, j);
            trip.emplace_back(row, row, x_diag + tr.diag + absorption_at_nodes[j] + shift);
            if (kt > 0 && tr.left != 0.0) trip.emplace_back(row, grid.unknown_index(ix, kt - 1), tr.left);
            if (kt + 1 < mt && tr.right != 0.0)
                trip.emplace_back(row, grid.unknown_index(ix, kt + 1), tr.right);
            if (ix > 1) trip.emplace_back(row, grid.unknown_index(ix - 1, kt), x_left);
            if (ix + 2 < grid.nx) trip.emplace_back(row, grid.unknown_index(ix + 1, kt), x_right);
        }
    }
    s.op.matrix.resize(m, m);
    s.op.matrix.setFromTriplets(trip.begin(), trip.end());
    s.op.matrix.makeCompressed();
    s.op.symmetric = (c == 0.0) && !t.radial();
    s.op.note = s.upwind ? "-Delta - c d1 (upwind) + diag(q) + shift"
                         : "-Delta - c d1 (central) + diag(q) + shift";
    return s;
}

Eigen::VectorXd SlabOperator::boundary_rhs(const SlabGrid& grid, const Eigen::VectorXd& left_face,
                                           const Eigen::VectorXd& right_face) const {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(grid.unknown_count());
    const TransverseGrid& t = grid.transverse;
    for (int kt = 0; kt < mt; ++kt) {
        const int j = t.node_of_unknown(kt);
        rhs[grid.unknown_index(1, kt)] += left_coef * left_face[j];
        rhs[grid.unknown_index(grid.nx - 2, kt)] += right_coef * right_face[j];
    }
    return rhs;
}

namespace {

double relative_residual(const SpMat& A, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
    const double bn = b.norm();
    if (bn == 0.0) return (A * x).norm();
    return (A * x - b).norm() / bn;
}

}  // namespace

Eigen::VectorXd linear_solve(const SparseOperator& A, const Eigen::VectorXd& b, double rtol) {
    if (A.matrix.rows() != b.size()) throw ConfigError("linear_solve: dimension mismatch");

    long iterations = -1;
    double last_residual = std::numeric_limits<double>::quiet_NaN();

    if (A.symmetric) {
        Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper> cg;
        cg.setTolerance(rtol);
        cg.setMaxIterations(10 * A.matrix.rows() + 100);
        cg.compute(A.matrix);
        Eigen::VectorXd x = cg.solve(b);
        iterations = cg.iterations();
        last_residual = relative_residual(A.matrix, x, b);
        if (cg.info() == Eigen::Success && last_residual <= rtol) return x;
    } else {
        Eigen::BiCGSTAB<SpMat, Eigen::IncompleteLUT<double>> krylov;
        krylov.setTolerance(rtol);
        krylov.setMaxIterations(10 * A.matrix.rows() + 100);
        krylov.compute(A.matrix);
        if (krylov.info() == Eigen::Success) {
            Eigen::VectorXd x = krylov.solve(b);
            iterations = krylov.iterations();
            last_residual = relative_residual(A.matrix, x, b);
            if (krylov.info() == Eigen::Success && last_residual <= rtol) return x;
        }
    }

    // Direct fallback.
    Eigen::SparseLU<SpMat> lu;
    lu.analyzePattern(A.matrix);
    lu.factorize(A.matrix);
    if (lu.info() != Eigen::Success) {
        throw SolverError("linear_solve: iterative solver stalled (iterations=" +
                              std::to_string(iterations) + ", residual=" +
                              std::to_string(last_residual) +
                              ") and the direct factorization failed (singular matrix?)",
                          iterations, last_residual);
    }
    Eigen::VectorXd x = lu.solve(b);
    last_residual = relative_residual(A.matrix, x, b);
    if (!(last_residual <= std::max(rtol, 1e-8))) {
        throw SolverError("linear_solve: direct fallback left residual " +
                              std::to_string(last_residual),
                          iterations, last_residual);
    }
    return x;
}

struct PrefactoredSolver::Impl {
    SparseOperator A;
    Eigen::SimplicialLDLT<SpMat> ldlt;
    Eigen::SparseLU<SpMat> lu;
    bool use_ldlt = false;
};

PrefactoredSolver::PrefactoredSolver(SparseOperator A) : impl_(std::make_unique<Impl>()) {
    impl_->A = std::move(A);
    impl_->use_ldlt = impl_->A.symmetric;
    if (impl_->use_ldlt) {
        impl_->ldlt.compute(impl_->A.matrix);
        if (impl_->ldlt.info() == Eigen::Success) return;
        impl_->use_ldlt = false;  // indefinite; fall through to LU
    }
    impl_->lu.analyzePattern(impl_->A.matrix);
    impl_->lu.factorize(impl_->A.matrix);
    if (impl_->lu.info() != Eigen::Success)
        throw SolverError("prefactored solve: matrix is singular or ill-conditioned");
}

PrefactoredSolver::~PrefactoredSolver() = default;
PrefactoredSolver::PrefactoredSolver(PrefactoredSolver&&) noexcept = default;
PrefactoredSolver& PrefactoredSolver::operator=(PrefactoredSolver&&) noexcept = default;

Eigen::VectorXd PrefactoredSolver::solve(const Eigen::VectorXd& b) const {
    return impl_->use_ldlt ? impl_->ldlt.solve(b).eval() : impl_->lu.solve(b).eval();
}

const SparseOperator& PrefactoredSolver::op() const { return impl_->A; }

}  // namespace confront
