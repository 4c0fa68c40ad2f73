#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <memory>
#include <string>

#include "confront/geometry.hpp"

namespace confront {

using SpMat = Eigen::SparseMatrix<double>;

/// Sparse linear operator on the grid unknowns, with a note recording which
/// continuous operator it discretizes. Second-order central differences
/// everywhere; the advection term falls back to first-order upwinding when
/// the grid Peclet number |c| hx / 2 exceeds 1, preserving the M-matrix
/// sign pattern.
struct SparseOperator {
    SpMat matrix;
    bool symmetric = false;
    std::string note;

    int rows() const { return static_cast<int>(matrix.rows()); }
    /// min_i (a_ii - sum_{j != i} |a_ij|): every eigenvalue lies above this.
    double gershgorin_lower_bound() const;
    /// Same sparsity, shifted diagonal: A + s I.
    SparseOperator shifted(double s) const;
};

/// -Delta_y + diag(coeff) + shift on the transverse unknowns.
SparseOperator assemble_transverse_coeff(const TransverseGrid& grid,
                                         const Eigen::VectorXd& coeff_at_nodes, double shift);

/// -Delta_y + alpha g(y) + shift.
SparseOperator assemble_transverse(const TransverseGrid& grid, const Potential& g, double alpha,
                                   double shift);

/// -Delta - c d/dx1 + diag(absorption(y)) + shift on the slab unknowns,
/// Dirichlet rows eliminated. boundary_rhs() rebuilds the right-hand-side
/// contribution of the face data for any Dirichlet values.
struct SlabOperator {
    SparseOperator op;
    double c = 0.0;
    bool upwind = false;
    double left_coef = 0.0;   // multiplies u(-a, y) into the ix = 1 rows
    double right_coef = 0.0;  // multiplies u(+a, y) into the ix = nx-2 rows
    int nx = 0;
    int mt = 0;  // transverse unknown count

    Eigen::VectorXd boundary_rhs(const SlabGrid& grid, const Eigen::VectorXd& left_face,
                                 const Eigen::VectorXd& right_face) const;
};

SlabOperator assemble_slab(const SlabGrid& grid, const Eigen::VectorXd& absorption_at_nodes,
                           double c, double shift);

/// Solves A x = b to a relative residual of rtol. Symmetric operators go
/// through conjugate gradients, nonsymmetric ones through BiCGSTAB with an
/// incomplete-LU preconditioner; a direct sparse factorization is the
/// fallback. Throws SolverError (with iteration count and final residual)
/// on breakdown or a singular matrix.
Eigen::VectorXd linear_solve(const SparseOperator& A, const Eigen::VectorXd& b,
                             double rtol = 1e-10);

/// Direct sparse factorization held for repeated solves (monotone sweeps,
/// inverse iteration, parabolic stepping). Immutable once built; safe to
/// share read-only across workers.
class PrefactoredSolver {
public:
    explicit PrefactoredSolver(SparseOperator A);
    ~PrefactoredSolver();
    PrefactoredSolver(PrefactoredSolver&&) noexcept;
    PrefactoredSolver& operator=(PrefactoredSolver&&) noexcept;

    Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
    const SparseOperator& op() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace confront
