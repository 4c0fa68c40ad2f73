#include "confront/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "confront/errors.hpp"
#include "confront/thread_pool.hpp"

namespace confront {

namespace {

struct IterationState {
    Eigen::VectorXd v;
    double lambda = 0.0;
    double residual = std::numeric_limits<double>::infinity();
};

/// Inverse power iteration on (A - sigma I) starting from a positive vector.
/// Returns false if the residual target was not reached within the budget.
bool inverse_iterate(const SparseOperator& A, double sigma, IterationState& st, double tol,
                     int max_iterations) {
    SparseOperator shifted = A.shifted(-sigma);
    PrefactoredSolver solver(std::move(shifted));
    if (st.v.size() != A.rows()) st.v = Eigen::VectorXd::Ones(A.rows());
    for (int it = 0; it < max_iterations; ++it) {
        Eigen::VectorXd w = solver.solve(st.v);
        const double nw = w.norm();
        if (!(nw > 0.0) || !std::isfinite(nw))
            throw SolverError("principal eigenvalue: inverse iteration broke down", it, st.residual);
        st.v = w / nw;
        const Eigen::VectorXd Av = A.matrix * st.v;
        st.lambda = st.v.dot(Av);
        st.residual = (Av - st.lambda * st.v).norm();
        if (st.residual <= tol * (1.0 + std::abs(st.lambda))) return true;
    }
    return false;
}

}  // namespace

EigenResult principal_eigen_coeff(const TransverseGrid& grid, const Eigen::VectorXd& coeff_at_nodes,
                                  const EigenOptions& opts) {
    SparseOperator A = assemble_transverse_coeff(grid, coeff_at_nodes, 0.0);

    // A shift strictly below the spectrum keeps (A - sigma I) an M-matrix,
    // so the iteration stays positive and converges to the Perron pair.
    const double gersh = A.gershgorin_lower_bound();
    double sigma = gersh - 1.0;

    IterationState st;
    const int budget = opts.max_iterations;
    bool ok = inverse_iterate(A, sigma, st, opts.tol, std::min(60, budget));
    int spent = std::min(60, budget);
    // Re-shift toward the current estimate; staying a few residuals below
    // the estimate keeps the target eigenvalue the nearest one.
    while (!ok && spent < budget) {
        sigma = st.lambda - std::max(20.0 * st.residual, 1e-8 * (1.0 + std::abs(st.lambda)));
        const int chunk = std::min(200, budget - spent);
        ok = inverse_iterate(A, sigma, st, opts.tol, chunk);
        spent += chunk;
    }
    if (!ok)
        throw SolverError("principal eigenvalue: no convergence", spent, st.residual);

    if (st.v[std::max(0, A.rows() / 2)] < 0.0) st.v = -st.v;
    if ((st.v.array() <= 0.0).any()) {
        // A sign flip means the iteration locked onto an excited state
        // (possible if a re-shift overshot). Redo with the safe shift only.
        IterationState retry;
        if (!inverse_iterate(A, gersh - 1.0, retry, opts.tol, 20 * budget))
            throw SolverError("principal eigenvalue: no convergence from safe shift",
                              20 * budget, retry.residual);
        st = retry;
        if (st.v[std::max(0, A.rows() / 2)] < 0.0) st.v = -st.v;
        if ((st.v.array() <= 0.0).any())
            throw SolverError("principal eigenvalue: eigenfunction is not positive");
    }

    EigenResult out;
    out.lambda = st.lambda;
    out.phi = grid.extend_full(st.v);
    const Eigen::VectorXd w = grid.quadrature_weights();
    const double norm2 = (out.phi.array().square() * w.array()).sum();
    out.phi /= std::sqrt(norm2);
    out.residual = st.residual;
    out.about = "zero-solution";
    return out;
}

EigenResult principal_eigen(const TransverseGrid& grid, const Potential& g, double alpha,
                            double fprime0, const EigenOptions& opts) {
    if (!(alpha > 0.0)) throw ConfigError("principal eigenvalue needs alpha > 0");
    Eigen::VectorXd coeff = alpha * eval_potential(g, grid);
    coeff.array() -= fprime0;
    EigenResult r = principal_eigen_coeff(grid, coeff, opts);
    r.alpha = alpha;
    return r;
}

std::vector<EigenResult> eigen_curve(const TransverseGrid& grid, const Potential& g,
                                     const std::vector<double>& alphas, double fprime0,
                                     unsigned workers, const EigenOptions& opts) {
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        if (!(alphas[i] > 0.0)) throw ConfigError("eigen_curve: alphas must be positive");
        if (i > 0 && !(alphas[i] > alphas[i - 1]))
            throw ConfigError("eigen_curve: alphas must be sorted increasing");
    }
    auto results = ordered_map(workers, alphas.size(), [&](std::size_t i) {
        return principal_eigen(grid, g, alphas[i], fprime0, opts);
    });

    const double slack = 1e-9;
    for (std::size_t i = 1; i < results.size(); ++i) {
        if (!(results[i].lambda > results[i - 1].lambda - slack))
            throw SolverError("eigen_curve: eigenvalues failed to increase along the sweep");
    }
    for (std::size_t i = 2; i < results.size(); ++i) {
        const double s1 = (results[i - 1].lambda - results[i - 2].lambda) /
                          (alphas[i - 1] - alphas[i - 2]);
        const double s2 = (results[i].lambda - results[i - 1].lambda) / (alphas[i] - alphas[i - 1]);
        if (s2 > s1 + 1e-7 * (1.0 + std::abs(s1)))
            throw SolverError("eigen_curve: concavity check failed along the sweep");
    }
    return results;
}

namespace {

Alpha0Result find_alpha0_single(const TransverseGrid& grid, const Potential& g, double fprime0,
                                const Alpha0Options& opts, const EigenOptions& eig) {
    const auto lambda_of = [&](double alpha) {
        return principal_eigen(grid, g, alpha, fprime0, eig).lambda;
    };

    Alpha0Result res;
    res.alpha_max = opts.alpha_max;

    double lo = 1.0, hi = 1.0;
    double f_lo = lambda_of(lo);
    if (f_lo >= 0.0) {
        // Shrink until the eigenvalue goes negative.
        while (f_lo >= 0.0) {
            hi = lo;
            lo *= 0.5;
            if (lo < 1e-12)
                throw SolverError("alpha0: eigenvalue stays nonnegative down to alpha = 1e-12");
            f_lo = lambda_of(lo);
        }
    } else {
        // Grow until it crosses zero or the ceiling says it never will.
        double f_hi = f_lo;
        while (f_hi < 0.0) {
            lo = hi;
            hi *= 2.0;
            if (hi > opts.alpha_max) {
                res.lambda_at_alpha_max = lambda_of(opts.alpha_max);
                if (res.lambda_at_alpha_max < 0.0) {
                    res.finite = false;
                    res.alpha0 = std::numeric_limits<double>::infinity();
                    return res;  // plateau regime: no threshold
                }
                hi = opts.alpha_max;
                f_hi = res.lambda_at_alpha_max;
                break;
            }
            f_hi = lambda_of(hi);
        }
    }

    while (hi - lo > opts.atol) {
        const double mid = 0.5 * (lo + hi);
        (lambda_of(mid) < 0.0 ? lo : hi) = mid;
    }
    res.finite = true;
    res.alpha0 = 0.5 * (lo + hi);
    res.width = hi - lo;
    return res;
}

}  // namespace

Alpha0Result find_alpha0(const TransverseGrid& grid, const Potential& g, double fprime0,
                         const Alpha0Options& opts, const EigenOptions& eig) {
    Alpha0Result coarse = find_alpha0_single(grid, g, fprime0, opts, eig);
    if (!opts.richardson || !coarse.finite) return coarse;
    Alpha0Result fine = find_alpha0_single(grid.refined(), g, fprime0, opts, eig);
    if (!fine.finite) return fine;
    // Second-order stencils: eliminate the leading h^2 error.
    Alpha0Result out = fine;
    out.alpha0 = (4.0 * fine.alpha0 - coarse.alpha0) / 3.0;
    out.width = std::max(fine.width, std::abs(fine.alpha0 - coarse.alpha0) / 3.0);
    return out;
}

EigenResult dirichlet_ball_eigen(const TransverseGrid& grid, const Potential& g, double alpha,
                                 double fprime0, double ball_radius, const EigenOptions& opts) {
    if (!(ball_radius > 0.0) || ball_radius > grid.R + 1e-12)
        throw ConfigError("ball radius must lie inside the grid truncation radius");
    const int cells = std::max(2, static_cast<int>(std::floor(ball_radius / grid.hy + 1e-9)));
    const double Rb = cells * grid.hy;
    TransverseGrid ball = grid.radial() ? TransverseGrid::radial(grid.dims, Rb, cells + 1)
                                        : TransverseGrid::line(Rb, 2 * cells + 1);
    return principal_eigen(ball, g, alpha, fprime0, opts);
}

EigenResult linearized_stability(const Eigen::VectorXd& profile_at_nodes,
                                 const TransverseGrid& grid, const Potential& g, double alpha,
                                 const Reaction& f, const EigenOptions& opts) {
    Eigen::VectorXd coeff = alpha * eval_potential(g, grid);
    for (int i = 0; i < grid.n; ++i) coeff[i] -= f.derivative(profile_at_nodes[i]);
    EigenResult r = principal_eigen_coeff(grid, coeff, opts);
    r.alpha = alpha;
    r.about = "profile V";
    return r;
}

EigenResult linearized_stability_csd(const Eigen::VectorXd& profile_at_nodes,
                                     const TransverseGrid& grid, const Heterogeneity& het,
                                     const Reaction& f, const EigenOptions& opts) {
    Eigen::VectorXd coeff(grid.n);
    for (int i = 0; i < grid.n; ++i)
        coeff[i] = -het.dh_ds(grid.abs_node(i), profile_at_nodes[i], f);
    EigenResult r = principal_eigen_coeff(grid, coeff, opts);
    r.about = "profile V";
    return r;
}

}  // namespace confront
