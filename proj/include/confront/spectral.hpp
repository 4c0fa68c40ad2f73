#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "confront/discretize.hpp"
#include "confront/geometry.hpp"
#include "confront/nonlinearity.hpp"

namespace confront {

/// Principal eigenpair of a transverse operator. phi is positive at every
/// interior node and normalized to unit L2 norm under the grid quadrature.
struct EigenResult {
    double lambda = 0.0;
    Eigen::VectorXd phi;  // full grid nodes (zero on the Dirichlet boundary)
    double residual = 0.0;
    double alpha = 0.0;
    std::string about;  // "zero-solution" or "profile V"
};

struct EigenOptions {
    double tol = 1e-11;       // residual target, relative to (1 + |lambda|)
    int max_iterations = 20000;
};

/// Smallest eigenvalue of -Delta + diag(coeff) with Dirichlet truncation,
/// by shifted inverse power iteration (shift below the Gershgorin bound).
EigenResult principal_eigen_coeff(const TransverseGrid& grid, const Eigen::VectorXd& coeff_at_nodes,
                                  const EigenOptions& opts = {});

/// Smallest eigenvalue of L = -Delta + alpha g(y) - f'(0).
EigenResult principal_eigen(const TransverseGrid& grid, const Potential& g, double alpha,
                            double fprime0, const EigenOptions& opts = {});

/// Eigenvalue sweep over sorted alphas. Verifies that the values increase
/// strictly and that the divided-difference slopes do not increase
/// (concavity), both up to solver tolerance.
std::vector<EigenResult> eigen_curve(const TransverseGrid& grid, const Potential& g,
                                     const std::vector<double>& alphas, double fprime0,
                                     unsigned workers = 1, const EigenOptions& opts = {});

/// Threshold alpha_0 with lambda_{alpha_0} = 0, or the +infinity sentinel
/// when lambda stays negative up to alpha_max (the plateau regime where
/// f'(0) exceeds the Dirichlet ground energy of the flat core).
struct Alpha0Result {
    double alpha0 = std::numeric_limits<double>::infinity();
    bool finite = false;
    double width = 0.0;                 // final bisection bracket width
    double alpha_max = 0.0;             // probe ceiling used
    double lambda_at_alpha_max = 0.0;   // diagnostic for the infinite case
};

struct Alpha0Options {
    double atol = 1e-4;
    double alpha_max = 1e3;
    bool richardson = true;  // extrapolate the bisection result in hy
};

Alpha0Result find_alpha0(const TransverseGrid& grid, const Potential& g, double fprime0,
                         const Alpha0Options& opts = {}, const EigenOptions& eig = {});

/// Principal eigenvalue of the same operator restricted to the ball
/// |y| <= ball_radius (snapped onto the grid lattice) with Dirichlet
/// conditions: decreases to the full-space value as the ball grows.
EigenResult dirichlet_ball_eigen(const TransverseGrid& grid, const Potential& g, double alpha,
                                 double fprime0, double ball_radius, const EigenOptions& opts = {});

/// Principal eigenvalue about a stationary profile: -Delta + alpha g - f'(V).
EigenResult linearized_stability(const Eigen::VectorXd& profile_at_nodes,
                                 const TransverseGrid& grid, const Potential& g, double alpha,
                                 const Reaction& f, const EigenOptions& opts = {});

/// CSD variant: -Delta - d/ds h(y, V).
EigenResult linearized_stability_csd(const Eigen::VectorXd& profile_at_nodes,
                                     const TransverseGrid& grid, const Heterogeneity& het,
                                     const Reaction& f, const EigenOptions& opts = {});

}  // namespace confront
