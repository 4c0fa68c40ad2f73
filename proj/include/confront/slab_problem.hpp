#pragma once

#include <Eigen/Dense>

#include "confront/geometry.hpp"
#include "confront/nonlinearity.hpp"

namespace confront {

/// Everything a slab solve needs: the grid, the reaction, the decomposition
/// h(y, s) = w(y) f(s) - q(y) s of the heterogeneous term, and the Dirichlet
/// face data. Confined problems have w == 1 and q = alpha g; CSD problems
/// have the transition weight w and q = (1 - w) m.
struct SlabProblem {
    SlabGrid grid;
    Reaction reaction;
    Eigen::VectorXd absorption;       // q at transverse nodes
    Eigen::VectorXd reaction_weight;  // w at transverse nodes
    Eigen::VectorXd left_data;        // u(-a, y) at transverse nodes
    Eigen::VectorXd right_data;       // u(+a, y) at transverse nodes

    static SlabProblem confined(const SlabGrid& grid, const Potential& g, double alpha,
                                const Reaction& f, const Eigen::VectorXd& left_profile);
    static SlabProblem csd(const SlabGrid& grid, const Heterogeneity& het, const Reaction& f,
                           const Eigen::VectorXd& left_profile);
    static SlabProblem with_heterogeneity(const SlabGrid& grid, const Heterogeneity& het,
                                          const Reaction& f, const Eigen::VectorXd& left_profile);
};

}  // namespace confront
