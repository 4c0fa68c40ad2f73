#include "confront/slab_problem.hpp"

#include "confront/errors.hpp"

namespace confront {

SlabProblem SlabProblem::with_heterogeneity(const SlabGrid& grid, const Heterogeneity& het,
                                            const Reaction& f,
                                            const Eigen::VectorXd& left_profile) {
    if (left_profile.size() != grid.transverse.n)
        throw ConfigError("slab problem: left data size does not match the transverse grid");
    SlabProblem p{grid, f, het.absorption_on(grid.transverse),
                  het.reaction_weight_on(grid.transverse), left_profile,
                  Eigen::VectorXd::Zero(grid.transverse.n)};
    return p;
}

SlabProblem SlabProblem::confined(const SlabGrid& grid, const Potential& g, double alpha,
                                  const Reaction& f, const Eigen::VectorXd& left_profile) {
    return with_heterogeneity(grid, Heterogeneity::confined_linear(alpha, g), f, left_profile);
}

SlabProblem SlabProblem::csd(const SlabGrid& grid, const Heterogeneity& het, const Reaction& f,
                             const Eigen::VectorXd& left_profile) {
    if (het.kind() != HeterogeneityKind::Csd)
        throw ConfigError("SlabProblem::csd expects a CSD heterogeneity");
    return with_heterogeneity(grid, het, f, left_profile);
}

}  // namespace confront
