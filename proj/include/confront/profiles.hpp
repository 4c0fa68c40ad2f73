#pragma once

#include <Eigen/Dense>

#include "confront/geometry.hpp"
#include "confront/nonlinearity.hpp"
#include "confront/parabolic.hpp"
#include "confront/spectral.hpp"

namespace confront {

enum class ProfileOrigin { MonotoneIteration, ParabolicDescent, EnergyMinimizer };

/// Stationary transverse profile V(y) >= 0 solving Delta V + f(V) - q(y) V = 0.
/// A vanished solve is reported with zero = true rather than by omission so
/// threshold bisections can classify both outcomes uniformly.
struct Profile {
    Eigen::VectorXd values;  // full transverse nodes
    double alpha = 0.0;
    ReactionKind reaction_kind = ReactionKind::Kpp;
    double residual = 0.0;   // sup-norm of Delta V + f(V) - q V at interior nodes
    ProfileOrigin origin = ProfileOrigin::MonotoneIteration;
    double decay_rate = 0.0; // fitted tail exponent of -log V over the outer quarter
    bool zero = false;

    double max() const { return zero ? 0.0 : values.maxCoeff(); }
};

struct ProfileOptions {
    double residual_tol = 1e-8;
    double zero_threshold = 1e-6;
    double uniqueness_tol = 1e-6;  // two-sided iteration agreement (KPP)
    long max_sweeps = 200000;
    double t_max = 4000.0;         // descent budget (bistable)
};

/// Unique positive profile for a KPP reaction, or the zero state when the
/// principal eigenvalue is nonnegative. Runs the monotone iteration downward
/// from 1 and upward from the eigenfunction sub-solution and checks that the
/// two limits agree.
Profile solve_profile_kpp(double alpha, const TransverseGrid& grid, const Potential& g,
                          const Reaction& f, const ProfileOptions& opts = {});

/// Maximal bistable profile: decreasing parabolic limit started from 1.
Profile solve_profile_bistable_maximal(double alpha, const TransverseGrid& grid,
                                       const Potential& g, const Reaction& f,
                                       const ProfileOptions& opts = {});

/// J_alpha(w) = int ( |grad w|^2 / 2 + alpha g w^2 / 2 - F(w) ).
struct EnergyReport {
    double value = 0.0;
    double gradient_norm = 0.0;  // L2 norm of -Delta w - f(w) + alpha g w
    double spacing = 0.0;
};

EnergyReport energy(const Eigen::VectorXd& w_full, double alpha, const TransverseGrid& grid,
                    const Potential& g, const Reaction& f);

/// Seed for the energy gradient flow.
struct EnergySeed {
    enum class Kind { One, Bump, Zero, Custom } kind = Kind::Bump;
    double bump_radius = 0.0;  // 0: grid.R / 3
    Eigen::VectorXd custom;

    static EnergySeed one() { return {Kind::One, 0.0, {}}; }
    static EnergySeed bump(double radius = 0.0) { return {Kind::Bump, radius, {}}; }
    static EnergySeed zero() { return {Kind::Zero, 0.0, {}}; }
    static EnergySeed custom_seed(Eigen::VectorXd v) { return {Kind::Custom, 0.0, std::move(v)}; }
};

/// Plateau bump of height 1 on |y| <= radius with a linear taper over one
/// unit (the classical truncation competitor for the energy).
Eigen::VectorXd plateau_bump(const TransverseGrid& grid, double radius);

struct MinimizeResult {
    Profile profile;
    double energy = 0.0;
    bool coincides_with_maximal = false;
    double gap_to_maximal = 0.0;  // sup-norm distance to the maximal solution
};

/// Gradient flow of J_alpha from the seed (the same dynamics as the
/// parabolic descent). Flags whether the limit coincides with the maximal
/// solution, the numerical surrogate for uniqueness of the stable profile.
MinimizeResult minimize_energy(double alpha, const TransverseGrid& grid, const Potential& g,
                               const Reaction& f, const EnergySeed& seed = {},
                               const ProfileOptions& opts = {});

/// alpha_* (energy sign change) and alpha^* (existence of the maximal
/// solution), each located by bisection to the given width.
struct BistableThresholds {
    double alpha_star_energy = 0.0;     // alpha_*
    double alpha_star_existence = 0.0;  // alpha^*
    double width = 0.0;
};

BistableThresholds bistable_thresholds(const TransverseGrid& grid, const Potential& g,
                                       const Reaction& f, double width = 1e-3,
                                       const ProfileOptions& opts = {});

/// Least-squares exponential rate of the profile tail over the outer
/// quarter of its support.
double fitted_tail_rate(const TransverseGrid& grid, const Eigen::VectorXd& values);

}  // namespace confront
