#pragma once

#include <Eigen/Dense>
#include <functional>
#include <utility>
#include <vector>

#include "confront/discretize.hpp"
#include "confront/nonlinearity.hpp"
#include "confront/slab_problem.hpp"

namespace confront {

/// One implicit-explicit step: solves (I + dt L) u_next = u + dt w f(u) + dt bc.
/// The stiff linear part L is prefactored once; the reaction stays explicit,
/// which keeps every step a single triangular solve. Nonnegativity is
/// preserved for dt * Lipschitz(f) <= 1.
Eigen::VectorXd step_imex(const PrefactoredSolver& stepper, const Eigen::VectorXd& u,
                          double dt, const Reaction& f, const Eigen::VectorXd& wmask,
                          const Eigen::VectorXd& bc_times_dt);

/// Long-time limit of dz/dt = Delta z + w(y) f(z) - q(y) z on the transverse
/// grid. Used for the bistable maximal profile (seed 1, monotone descent)
/// and as the gradient flow of the energy functional (arbitrary seeds).
struct DescentOptions {
    double dt = 0.0;               // 0 = auto (0.9 / Lipschitz)
    double t_max = 4000.0;
    double zero_threshold = 1e-6;  // sup below this classifies as the zero state
    double residual_tol = 1e-8;
    bool require_monotone = false; // assert z nonincreasing in t at every node
};

struct DescentResult {
    Eigen::VectorXd u;  // full transverse nodes
    double residual = 0.0;
    bool zero = false;
    double t_final = 0.0;
    long steps = 0;
};

DescentResult transverse_descent(const TransverseGrid& grid, const Eigen::VectorXd& absorption,
                                 const Eigen::VectorXd& wmask, const Reaction& f,
                                 const Eigen::VectorXd& seed_full, const DescentOptions& opts = {});

/// Evolution of the full problem du/dt - Delta u = w(y) f(u) - q(y) u on the
/// slab, with the level-set track of the front position and an optional
/// moving window that follows the front.
struct Trajectory {
    std::vector<double> snapshot_times;
    std::vector<Eigen::VectorXd> snapshots;              // full slab nodes
    std::vector<std::pair<double, double>> level_track;  // (t, x_theta) in global coordinates
    std::vector<double> sup_history;                     // per step
    double window_shift = 0.0;                           // cumulative, in x1 units
    double dt = 0.0;
    double theta_level = 0.0;
};

/// Called from a background writer whenever a snapshot is taken.
using SnapshotSink =
    std::function<void(double t, double window_shift, const Eigen::VectorXd& full)>;

struct SimOptions {
    double dt = 0.05;
    double T = 100.0;
    double theta_level = 0.1;       // level tracked along the y = 0 row
    int snapshot_stride = 0;        // 0: first/last only
    bool moving_window = true;
    double window_trigger = 0.75;   // shift once x_theta passes this fraction of a
    double window_fraction = 0.25;  // slide by this fraction of the slab
    double stability_margin = 1e-6;
    bool keep_snapshots = true;
    SnapshotSink sink;
};

Trajectory simulate(const SlabProblem& problem, const Eigen::VectorXd& u0_full,
                    const SimOptions& opts);

/// Least-squares slope of the level track over the final half of the run.
struct SpreadingFit {
    double c_hat = 0.0;
    double fit_residual = 0.0;  // rms deviation from the linear fit
    double t_begin = 0.0, t_end = 0.0;
    int points = 0;
};

SpreadingFit measure_spreading_speed(const Trajectory& traj);

/// Compactly supported starting datum: a plateau of height
/// min(0.9, 4 theta) over |x1| <= 2, |y| <= 1 with a smooth cosine cut,
/// clamped under the asymptotic profile.
Eigen::VectorXd default_compact_u0(const SlabGrid& grid, double theta_level,
                                   const Eigen::VectorXd& profile_at_nodes);

}  // namespace confront
