#include "confront/parabolic.hpp"

#include <algorithm>
#include <cmath>

#include "confront/errors.hpp"

namespace confront {

namespace {

Eigen::VectorXd apply_reaction(const Reaction& f, const Eigen::VectorXd& u,
                               const Eigen::VectorXd& wmask) {
    Eigen::VectorXd out(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) out[i] = wmask[i] * f.value(u[i]);
    return out;
}

}  // namespace

Eigen::VectorXd step_imex(const PrefactoredSolver& stepper, const Eigen::VectorXd& u, double dt,
                          const Reaction& f, const Eigen::VectorXd& wmask,
                          const Eigen::VectorXd& bc_times_dt) {
    Eigen::VectorXd rhs = u + dt * apply_reaction(f, u, wmask);
    if (bc_times_dt.size() > 0) rhs += bc_times_dt;
    return stepper.solve(rhs);
}

DescentResult transverse_descent(const TransverseGrid& grid, const Eigen::VectorXd& absorption,
                                 const Eigen::VectorXd& wmask, const Reaction& f,
                                 const Eigen::VectorXd& seed_full, const DescentOptions& opts) {
    const double K = f.lipschitz();
    const double dt = opts.dt > 0.0 ? opts.dt : 0.9 / K;
    if (dt * K > 1.0 + 1e-12)
        throw ConfigError("descent step too large: dt * Lipschitz must stay <= 1");

    SparseOperator A0 = assemble_transverse_coeff(grid, absorption, 0.0);
    SparseOperator M = A0;
    {
        SpMat id(M.matrix.rows(), M.matrix.cols());
        id.setIdentity();
        M.matrix = id + dt * M.matrix;
    }
    PrefactoredSolver stepper(std::move(M));

    Eigen::VectorXd z = grid.restrict_interior(seed_full);
    Eigen::VectorXd w = grid.restrict_interior(wmask);
    const Eigen::VectorXd no_bc;

    DescentResult res;
    const long max_steps = static_cast<long>(std::ceil(opts.t_max / dt));
    double residual = std::numeric_limits<double>::infinity();
    for (long step = 0; step < max_steps; ++step) {
        Eigen::VectorXd next = step_imex(stepper, z, dt, f, w, no_bc);
        if (opts.require_monotone && (next.array() > z.array() + 1e-12).any())
            throw SolverError("parabolic descent: non-monotone step (discretization fault)",
                              step, residual);
        z = std::move(next);
        res.steps = step + 1;
        res.t_final = res.steps * dt;

        if (z.maxCoeff() < opts.zero_threshold) {
            res.zero = true;
            res.residual = 0.0;
            res.u = grid.extend_full(Eigen::VectorXd::Zero(z.size()));
            return res;
        }
        if (step % 16 == 15 || step + 1 == max_steps) {
            residual = (A0.matrix * z - apply_reaction(f, z, w)).lpNorm<Eigen::Infinity>();
            if (residual <= opts.residual_tol) {
                res.residual = residual;
                res.u = grid.extend_full(z);
                return res;
            }
        }
    }
    throw SolverError("parabolic descent: no steady state by t_max", res.steps, residual);
}

namespace {

/// Rightmost crossing of the level on the y = 0 row, linearly interpolated;
/// NaN when the level is nowhere attained.
double level_position(const SlabGrid& grid, const Eigen::VectorXd& full, double level) {
    const int jc = grid.transverse.center_node();
    int hit = -1;
    for (int ix = grid.nx - 1; ix >= 0; --ix) {
        if (full[grid.node_index(ix, jc)] >= level) {
            hit = ix;
            break;
        }
    }
    if (hit < 0) return std::numeric_limits<double>::quiet_NaN();
    if (hit == grid.nx - 1) return grid.x(hit);
    const double ui = full[grid.node_index(hit, jc)];
    const double un = full[grid.node_index(hit + 1, jc)];
    const double frac = (ui - level) / std::max(ui - un, 1e-300);
    return grid.x(hit) + grid.hx * std::min(1.0, frac);
}

}  // namespace

Trajectory simulate(const SlabProblem& problem, const Eigen::VectorXd& u0_full,
                    const SimOptions& opts) {
    const SlabGrid& grid = problem.grid;
    const double K = problem.reaction.lipschitz();
    if (!(opts.dt > 0.0) || opts.dt * K > 1.0 + 1e-12)
        throw ConfigError("simulate: need 0 < dt <= 1 / Lipschitz(f) for order preservation");
    if (u0_full.minCoeff() < 0.0) throw ConfigError("simulate: initial datum must be nonnegative");

    SlabOperator A0 = assemble_slab(grid, problem.absorption, 0.0, 0.0);
    SparseOperator M = A0.op;
    {
        SpMat id(M.matrix.rows(), M.matrix.cols());
        id.setIdentity();
        M.matrix = id + opts.dt * M.matrix;
    }
    PrefactoredSolver stepper(std::move(M));

    const int mt = grid.transverse.interior_count();
    Eigen::VectorXd wmask(grid.unknown_count());
    for (int ix = 1; ix + 1 < grid.nx; ++ix)
        for (int kt = 0; kt < mt; ++kt)
            wmask[grid.unknown_index(ix, kt)] =
                problem.reaction_weight[grid.transverse.node_of_unknown(kt)];

    Eigen::VectorXd left = problem.left_data;
    Eigen::VectorXd right = problem.right_data;
    Eigen::VectorXd bc_dt = opts.dt * A0.boundary_rhs(grid, left, right);

    Eigen::VectorXd u = grid.restrict_interior(u0_full);
    const double S = std::max(1.0, u0_full.maxCoeff());

    Trajectory traj;
    traj.dt = opts.dt;
    traj.theta_level = opts.theta_level;

    const long steps = static_cast<long>(std::llround(opts.T / opts.dt));
    const int shift_cells = std::max(1, static_cast<int>(opts.window_fraction * (grid.nx - 1)));

    const auto full_state = [&] { return grid.extend_full(u, left, right); };
    const auto take_snapshot = [&](double t) {
        Eigen::VectorXd full = full_state();
        if (opts.sink) opts.sink(t, traj.window_shift, full);
        if (opts.keep_snapshots) {
            traj.snapshot_times.push_back(t);
            traj.snapshots.push_back(std::move(full));
        }
    };

    take_snapshot(0.0);
    {
        const double x0 = level_position(grid, full_state(), opts.theta_level);
        if (std::isfinite(x0)) traj.level_track.emplace_back(0.0, x0);
    }
    traj.sup_history.push_back(u0_full.maxCoeff());

    for (long step = 1; step <= steps; ++step) {
        u = step_imex(stepper, u, opts.dt, problem.reaction, wmask, bc_dt);
        const double t = step * opts.dt;

        const double sup = std::max(u.maxCoeff(), 0.0);
        traj.sup_history.push_back(sup);
        if (sup > S + opts.stability_margin)
            throw SolverError("simulate: solution exceeded its a-priori bound (instability)",
                              step, sup - S);
        if (u.minCoeff() < -1e-10)
            throw SolverError("simulate: order preservation violated", step, u.minCoeff());

        Eigen::VectorXd full = full_state();
        const double x_theta = level_position(grid, full, opts.theta_level);
        if (std::isfinite(x_theta)) traj.level_track.emplace_back(t, x_theta + traj.window_shift);

        if (opts.moving_window && std::isfinite(x_theta) &&
            x_theta >= opts.window_trigger * grid.a) {
            // Slide the window with the front: drop cells on the left, fill
            // zeros on the right, and freeze the new left face values. The
            // discarded region has settled onto the asymptotic profile, so
            // frozen Dirichlet data is accurate to the tail error.
            Eigen::VectorXd shifted = Eigen::VectorXd::Zero(grid.node_count());
            for (int ix = 0; ix + shift_cells < grid.nx; ++ix)
                for (int jt = 0; jt < grid.transverse.n; ++jt)
                    shifted[grid.node_index(ix, jt)] =
                        full[grid.node_index(ix + shift_cells, jt)];
            for (int jt = 0; jt < grid.transverse.n; ++jt)
                left[jt] = shifted[grid.node_index(0, jt)];
            right.setZero();
            u = grid.restrict_interior(shifted);
            traj.window_shift += shift_cells * grid.hx;
            bc_dt = opts.dt * A0.boundary_rhs(grid, left, right);
        }

        if (opts.snapshot_stride > 0 && step % opts.snapshot_stride == 0) take_snapshot(t);
    }
    if (opts.snapshot_stride == 0 || steps % opts.snapshot_stride != 0)
        take_snapshot(steps * opts.dt);
    return traj;
}

SpreadingFit measure_spreading_speed(const Trajectory& traj) {
    if (traj.level_track.size() < 8)
        throw SolverError("spreading speed: level track too short (front never formed?)");
    const double t0 = traj.level_track.front().first;
    const double t1 = traj.level_track.back().first;
    const double t_half = 0.5 * (t0 + t1);

    std::vector<std::pair<double, double>> window;
    for (const auto& p : traj.level_track)
        if (p.first >= t_half) window.push_back(p);
    if (window.size() < 4)
        throw SolverError("spreading speed: too few samples in the fit window");

    for (std::size_t i = 1; i < window.size(); ++i) {
        if (window[i].second < window[i - 1].second - 1e-9)
            throw SolverError("spreading speed: track is not monotone over the fit window");
    }

    double st = 0, sx = 0, stt = 0, stx = 0;
    for (const auto& [t, x] : window) {
        st += t;
        sx += x;
        stt += t * t;
        stx += t * x;
    }
    const double n = static_cast<double>(window.size());
    const double denom = n * stt - st * st;
    SpreadingFit fit;
    fit.c_hat = (n * stx - st * sx) / denom;
    const double intercept = (sx - fit.c_hat * st) / n;
    double ss = 0;
    for (const auto& [t, x] : window) {
        const double r = x - (intercept + fit.c_hat * t);
        ss += r * r;
    }
    fit.fit_residual = std::sqrt(ss / n);
    fit.t_begin = window.front().first;
    fit.t_end = window.back().first;
    fit.points = static_cast<int>(window.size());
    return fit;
}

Eigen::VectorXd default_compact_u0(const SlabGrid& grid, double theta_level,
                                   const Eigen::VectorXd& profile_at_nodes) {
    const double amp = std::min(0.9, 4.0 * theta_level);
    const auto cut = [](double s, double inner, double outer) {
        const double r = std::abs(s);
        if (r <= inner) return 1.0;
        if (r >= outer) return 0.0;
        const double t = (r - inner) / (outer - inner);
        const double c = std::cos(0.5 * M_PI * t);
        return c * c;
    };
    Eigen::VectorXd u0 = Eigen::VectorXd::Zero(grid.node_count());
    for (int ix = 0; ix < grid.nx; ++ix) {
        const double cx = cut(grid.x(ix), 2.0, 3.0);
        if (cx == 0.0) continue;
        for (int jt = 0; jt < grid.transverse.n; ++jt) {
            const double cy = cut(grid.transverse.node(jt), 1.0, 2.0);
            const double cap = 0.95 * profile_at_nodes[jt];
            u0[grid.node_index(ix, jt)] = std::min(amp * cx * cy, cap);
        }
    }
    return u0;
}

}  // namespace confront
