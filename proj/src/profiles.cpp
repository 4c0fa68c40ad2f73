#include "confront/profiles.hpp"

#include <algorithm>
#include <cmath>

#include "confront/discretize.hpp"
#include "confront/errors.hpp"

namespace confront {

namespace {

Eigen::VectorXd pointwise_reaction(const Reaction& f, const Eigen::VectorXd& u) {
    Eigen::VectorXd out(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) out[i] = f.value(u[i]);
    return out;
}

double profile_residual(const SparseOperator& A0, const Reaction& f, const Eigen::VectorXd& u) {
    return (A0.matrix * u - pointwise_reaction(f, u)).lpNorm<Eigen::Infinity>();
}

enum class SweepDirection { Down, Up };

/// Shifted monotone iteration (L + K) u_next = f(u) + K u on the transverse
/// unknowns, starting from an ordered sub- or super-solution.
Eigen::VectorXd monotone_transverse(const SparseOperator& A0, const PrefactoredSolver& shifted,
                                    double K, const Reaction& f, Eigen::VectorXd u,
                                    SweepDirection dir, double residual_tol, long max_sweeps) {
    double residual = std::numeric_limits<double>::infinity();
    for (long sweep = 0; sweep < max_sweeps; ++sweep) {
        Eigen::VectorXd next = shifted.solve(pointwise_reaction(f, u) + K * u);
        const bool ordered = dir == SweepDirection::Down
                                 ? (next.array() <= u.array() + 1e-12).all()
                                 : (next.array() >= u.array() - 1e-12).all();
        if (!ordered)
            throw SolverError("monotone iteration: sub/super ordering violated "
                              "(discretization fault)",
                              sweep, residual);
        u = std::move(next);
        if (sweep % 8 == 7) {
            residual = profile_residual(A0, f, u);
            if (residual <= residual_tol) return u;
        }
    }
    throw SolverError("monotone iteration: stagnation", max_sweeps, residual);
}

}  // namespace

double fitted_tail_rate(const TransverseGrid& grid, const Eigen::VectorXd& values) {
    // Outer quarter of the resolved support (values above the noise floor).
    double reach = 0.0;
    for (int i = 0; i < grid.n; ++i)
        if (values[i] > 1e-12) reach = std::max(reach, grid.abs_node(i));
    if (reach <= 0.0) return 0.0;
    const double lo = 0.75 * reach;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (int i = 0; i < grid.n; ++i) {
        const double r = grid.abs_node(i);
        if (r < lo || r > reach || values[i] <= 1e-12) continue;
        const double x = r, y = -std::log(values[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 3) return 0.0;
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Profile solve_profile_kpp(double alpha, const TransverseGrid& grid, const Potential& g,
                          const Reaction& f, const ProfileOptions& opts) {
    if (f.kind() != ReactionKind::Kpp)
        throw ConfigError("solve_profile_kpp expects a KPP reaction");

    Profile out;
    out.alpha = alpha;
    out.reaction_kind = f.kind();
    out.origin = ProfileOrigin::MonotoneIteration;

    const EigenResult eig = principal_eigen(grid, g, alpha, f.fprime0());
    if (eig.lambda >= 0.0) {
        out.zero = true;
        out.values = Eigen::VectorXd::Zero(grid.n);
        return out;
    }

    const Eigen::VectorXd coeff = alpha * eval_potential(g, grid);
    SparseOperator A0 = assemble_transverse_coeff(grid, coeff, 0.0);
    const double K = f.lipschitz();
    PrefactoredSolver shifted(A0.shifted(K));

    // Downward from the constant super-solution 1.
    Eigen::VectorXd down = monotone_transverse(
        A0, shifted, K, f, Eigen::VectorXd::Ones(grid.interior_count()), SweepDirection::Down,
        opts.residual_tol, opts.max_sweeps);

    // Upward from the eigenfunction sub-solution eps * phi: the largest
    // dyadic eps <= 1/2 making -lambda eps phi + f(eps phi) - f'(0) eps phi
    // nonnegative at every node (sup-normalized phi).
    Eigen::VectorXd phi = grid.restrict_interior(eig.phi);
    phi /= phi.maxCoeff();
    double eps = 0.5;
    const auto admissible = [&](double e) {
        for (Eigen::Index i = 0; i < phi.size(); ++i) {
            const double s = e * phi[i];
            if (-eig.lambda * s + f.value(s) - f.fprime0() * s < 0.0) return false;
        }
        return true;
    };
    while (eps > 1e-12 && !admissible(eps)) eps *= 0.5;
    if (eps <= 1e-12)
        throw SolverError("KPP profile: no admissible eigenfunction sub-solution found");
    Eigen::VectorXd up = monotone_transverse(A0, shifted, K, f, (eps * phi).eval(),
                                             SweepDirection::Up, opts.residual_tol,
                                             opts.max_sweeps);

    const double gap = (down - up).lpNorm<Eigen::Infinity>();
    if (gap > opts.uniqueness_tol)
        throw SolverError("KPP profile: upward and downward iterations disagree (gap " +
                          std::to_string(gap) + ")");

    out.values = grid.extend_full(down);
    out.residual = profile_residual(A0, f, down);
    out.decay_rate = fitted_tail_rate(grid, out.values);
    if (out.values.maxCoeff() < opts.zero_threshold) {
        out.zero = true;
        out.values.setZero();
    }
    return out;
}

Profile solve_profile_bistable_maximal(double alpha, const TransverseGrid& grid,
                                       const Potential& g, const Reaction& f,
                                       const ProfileOptions& opts) {
    if (f.kind() != ReactionKind::Bistable)
        throw ConfigError("solve_profile_bistable_maximal expects a bistable reaction");

    DescentOptions d;
    d.t_max = opts.t_max;
    d.zero_threshold = opts.zero_threshold;
    d.residual_tol = opts.residual_tol;
    d.require_monotone = true;
    const Eigen::VectorXd q = alpha * eval_potential(g, grid);
    const Eigen::VectorXd ones_w = Eigen::VectorXd::Ones(grid.n);
    DescentResult r =
        transverse_descent(grid, q, ones_w, f, Eigen::VectorXd::Ones(grid.n), d);

    Profile out;
    out.alpha = alpha;
    out.reaction_kind = f.kind();
    out.origin = ProfileOrigin::ParabolicDescent;
    out.values = r.u;
    out.residual = r.residual;
    out.zero = r.zero;
    out.decay_rate = r.zero ? 0.0 : fitted_tail_rate(grid, r.u);
    return out;
}

EnergyReport energy(const Eigen::VectorXd& w_full, double alpha, const TransverseGrid& grid,
                    const Potential& g, const Reaction& f) {
    const Eigen::VectorXd gv = eval_potential(g, grid);
    const Eigen::VectorXd quad = grid.quadrature_weights();
    const int d = grid.dims;
    const double sigma = d == 1 ? 1.0 : (d == 2 ? 2.0 * M_PI : 4.0 * M_PI);

    double J = 0.0;
    // Gradient term on cell midpoints, remaining terms on nodes: with this
    // quadrature the discrete nodal gradient of J reproduces the assembled
    // residual exactly on line grids.
    for (int i = 0; i + 1 < grid.n; ++i) {
        const double du = (w_full[i + 1] - w_full[i]) / grid.hy;
        double measure = grid.hy;
        if (grid.radial()) {
            const double rm = 0.5 * (grid.node(i) + grid.node(i + 1));
            measure *= sigma * std::pow(rm, d - 1);
        }
        J += 0.5 * du * du * measure;
    }
    for (int i = 0; i < grid.n; ++i)
        J += quad[i] * (0.5 * alpha * gv[i] * w_full[i] * w_full[i] -
                        f.antiderivative(w_full[i]));

    SparseOperator A0 = assemble_transverse_coeff(grid, (alpha * gv).eval(), 0.0);
    const Eigen::VectorXd w_int = grid.restrict_interior(w_full);
    const Eigen::VectorXd res = A0.matrix * w_int - pointwise_reaction(f, w_int);
    double g2 = 0.0;
    for (int k = 0; k < grid.interior_count(); ++k) {
        const int j = grid.node_of_unknown(k);
        g2 += quad[j] * res[k] * res[k];
    }

    EnergyReport rep;
    rep.value = J;
    rep.gradient_norm = std::sqrt(g2);
    rep.spacing = grid.hy;
    return rep;
}

Eigen::VectorXd plateau_bump(const TransverseGrid& grid, double radius) {
    Eigen::VectorXd v(grid.n);
    for (int i = 0; i < grid.n; ++i) {
        const double r = grid.abs_node(i);
        v[i] = r <= radius ? 1.0 : std::max(0.0, radius + 1.0 - r);
    }
    // Honor the Dirichlet truncation.
    if (!grid.radial()) v[0] = 0.0;
    v[grid.n - 1] = 0.0;
    return v;
}

MinimizeResult minimize_energy(double alpha, const TransverseGrid& grid, const Potential& g,
                               const Reaction& f, const EnergySeed& seed,
                               const ProfileOptions& opts) {
    if (f.kind() != ReactionKind::Bistable)
        throw ConfigError("minimize_energy expects a bistable reaction");

    Eigen::VectorXd start;
    switch (seed.kind) {
        case EnergySeed::Kind::One:
            start = Eigen::VectorXd::Ones(grid.n);
            break;
        case EnergySeed::Kind::Bump:
            start = plateau_bump(grid, seed.bump_radius > 0.0 ? seed.bump_radius : grid.R / 3.0);
            break;
        case EnergySeed::Kind::Zero:
            start = Eigen::VectorXd::Zero(grid.n);
            break;
        case EnergySeed::Kind::Custom:
            start = seed.custom;
            break;
    }

    MinimizeResult out;
    const Eigen::VectorXd q = alpha * eval_potential(g, grid);
    const Eigen::VectorXd ones_w = Eigen::VectorXd::Ones(grid.n);

    if (start.maxCoeff() <= 0.0) {
        out.profile.values = Eigen::VectorXd::Zero(grid.n);
        out.profile.zero = true;
    } else {
        DescentOptions d;
        d.t_max = opts.t_max;
        d.zero_threshold = opts.zero_threshold;
        d.residual_tol = opts.residual_tol;
        DescentResult r = transverse_descent(grid, q, ones_w, f, start, d);
        out.profile.values = r.u;
        out.profile.residual = r.residual;
        out.profile.zero = r.zero;
    }
    out.profile.alpha = alpha;
    out.profile.reaction_kind = f.kind();
    out.profile.origin = ProfileOrigin::EnergyMinimizer;
    out.profile.decay_rate = out.profile.zero ? 0.0 : fitted_tail_rate(grid, out.profile.values);
    out.energy = energy(out.profile.values, alpha, grid, g, f).value;

    const Profile maximal = solve_profile_bistable_maximal(alpha, grid, g, f, opts);
    out.gap_to_maximal = (out.profile.values - maximal.values).lpNorm<Eigen::Infinity>();
    out.coincides_with_maximal = out.gap_to_maximal <= 1e-5;
    return out;
}

namespace {

/// min J over the gradient-flow limits reachable from the standard seeds.
bool negative_energy_state_exists(double alpha, const TransverseGrid& grid, const Potential& g,
                                  const Reaction& f, const ProfileOptions& opts) {
    const Eigen::VectorXd q = alpha * eval_potential(g, grid);
    const Eigen::VectorXd ones_w = Eigen::VectorXd::Ones(grid.n);
    DescentOptions d;
    d.t_max = opts.t_max;
    d.zero_threshold = opts.zero_threshold;
    d.residual_tol = opts.residual_tol;

    const double radii[] = {grid.R / 3.0, grid.R / 6.0};
    // The maximal solution first (seed 1), bump seeds as a fallback.
    {
        DescentResult r = transverse_descent(grid, q, ones_w, f, Eigen::VectorXd::Ones(grid.n), d);
        if (!r.zero && energy(r.u, alpha, grid, g, f).value < 0.0) return true;
    }
    for (double radius : radii) {
        DescentResult r = transverse_descent(grid, q, ones_w, f, plateau_bump(grid, radius), d);
        if (!r.zero && energy(r.u, alpha, grid, g, f).value < 0.0) return true;
    }
    return false;
}

}  // namespace

BistableThresholds bistable_thresholds(const TransverseGrid& grid, const Potential& g,
                                       const Reaction& f, double width,
                                       const ProfileOptions& opts) {
    if (f.kind() != ReactionKind::Bistable)
        throw ConfigError("bistable_thresholds expects a bistable reaction");

    const auto bisect_on = [&](auto predicate, const char* label) {
        // predicate(alpha) true on the small-alpha side.
        double lo = 0.25, hi = 0.25;
        bool p_lo = predicate(lo);
        while (!p_lo) {
            hi = lo;
            lo *= 0.5;
            if (lo < 1e-8)
                throw BracketError(std::string(label) + ": no admissible alpha down to 1e-8",
                                   lo, 0, hi, 1);
            p_lo = predicate(lo);
        }
        if (hi == lo) {
            bool p_hi = true;
            while (p_hi) {
                lo = hi;
                hi *= 2.0;
                if (hi > 1e6)
                    throw BracketError(std::string(label) + ": predicate holds up to alpha = 1e6",
                                       lo, 1, hi, 1);
                p_hi = predicate(hi);
            }
        }
        while (hi - lo > width) {
            const double mid = 0.5 * (lo + hi);
            (predicate(mid) ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };

    BistableThresholds th;
    th.width = width;
    th.alpha_star_existence = bisect_on(
        [&](double alpha) {
            return !solve_profile_bistable_maximal(alpha, grid, g, f, opts).zero;
        },
        "alpha* (existence)");
    th.alpha_star_energy = bisect_on(
        [&](double alpha) { return negative_energy_state_exists(alpha, grid, g, f, opts); },
        "alpha_* (energy)");
    return th;
}

}  // namespace confront
