#include "confront/fronts.hpp"

#include <algorithm>
#include <cmath>

#include "confront/errors.hpp"

namespace confront {

namespace {

struct SlabWork {
    SlabOperator A0;
    PrefactoredSolver shifted;  // A0 + K I, prefactored
    Eigen::VectorXd rhs_bc;
    Eigen::VectorXd wmask;  // reaction weight on unknowns
    double K = 0.0;

    SlabWork(const SlabProblem& p, double c)
        : A0(assemble_slab(p.grid, p.absorption, c, 0.0)),
          shifted(A0.op.shifted(p.reaction.lipschitz())),
          rhs_bc(A0.boundary_rhs(p.grid, p.left_data, p.right_data)),
          K(p.reaction.lipschitz()) {
        const int mt = p.grid.transverse.interior_count();
        wmask.resize(p.grid.unknown_count());
        for (int ix = 1; ix + 1 < p.grid.nx; ++ix)
            for (int kt = 0; kt < mt; ++kt)
                wmask[p.grid.unknown_index(ix, kt)] =
                    p.reaction_weight[p.grid.transverse.node_of_unknown(kt)];
    }
};

Eigen::VectorXd weighted_reaction(const Reaction& f, const Eigen::VectorXd& u,
                                  const Eigen::VectorXd& wmask) {
    Eigen::VectorXd out(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) out[i] = wmask[i] * f.value(u[i]);
    return out;
}

double slab_residual(const SlabWork& w, const Reaction& f, const Eigen::VectorXd& u) {
    return (w.A0.op.matrix * u - weighted_reaction(f, u, w.wmask) - w.rhs_bc)
        .lpNorm<Eigen::Infinity>();
}

/// Normalization functional evaluated on the interior unknowns at x1 = 0.
double norm_value_of(const SlabProblem& p, const Normalization& norm,
                     const Eigen::VectorXd& u_int) {
    const int cx = p.grid.center_ix();
    const int mt = p.grid.transverse.interior_count();
    if (norm.kind == Normalization::Kind::PointValue) {
        const int jc = p.grid.transverse.center_node();
        int kc = -1;
        for (int kt = 0; kt < mt; ++kt)
            if (p.grid.transverse.node_of_unknown(kt) == jc) kc = kt;
        if (kc < 0) throw ConfigError("point normalization needs the y = 0 node in the interior");
        return u_int[p.grid.unknown_index(cx, kc)];
    }
    double best = 0.0;
    for (int kt = 0; kt < mt; ++kt)
        best = std::max(best, u_int[p.grid.unknown_index(cx, kt)]);
    return best;
}

enum class StartMode { SuperSolution, SubSolution, Free };

struct SweepOutcome {
    Eigen::VectorXd u;
    long sweeps = 0;
    double residual = std::numeric_limits<double>::infinity();
    int classification = 0;  // -1: value stays below level, +1: above, 0: converged
    double last_value = std::numeric_limits<double>::quiet_NaN();
};

Eigen::VectorXd slab_residual_vector(const SlabWork& w, const Reaction& f,
                                     const Eigen::VectorXd& u) {
    return w.A0.op.matrix * u - weighted_reaction(f, u, w.wmask) - w.rhs_bc;
}

/// Newton endgame on the discrete system A0 u = w f(u) + bc. The monotone
/// sweeps park the front near its equilibrium position but relax the
/// translation mode only at an exponentially slow rate on long slabs;
/// Newton exploits that same soft mode to place the front in a few steps.
/// The caller re-verifies bounds, monotonicity in x1 and the residual.
bool newton_polish(const SlabWork& w, const SlabProblem& p, Eigen::VectorXd& u,
                   double residual_tol, long& sweeps, double& residual) {
    const int m = static_cast<int>(u.size());
    Eigen::SparseLU<SpMat> lu;
    bool analyzed = false;

    Eigen::VectorXd r = slab_residual_vector(w, p.reaction, u);
    residual = r.lpNorm<Eigen::Infinity>();
    for (int it = 0; it < 40; ++it) {
        if (residual <= residual_tol) return true;
        SpMat J = w.A0.op.matrix;
        Eigen::VectorXd dfd(m);
        for (int i = 0; i < m; ++i) dfd[i] = w.wmask[i] * p.reaction.derivative(u[i]);
        J -= SpMat(dfd.asDiagonal());
        if (!analyzed) {
            lu.analyzePattern(J);
            analyzed = true;
        }
        lu.factorize(J);
        if (lu.info() != Eigen::Success) return false;
        const Eigen::VectorXd du = lu.solve(r);

        double step = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 10; ++ls) {
            Eigen::VectorXd trial = u - step * du;
            Eigen::VectorXd rt = slab_residual_vector(w, p.reaction, trial);
            const double rn = rt.lpNorm<Eigen::Infinity>();
            if (rn < (1.0 - 0.25 * step) * residual) {
                u = std::move(trial);
                r = std::move(rt);
                residual = rn;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        ++sweeps;
        if (!accepted) return false;
    }
    return residual <= residual_tol;
}

/// Shifted fixed-point sweeps u <- (A0 + K)^{-1} (w f(u) + K u + bc).
/// From an ordered start the sweeps are monotone and allow early
/// classification of the limit against the normalization level; once the
/// bulk of the front has formed, Newton finishes the solve. From a free
/// (warm) start the iteration still converges to the unique fixed point.
SweepOutcome slab_sweeps(const SlabWork& w, const SlabProblem& p, Eigen::VectorXd u,
                         StartMode mode, double residual_tol, long max_sweeps,
                         const Normalization* classify_against = nullptr) {
    SweepOutcome out;
    const bool monotone = mode != StartMode::Free;
    const long monotone_budget = monotone ? 80 : 5;
    long newton_rounds = std::max<long>(4, max_sweeps / 400);

    for (;;) {
        for (long sweep = 0; sweep < monotone_budget && out.sweeps < max_sweeps; ++sweep) {
            Eigen::VectorXd next =
                w.shifted.solve(weighted_reaction(p.reaction, u, w.wmask) + w.K * u + w.rhs_bc);
            if (monotone) {
                const bool ordered = mode == StartMode::SuperSolution
                                         ? (next.array() <= u.array() + 1e-12).all()
                                         : (next.array() >= u.array() - 1e-12).all();
                if (!ordered)
                    throw SolverError(
                        "slab solve: monotone ordering violated (discretization fault)",
                        out.sweeps, out.residual);
            }
            u = std::move(next);
            ++out.sweeps;

            if (classify_against && monotone) {
                const double value = norm_value_of(p, *classify_against, u);
                out.last_value = value;
                if (mode == StartMode::SuperSolution && value < classify_against->level) {
                    // Decreasing sweeps: the limit stays below the level.
                    out.u = std::move(u);
                    out.classification = -1;
                    return out;
                }
                if (mode == StartMode::SubSolution && value > classify_against->level) {
                    out.u = std::move(u);
                    out.classification = +1;
                    return out;
                }
            }

            if (sweep % 8 == 7) {
                out.residual = slab_residual(w, p.reaction, u);
                if (out.residual <= residual_tol) {
                    out.u = std::move(u);
                    if (classify_against)
                        out.classification =
                            norm_value_of(p, *classify_against, out.u) >= classify_against->level
                                ? +1
                                : -1;
                    return out;
                }
            }
        }
        if (out.sweeps >= max_sweeps) break;

        if (newton_polish(w, p, u, residual_tol, out.sweeps, out.residual)) {
            out.u = std::move(u);
            if (classify_against)
                out.classification =
                    norm_value_of(p, *classify_against, out.u) >= classify_against->level ? +1
                                                                                          : -1;
            return out;
        }
        if (--newton_rounds <= 0) break;
        // Newton did not settle: keep sweeping (unordered now) and retry.
        mode = StartMode::Free;
    }
    throw SolverError("slab solve: iteration stagnated", out.sweeps, out.residual);
}

Eigen::VectorXd replicate_left_profile(const SlabProblem& p) {
    const int mt = p.grid.transverse.interior_count();
    Eigen::VectorXd u(p.grid.unknown_count());
    for (int ix = 1; ix + 1 < p.grid.nx; ++ix)
        for (int kt = 0; kt < mt; ++kt)
            u[p.grid.unknown_index(ix, kt)] =
                p.left_data[p.grid.transverse.node_of_unknown(kt)];
    return u;
}

FrontSolution package_front(const SlabProblem& p, const SweepOutcome& sw, double c,
                            const Normalization* norm, const SolveSlabOptions& opts) {
    FrontSolution f;
    f.u = p.grid.extend_full(sw.u, p.left_data, p.right_data);
    f.c = c;
    f.a = p.grid.a;
    if (norm) {
        f.norm = *norm;
        f.norm_value = norm_value_of(p, *norm, sw.u);
    }
    f.residual = sw.residual;
    f.sweeps = sw.sweeps;

    const auto& grid = p.grid;
    if (sw.u.minCoeff() < -1e-10)
        throw SolverError("slab solve: interior positivity violated", sw.sweeps, sw.u.minCoeff());
    if (opts.check_below_left_data) {
        for (int ix = 1; ix + 1 < grid.nx; ++ix)
            for (int kt = 0; kt < grid.transverse.interior_count(); ++kt) {
                const int j = grid.transverse.node_of_unknown(kt);
                if (f.u[grid.node_index(ix, j)] > p.left_data[j] + 1e-10)
                    throw SolverError("slab solve: solution exceeds the asymptotic profile");
            }
    }
    f.monotone_x1 = true;
    for (int ix = 0; ix + 1 < grid.nx && f.monotone_x1; ++ix)
        for (int jt = 0; jt < grid.transverse.n; ++jt)
            if (f.u[grid.node_index(ix + 1, jt)] > f.u[grid.node_index(ix, jt)] + 1e-10) {
                f.monotone_x1 = false;
                break;
            }
    return f;
}

}  // namespace

FrontSolution solve_slab(const SlabProblem& problem, double c, const SolveSlabOptions& opts,
                         const Eigen::VectorXd* start_full, bool start_is_super) {
    SlabWork work(problem, c);
    Eigen::VectorXd u0;
    StartMode mode;
    if (start_full) {
        u0 = problem.grid.restrict_interior(*start_full);
        mode = start_is_super ? StartMode::SuperSolution : StartMode::SubSolution;
    } else {
        u0 = replicate_left_profile(problem);
        mode = StartMode::SuperSolution;
    }
    SweepOutcome sw =
        slab_sweeps(work, problem, std::move(u0), mode, opts.residual_tol, opts.max_sweeps);
    return package_front(problem, sw, c, nullptr, opts);
}

namespace {

SlabProblem refine_in_x(const SlabProblem& p) {
    SlabProblem q = p;
    q.grid = SlabGrid::make(p.grid.a, 2 * p.grid.nx - 1, p.grid.transverse);
    return q;
}

FindSpeedResult find_speed_impl(const SlabProblem& problem, const Normalization& norm,
                                const FindSpeedOptions& opts,
                                const Eigen::VectorXd* warm_start_full) {
    if (!(opts.c_lo < opts.c_hi)) throw ConfigError("find_speed needs an initial bracket c_lo < c_hi");
    if (!(norm.level > 0.0)) throw ConfigError("find_speed needs a positive normalization level");

    FindSpeedResult res;

    Eigen::VectorXd warm_int;
    if (warm_start_full) {
        warm_int = problem.grid.restrict_interior(*warm_start_full);
        // Clamp into the order interval [0, V]: sweeps from anywhere inside
        // converge to the unique fixed point.
        const int mt = problem.grid.transverse.interior_count();
        for (int ix = 1; ix + 1 < problem.grid.nx; ++ix)
            for (int kt = 0; kt < mt; ++kt) {
                double& v = warm_int[problem.grid.unknown_index(ix, kt)];
                v = std::clamp(v, 0.0,
                               problem.left_data[problem.grid.transverse.node_of_unknown(kt)]);
            }
    }

    // classification: +1 when the converged value sits at or above the
    // level (c too slow or equal), -1 when below (c too fast).
    const auto classify = [&](double c) -> int {
        SlabWork work(problem, c);
        ++res.classify_solves;
        res.upwind_used = res.upwind_used || work.A0.upwind;
        if (warm_start_full) {
            SweepOutcome sw = slab_sweeps(work, problem, warm_int, StartMode::Free,
                                          opts.slab.residual_tol, opts.slab.max_sweeps);
            return norm_value_of(problem, norm, sw.u) >= norm.level ? +1 : -1;
        }
        SweepOutcome sw = slab_sweeps(work, problem, replicate_left_profile(problem),
                                      StartMode::SuperSolution, opts.slab.residual_tol,
                                      opts.slab.max_sweeps, &norm);
        return sw.classification;
    };

    double lo = opts.c_lo, hi = opts.c_hi;
    double width0 = hi - lo;
    int lo_class = classify(lo);
    int expansions = 0;
    while (lo_class < 0) {
        if (++expansions > opts.max_expansions)
            throw BracketError(
                "find_speed: normalization level unreachable from below (slab too short?)", lo,
                -1, hi, -1);
        hi = lo;
        lo -= width0;
        width0 *= 2.0;
        lo_class = classify(lo);
    }
    int hi_class = classify(hi);
    expansions = 0;
    while (hi_class > 0) {
        if (++expansions > opts.max_expansions)
            throw BracketError("find_speed: normalization level unreachable from above", lo, +1,
                               hi, +1);
        lo = hi;
        hi += width0;
        width0 *= 2.0;
        hi_class = classify(hi);
    }

    while (hi - lo > opts.c_width_tol) {
        const double mid = 0.5 * (lo + hi);
        (classify(mid) > 0 ? lo : hi) = mid;
    }

    // Polish on the value itself with fully converged solves.
    SolveSlabOptions full = opts.slab;
    FrontSolution front;
    bool have_front = false;
    for (int iter = 0; iter < 80; ++iter) {
        const double mid = 0.5 * (lo + hi);
        SlabWork work(problem, mid);
        ++res.full_solves;
        SweepOutcome sw =
            warm_start_full
                ? slab_sweeps(work, problem, warm_int, StartMode::Free, full.residual_tol,
                              full.max_sweeps)
                : slab_sweeps(work, problem, replicate_left_profile(problem),
                              StartMode::SuperSolution, full.residual_tol, full.max_sweeps);
        front = package_front(problem, sw, mid, &norm, full);
        have_front = true;
        const double value = front.norm_value;
        if (std::abs(value - norm.level) <= opts.value_tol) break;
        (value > norm.level ? lo : hi) = mid;
        if (hi - lo < 1e-13)
            throw SolverError("find_speed: bracket exhausted before matching the level",
                              res.full_solves, std::abs(value - norm.level));
    }
    if (!have_front) throw SolverError("find_speed: no converged solve");
    if (std::abs(front.norm_value - norm.level) > opts.value_tol)
        throw SolverError("find_speed: normalization mismatch after polish", res.full_solves,
                          std::abs(front.norm_value - norm.level));

    res.front = std::move(front);
    res.c_lo = lo;
    res.c_hi = hi;
    return res;
}

}  // namespace

FindSpeedResult find_speed(const SlabProblem& problem, const Normalization& norm,
                           const FindSpeedOptions& opts) {
    FindSpeedResult res = find_speed_impl(problem, norm, opts, nullptr);
    if (res.upwind_used && opts.refine_on_upwind) {
        FindSpeedOptions inner = opts;
        inner.refine_on_upwind = false;
        inner.c_lo = res.front.c - 10.0 * opts.c_width_tol - 0.05;
        inner.c_hi = res.front.c + 10.0 * opts.c_width_tol + 0.05;
        FindSpeedResult fine = find_speed_impl(refine_in_x(problem), norm, inner, nullptr);
        res.c_refined = fine.front.c;
    }
    return res;
}

namespace {

/// Linear interpolation of a front in x1, clamped onto its asymptotic
/// states outside the slab.
double sample_front_x(const SlabGrid& g, const FrontSolution& f, const Eigen::VectorXd& left,
                      const Eigen::VectorXd& right, double x, int jt) {
    if (x <= -g.a) return left[jt];
    if (x >= g.a) return right[jt];
    const double s = (x + g.a) / g.hx;
    const int i0 = std::min(static_cast<int>(std::floor(s)), g.nx - 2);
    const double t = s - i0;
    return (1.0 - t) * f.u[g.node_index(i0, jt)] + t * f.u[g.node_index(i0 + 1, jt)];
}

}  // namespace

SpeedCurve continue_speed(const std::vector<double>& a_list,
                          const std::function<SlabProblem(double)>& make_problem,
                          const Normalization& norm, const ContinueOptions& opts) {
    if (a_list.size() < 2) throw ConfigError("continue_speed needs at least two slab lengths");
    for (std::size_t i = 1; i < a_list.size(); ++i)
        if (!(a_list[i] > a_list[i - 1]))
            throw ConfigError("continue_speed needs an increasing slab schedule");

    SpeedCurve curve;
    FindSpeedResult prev;
    SlabGrid prev_grid;
    Eigen::VectorXd last_left;
    bool have_prev = false;

    for (double a : a_list) {
        SlabProblem problem = make_problem(a);
        last_left = problem.left_data;
        FindSpeedOptions fs = opts.speed;
        FindSpeedResult r;
        if (have_prev) {
            const double halo = opts.bracket_halo * std::max(1.0, std::abs(prev.front.c));
            fs.c_lo = prev.front.c - halo;
            fs.c_hi = prev.front.c + halo;
            // Warm start: previous front interpolated onto the longer slab.
            Eigen::VectorXd warm(problem.grid.node_count());
            for (int ix = 0; ix < problem.grid.nx; ++ix)
                for (int jt = 0; jt < problem.grid.transverse.n; ++jt)
                    warm[problem.grid.node_index(ix, jt)] =
                        sample_front_x(prev_grid, prev.front, problem.left_data,
                                       problem.right_data, problem.grid.x(ix), jt);
            r = find_speed_impl(problem, norm, fs, &warm);
        } else {
            r = find_speed_impl(problem, norm, fs, nullptr);
        }
        curve.points.emplace_back(a, r.front.c);
        prev = std::move(r);
        prev_grid = problem.grid;
        have_prev = true;
    }

    // Aitken extrapolation of the limit; the quoted uncertainty is the
    // spread between the extrapolants of the last two point pairs.
    const auto& pts = curve.points;
    const std::size_t n = pts.size();
    if (n >= 3) {
        const double d1 = pts[n - 2].second - pts[n - 3].second;
        const double d2 = pts[n - 1].second - pts[n - 2].second;
        if (d1 != 0.0 && d2 != 0.0 && d2 / d1 > 0.0 && d2 / d1 < 1.0) {
            const double rho = d2 / d1;
            const double e12 = pts[n - 2].second + d1 * rho / (1.0 - rho);
            const double e23 = pts[n - 1].second + d2 * rho / (1.0 - rho);
            curve.c_inf = e23;
            curve.uncertainty = std::abs(e23 - e12);
        } else {
            curve.c_inf = pts[n - 1].second;
            curve.uncertainty = std::abs(d2);
        }
    } else {
        curve.c_inf = pts.back().second;
        curve.uncertainty = std::abs(pts.back().second - pts.front().second);
    }

    // Left/right states of the limiting front over the outer quarters.
    {
        const SlabGrid& g = prev_grid;
        double left_err = 0.0, right_err = 0.0;
        for (int ix = 0; ix < g.nx; ++ix) {
            const double x = g.x(ix);
            for (int jt = 0; jt < g.transverse.n; ++jt) {
                const double u = prev.front.u[g.node_index(ix, jt)];
                if (x <= -g.a / 2.0) left_err = std::max(left_err, std::abs(u - last_left[jt]));
                if (x >= g.a / 2.0) right_err = std::max(right_err, u);
            }
        }
        curve.left_state_error = left_err;
        curve.right_state_error = right_err;
        if (left_err > opts.left_state_tol)
            throw SolverError("continue_speed: limiting front has not settled on the asymptotic "
                              "profile over the left quarter",
                              0, left_err);
    }

    curve.final_front = std::move(prev.front);
    return curve;
}

FrontSolution supercritical_front(const SlabProblem& problem, const SlabGrid& minimal_grid,
                                  const FrontSolution& minimal, double c,
                                  const Normalization& norm, const FindSpeedOptions& opts) {
    if (minimal_grid.transverse.n != problem.grid.transverse.n)
        throw ConfigError("supercritical_front: transverse grids must match");
    if (!(c > minimal.c))
        throw ConfigError("supercritical_front needs a speed above the minimal front's");

    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(problem.grid.transverse.n);

    const auto solve_at = [&](double r) {
        SlabProblem p = problem;
        Eigen::VectorXd start(p.grid.node_count());
        for (int jt = 0; jt < p.grid.transverse.n; ++jt) {
            p.left_data[jt] =
                sample_front_x(minimal_grid, minimal, problem.left_data, zero, -p.grid.a + r, jt);
            p.right_data[jt] =
                sample_front_x(minimal_grid, minimal, problem.left_data, zero, p.grid.a + r, jt);
        }
        for (int ix = 0; ix < p.grid.nx; ++ix)
            for (int jt = 0; jt < p.grid.transverse.n; ++jt)
                start[p.grid.node_index(ix, jt)] = sample_front_x(
                    minimal_grid, minimal, problem.left_data, zero, p.grid.x(ix) + r, jt);
        // The translated minimal front is a strict super-solution at any
        // faster speed, so the sweeps decrease onto the unique solution.
        SolveSlabOptions so = opts.slab;
        FrontSolution f = solve_slab(p, c, so, &start, /*start_is_super=*/true);
        f.norm = norm;
        const int cx = p.grid.center_ix();
        if (norm.kind == Normalization::Kind::PointValue) {
            f.norm_value = f.u[p.grid.node_index(cx, p.grid.transverse.center_node())];
        } else {
            double best = 0.0;
            for (int jt = 0; jt < p.grid.transverse.n; ++jt)
                best = std::max(best, f.u[p.grid.node_index(cx, jt)]);
            f.norm_value = best;
        }
        f.boundary_shift = r;
        return f;
    };

    // value(r) decreases from V(0) to 0; bracket the level and bisect.
    double lo = -problem.grid.a, hi = problem.grid.a;
    FrontSolution f_lo = solve_at(lo);
    int guard = 0;
    while (f_lo.norm_value < norm.level) {
        if (++guard > opts.max_expansions)
            throw BracketError("supercritical_front: level unreachable as r -> -inf "
                               "(speed below the minimal speed?)",
                               lo, f_lo.norm_value, hi, 0.0);
        lo -= problem.grid.a;
        f_lo = solve_at(lo);
    }
    FrontSolution f_hi = solve_at(hi);
    guard = 0;
    while (f_hi.norm_value > norm.level) {
        if (++guard > opts.max_expansions)
            throw BracketError("supercritical_front: level unreachable as r -> +inf", lo,
                               f_lo.norm_value, hi, f_hi.norm_value);
        hi += problem.grid.a;
        f_hi = solve_at(hi);
    }

    FrontSolution best = f_lo;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        best = solve_at(mid);
        if (std::abs(best.norm_value - norm.level) <= opts.value_tol) return best;
        (best.norm_value > norm.level ? lo : hi) = mid;
        if (hi - lo < 1e-13) break;
    }
    throw SolverError("supercritical_front: translation bisection failed to match the level", 200,
                      std::abs(best.norm_value - norm.level));
}

OneDFront one_d_bistable_speed(double a, int nx, const Reaction& f, double level,
                               double value_tol) {
    if (nx < 3 || nx % 2 == 0) throw ConfigError("1D slab needs an odd node count >= 3");
    if (!(level > 0.0 && level < 1.0)) throw ConfigError("1D slab level must lie in (0, 1)");
    const double hx = 2.0 * a / (nx - 1);
    const int m = nx - 2;
    const int center = (nx - 1) / 2 - 1;  // unknown index of x = 0
    const double K = f.lipschitz();

    const auto value_at = [&](double gamma, Eigen::VectorXd* keep) {
        // -z'' - gamma z' with the same Peclet rule as the slab assembly.
        const bool upwind = std::abs(gamma) * hx / 2.0 > 1.0;
        double diag, cl, cr;
        if (!upwind) {
            diag = 2.0 / (hx * hx);
            cl = -1.0 / (hx * hx) + gamma / (2.0 * hx);
            cr = -1.0 / (hx * hx) - gamma / (2.0 * hx);
        } else if (gamma > 0.0) {
            diag = 2.0 / (hx * hx) + gamma / hx;
            cl = -1.0 / (hx * hx);
            cr = -1.0 / (hx * hx) - gamma / hx;
        } else {
            diag = 2.0 / (hx * hx) - gamma / hx;
            cl = -1.0 / (hx * hx) + gamma / hx;
            cr = -1.0 / (hx * hx);
        }
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(3 * m);
        for (int i = 0; i < m; ++i) {
            trip.emplace_back(i, i, diag);
            if (i > 0) trip.emplace_back(i, i - 1, cl);
            if (i + 1 < m) trip.emplace_back(i, i + 1, cr);
        }
        SparseOperator A;
        A.matrix.resize(m, m);
        A.matrix.setFromTriplets(trip.begin(), trip.end());
        A.symmetric = false;
        PrefactoredSolver solver(A.shifted(K));

        Eigen::VectorXd rhs_bc = Eigen::VectorXd::Zero(m);
        rhs_bc[0] = -cl * 1.0;  // z(-a) = 1

        const auto residual_vec = [&](const Eigen::VectorXd& zz) {
            Eigen::VectorXd r = A.matrix * zz - rhs_bc;
            for (int i = 0; i < m; ++i) r[i] -= f.value(zz[i]);
            return r;
        };

        Eigen::VectorXd z = Eigen::VectorXd::Ones(m);
        double residual = std::numeric_limits<double>::infinity();
        // Monotone sweeps to form the front, Newton to place it: the
        // translation mode on a long slab is too slow for sweeps alone.
        for (long sweep = 0; sweep < 200; ++sweep) {
            Eigen::VectorXd fz(m);
            for (int i = 0; i < m; ++i) fz[i] = f.value(z[i]) + K * z[i];
            Eigen::VectorXd next = solver.solve(fz + rhs_bc);
            if ((next.array() > z.array() + 1e-12).any())
                throw SolverError("1D slab: monotone ordering violated", sweep, residual);
            z = std::move(next);
            if (sweep % 8 == 7 && (residual = residual_vec(z).lpNorm<Eigen::Infinity>()) <= 1e-10)
                break;
        }
        if (residual > 1e-10) {
            Eigen::SparseLU<SpMat> lu;
            bool analyzed = false;
            Eigen::VectorXd r = residual_vec(z);
            residual = r.lpNorm<Eigen::Infinity>();
            for (int it = 0; it < 60 && residual > 1e-10; ++it) {
                SpMat J = A.matrix;
                Eigen::VectorXd dfd(m);
                for (int i = 0; i < m; ++i) dfd[i] = f.derivative(z[i]);
                J -= SpMat(dfd.asDiagonal());
                if (!analyzed) {
                    lu.analyzePattern(J);
                    analyzed = true;
                }
                lu.factorize(J);
                if (lu.info() != Eigen::Success)
                    throw SolverError("1D slab: singular linearization", it, residual);
                const Eigen::VectorXd dz = lu.solve(r);
                double step = 1.0;
                bool accepted = false;
                for (int ls = 0; ls < 12; ++ls) {
                    Eigen::VectorXd trial = z - step * dz;
                    Eigen::VectorXd rt = residual_vec(trial);
                    if (rt.lpNorm<Eigen::Infinity>() < (1.0 - 0.25 * step) * residual) {
                        z = std::move(trial);
                        r = std::move(rt);
                        residual = r.lpNorm<Eigen::Infinity>();
                        accepted = true;
                        break;
                    }
                    step *= 0.5;
                }
                if (!accepted)
                    throw SolverError("1D slab: Newton line search stalled", it, residual);
            }
            if (residual > 1e-10)
                throw SolverError("1D slab: no convergence", 60, residual);
        }
        if (keep) {
            keep->resize(nx);
            (*keep)[0] = 1.0;
            (*keep)[nx - 1] = 0.0;
            for (int i = 0; i < m; ++i) (*keep)[i + 1] = z[i];
        }
        return std::pair<double, double>(z[center], residual);
    };

    const double spread = 2.0 * std::sqrt(K) + 1.0;
    double lo = -spread, hi = spread;
    double v_lo = value_at(lo, nullptr).first;
    double v_hi = value_at(hi, nullptr).first;
    int guard = 0;
    while (v_lo < level) {
        if (++guard > 8) throw BracketError("1D slab speed: bracket failure", lo, v_lo, hi, v_hi);
        lo -= spread;
        v_lo = value_at(lo, nullptr).first;
    }
    guard = 0;
    while (v_hi > level) {
        if (++guard > 8) throw BracketError("1D slab speed: bracket failure", lo, v_lo, hi, v_hi);
        hi += spread;
        v_hi = value_at(hi, nullptr).first;
    }

    OneDFront out;
    out.a = a;
    out.hx = hx;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        auto [v, residual] = value_at(mid, nullptr);
        if (std::abs(v - level) <= value_tol || hi - lo < 1e-14) {
            out.gamma = mid;
            auto [vv, rr] = value_at(mid, &out.z);
            out.residual = rr;
            (void)vv;
            return out;
        }
        (v > level ? lo : hi) = mid;
    }
    throw SolverError("1D slab speed: bisection failed to match the level");
}

}  // namespace confront
