#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "confront/discretize.hpp"
#include "confront/slab_problem.hpp"

namespace confront {

/// How the slab solution is pinned at x1 = 0 to select the speed:
/// a point value u(0, 0) = level (KPP) or max_y u(0, y) = level (bistable,
/// CSD).
struct Normalization {
    enum class Kind { PointValue, MaxOverY };
    Kind kind = Kind::PointValue;
    double level = 0.0;

    static Normalization point(double level) { return {Kind::PointValue, level}; }
    static Normalization max_over_y(double level) { return {Kind::MaxOverY, level}; }
};

struct FrontSolution {
    Eigen::VectorXd u;  // full slab nodes, faces included
    double c = 0.0;
    double a = 0.0;
    Normalization norm;
    double norm_value = 0.0;  // achieved value of the normalization functional
    double residual = 0.0;
    bool monotone_x1 = false;  // d1 u <= 0 everywhere (within 1e-10)
    long sweeps = 0;
    double boundary_shift = 0.0;  // r, for supercritical fronts
};

struct SolveSlabOptions {
    double residual_tol = 1e-8;
    long max_sweeps = 200000;
    bool check_below_left_data = true;  // enforce u <= V
};

/// Unique solution of the slab problem at fixed speed c by shifted monotone
/// iteration. Starts from the x1-independent super-solution V(y) unless a
/// start vector is supplied (which must be a super- or sub-solution as
/// declared).
FrontSolution solve_slab(const SlabProblem& problem, double c,
                         const SolveSlabOptions& opts = {},
                         const Eigen::VectorXd* start_full = nullptr,
                         bool start_is_super = true);

struct FindSpeedOptions {
    double value_tol = 1e-6;   // |normalization value - level|
    double c_width_tol = 1e-6; // bracket width in c
    double c_lo = 0.0, c_hi = 0.0;  // initial bracket (c_lo < c_hi); required
    int max_expansions = 12;
    SolveSlabOptions slab;
    bool refine_on_upwind = true;  // re-run at halved hx when upwinding triggered
};

struct FindSpeedResult {
    FrontSolution front;
    double c_lo = 0.0, c_hi = 0.0;  // final bracket
    int classify_solves = 0;
    int full_solves = 0;
    bool upwind_used = false;
    double c_refined = 0.0;  // halved-hx confirmation (0 when not run)
};

/// Speed selection: bisection on the strictly decreasing scalar map
/// c -> normalization value until the value matches the level.
FindSpeedResult find_speed(const SlabProblem& problem, const Normalization& norm,
                           const FindSpeedOptions& opts);

struct SpeedCurve {
    std::vector<std::pair<double, double>> points;  // (a, c_a)
    double c_inf = 0.0;
    double uncertainty = 0.0;
    double left_state_error = 0.0;   // max |u - V| over the left quarter of the final slab
    double right_state_error = 0.0;  // max u over the right quarter
    FrontSolution final_front;
};

struct ContinueOptions {
    FindSpeedOptions speed;
    double left_state_tol = 1e-3;
    double bracket_halo = 0.35;  // warm bracket half-width around the previous c_a
};

/// Runs find_speed along an increasing slab schedule, extrapolates the
/// limiting speed, and verifies the limiting front's left/right states.
SpeedCurve continue_speed(const std::vector<double>& a_list,
                          const std::function<SlabProblem(double)>& make_problem,
                          const Normalization& norm, const ContinueOptions& opts);

/// Front of prescribed supercritical speed c: solves the slab with boundary
/// data from the translated minimal-speed front and locates the translation
/// r restoring the normalization.
FrontSolution supercritical_front(const SlabProblem& problem, const SlabGrid& minimal_grid,
                                  const FrontSolution& minimal, double c,
                                  const Normalization& norm, const FindSpeedOptions& opts);

/// One-dimensional slab speed: -z'' - gamma z' = f(z), z(-a) = 1, z(a) = 0,
/// z(0) = level. The transverse-free analogue used as a comparison oracle.
struct OneDFront {
    double gamma = 0.0;
    Eigen::VectorXd z;  // nx values on [-a, a]
    double a = 0.0;
    double hx = 0.0;
    double residual = 0.0;
};

OneDFront one_d_bistable_speed(double a, int nx, const Reaction& f, double level,
                               double value_tol = 1e-8);

}  // namespace confront
