#include "confront/csd.hpp"

#include <algorithm>
#include <cmath>

#include "confront/errors.hpp"
#include "confront/thread_pool.hpp"

namespace confront {

Profile csd_profile(const Heterogeneity& het, const Reaction& f, const TransverseGrid& grid,
                    const ProfileOptions& opts) {
    if (het.kind() != HeterogeneityKind::Csd) throw ConfigError("csd_profile expects CSD data");
    if (f.kind() != ReactionKind::Bistable)
        throw ConfigError("csd_profile expects a bistable reaction");

    DescentOptions d;
    d.t_max = opts.t_max;
    d.zero_threshold = opts.zero_threshold;
    d.residual_tol = opts.residual_tol;
    d.require_monotone = true;
    DescentResult r = transverse_descent(grid, het.absorption_on(grid),
                                         het.reaction_weight_on(grid), f,
                                         Eigen::VectorXd::Ones(grid.n), d);

    Profile out;
    out.alpha = 0.0;
    out.reaction_kind = f.kind();
    out.origin = ProfileOrigin::ParabolicDescent;
    out.values = r.u;
    out.residual = r.residual;
    out.zero = r.zero;
    out.decay_rate = r.zero ? 0.0 : fitted_tail_rate(grid, r.u);
    return out;
}

EnergyReport csd_energy(const Eigen::VectorXd& w_full, const Heterogeneity& het,
                        const Reaction& f, const TransverseGrid& grid) {
    const Eigen::VectorXd quad = grid.quadrature_weights();
    const int d = grid.dims;
    const double sigma = d == 1 ? 1.0 : (d == 2 ? 2.0 * M_PI : 4.0 * M_PI);

    double J = 0.0;
    for (int i = 0; i + 1 < grid.n; ++i) {
        const double du = (w_full[i + 1] - w_full[i]) / grid.hy;
        double measure = grid.hy;
        if (grid.radial()) {
            const double rm = 0.5 * (grid.node(i) + grid.node(i + 1));
            measure *= sigma * std::pow(rm, d - 1);
        }
        J += 0.5 * du * du * measure;
    }
    for (int i = 0; i < grid.n; ++i) J -= quad[i] * het.H(grid.abs_node(i), w_full[i], f);

    SparseOperator A0 = assemble_transverse_coeff(grid, het.absorption_on(grid), 0.0);
    const Eigen::VectorXd w_int = grid.restrict_interior(w_full);
    const Eigen::VectorXd wt = het.reaction_weight_on(grid);
    Eigen::VectorXd res = A0.matrix * w_int;
    for (int k = 0; k < grid.interior_count(); ++k) {
        const int j = grid.node_of_unknown(k);
        res[k] -= wt[j] * f.value(w_int[k]);
    }
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

namespace {

double l2_of(double L1, CsdThresholdMode mode, double ratio) {
    return mode == CsdThresholdMode::TieRadii ? L1 : ratio * L1;
}

}  // namespace

CsdThresholds csd_thresholds(double m, const Reaction& f, const TransverseGrid& grid,
                             CsdThresholdMode mode, double ratio, double width,
                             CsdTransition shape, const ProfileOptions& opts) {
    if (mode == CsdThresholdMode::FixedRatio && !(ratio >= 1.0))
        throw ConfigError("csd_thresholds: fixed ratio L2/L1 must be >= 1");

    const auto profile_at = [&](double L1) {
        return csd_profile(Heterogeneity::csd(L1, l2_of(L1, mode, ratio), m, shape), f, grid,
                           opts);
    };
    const auto exists = [&](double L1) { return !profile_at(L1).zero; };
    const auto exists_negative = [&](double L1) {
        const Profile p = profile_at(L1);
        if (p.zero) return false;
        const Heterogeneity het = Heterogeneity::csd(L1, l2_of(L1, mode, ratio), m, shape);
        return csd_energy(p.values, het, f, grid).value < 0.0;
    };

    // predicate(L) is false for small L and true for large L; find the jump.
    const auto bisect_up = [&](auto predicate, const char* label) {
        double lo = 0.05, hi = 0.05;
        bool p_lo = predicate(lo);
        while (p_lo) {
            hi = lo;
            lo *= 0.5;
            if (lo < 1e-4)
                throw BracketError(std::string(label) + ": predicate holds down to L = 1e-4", lo,
                                   1, hi, 1);
            p_lo = predicate(lo);
        }
        if (hi == lo) {
            bool p_hi = false;
            while (!p_hi) {
                lo = hi;
                hi *= 2.0;
                if (hi > 0.45 * grid.R)
                    throw BracketError(std::string(label) +
                                           ": predicate still false near the truncation radius",
                                       lo, 0, hi, 0);
                p_hi = predicate(hi);
            }
        }
        while (hi - lo > width) {
            const double mid = 0.5 * (lo + hi);
            (predicate(mid) ? hi : lo) = mid;
        }
        return 0.5 * (lo + hi);
    };

    CsdThresholds th;
    th.width = width;
    th.L_lower = bisect_up(exists, "L_* (profile existence)");
    th.L_upper = bisect_up(exists_negative, "L^* (negative-energy profile)");
    // The energy turns negative no earlier than the profile appears.
    if (th.L_lower > th.L_upper + width)
        throw SolverError("csd_thresholds: threshold ordering violated");
    return th;
}

std::optional<CsdFrontResult> csd_front(const Heterogeneity& het, const Reaction& f,
                                        const SlabGrid& grid, const ProfileOptions& popts,
                                        FindSpeedOptions fopts) {
    const Profile profile = csd_profile(het, f, grid.transverse, popts);
    if (profile.zero) return std::nullopt;

    // 1D comparison speed from max{f, -ms}: an a-priori speed bound and the
    // default bracket.
    const Reaction f_tilde = csd_comparison_reaction(f, het.m());
    const int nx_1d = 2 * static_cast<int>(std::lround(grid.a / 0.025)) + 1;
    const OneDFront one_d = one_d_bistable_speed(grid.a, nx_1d, f_tilde, f.theta());

    SlabProblem problem = SlabProblem::csd(grid, het, f, profile.values);
    if (fopts.c_lo == 0.0 && fopts.c_hi == 0.0) {
        fopts.c_lo = -std::abs(one_d.gamma) - 1.0;
        fopts.c_hi = std::abs(one_d.gamma) + 1.0;
    }
    const Normalization norm = Normalization::max_over_y(f.theta());
    FindSpeedResult r = find_speed(problem, norm, fopts);

    if (r.front.c > one_d.gamma + 0.02 * std::max(1.0, std::abs(one_d.gamma)) + 1e-3)
        throw SolverError("csd_front: speed exceeds the one-dimensional comparison bound",
                          r.full_solves, r.front.c - one_d.gamma);

    return CsdFrontResult{std::move(r.front), one_d.gamma};
}

const char* to_string(CsdClass c) {
    switch (c) {
        case CsdClass::NoProfile:
            return "no-profile";
        case CsdClass::ProfileNoFront:
            return "profile-no-front";
        case CsdClass::Propagating:
            return "propagating";
    }
    return "?";
}

std::vector<CsdReport> csd_phase_diagram(const std::vector<double>& L1_list,
                                         CsdThresholdMode L2_rule, double ratio, double m,
                                         const Reaction& f, const TransverseGrid& tgrid,
                                         double slab_a, int slab_nx, unsigned workers,
                                         const ProfileOptions& popts,
                                         const FindSpeedOptions& fopts) {
    return ordered_map(workers, L1_list.size(), [&](std::size_t i) {
        const double L1 = L1_list[i];
        CsdReport rep;
        rep.L1 = L1;
        rep.L2 = l2_of(L1, L2_rule, ratio);
        rep.m = m;
        try {
            const Heterogeneity het = Heterogeneity::csd(L1, rep.L2, m);
            rep.profile = csd_profile(het, f, tgrid, popts);
            rep.energy_min = csd_energy(rep.profile.values, het, f, tgrid).value;
            if (rep.profile.zero) {
                rep.classification = CsdClass::NoProfile;
                return rep;
            }
            const SlabGrid sgrid = SlabGrid::make(slab_a, slab_nx, tgrid);
            try {
                const auto fr = csd_front(het, f, sgrid, popts, fopts);
                if (fr && fr->front.c > 0.0) {
                    rep.front_speed = fr->front.c;
                    rep.classification = CsdClass::Propagating;
                } else {
                    if (fr) rep.front_speed = fr->front.c;
                    rep.classification = CsdClass::ProfileNoFront;
                }
            } catch (const BracketError&) {
                rep.classification = CsdClass::ProfileNoFront;
            }
        } catch (const std::exception& e) {
            rep.error = e.what();
        }
        return rep;
    });
}

}  // namespace confront
