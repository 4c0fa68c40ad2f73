#pragma once

#include <optional>
#include <vector>

#include "confront/fronts.hpp"
#include "confront/profiles.hpp"

namespace confront {

/// Stationary profile of -Delta V = h(y, V) for the gray/white-matter
/// reaction: parabolic descent from 1, exactly as in the bistable case.
Profile csd_profile(const Heterogeneity& het, const Reaction& f, const TransverseGrid& grid,
                    const ProfileOptions& opts = {});

/// J(w) = int ( |grad w|^2 / 2 - H(y, w) ) with H(y, z) = int_0^z h(y, s) ds.
EnergyReport csd_energy(const Eigen::VectorXd& w_full, const Heterogeneity& het,
                        const Reaction& f, const TransverseGrid& grid);

enum class CsdThresholdMode { TieRadii, FixedRatio };

/// Critical core half-widths: L_lower bounds the region without any
/// nonzero profile, L_upper the region where a profile with negative
/// energy exists. Scalar bisection over L1 with L2 = L1 (tie mode) or
/// L2 = ratio * L1.
struct CsdThresholds {
    double L_lower = 0.0;  // below: no profile
    double L_upper = 0.0;  // above: profile with J < 0
    double width = 0.0;
};

CsdThresholds csd_thresholds(double m, const Reaction& f, const TransverseGrid& grid,
                             CsdThresholdMode mode, double ratio = 1.0, double width = 1e-2,
                             CsdTransition shape = CsdTransition::Linear,
                             const ProfileOptions& opts = {});

struct CsdFrontResult {
    FrontSolution front;
    double gamma_1d = 0.0;  // 1D comparison speed bound gamma_a
};

/// Traveling front for the CSD model: speed selection with the bistable
/// normalization sup_y u(0, y) = theta, checked against the 1D comparison
/// bound c_a <= gamma_a. Empty when no nonzero profile exists.
std::optional<CsdFrontResult> csd_front(const Heterogeneity& het, const Reaction& f,
                                        const SlabGrid& grid, const ProfileOptions& popts = {},
                                        FindSpeedOptions fopts = {});

enum class CsdClass { NoProfile, ProfileNoFront, Propagating };

struct CsdReport {
    double L1 = 0.0, L2 = 0.0, m = 0.0;
    Profile profile;
    std::optional<double> front_speed;
    double energy_min = 0.0;
    CsdClass classification = CsdClass::NoProfile;
    std::string error;  // per-point failure, sweep continues
};

const char* to_string(CsdClass c);

/// Classification sweep over core half-widths. Points are independent jobs;
/// results come back in input order.
std::vector<CsdReport> csd_phase_diagram(const std::vector<double>& L1_list,
                                         CsdThresholdMode L2_rule, double ratio, double m,
                                         const Reaction& f, const TransverseGrid& tgrid,
                                         double slab_a, int slab_nx, unsigned workers = 1,
                                         const ProfileOptions& popts = {},
                                         const FindSpeedOptions& fopts = {});

}  // namespace confront
