#include "confront/nonlinearity.hpp"

#include <algorithm>
#include <cmath>

#include "confront/errors.hpp"

namespace confront {

namespace {
constexpr int kValidationSamples = 2048;
}

Reaction Reaction::kpp_logistic(double a) {
    if (!(a > 0.0)) throw ConfigError("logistic reaction needs rate a > 0");
    Reaction r;
    r.form_ = Form::LogisticA;
    r.kind_ = ReactionKind::Kpp;
    r.a_ = a;
    r.fprime0_ = a;
    r.fprime1_ = -a;
    r.lipschitz_ = a;  // |a(1 - 2s)| <= a on [0, 1]
    r.finalize_and_validate();
    return r;
}

Reaction Reaction::bistable_cubic(double b, double theta) {
    if (!(b > 0.0)) throw ConfigError("cubic reaction needs amplitude b > 0");
    if (!(theta > 0.0 && theta < 1.0)) throw ConfigError("bistable threshold theta must lie in (0, 1)");
    Reaction r;
    r.form_ = Form::CubicB;
    r.kind_ = ReactionKind::Bistable;
    r.b_ = b;
    r.theta_ = theta;
    r.fprime0_ = -b * theta;
    r.fprime1_ = b * (theta - 1.0);
    // f'(s)/b = -3 s^2 + 2 (1 + theta) s - theta; extrema at the endpoints
    // and at the interior maximum s* = (1 + theta) / 3.
    const double interior = b * (1.0 - theta + theta * theta) / 3.0;
    r.lipschitz_ = std::max({b * theta, b * (1.0 - theta), interior});
    r.finalize_and_validate();
    return r;
}

Reaction Reaction::tabulated(ReactionKind kind, std::vector<double> s, std::vector<double> f,
                             double theta) {
    Reaction r;
    r.form_ = Form::Table;
    r.kind_ = kind;
    r.theta_ = theta;
    r.table_ = MonotoneCubic(std::move(s), std::move(f));
    if (r.table_.x_min() > 0.0 || r.table_.x_max() < 1.0)
        throw ConfigError("tabulated reaction must cover [0, 1]");
    r.fprime0_ = r.table_.derivative(0.0);
    r.fprime1_ = r.table_.derivative(1.0);
    double lip = 0.0;
    for (int i = 0; i <= kValidationSamples; ++i) {
        const double x = static_cast<double>(i) / kValidationSamples;
        lip = std::max(lip, std::abs(r.table_.derivative(x)));
    }
    r.lipschitz_ = lip;
    if (kind == ReactionKind::Bistable && !(theta > 0.0 && theta < 1.0))
        throw ConfigError("tabulated bistable reaction needs its unstable zero theta in (0, 1)");
    r.finalize_and_validate();
    return r;
}

double Reaction::raw(double s) const {
    switch (form_) {
        case Form::LogisticA:
            return a_ * s * (1.0 - s);
        case Form::CubicB:
            return b_ * s * (s - theta_) * (1.0 - s);
        case Form::Table:
            return table_.value(s);
    }
    return 0.0;
}

double Reaction::raw_derivative(double s) const {
    switch (form_) {
        case Form::LogisticA:
            return a_ * (1.0 - 2.0 * s);
        case Form::CubicB:
            return b_ * (-3.0 * s * s + 2.0 * (1.0 + theta_) * s - theta_);
        case Form::Table:
            return table_.derivative(s);
    }
    return 0.0;
}

double Reaction::value(double s) const {
    if (s <= 0.0 || s >= 1.0) return 0.0;
    return raw(s);
}

double Reaction::derivative(double s) const {
    if (s < 0.0 || s > 1.0) return 0.0;
    return raw_derivative(s);
}

double Reaction::antiderivative(double s) const {
    if (s <= 0.0) return 0.0;
    const double t = std::min(s, 1.0);
    switch (form_) {
        case Form::LogisticA:
            return a_ * (t * t / 2.0 - t * t * t / 3.0);
        case Form::CubicB:
            return b_ * (-t * t * t * t / 4.0 + (1.0 + theta_) * t * t * t / 3.0 -
                         theta_ * t * t / 2.0);
        case Form::Table:
            return table_.integral(t);
    }
    return 0.0;
}

void Reaction::finalize_and_validate() {
    // Tabulated data only needs to satisfy the sign pattern up to
    // interpolation error.
    const double tol = form_ == Form::Table ? 1e-6 : 1e-10;
    if (std::abs(raw(0.0)) > tol || std::abs(raw(1.0)) > tol)
        throw ConfigError("reaction must vanish at s = 0 and s = 1");

    if (kind_ == ReactionKind::Kpp) {
        double prev_ratio = std::numeric_limits<double>::infinity();
        for (int i = 1; i < kValidationSamples; ++i) {
            const double s = static_cast<double>(i) / kValidationSamples;
            const double fs = raw(s);
            if (!(fs > 0.0)) throw ConfigError("KPP reaction must be positive on (0, 1)");
            if (fs > fprime0_ * s + tol)
                throw ConfigError("KPP reaction must satisfy f(s) <= f'(0) s on (0, 1]");
            const double ratio = fs / s;
            if (ratio > prev_ratio + tol)
                throw ConfigError("KPP reaction must have f(s)/s nonincreasing on (0, 1]");
            prev_ratio = ratio;
        }
    } else {
        if (std::abs(raw(theta_)) > tol)
            throw ConfigError("bistable reaction must vanish at its threshold theta");
        for (int i = 1; i < kValidationSamples; ++i) {
            const double s = static_cast<double>(i) / kValidationSamples;
            if (std::abs(s - theta_) < 2.0 / kValidationSamples) continue;
            const double fs = raw(s);
            if (s < theta_ && !(fs < 0.0))
                throw ConfigError("bistable reaction must be negative on (0, theta)");
            if (s > theta_ && !(fs > 0.0))
                throw ConfigError("bistable reaction must be positive on (theta, 1)");
        }
        // The invading state must be energetically favored. The endpoint
        // derivative signs are reported via fprime0()/fprime1() but not
        // constrained.
        if (!(antiderivative(1.0) > 0.0))
            throw ConfigError("bistable reaction must satisfy int_0^1 f(s) ds > 0");
    }
}

Reaction::LinearizationRange Reaction::kpp_linearization_range(double delta) const {
    if (kind_ != ReactionKind::Kpp)
        throw ConfigError("linearization range is only defined for KPP reactions");
    if (!(delta > 0.0 && delta < fprime0_))
        throw ConfigError("linearization range needs 0 < delta < f'(0)");

    const double slope = fprime0_ - delta;
    const auto ok = [&](double s) { return raw(s) >= slope * s; };

    // Scan for the first violation, then refine the boundary by bisection.
    const int scan = 4096;
    double good = 0.0, bad = -1.0;
    for (int i = 1; i <= scan; ++i) {
        const double s = static_cast<double>(i) / scan;
        if (ok(s)) {
            good = s;
        } else {
            bad = s;
            break;
        }
    }
    double eta = 1.0;
    if (bad > 0.0) {
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (good + bad);
            (ok(mid) ? good : bad) = mid;
        }
        eta = good;
    }
    return {eta, eta / 4.0};
}

Heterogeneity Heterogeneity::confined_linear(double alpha, Potential g) {
    if (!(alpha > 0.0)) throw ConfigError("confined heterogeneity needs alpha > 0");
    Heterogeneity h;
    h.kind_ = HeterogeneityKind::ConfinedLinear;
    h.alpha_ = alpha;
    h.potential_ = std::move(g);
    return h;
}

Heterogeneity Heterogeneity::csd(double L1, double L2, double m, CsdTransition shape) {
    if (!(L1 > 0.0 && L2 >= L1)) throw ConfigError("CSD heterogeneity needs 0 < L1 <= L2");
    if (!(m > 0.0)) throw ConfigError("CSD heterogeneity needs absorption m > 0");
    Heterogeneity h;
    h.kind_ = HeterogeneityKind::Csd;
    h.L1_ = L1;
    h.L2_ = L2;
    h.m_ = m;
    h.shape_ = shape;
    return h;
}

double Heterogeneity::reaction_weight(double abs_y) const {
    if (kind_ == HeterogeneityKind::ConfinedLinear) return 1.0;
    if (abs_y <= L1_) return 1.0;
    if (abs_y >= L2_) return 0.0;
    const double t = (abs_y - L1_) / (L2_ - L1_);
    if (shape_ == CsdTransition::Linear) return 1.0 - t;
    return 0.5 * (1.0 + std::cos(M_PI * t));
}

double Heterogeneity::absorption(double abs_y) const {
    if (kind_ == HeterogeneityKind::ConfinedLinear) return alpha_ * potential_.value(abs_y);
    return (1.0 - reaction_weight(abs_y)) * m_;
}

double Heterogeneity::h(double abs_y, double s, const Reaction& f) const {
    return reaction_weight(abs_y) * f.value(s) - absorption(abs_y) * s;
}

double Heterogeneity::dh_ds(double abs_y, double s, const Reaction& f) const {
    return reaction_weight(abs_y) * f.derivative(s) - absorption(abs_y);
}

double Heterogeneity::H(double abs_y, double z, const Reaction& f) const {
    return reaction_weight(abs_y) * f.antiderivative(z) - 0.5 * absorption(abs_y) * z * z;
}

Eigen::VectorXd Heterogeneity::absorption_on(const TransverseGrid& grid) const {
    Eigen::VectorXd q(grid.n);
    for (int i = 0; i < grid.n; ++i) q[i] = absorption(grid.abs_node(i));
    return q;
}

Eigen::VectorXd Heterogeneity::reaction_weight_on(const TransverseGrid& grid) const {
    Eigen::VectorXd w(grid.n);
    for (int i = 0; i < grid.n; ++i) w[i] = reaction_weight(grid.abs_node(i));
    return w;
}

Reaction csd_comparison_reaction(const Reaction& f, double m) {
    if (f.kind() != ReactionKind::Bistable)
        throw ConfigError("the CSD comparison nonlinearity is built from a bistable reaction");
    const int n = 2049;
    std::vector<double> s;
    s.reserve(n + 1);
    for (int i = 0; i < n; ++i) s.push_back(static_cast<double>(i) / (n - 1));
    // Keep theta as an exact knot so the tabulated zero lands on it.
    const double theta = f.theta();
    auto pos = std::lower_bound(s.begin(), s.end(), theta);
    if (pos == s.end() || std::abs(*pos - theta) > 1e-12) s.insert(pos, theta);

    std::vector<double> v(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) v[i] = std::max(f.value(s[i]), -m * s[i]);
    v.front() = 0.0;
    v.back() = 0.0;
    return Reaction::tabulated(ReactionKind::Bistable, std::move(s), std::move(v), theta);
}

}  // namespace confront
