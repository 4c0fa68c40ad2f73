#pragma once

#include <string>
#include <vector>

#include "confront/geometry.hpp"
#include "confront/interp.hpp"

namespace confront {

enum class ReactionKind { Kpp, Bistable };

/// Reaction term f(s) together with everything the solvers derive from it:
/// the derivative, the antiderivative F(s) = int_0^s f, the Lipschitz
/// constant on [0, 1] and the unstable zero theta (bistable only).
///
/// f is extended by zero outside [0, 1], so monotone iterations and time
/// steppers can evaluate it on any real argument.
class Reaction {
public:
    /// f(s) = a s (1 - s), the logistic KPP family.
    static Reaction kpp_logistic(double a);
    /// f(s) = b s (s - theta) (1 - s) with theta in (0, 1/2) so that
    /// int_0^1 f > 0.
    static Reaction bistable_cubic(double b, double theta);
    /// Tabulated f on [0, 1] via monotone cubic interpolation. The sign
    /// pattern of the declared kind is validated by sampling.
    static Reaction tabulated(ReactionKind kind, std::vector<double> s, std::vector<double> f,
                              double theta = 0.0);

    double value(double s) const;
    double derivative(double s) const;
    double antiderivative(double s) const;  // F(s), constant outside [0, 1]

    ReactionKind kind() const { return kind_; }
    double fprime0() const { return fprime0_; }
    double fprime1() const { return fprime1_; }
    double lipschitz() const { return lipschitz_; }
    double theta() const { return theta_; }

    struct LinearizationRange {
        double eta;         // largest eta <= 1 with f(s) >= (f'(0) - delta) s on [0, eta]
        double theta_norm;  // default front normalization level, eta / 4
    };
    /// KPP only; requires 0 < delta < f'(0).
    LinearizationRange kpp_linearization_range(double delta) const;

private:
    enum class Form { LogisticA, CubicB, Table };

    Reaction() = default;
    void finalize_and_validate();

    double raw(double s) const;        // without the zero extension
    double raw_derivative(double s) const;

    Form form_ = Form::LogisticA;
    ReactionKind kind_ = ReactionKind::Kpp;
    double a_ = 1.0;       // logistic rate
    double b_ = 1.0;       // cubic amplitude
    double theta_ = 0.0;   // unstable zero (bistable)
    double fprime0_ = 0.0;
    double fprime1_ = 0.0;
    double lipschitz_ = 0.0;
    MonotoneCubic table_;
    MonotoneCubic table_F_;
};

enum class HeterogeneityKind { ConfinedLinear, Csd };
enum class CsdTransition { Linear, Cosine };

/// Heterogeneous reaction term h(y, s).
///
///  - ConfinedLinear: h = f(s) - alpha g(y) s  (confinement potential g)
///  - Csd:            h = w(y) f(s) - (1 - w(y)) m s with the transition
///    profile w = 1 on |y| <= L1, w = 0 on |y| >= L2, interpolating in
///    between (piecewise linear by default, cosine optionally).
///
/// Both cases decompose as h(y, s) = w(y) f(s) - q(y) s with q >= 0, which
/// is the shape every solver in this project consumes: a linear absorption
/// q on the diagonal plus a weighted Lipschitz reaction.
class Heterogeneity {
public:
    static Heterogeneity confined_linear(double alpha, Potential g);
    static Heterogeneity csd(double L1, double L2, double m,
                             CsdTransition shape = CsdTransition::Linear);

    HeterogeneityKind kind() const { return kind_; }
    double alpha() const { return alpha_; }
    const Potential& potential() const { return potential_; }
    double L1() const { return L1_; }
    double L2() const { return L2_; }
    double m() const { return m_; }

    /// Reaction weight w(y): identically 1 in the confined case.
    double reaction_weight(double abs_y) const;
    /// Linear absorption coefficient q(y): alpha g(y) or (1 - w(y)) m.
    double absorption(double abs_y) const;

    double h(double abs_y, double s, const Reaction& f) const;
    double dh_ds(double abs_y, double s, const Reaction& f) const;
    /// H(y, z) = int_0^z h(y, s) ds.
    double H(double abs_y, double z, const Reaction& f) const;

    Eigen::VectorXd absorption_on(const TransverseGrid& grid) const;
    Eigen::VectorXd reaction_weight_on(const TransverseGrid& grid) const;

private:
    Heterogeneity() : potential_(Potential::quadratic()) {}

    HeterogeneityKind kind_ = HeterogeneityKind::ConfinedLinear;
    double alpha_ = 0.0;
    Potential potential_;
    double L1_ = 0.0, L2_ = 0.0, m_ = 0.0;
    CsdTransition shape_ = CsdTransition::Linear;
};

/// max{f(s), -m s}: the one-dimensional comparison nonlinearity for the CSD
/// model. It is bistable with the same unstable zero theta.
Reaction csd_comparison_reaction(const Reaction& f, double m);

}  // namespace confront
