#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "confront/interp.hpp"

namespace confront {

enum class PotentialKind { Quadratic, Plateau, Custom };

/// Radial confinement potential g(|y|): continuous, nonnegative, vanishing
/// at the origin and diverging at infinity.
///  - Quadratic: g = |y|^2
///  - Plateau:   g = 0 on |y| <= r0, (|y| - r0)^2 outside
///  - Custom:    tabulated (|y|, g) with monotone cubic interpolation
class Potential {
public:
    static Potential quadratic();
    static Potential plateau(double r0);
    static Potential tabulated(std::vector<double> r, std::vector<double> g,
                               double divergence_floor = 1.0);

    double value(double abs_y) const;
    PotentialKind kind() const { return kind_; }
    double r0() const { return r0_; }

    /// Custom tables are expected to keep growing out to the truncation
    /// radius; returns false (a warning condition, not an error) when the
    /// sampled maximum near R stays below the configured floor.
    bool diverges_by(double R) const;

private:
    Potential() = default;
    PotentialKind kind_ = PotentialKind::Quadratic;
    double r0_ = 0.0;
    double divergence_floor_ = 1.0;
    MonotoneCubic table_;
};

/// Uniform truncation of the transverse space R^{N-1}.
///
/// dims == 1 discretizes the full line [-R, R]; dims in {2, 3} discretizes
/// the radially symmetric reduction on [0, R] with the symmetry condition
/// phi'(0) = 0 at the origin and the Laplacian weight (dims-1)/r.
/// Dirichlet zero is imposed at |y| = R in all cases.
struct TransverseGrid {
    int dims = 1;
    double R = 0.0;
    int n = 0;
    double hy = 0.0;

    static TransverseGrid line(double R, int n);
    static TransverseGrid radial(int dims, double R, int n);
    /// Same spacing, doubled radius (for truncation-insensitivity checks).
    TransverseGrid with_radius(double R_new) const;
    /// Same radius, spacing halved.
    TransverseGrid refined() const;

    bool radial() const { return dims >= 2; }
    bool neumann_origin() const { return radial(); }
    double node(int i) const { return radial() ? i * hy : -R + i * hy; }
    double abs_node(int i) const { return radial() ? node(i) : std::abs(node(i)); }

    int interior_count() const { return radial() ? n - 1 : n - 2; }
    int interior_begin() const { return radial() ? 0 : 1; }
    int node_of_unknown(int k) const { return interior_begin() + k; }

    /// y = 0 node; requires the grid to actually contain it.
    int center_node() const;

    /// Node weights for integrals over R^{N-1} (trapezoid in the grid
    /// coordinate, times the surface measure sigma_d r^{d-1} when radial).
    Eigen::VectorXd quadrature_weights() const;

    Eigen::VectorXd restrict_interior(const Eigen::VectorXd& full) const;
    Eigen::VectorXd extend_full(const Eigen::VectorXd& interior) const;
};

/// Tensor grid over (-a, a) x (transverse domain). Dirichlet faces at
/// x1 = +-a carry prescribed data; the lateral boundary is Dirichlet zero.
struct SlabGrid {
    double a = 0.0;
    int nx = 0;
    double hx = 0.0;
    TransverseGrid transverse;

    static SlabGrid make(double a, int nx, TransverseGrid t);

    int node_count() const { return nx * transverse.n; }
    int node_index(int ix, int jt) const { return ix * transverse.n + jt; }
    double x(int ix) const { return -a + ix * hx; }
    int center_ix() const;

    int unknown_count() const { return (nx - 2) * transverse.interior_count(); }
    int unknown_index(int ix, int kt) const {
        return (ix - 1) * transverse.interior_count() + kt;
    }

    Eigen::VectorXd restrict_interior(const Eigen::VectorXd& full) const;
    /// Scatter unknowns back to the full grid; faces get the given data and
    /// the lateral boundary zero.
    Eigen::VectorXd extend_full(const Eigen::VectorXd& interior,
                                const Eigen::VectorXd& left_face,
                                const Eigen::VectorXd& right_face) const;
};

/// Samples the potential at every grid node. Emits a one-line warning on
/// stderr when a custom table fails the divergence check at radius R.
Eigen::VectorXd eval_potential(const Potential& p, const TransverseGrid& grid);

/// Default truncation radius for the quadratic potential: scales with the
/// Gaussian width alpha^{-1/4} of the ground state.
double default_truncation_radius(double alpha);

}  // namespace confront
