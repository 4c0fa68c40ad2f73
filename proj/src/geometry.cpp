#include "confront/geometry.hpp"

#include <cmath>
#include <iostream>

#include "confront/errors.hpp"

namespace confront {

Potential Potential::quadratic() {
    Potential p;
    p.kind_ = PotentialKind::Quadratic;
    return p;
}

Potential Potential::plateau(double r0) {
    if (!(r0 > 0.0)) throw ConfigError("plateau potential needs r0 > 0");
    Potential p;
    p.kind_ = PotentialKind::Plateau;
    p.r0_ = r0;
    return p;
}

Potential Potential::tabulated(std::vector<double> r, std::vector<double> g,
                               double divergence_floor) {
    Potential p;
    p.kind_ = PotentialKind::Custom;
    p.divergence_floor_ = divergence_floor;
    p.table_ = MonotoneCubic(std::move(r), std::move(g));
    if (p.table_.x_min() > 0.0) throw ConfigError("custom potential table must start at |y| = 0");
    if (std::abs(p.value(0.0)) > 1e-12) throw ConfigError("custom potential must satisfy g(0) = 0");
    const int samples = 512;
    for (int i = 0; i <= samples; ++i) {
        const double x = p.table_.x_min() + (p.table_.x_max() - p.table_.x_min()) * i / samples;
        if (p.table_.value(x) < -1e-12) throw ConfigError("custom potential must be nonnegative");
    }
    return p;
}

double Potential::value(double abs_y) const {
    switch (kind_) {
        case PotentialKind::Quadratic:
            return abs_y * abs_y;
        case PotentialKind::Plateau: {
            const double d = abs_y - r0_;
            return d > 0.0 ? d * d : 0.0;
        }
        case PotentialKind::Custom:
            return table_.value(abs_y);
    }
    return 0.0;
}

bool Potential::diverges_by(double R) const {
    if (kind_ != PotentialKind::Custom) return true;
    double gmax = 0.0;
    for (int i = 0; i <= 64; ++i) {
        gmax = std::max(gmax, value(R * (0.9 + 0.1 * i / 64.0)));
    }
    return gmax >= divergence_floor_;
}

namespace {
void check_grid_args(double R, int n) {
    if (!(R > 0.0)) throw ConfigError("grid radius must be positive");
    if (n < 3) throw ConfigError("grid needs at least 3 nodes");
}
}  // namespace

TransverseGrid TransverseGrid::line(double R, int n) {
    check_grid_args(R, n);
    TransverseGrid g;
    g.dims = 1;
    g.R = R;
    g.n = n;
    g.hy = 2.0 * R / (n - 1);
    return g;
}

TransverseGrid TransverseGrid::radial(int dims, double R, int n) {
    check_grid_args(R, n);
    if (dims < 2 || dims > 3) throw ConfigError("radial reduction supports 2 or 3 transverse dimensions");
    TransverseGrid g;
    g.dims = dims;
    g.R = R;
    g.n = n;
    g.hy = R / (n - 1);
    return g;
}

TransverseGrid TransverseGrid::with_radius(double R_new) const {
    const double L_old = radial() ? R : 2.0 * R;
    const double L_new = radial() ? R_new : 2.0 * R_new;
    const int cells = static_cast<int>(std::lround(L_new / L_old * (n - 1)));
    return radial() ? TransverseGrid::radial(dims, R_new, cells + 1)
                    : TransverseGrid::line(R_new, cells + 1);
}

TransverseGrid TransverseGrid::refined() const {
    return radial() ? TransverseGrid::radial(dims, R, 2 * n - 1)
                    : TransverseGrid::line(R, 2 * n - 1);
}

int TransverseGrid::center_node() const {
    if (radial()) return 0;
    if (n % 2 == 0) throw ConfigError("line grid needs an odd node count to contain y = 0");
    return (n - 1) / 2;
}

Eigen::VectorXd TransverseGrid::quadrature_weights() const {
    Eigen::VectorXd w(n);
    const double sigma = dims == 1 ? 1.0 : (dims == 2 ? 2.0 * M_PI : 4.0 * M_PI);
    for (int i = 0; i < n; ++i) {
        double t = (i == 0 || i == n - 1) ? 0.5 * hy : hy;
        double measure = 1.0;
        if (radial()) {
            const double r = node(i);
            measure = sigma * std::pow(r, dims - 1);
        }
        w[i] = t * measure;
    }
    return w;
}

Eigen::VectorXd TransverseGrid::restrict_interior(const Eigen::VectorXd& full) const {
    Eigen::VectorXd v(interior_count());
    for (int k = 0; k < interior_count(); ++k) v[k] = full[node_of_unknown(k)];
    return v;
}

Eigen::VectorXd TransverseGrid::extend_full(const Eigen::VectorXd& interior) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < interior_count(); ++k) v[node_of_unknown(k)] = interior[k];
    return v;
}

SlabGrid SlabGrid::make(double a, int nx, TransverseGrid t) {
    if (!(a > 0.0)) throw ConfigError("slab half-length must be positive");
    if (nx < 3) throw ConfigError("slab needs at least 3 nodes in x1");
    SlabGrid s;
    s.a = a;
    s.nx = nx;
    s.hx = 2.0 * a / (nx - 1);
    s.transverse = t;
    return s;
}

int SlabGrid::center_ix() const {
    if (nx % 2 == 0) throw ConfigError("slab needs an odd x1 node count to contain x1 = 0");
    return (nx - 1) / 2;
}

Eigen::VectorXd SlabGrid::restrict_interior(const Eigen::VectorXd& full) const {
    const int mt = transverse.interior_count();
    Eigen::VectorXd v(unknown_count());
    for (int ix = 1; ix + 1 < nx; ++ix)
        for (int kt = 0; kt < mt; ++kt)
            v[unknown_index(ix, kt)] = full[node_index(ix, transverse.node_of_unknown(kt))];
    return v;
}

Eigen::VectorXd SlabGrid::extend_full(const Eigen::VectorXd& interior,
                                      const Eigen::VectorXd& left_face,
                                      const Eigen::VectorXd& right_face) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(node_count());
    const int mt = transverse.interior_count();
    for (int jt = 0; jt < transverse.n; ++jt) {
        v[node_index(0, jt)] = left_face[jt];
        v[node_index(nx - 1, jt)] = right_face[jt];
    }
    // Lateral Dirichlet nodes stay zero; faces keep their data even at the
    // corners shared with the lateral boundary.
    for (int ix = 1; ix + 1 < nx; ++ix)
        for (int kt = 0; kt < mt; ++kt)
            v[node_index(ix, transverse.node_of_unknown(kt))] = interior[unknown_index(ix, kt)];
    return v;
}

Eigen::VectorXd eval_potential(const Potential& p, const TransverseGrid& grid) {
    if (!p.diverges_by(grid.R)) {
        std::cerr << "warning: custom potential does not reach the divergence floor by |y| = "
                  << grid.R << "; truncation error may dominate\n";
    }
    Eigen::VectorXd g(grid.n);
    for (int i = 0; i < grid.n; ++i) g[i] = p.value(grid.abs_node(i));
    return g;
}

double default_truncation_radius(double alpha) {
    if (!(alpha > 0.0)) throw ConfigError("truncation radius rule needs alpha > 0");
    return 8.0 / std::pow(alpha, 0.25);
}

}  // namespace confront
