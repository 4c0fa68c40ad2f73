#include "confront/cli.hpp"

#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "confront/csd.hpp"
#include "confront/csvio.hpp"
#include "confront/errors.hpp"
#include "confront/fronts.hpp"
#include "confront/manifest.hpp"
#include "confront/parabolic.hpp"
#include "confront/profiles.hpp"
#include "confront/spectral.hpp"
#include "confront/svg.hpp"

namespace confront {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunConfig {
    // reaction
    std::string reaction_kind = "kpp";
    double f_a = 1.0;
    double f_b = 1.0;
    double theta = 0.25;
    std::string reaction_table;

    // potential / heterogeneity
    std::string potential_kind = "quadratic";
    double r0 = 2.0;
    std::string potential_table;
    double L1 = 1.0, L2 = 1.0, m = 1.0;
    std::string csd_transition = "linear";

    // grids
    int dim = 1;      // transverse dimensions (1 = line, 2/3 = radial)
    double R = 0.0;   // 0: auto
    int n = 0;        // 0: auto (target spacing 0.1)
    double a = 20.0;
    int nx = 0;       // 0: auto
    std::vector<double> a_list{10.0, 20.0, 40.0};

    // parameters
    double alpha = 1.0;
    std::vector<double> alphas;
    double fprime0 = 1.0;
    double c = 0.0;
    std::vector<double> L1_list;

    // time stepping
    double dt = 0.05;
    double T = 100.0;
    int snapshot_stride = 0;

    // tolerances
    double residual_tol = 1e-8;
    double value_tol = 1e-6;
    double alpha0_atol = 1e-4;
    double threshold_width = 1e-3;
    double csd_width = 1e-2;

    // run control
    std::string out = "out";
    unsigned workers = 1;
    unsigned long seed = 0;

    std::string canonical() const {
        json j;
        j["reaction"] = {{"kind", reaction_kind}, {"a", f_a},    {"b", f_b},
                         {"theta", theta},        {"table", reaction_table}};
        j["potential"] = {{"kind", potential_kind}, {"r0", r0}, {"table", potential_table}};
        j["csd"] = {{"L1", L1}, {"L2", L2}, {"m", m}, {"transition", csd_transition}};
        j["grid"] = {{"dim", dim}, {"R", R}, {"n", n}, {"a", a}, {"nx", nx}};
        j["alpha"] = alpha;
        j["alphas"] = alphas;
        j["fprime0"] = fprime0;
        j["c"] = c;
        j["a_list"] = a_list;
        j["L1_list"] = L1_list;
        j["time"] = {{"dt", dt}, {"T", T}, {"snapshot_stride", snapshot_stride}};
        j["tolerances"] = {{"residual", residual_tol},
                           {"value", value_tol},
                           {"alpha0_atol", alpha0_atol},
                           {"threshold_width", threshold_width},
                           {"csd_width", csd_width}};
        j["out"] = out;
        j["workers"] = workers;
        j["seed"] = seed;
        return j.dump();
    }
};

void reject_unknown_keys(const json& j, const std::vector<std::string>& allowed,
                         const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw ConfigError("config: unknown key '" + it.key() + "' in " + where);
    }
}

template <class T>
void maybe(const json& j, const char* key, T& into) {
    if (j.contains(key)) into = j.at(key).get<T>();
}

void load_config_file(const fs::path& path, RunConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    reject_unknown_keys(j, {"reaction", "potential", "csd", "grid", "alpha", "alphas", "fprime0",
                            "c", "a_list", "L1_list", "time", "tolerances", "out", "workers",
                            "seed"},
                        "top level");
    if (j.contains("reaction")) {
        const json& r = j["reaction"];
        reject_unknown_keys(r, {"kind", "a", "b", "theta", "table"}, "reaction");
        maybe(r, "kind", cfg.reaction_kind);
        maybe(r, "a", cfg.f_a);
        maybe(r, "b", cfg.f_b);
        maybe(r, "theta", cfg.theta);
        maybe(r, "table", cfg.reaction_table);
    }
    if (j.contains("potential")) {
        const json& p = j["potential"];
        reject_unknown_keys(p, {"kind", "r0", "table"}, "potential");
        maybe(p, "kind", cfg.potential_kind);
        maybe(p, "r0", cfg.r0);
        maybe(p, "table", cfg.potential_table);
    }
    if (j.contains("csd")) {
        const json& c = j["csd"];
        reject_unknown_keys(c, {"L1", "L2", "m", "transition"}, "csd");
        maybe(c, "L1", cfg.L1);
        maybe(c, "L2", cfg.L2);
        maybe(c, "m", cfg.m);
        maybe(c, "transition", cfg.csd_transition);
    }
    if (j.contains("grid")) {
        const json& g = j["grid"];
        reject_unknown_keys(g, {"dim", "R", "n", "a", "nx"}, "grid");
        maybe(g, "dim", cfg.dim);
        maybe(g, "R", cfg.R);
        maybe(g, "n", cfg.n);
        maybe(g, "a", cfg.a);
        maybe(g, "nx", cfg.nx);
    }
    maybe(j, "alpha", cfg.alpha);
    maybe(j, "alphas", cfg.alphas);
    maybe(j, "fprime0", cfg.fprime0);
    maybe(j, "c", cfg.c);
    maybe(j, "a_list", cfg.a_list);
    maybe(j, "L1_list", cfg.L1_list);
    if (j.contains("time")) {
        const json& t = j["time"];
        reject_unknown_keys(t, {"dt", "T", "snapshot_stride"}, "time");
        maybe(t, "dt", cfg.dt);
        maybe(t, "T", cfg.T);
        maybe(t, "snapshot_stride", cfg.snapshot_stride);
    }
    if (j.contains("tolerances")) {
        const json& t = j["tolerances"];
        reject_unknown_keys(
            t, {"residual", "value", "alpha0_atol", "threshold_width", "csd_width"}, "tolerances");
        maybe(t, "residual", cfg.residual_tol);
        maybe(t, "value", cfg.value_tol);
        maybe(t, "alpha0_atol", cfg.alpha0_atol);
        maybe(t, "threshold_width", cfg.threshold_width);
        maybe(t, "csd_width", cfg.csd_width);
    }
    maybe(j, "out", cfg.out);
    maybe(j, "workers", cfg.workers);
    maybe(j, "seed", cfg.seed);
}

Reaction make_reaction(const RunConfig& cfg) {
    if (cfg.reaction_kind == "kpp") {
        if (!cfg.reaction_table.empty()) {
            auto [s, f] = read_two_column_csv(cfg.reaction_table);
            return Reaction::tabulated(ReactionKind::Kpp, std::move(s), std::move(f));
        }
        return Reaction::kpp_logistic(cfg.f_a);
    }
    if (cfg.reaction_kind == "bistable") {
        if (!cfg.reaction_table.empty()) {
            auto [s, f] = read_two_column_csv(cfg.reaction_table);
            return Reaction::tabulated(ReactionKind::Bistable, std::move(s), std::move(f),
                                       cfg.theta);
        }
        return Reaction::bistable_cubic(cfg.f_b, cfg.theta);
    }
    throw ConfigError("unknown reaction kind '" + cfg.reaction_kind + "'");
}

Potential make_potential(const RunConfig& cfg) {
    if (cfg.potential_kind == "quadratic") return Potential::quadratic();
    if (cfg.potential_kind == "plateau") return Potential::plateau(cfg.r0);
    if (cfg.potential_kind == "custom") {
        if (cfg.potential_table.empty()) throw ConfigError("custom potential needs --g-table");
        auto [r, g] = read_two_column_csv(cfg.potential_table);
        return Potential::tabulated(std::move(r), std::move(g));
    }
    throw ConfigError("unknown potential kind '" + cfg.potential_kind + "'");
}

Heterogeneity make_csd(const RunConfig& cfg) {
    const CsdTransition shape =
        cfg.csd_transition == "cosine" ? CsdTransition::Cosine : CsdTransition::Linear;
    return Heterogeneity::csd(cfg.L1, cfg.L2, cfg.m, shape);
}

double auto_radius(const RunConfig& cfg) {
    if (cfg.R > 0.0) return cfg.R;
    if (cfg.potential_kind == "quadratic") return default_truncation_radius(cfg.alpha);
    if (cfg.potential_kind == "plateau") return cfg.r0 + 8.0;
    return 10.0;
}

double auto_radius_csd(const RunConfig& cfg) {
    if (cfg.R > 0.0) return cfg.R;
    return cfg.L2 + 8.0 / std::sqrt(cfg.m);
}

TransverseGrid make_grid(const RunConfig& cfg, double R) {
    int n = cfg.n;
    if (n <= 0) {
        const double target = 0.1;
        const int cells = std::max(4, static_cast<int>(std::lround((cfg.dim >= 2 ? R : 2 * R) / target)));
        n = (cfg.dim >= 2) ? cells + 1 : (cells % 2 ? cells + 1 : cells) + 1;
    }
    return cfg.dim >= 2 ? TransverseGrid::radial(cfg.dim, R, n) : TransverseGrid::line(R, n);
}

SlabGrid make_slab(const RunConfig& cfg, double a, const TransverseGrid& t) {
    int nx = cfg.nx;
    if (nx <= 0) {
        int cells = std::max(4, static_cast<int>(std::lround(2 * a / 0.1)));
        if (cells % 2) ++cells;
        nx = cells + 1;
    }
    return SlabGrid::make(a, nx, t);
}

void dump_profile_csv(const fs::path& path, const TransverseGrid& grid,
                      const Eigen::VectorXd& values) {
    CsvWriter csv(path, {"y", "V"});
    for (int i = 0; i < grid.n; ++i) csv.row({grid.node(i), values[i]});
}

void dump_phi_csv(const fs::path& path, const TransverseGrid& grid, const Eigen::VectorXd& phi) {
    CsvWriter csv(path, {"y", "phi"});
    for (int i = 0; i < grid.n; ++i) csv.row({grid.node(i), phi[i]});
}

void dump_front_csv(const fs::path& path, const SlabGrid& grid, const Eigen::VectorXd& u) {
    CsvWriter csv(path, {"x1", "y", "u"});
    for (int ix = 0; ix < grid.nx; ++ix)
        for (int jt = 0; jt < grid.transverse.n; ++jt)
            csv.row({grid.x(ix), grid.transverse.node(jt), u[grid.node_index(ix, jt)]});
}

void front_slice_svg(const fs::path& path, const SlabGrid& grid, const Eigen::VectorXd& u) {
    const int jc = grid.transverse.center_node();
    const double W = 640, H = 320, pad = 40;
    SvgCanvas svg(W, H);
    svg.line(pad, H - pad, W - pad, H - pad, "black");
    svg.line(pad, pad, pad, H - pad, "black");
    std::vector<std::pair<double, double>> pts;
    double umax = 1e-12;
    for (int ix = 0; ix < grid.nx; ++ix)
        umax = std::max(umax, u[grid.node_index(ix, jc)]);
    for (int ix = 0; ix < grid.nx; ++ix) {
        const double px = pad + (W - 2 * pad) * ix / (grid.nx - 1);
        const double py = H - pad - (H - 2 * pad) * u[grid.node_index(ix, jc)] / umax;
        pts.emplace_back(px, py);
    }
    svg.polyline(pts, "steelblue", 1.5);
    svg.text(pad, pad - 8, "u(x1, 0)");
    svg.save(path);
}

/// Background CSV writer so time stepping never blocks on disk.
class SnapshotWriter {
public:
    SnapshotWriter(fs::path dir, const SlabGrid& grid) : dir_(std::move(dir)), grid_(grid) {
        worker_ = std::thread([this] { loop(); });
    }
    ~SnapshotWriter() {
        {
            std::lock_guard<std::mutex> lock(mu_);
            done_ = true;
        }
        cv_.notify_all();
        worker_.join();
    }

    void push(double t, double shift, Eigen::VectorXd u) {
        {
            std::lock_guard<std::mutex> lock(mu_);
            queue_.push_back({t, shift, std::move(u)});
        }
        cv_.notify_one();
    }

    /// (time, shift, filename) for the manifest, in emission order.
    std::vector<std::tuple<double, double, std::string>> entries() {
        std::lock_guard<std::mutex> lock(mu_);
        return entries_;
    }

private:
    struct Item {
        double t, shift;
        Eigen::VectorXd u;
    };

    void loop() {
        int counter = 0;
        for (;;) {
            Item item;
            {
                std::unique_lock<std::mutex> lock(mu_);
                cv_.wait(lock, [this] { return done_ || !queue_.empty(); });
                if (queue_.empty()) {
                    if (done_) return;
                    continue;
                }
                item = std::move(queue_.front());
                queue_.pop_front();
            }
            char name[32];
            std::snprintf(name, sizeof(name), "snapshot_%04d.csv", counter++);
            dump_front_csv(dir_ / name, grid_, item.u);
            std::lock_guard<std::mutex> lock(mu_);
            entries_.emplace_back(item.t, item.shift, name);
        }
    }

    fs::path dir_;
    SlabGrid grid_;
    std::thread worker_;
    std::mutex mu_;
    std::condition_variable cv_;
    std::deque<Item> queue_;
    std::vector<std::tuple<double, double, std::string>> entries_;
    bool done_ = false;
};

struct Emitted {
    std::vector<fs::path> files;
    void add(fs::path p) { files.push_back(std::move(p)); }
};

// ---------------------------------------------------------------------------
// subcommand bodies

int cmd_eig(const RunConfig& cfg, const fs::path& out, Emitted& em) {
    const Potential g = make_potential(cfg);
    const TransverseGrid grid = make_grid(cfg, auto_radius(cfg));
    std::vector<double> alphas = cfg.alphas.empty() ? std::vector<double>{cfg.alpha} : cfg.alphas;
    const auto results = eigen_curve(grid, g, alphas, cfg.fprime0, cfg.workers);

    CsvWriter csv(out / "eig.csv", {"alpha", "lambda", "residual"});
    for (const auto& r : results) csv.row({r.alpha, r.lambda, r.residual});
    em.add(out / "eig.csv");
    for (std::size_t i = 0; i < results.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "phi_%03zu.csv", i);
        dump_phi_csv(out / name, grid, results[i].phi);
        em.add(out / name);
    }
    for (const auto& r : results)
        std::printf("alpha = %.9g  lambda = %.9g  (residual %.3g)\n", r.alpha, r.lambda,
                    r.residual);
    return 0;
}

int cmd_alpha0(const RunConfig& cfg, const fs::path& out, Emitted& em) {
    const Potential g = make_potential(cfg);
    RunConfig c2 = cfg;
    c2.alpha = 1.0;  // radius rule pivot
    const TransverseGrid grid = make_grid(c2, cfg.R > 0 ? cfg.R : auto_radius(c2));
    Alpha0Options opts;
    opts.atol = cfg.alpha0_atol;
    const Alpha0Result r = find_alpha0(grid, g, cfg.fprime0, opts);

    CsvWriter csv(out / "alpha0.csv", {"alpha0", "finite", "width", "lambda_at_alpha_max"});
    csv.row({r.alpha0, r.finite ? 1.0 : 0.0, r.width, r.lambda_at_alpha_max});
    em.add(out / "alpha0.csv");
    if (r.finite)
        std::printf("alpha0 = %.9g (width %.2g)\n", r.alpha0, r.width);
    else
        std::printf("alpha0 = +inf (case ii); lambda(alpha_max=%.3g) = %.9g\n", r.alpha_max,
                    r.lambda_at_alpha_max);
    return 0;
}

ProfileOptions profile_opts(const RunConfig& cfg) {
    ProfileOptions p;
    p.residual_tol = cfg.residual_tol;
    return p;
}

Profile solve_profile(const RunConfig& cfg, const Reaction& f, const Potential& g,
                      const TransverseGrid& grid) {
    return f.kind() == ReactionKind::Kpp
               ? solve_profile_kpp(cfg.alpha, grid, g, f, profile_opts(cfg))
               : solve_profile_bistable_maximal(cfg.alpha, grid, g, f, profile_opts(cfg));
}

int cmd_profile(const RunConfig& cfg, const fs::path& out, Emitted& em) {
    const Reaction f = make_reaction(cfg);
    const Potential g = make_potential(cfg);
    const TransverseGrid grid = make_grid(cfg, auto_radius(cfg));
    const Profile p = solve_profile(cfg, f, g, grid);
    dump_profile_csv(out / "profile.csv", grid, p.values);
    em.add(out / "profile.csv");
    const EnergyReport e = energy(p.values, cfg.alpha, grid, g, f);
    std::printf("profile: %s  max = %.9g  residual = %.3g  J = %.9g  decay_rate = %.4g\n",
                p.zero ? "zero" : "nonzero", p.max(), p.residual, e.value, p.decay_rate);
    return 0;
}

int cmd_energy(const RunConfig& cfg, const fs::path& out, Emitted& em) {
    const Reaction f = make_reaction(cfg);
    const Potential g = make_potential(cfg);
    const TransverseGrid grid = make_grid(cfg, auto_radius(cfg));
    std::vector<double> alphas = cfg.alphas.empty() ? std::vector<double>{cfg.alpha} : cfg.alphas;

    CsvWriter csv(out / "energy.csv", {"alpha", "J", "classification"});
    for (double alpha : alphas) {
        RunConfig c2 = cfg;
        c2.alpha = alpha;
        const Profile p = solve_profile(c2, f, g, grid);
        const EnergyReport e = energy(p.values, alpha, grid, g, f);
        csv.row_mixed({CsvWriter::format_double(alpha), CsvWriter::format_double(e.value),
                       p.zero ? "zero" : "nonzero"});
        std::printf("alpha = %.9g  J = %.9g  %s\n", alpha, e.value, p.zero ? "zero" : "nonzero");
    }
    em.add(out / "energy.csv");
    return 0;
}

Normalization kpp_normalization(const RunConfig& cfg, const Potential& g,
                                const TransverseGrid& grid, const Reaction& f) {
    const EigenResult eig = principal_eigen(grid, g, cfg.alpha, f.fprime0());
    if (eig.lambda >= 0.0)
        throw SolverError("front: no profile exists at this alpha (lambda >= 0)");
    const auto range = f.kpp_linearization_range(-eig.lambda / 2.0);
    return Normalization::point(range.theta_norm);
}

FindSpeedOptions speed_opts(const RunConfig& cfg, double lambda_or_gamma, bool kpp) {
    FindSpeedOptions fs;
    fs.value_tol = cfg.value_tol;
    fs.slab.residual_tol = cfg.residual_tol;
    if (kpp) {
        fs.c_lo = -1.0;
        fs.c_hi = 2.0 * std::sqrt(std::max(0.0, -lambda_or_gamma)) + 1.0;
    } else {
        fs.c_lo = -std::abs(lambda_or_gamma) - 1.0;
        fs.c_hi = std::abs(lambda_or_gamma) + 1.0;
    }
    return fs;
}

int cmd_front(const RunConfig& cfg, const fs::path& out, Emitted& em) {
    const Reaction f = make_reaction(cfg);
    const Potential g = make_potential(cfg);
    const TransverseGrid grid = make_grid(cfg, auto_radius(cfg));
    const SlabGrid slab = make_slab(cfg, cfg.a, grid);
    const Profile V = solve_profile(cfg, f, g, grid);
    if (V.zero) throw SolverError("front: the asymptotic profile vanishes at this alpha");
    const SlabProblem problem = SlabProblem::confined(slab, g, cfg.alpha, f, V.values);

    Normalization norm =
        f.kind() == ReactionKind::Kpp ? kpp_normalization(cfg, g, grid, f)
                                      : Normalization::max_over_y(f.theta());
    double bracket_pivot = 0.0;
    if (f.kind() == ReactionKind::Kpp) {
        bracket_pivot = principal_eigen(grid, g, cfg.alpha, f.fprime0()).lambda;
    } else {
        const int nx1d = 2 * static_cast<int>(std::lround(cfg.a / 0.025)) + 1;
        bracket_pivot = one_d_bistable_speed(cfg.a, nx1d, f, f.theta()).gamma;
    }
    const FindSpeedResult r = find_speed(problem, norm,
                                         speed_opts(cfg, bracket_pivot,
                                                    f.kind() == ReactionKind::Kpp));

    dump_front_csv(out / "front.csv", slab, r.front.u);
    em.add(out / "front.csv");
    front_slice_svg(out / "front.svg", slab, r.front.u);
    em.add(out / "front.svg");
    std::printf("c_a = %.9g  (bracket width %.2g, norm value %.9g, residual %.3g)\n", r.front.c,
                r.c_hi - r.c_lo, r.front.norm_value, r.front.residual);
    return 0;
}

int cmd_speed_curve(const RunConfig& cfg, const fs::path& out, Emitted& em) {
    const Reaction f = make_reaction(cfg);
    const Potential g = make_potential(cfg);
    const TransverseGrid grid = make_grid(cfg, auto_radius(cfg));
    const Profile V = solve_profile(cfg, f, g, grid);
    if (V.zero) throw SolverError("speed-curve: the asymptotic profile vanishes at this alpha");

    Normalization norm =
        f.kind() == ReactionKind::Kpp ? kpp_normalization(cfg, g, grid, f)
                                      : Normalization::max_over_y(f.theta());
    double pivot = f.kind() == ReactionKind::Kpp
                       ? principal_eigen(grid, g, cfg.alpha, f.fprime0()).lambda
                       : one_d_bistable_speed(cfg.a_list.back(),
                                              2 * static_cast<int>(std::lround(
                                                      cfg.a_list.back() / 0.025)) + 1,
                                              f, f.theta())
                             .gamma;

    ContinueOptions copts;
    copts.speed = speed_opts(cfg, pivot, f.kind() == ReactionKind::Kpp);
    const SpeedCurve curve = continue_speed(
        cfg.a_list,
        [&](double a) {
            return SlabProblem::confined(make_slab(cfg, a, grid), g, cfg.alpha, f, V.values);
        },
        norm, copts);

    CsvWriter csv(out / "speed_curve.csv", {"a", "c_a"});
    for (const auto& [a, c] : curve.points) csv.row({a, c});
    em.add(out / "speed_curve.csv");
    dump_front_csv(out / "front.csv", make_slab(cfg, cfg.a_list.back(), grid), curve.final_front.u);
    em.add(out / "front.csv");
    std::printf("c_inf = %.9g +- %.2g  (left-state error %.3g, right %.3g)\n", curve.c_inf,
                curve.uncertainty, curve.left_state_error, curve.right_state_error);
    return 0;
}

int cmd_spread(const RunConfig& cfg, const fs::path& out, Emitted& em, bool expect_extinction) {
    const Reaction f = make_reaction(cfg);
    const Potential g = make_potential(cfg);
    const TransverseGrid grid = make_grid(cfg, auto_radius(cfg));
    const SlabGrid slab = make_slab(cfg, cfg.a, grid);

    double theta_level = 0.5 * f.theta();
    Eigen::VectorXd Vv = Eigen::VectorXd::Ones(grid.n);
    if (f.kind() == ReactionKind::Kpp) {
        const EigenResult eig = principal_eigen(grid, g, cfg.alpha, f.fprime0());
        if (eig.lambda < 0.0) {
            const Profile V = solve_profile_kpp(cfg.alpha, grid, g, f, profile_opts(cfg));
            Vv = V.values;
            theta_level = f.kpp_linearization_range(-eig.lambda / 2.0).theta_norm;
        } else {
            // Extinction regime: no profile; track a small fixed level.
            Vv = Eigen::VectorXd::Ones(grid.n);
            theta_level = 0.05;
        }
    } else {
        const Profile V = solve_profile_bistable_maximal(cfg.alpha, grid, g, f, profile_opts(cfg));
        if (!V.zero) Vv = V.values;
        theta_level = f.theta();
    }

    SlabProblem problem = SlabProblem::confined(slab, g, cfg.alpha, f, Vv);
    problem.left_data.setZero();  // compact datum, zero faces until the window moves

    SimOptions sim;
    sim.dt = cfg.dt;
    sim.T = cfg.T;
    sim.theta_level = theta_level;
    sim.snapshot_stride = cfg.snapshot_stride;
    sim.keep_snapshots = false;

    SnapshotWriter writer(out, slab);
    sim.sink = [&writer](double t, double shift, const Eigen::VectorXd& u) {
        writer.push(t, shift, u);
    };

    const Eigen::VectorXd u0 = default_compact_u0(slab, theta_level, Vv);
    const Trajectory traj = simulate(problem, u0, sim);

    {
        CsvWriter csv(out / "track.csv", {"t", "x_theta"});
        for (const auto& [t, x] : traj.level_track) csv.row({t, x});
        em.add(out / "track.csv");
    }
    {
        CsvWriter csv(out / "sup.csv", {"t", "sup_u"});
        for (std::size_t i = 0; i < traj.sup_history.size(); ++i)
            csv.row({i * traj.dt, traj.sup_history[i]});
        em.add(out / "sup.csv");
    }

    const double final_sup = traj.sup_history.back();
    if (expect_extinction) {
        std::printf("sup u(T=%.6g) = %.6g  -> %s\n", cfg.T, final_sup,
                    final_sup < 1e-4 ? "extinct" : "persistent");
        return 0;
    }
    const SpreadingFit fit = measure_spreading_speed(traj);
    std::printf("c_hat = %.9g  (fit rms %.3g over t in [%.6g, %.6g], window shift %.6g)\n",
                fit.c_hat, fit.fit_residual, fit.t_begin, fit.t_end, traj.window_shift);
    return 0;
}

int cmd_csd_profile(const RunConfig& cfg, const fs::path& out, Emitted& em) {
    const Reaction f = make_reaction(cfg);
    const Heterogeneity het = make_csd(cfg);
    const TransverseGrid grid = make_grid(cfg, auto_radius_csd(cfg));
    const Profile p = csd_profile(het, f, grid, profile_opts(cfg));
    dump_profile_csv(out / "csd_profile.csv", grid, p.values);
    em.add(out / "csd_profile.csv");
    const EnergyReport e = csd_energy(p.values, het, f, grid);
    std::printf("csd profile: %s  max = %.9g  residual = %.3g  J = %.9g  decay_rate = %.4g\n",
                p.zero ? "zero" : "nonzero", p.max(), p.residual, e.value, p.decay_rate);
    return 0;
}

int cmd_csd_front(const RunConfig& cfg, const fs::path& out, Emitted& em) {
    const Reaction f = make_reaction(cfg);
    const Heterogeneity het = make_csd(cfg);
    const TransverseGrid grid = make_grid(cfg, auto_radius_csd(cfg));
    const SlabGrid slab = make_slab(cfg, cfg.a, grid);

    FindSpeedOptions fopts;
    fopts.value_tol = cfg.value_tol;
    fopts.slab.residual_tol = cfg.residual_tol;
    const auto r = csd_front(het, f, slab, profile_opts(cfg), fopts);
    if (!r) {
        std::printf("csd front: none (no nonzero profile at L1=%.4g, L2=%.4g)\n", cfg.L1, cfg.L2);
        return 0;
    }
    dump_front_csv(out / "csd_front.csv", slab, r->front.u);
    em.add(out / "csd_front.csv");
    std::printf("c = %.9g  (1D comparison bound gamma_a = %.9g)\n", r->front.c, r->gamma_1d);
    return 0;
}

int cmd_csd_phase(const RunConfig& cfg, const fs::path& out, Emitted& em) {
    const Reaction f = make_reaction(cfg);
    if (cfg.L1_list.empty()) throw ConfigError("csd-phase needs --L1-list");
    const double ratio = cfg.L2 >= cfg.L1 && cfg.L1 > 0 ? cfg.L2 / cfg.L1 : 1.0;
    const CsdThresholdMode mode =
        std::abs(ratio - 1.0) < 1e-12 ? CsdThresholdMode::TieRadii : CsdThresholdMode::FixedRatio;

    RunConfig cmax = cfg;
    cmax.L2 = ratio * cfg.L1_list.back();
    const TransverseGrid grid = make_grid(cfg, auto_radius_csd(cmax));

    FindSpeedOptions fopts;
    fopts.value_tol = cfg.value_tol;
    fopts.slab.residual_tol = cfg.residual_tol;
    int nx = cfg.nx;
    if (nx <= 0) nx = make_slab(cfg, cfg.a, grid).nx;
    const auto reports = csd_phase_diagram(cfg.L1_list, mode, ratio, cfg.m, f, grid, cfg.a, nx,
                                           cfg.workers, profile_opts(cfg), fopts);

    CsvWriter csv(out / "csd_phase.csv", {"L1", "L2", "classification", "c"});
    for (const auto& rep : reports) {
        csv.row_mixed({CsvWriter::format_double(rep.L1), CsvWriter::format_double(rep.L2),
                       rep.error.empty() ? to_string(rep.classification) : "error",
                       CsvWriter::format_double(rep.front_speed.value_or(
                           std::numeric_limits<double>::quiet_NaN()))});
    }
    em.add(out / "csd_phase.csv");

    // Classification strip.
    {
        const double W = 640, H = 120, pad = 30;
        SvgCanvas svg(W, H);
        const double cell = (W - 2 * pad) / reports.size();
        for (std::size_t i = 0; i < reports.size(); ++i) {
            std::string color = "lightgray";
            if (reports[i].error.empty()) {
                switch (reports[i].classification) {
                    case CsdClass::NoProfile: color = "#d73027"; break;
                    case CsdClass::ProfileNoFront: color = "#fee08b"; break;
                    case CsdClass::Propagating: color = "#1a9850"; break;
                }
            }
            svg.rect(pad + i * cell, pad, cell, H - 2 * pad, color);
        }
        svg.text(pad, pad - 8, "CSD classification vs L1 (red: none, yellow: blocked, green: propagating)");
        svg.save(out / "csd_phase.svg");
        em.add(out / "csd_phase.svg");
    }

    for (const auto& rep : reports)
        std::printf("L1 = %.6g  L2 = %.6g  %s%s%s\n", rep.L1, rep.L2,
                    rep.error.empty() ? to_string(rep.classification) : "error",
                    rep.front_speed ? "  c = " : "",
                    rep.front_speed ? CsvWriter::format_double(*rep.front_speed).c_str() : "");
    return 0;
}

int cmd_oracle_1d(const RunConfig& cfg, const fs::path& out, Emitted& em) {
    const Reaction f = make_reaction(cfg);
    if (f.kind() != ReactionKind::Bistable)
        throw ConfigError("oracle-1d expects a bistable reaction");
    int nx = cfg.nx;
    if (nx <= 0) nx = 2 * static_cast<int>(std::lround(cfg.a / 0.025)) + 1;
    const OneDFront r = one_d_bistable_speed(cfg.a, nx, f, f.theta());
    CsvWriter csv(out / "z.csv", {"x1", "z"});
    for (int i = 0; i < nx; ++i) csv.row({-cfg.a + i * r.hx, r.z[i]});
    em.add(out / "z.csv");
    std::printf("gamma_a = %.9g  (a = %.6g, residual %.3g)\n", r.gamma, cfg.a, r.residual);
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("confront");
    for (const auto& s : args) argv.push_back(s.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

int run(int argc, const char* const* argv) {
    // First pass: pick up --config alone, so the file provides defaults and
    // explicit flags win on the real parse below.
    std::string config_path;
    {
        CLI::App pre{""};
        pre.allow_extras();
        pre.set_help_flag();
        pre.add_option("--config", config_path);
        try {
            pre.parse(argc, argv);
        } catch (const CLI::ParseError&) {
            // The real parse reports errors.
        }
    }

    RunConfig cfg;
    if (const char* env_out = std::getenv("CONFRONT_OUT")) cfg.out = env_out;
    if (!config_path.empty()) {
        try {
            load_config_file(config_path, cfg);
        } catch (const ConfigError& e) {
            std::cerr << "config error: " << e.what() << '\n';
            return 2;
        }
    }

    CLI::App app{"confined reaction-diffusion fronts: eigenvalues, profiles, speeds"};
    app.require_subcommand(1);
    app.add_option("--config", config_path, "JSON config file (flags override it)");

    // Shared flags, attached to every subcommand so they can appear after it.
    std::vector<CLI::App*> subs;
    auto add_common = [&](CLI::App* s) {
        s->add_option("--out", cfg.out, "output directory");
        s->add_option("--workers", cfg.workers, "worker pool size");
        s->add_option("--seed", cfg.seed, "random seed (recorded; used by test fixtures)");
        s->add_option("--f", cfg.reaction_kind, "reaction kind: kpp | bistable");
        s->add_option("--f-a", cfg.f_a, "logistic rate a");
        s->add_option("--f-b", cfg.f_b, "cubic amplitude b");
        s->add_option("--theta", cfg.theta, "bistable threshold");
        s->add_option("--f-table", cfg.reaction_table, "tabulated reaction CSV (s, f)");
        s->add_option("--g", cfg.potential_kind, "potential: quadratic | plateau | custom");
        s->add_option("--r0", cfg.r0, "plateau radius");
        s->add_option("--g-table", cfg.potential_table, "tabulated potential CSV (|y|, g)");
        s->add_option("--dim", cfg.dim, "transverse dimensions (1 = line, 2/3 = radial)");
        s->add_option("--R", cfg.R, "truncation radius (0 = auto)");
        s->add_option("--n", cfg.n, "transverse node count (0 = auto)");
        s->add_option("--a", cfg.a, "slab half-length");
        s->add_option("--nx", cfg.nx, "slab node count (0 = auto)");
        s->add_option("--alpha", cfg.alpha, "confinement strength");
        s->add_option("--alphas", cfg.alphas, "alpha sweep values")->delimiter(',');
        s->add_option("--a-list", cfg.a_list, "slab schedule for continuation")->delimiter(',');
        s->add_option("--fprime0", cfg.fprime0, "f'(0) for pure eigenvalue commands");
        s->add_option("--c", cfg.c, "prescribed speed");
        s->add_option("--L1", cfg.L1, "CSD core half-width");
        s->add_option("--L2", cfg.L2, "CSD transition end");
        s->add_option("--m", cfg.m, "CSD absorption rate");
        s->add_option("--L1-list", cfg.L1_list, "CSD phase diagram sweep")->delimiter(',');
        s->add_option("--dt", cfg.dt, "time step");
        s->add_option("--T", cfg.T, "final time");
        s->add_option("--snapshot-stride", cfg.snapshot_stride, "steps between snapshots");
        s->add_option("--residual-tol", cfg.residual_tol, "solver residual tolerance");
        s->add_option("--value-tol", cfg.value_tol, "normalization value tolerance");
        subs.push_back(s);
    };

    add_common(app.add_subcommand("eig", "principal eigenvalue(s) of the linearized operator"));
    add_common(app.add_subcommand("alpha0", "extinction threshold alpha_0"));
    add_common(app.add_subcommand("profile", "stationary asymptotic profile V(y)"));
    add_common(app.add_subcommand("energy", "energy of the profile across an alpha sweep"));
    add_common(app.add_subcommand("front", "traveling front on one slab (speed selection)"));
    add_common(app.add_subcommand("speed-curve", "slab continuation a -> infinity"));
    add_common(app.add_subcommand("spread", "parabolic spreading run and measured speed"));
    add_common(app.add_subcommand("extinction", "parabolic decay run"));
    add_common(app.add_subcommand("csd-profile", "CSD stationary profile"));
    add_common(app.add_subcommand("csd-front", "CSD traveling front"));
    add_common(app.add_subcommand("csd-phase", "CSD propagation/blocking classification sweep"));
    add_common(app.add_subcommand("oracle-1d", "one-dimensional bistable slab speed"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        const auto t0 = std::chrono::steady_clock::now();
        const fs::path out = cfg.out;
        fs::create_directories(out);
        Emitted em;

        int rc = 0;
        if (app.got_subcommand("eig")) rc = cmd_eig(cfg, out, em);
        else if (app.got_subcommand("alpha0")) rc = cmd_alpha0(cfg, out, em);
        else if (app.got_subcommand("profile")) rc = cmd_profile(cfg, out, em);
        else if (app.got_subcommand("energy")) rc = cmd_energy(cfg, out, em);
        else if (app.got_subcommand("front")) rc = cmd_front(cfg, out, em);
        else if (app.got_subcommand("speed-curve")) rc = cmd_speed_curve(cfg, out, em);
        else if (app.got_subcommand("spread")) rc = cmd_spread(cfg, out, em, false);
        else if (app.got_subcommand("extinction")) rc = cmd_spread(cfg, out, em, true);
        else if (app.got_subcommand("csd-profile")) rc = cmd_csd_profile(cfg, out, em);
        else if (app.got_subcommand("csd-front")) rc = cmd_csd_front(cfg, out, em);
        else if (app.got_subcommand("csd-phase")) rc = cmd_csd_phase(cfg, out, em);
        else if (app.got_subcommand("oracle-1d")) rc = cmd_oracle_1d(cfg, out, em);

        const auto t1 = std::chrono::steady_clock::now();
        Manifest manifest;
        manifest.set_config(cfg.canonical());
        manifest.set_tolerance("residual", cfg.residual_tol);
        manifest.set_tolerance("value", cfg.value_tol);
        manifest.set_tolerance("alpha0_atol", cfg.alpha0_atol);
        manifest.set_timing("total", std::chrono::duration<double>(t1 - t0).count());
        for (const auto& f : em.files) manifest.add_file(f);
        manifest.write(out / "manifest.json");
        return rc;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace confront
