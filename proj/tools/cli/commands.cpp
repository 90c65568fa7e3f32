#include "cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>

#include "needles/conformal.hpp"
#include "needles/csv.hpp"
#include "needles/error.hpp"
#include "needles/homogeneous.hpp"
#include "needles/hydro.hpp"
#include "needles/kinetic.hpp"
#include "needles/neumann_oracle.hpp"
#include "needles/particle.hpp"

namespace needles::cli {

namespace {

constexpr double pi = std::numbers::pi;

class Outputs {
public:
    Outputs(const RunContext& ctx, CommandOutput& out) : ctx_(ctx), out_(out) {}

    CsvWriter open(const std::string& name, const std::vector<std::string>& header) {
        out_.files.push_back(name);
        return CsvWriter((std::filesystem::path(ctx_.out_dir) / name).string(), header);
    }

    void log(const std::string& line) const {
        if (ctx_.log) *ctx_.log << line << '\n';
    }

private:
    const RunContext& ctx_;
    CommandOutput& out_;
};

int as_int(const ResolvedConfig& c, const std::string& name) { return static_cast<int>(c.integer(name)); }

std::string time_label(const std::string& prefix, double t) { return prefix + "(t=" + format_number(t) + ")"; }

// ---------------------------------------------------------------- tmatrix

void tmatrix(const ResolvedConfig& c, Outputs& o, CommandOutput& r) {
    const int points = as_int(c, "points");
    auto fig2 = o.open("fig2.csv", {"theta", "T11", "T12", "T22"});
    auto fig4b = o.open("fig4b.csv", {"theta", "a1", "a2"});
    auto full = o.open("tmatrix.csv", {"theta", "a1", "a2", "T11", "T12", "T22"});
    double min_eig = INFINITY;
    for (int k = 0; k < points; ++k) {
        const double theta = pi * (k + 0.5) / points;
        const SCConstant a = sc_constant(theta);
        const TMatrix t = t_matrix(a);
        min_eig = std::min(min_eig, t.as_matrix().symmetric_eigenvalues().first);
        fig2.row({theta, t.t11, t.t12, t.t22});
        fig4b.row({theta, a.a1, a.a2});
        full.row({theta, a.a1, a.a2, t.t11, t.t12, t.t22});
    }
    fig2.close();
    fig4b.close();
    full.close();

    const TTable table(static_cast<std::size_t>(c.integer("table_size")));
    auto tab = o.open("ttable.csv", {"theta", "T11", "T12", "T22"});
    for (std::size_t k = 0; k < table.grid().size(); ++k) {
        const TMatrix& t = table.values()[k];
        tab.row({table.grid()[k], t.t11, t.t12, t.t22});
    }
    tab.close();

    const TMatrix mid = t_matrix(0.5 * pi);
    r.results["mu"] = mid.t11;
    r.results["t12_at_half_pi"] = mid.t12;
    r.results["min_eigenvalue"] = min_eig;

    if (c.flag("oracle")) {
        NeumannOracleOptions opt;
        opt.spacing = c.real("oracle_spacing");
        opt.truncation_radius = c.real("oracle_truncation");
        auto oracle = o.open("oracle.csv", {"theta", "T11", "T12", "T22", "T11_oracle", "T12_oracle", "T22_oracle", "max_rel_error"});
        nlohmann::json errors = nlohmann::json::array();
        for (double theta : {0.25 * pi, 0.5 * pi, 0.75 * pi}) {
            o.log("oracle: solving at theta = " + format_number(theta));
            const NeumannSolution s = t_matrix_oracle(theta, opt);
            const TMatrix t = t_matrix(theta);
            const double scale = std::max({std::abs(t.t11), std::abs(t.t22)});
            const double err = std::max({std::abs(s.t.t11 - t.t11), std::abs(s.t.t12 - t.t12), std::abs(s.t.t22 - t.t22)}) / scale;
            oracle.row({theta, t.t11, t.t12, t.t22, s.t.t11, s.t.t12, s.t.t22, err});
            errors.push_back(err);
        }
        oracle.close();
        r.results["oracle_max_rel_error"] = errors;
    }
}

// ---------------------------------------------------------------- simulate

void simulate(const ResolvedConfig& c, Outputs& o, CommandOutput& r, int threads) {
    SimParams p;
    p.n = as_int(c, "n");
    p.box = Torus2(c.real("lx"), c.real("ly"));
    detail::require(p.n >= 2 || c.real("phi") == 0.0, "phi: must be 0 for a single needle");
    p.eps = p.n >= 2 ? eps_for_phi(c.real("phi"), p.n, p.box) : 0.0;
    detail::require(p.eps < 0.5 * std::min(p.box.lx(), p.box.ly()),
                    "phi: implies needle length " + format_number(p.eps) + ", which must be below half the box size");
    p.d_t = c.real("d_t");
    p.d_r = c.real("d_r");
    p.dt = c.real("dt");
    p.seed = c.seed("seed");
    p.search = c.text("search") == "cells" ? NeighborSearch::cells : NeighborSearch::all_pairs;
    const Vec2 ft{c.real("drift_fx"), c.real("drift_fy")};
    const double fr = c.real("drift_fr");
    if (ft.x != 0.0 || ft.y != 0.0 || fr != 0.0) p.drift = UniformDrift{ft, fr};
    p.validate();
    for (const auto& w : p.warnings()) o.log("warning: " + w);

    RunOptions ro;
    ro.angular_bins = as_int(c, "angular_bins");
    ro.spatial_bins = as_int(c, "spatial_bins");
    const int reals = as_int(c, "realisations");
    const auto runs = run_ensemble(p, reals, c.real("t_end"), c.real("observe_every"), threads, ro);

    auto obs = o.open("observables.csv", {"realisation", "time", "nematic_order", "msd_translation", "msd_rotation", "acceptance"});
    std::vector<std::string> ah = {"realisation", "time"};
    for (int b = 0; b < ro.angular_bins; ++b) ah.push_back("bin" + std::to_string(b));
    auto ang = o.open("angular_hist.csv", ah);
    std::vector<std::string> sh = {"realisation", "time"};
    for (int b = 0; b < ro.spatial_bins * ro.spatial_bins; ++b) sh.push_back("cell" + std::to_string(b));
    auto sp = o.open("spatial_hist.csv", sh);
    double final_s = 0.0;
    for (int k = 0; k < reals; ++k) {
        const ObservableSeries& s = runs[static_cast<std::size_t>(k)];
        for (std::size_t t = 0; t < s.times.size(); ++t) {
            obs.row({static_cast<double>(k), s.times[t], s.nematic_order[t], s.msd_translation[t], s.msd_rotation[t], s.acceptance[t]});
            std::vector<double> row = {static_cast<double>(k), s.times[t]};
            row.insert(row.end(), s.angular_hist[t].begin(), s.angular_hist[t].end());
            ang.row(row);
            row.resize(2);
            row.insert(row.end(), s.spatial_hist[t].begin(), s.spatial_hist[t].end());
            sp.row(row);
        }
        final_s += s.nematic_order.back() / reals;
    }
    obs.close();
    ang.close();
    sp.close();
    r.results["eps"] = p.eps;
    r.results["phi"] = p.phi();
    r.results["mean_final_nematic_order"] = final_s;
    r.results["uniform_baseline"] = std::sqrt(pi / (4.0 * p.n));
    r.results["uniform_baseline_sd"] = std::sqrt((4.0 - pi) / (4.0 * p.n));
}

// ---------------------------------------------------------------- homogeneous

AngularDensity cosine_profile(int m, double amplitude, int mode) {
    return AngularDensity::from_function(static_cast<std::size_t>(m), [=](double t) { return 1.0 / pi + amplitude * std::cos(2.0 * mode * t); });
}

void mkv_evolve(const ResolvedConfig& c, Outputs& o, CommandOutput& r) {
    const int m = as_int(c, "m");
    detail::require(m % 2 == 0, "m: must be even");
    const double phi = c.real("phi"), d_r = c.real("d_r"), t_end = c.real("t_end");
    const AngularDensity p0 = cosine_profile(m, c.real("amplitude"), as_int(c, "mode"));
    MkvEvolveOptions opt;
    opt.dt = c.real("dt");
    opt.output_times = c.real_list("output_times");
    const AngularTrajectory traj = evolve(p0, phi, d_r, t_end, opt);

    std::vector<std::string> header = {"theta"};
    for (double t : traj.times) header.push_back(time_label("p", t));
    auto fig = o.open("fig3b.csv", header);
    for (std::size_t j = 0; j < p0.size(); ++j) {
        std::vector<double> row = {p0.theta(j)};
        for (const auto& s : traj.states) row.push_back(s[j]);
        fig.row(row);
    }
    fig.close();
    auto modes = o.open("modes.csv", {"time", "mode1", "mode2", "mode3", "mode4", "mass", "max"});
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const AngularDensity& s = traj.states[k];
        modes.row({traj.times[k], mode_amplitude(s, 1), mode_amplitude(s, 2), mode_amplitude(s, 3), mode_amplitude(s, 4), s.mass(), s.max()});
    }
    modes.close();

    r.results["steps"] = traj.steps;
    r.results["dt_reductions"] = traj.dt_reductions;
    r.results["growth_rate_mode1"] = growth_rate(1, phi, d_r);
    if (phi > 1.5 * pi) {
        const FixedPointResult fp = stationary_fixed_point(cosine_profile(m, std::abs(c.real("amplitude")), 1), phi);
        if (fp.converged) {
            r.results["distance_to_stationary"] = shift_aligned_distance(traj.states.back(), fp.p).first;
        }
    } else {
        r.results["distance_to_stationary"] = l2_distance(traj.states.back(), AngularDensity::uniform(static_cast<std::size_t>(m)));
    }
}

void mkv_stationary(const ResolvedConfig& c, Outputs& o, CommandOutput& r) {
    const int m = as_int(c, "m");
    detail::require(m % 2 == 0, "m: must be even");
    FixedPointOptions opt;
    opt.tol = c.real("tol");
    opt.max_iter = as_int(c, "max_iter");
    opt.damping = c.real("damping");
    opt.anderson_depth = as_int(c, "anderson_depth");
    opt.anderson_switch = c.real("anderson_switch");
    std::vector<double> phis;
    if (c.flag("sweep")) {
        for (int k = 0; k < as_int(c, "sweep_count"); ++k) phis.push_back(1.5 * pi + k * c.real("sweep_step"));
    } else {
        phis.push_back(c.real("phi"));
    }
    const AngularDensity guess = cosine_profile(m, c.real("amplitude"), 1);
    std::vector<FixedPointResult> sols;
    nlohmann::json summary = nlohmann::json::array();
    for (double phi : phis) {
        sols.push_back(stationary_fixed_point(guess, phi, opt));
        const FixedPointResult& s = sols.back();
        summary.push_back({{"phi", phi}, {"iterations", s.iterations}, {"converged", s.converged}, {"residual", s.residual}, {"max", s.p.max()}});
        if (!s.converged) {
            throw NumericalError("fixed point did not converge at phi = " + format_number(phi) + " after " +
                                 std::to_string(s.iterations) + " iterations (update " + format_number(s.update) + ")");
        }
    }
    std::vector<std::string> header = {"theta"};
    for (double phi : phis) header.push_back("p(phi=" + format_number(phi) + ")");
    auto csv = o.open(c.flag("sweep") ? "fig3a.csv" : "stationary.csv", header);
    for (std::size_t j = 0; j < guess.size(); ++j) {
        std::vector<double> row = {guess.theta(j)};
        for (const auto& s : sols) row.push_back(s.p[j]);
        csv.row(row);
    }
    csv.close();
    r.results["profiles"] = summary;
}

void stability(const ResolvedConfig& c, Outputs& o, CommandOutput& r) {
    const StabilityReport rep = stability_report(c.real("phi"), c.real("d_r"), as_int(c, "n_max"));
    auto csv = o.open("stability.csv", {"n", "growth_rate", "linearized_rate", "threshold_phi"});
    for (std::size_t k = 0; k < rep.modes.size(); ++k) csv.row({static_cast<double>(rep.modes[k]), rep.rates[k], rep.exact[k], rep.threshold[k]});
    csv.close();
    r.results["phi_c"] = rep.phi_c;
    r.results["most_unstable_mode"] = rep.most_unstable;
    r.results["unstable"] = *std::max_element(rep.rates.begin(), rep.rates.end()) > 0.0;
}

// ---------------------------------------------------------------- pde3d

void pde3d(const ResolvedConfig& c, Outputs& o, CommandOutput& r) {
    KineticGrid g;
    g.nx = as_int(c, "nx");
    g.ny = as_int(c, "ny");
    g.ntheta = as_int(c, "ntheta");
    g.lx = c.real("lx");
    g.ly = c.real("ly");
    g.validate();
    const double a = c.real("rho_amplitude"), b = c.real("theta_amplitude");
    const PhaseDensity p0 = make_phase_density(g, [&](double x, double, double t) {
        return (1.0 + a * std::cos(2 * pi * x / g.lx)) * (1.0 + b * std::cos(2 * t));
    });
    KineticParams kp;
    kp.d_t = c.real("d_t");
    kp.d_r = c.real("d_r");
    kp.phi = c.real("phi");
    kp.quadrature = c.text("quadrature") == "spectral" ? CollisionQuadrature::spectral : CollisionQuadrature::trapezoid;
    const Vec2 f{c.real("drift_fx"), c.real("drift_fy")};
    if (f.x != 0.0 || f.y != 0.0) kp.f_t.assign(g.size(), f);
    KineticEvolveOptions opt;
    opt.dt = c.real("dt");
    opt.output_times = c.real_list("output_times");
    const KineticTrajectory traj = evolve(p0, kp, c.real("t_end"), opt);

    auto rho = o.open("rho.csv", {"time", "x", "y", "rho", "nematic_order"});
    auto ang = o.open("angular.csv", {"time", "theta", "density"});
    nlohmann::json masses = nlohmann::json::array();
    for (const auto& s : traj.states) {
        const auto m = s.spatial_marginal();
        const auto order = s.nematic_order();
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j < g.ny; ++j) {
                const std::size_t cell = static_cast<std::size_t>(i) * static_cast<std::size_t>(g.ny) + static_cast<std::size_t>(j);
                rho.row({s.time, g.x(i), g.y(j), m[cell], order[cell]});
            }
        const auto am = s.angular_marginal();
        for (int k = 0; k < g.ntheta; ++k) ang.row({s.time, g.theta(k), am[static_cast<std::size_t>(k)]});
        masses.push_back(s.mass());
    }
    rho.close();
    ang.close();
    r.results["steps"] = traj.steps;
    r.results["mass"] = masses;
}

// ---------------------------------------------------------------- hydro

void hydro(const ResolvedConfig& c, Outputs& o, CommandOutput& r) {
    const int nx = as_int(c, "nx"), ny = as_int(c, "ny");
    const double lx = c.real("lx"), ly = c.real("ly"), amp = c.real("amplitude");
    const SpatialDensity rho0 = make_spatial_density(nx, ny, lx, ly, [&](double x, double y) {
        return 1.0 + amp * std::cos(2 * pi * x / lx) * std::cos(2 * pi * y / ly);
    });
    const int n = as_int(c, "n");
    const double eps = c.real("eps");
    const double phi = (n - 1) * eps * eps;
    std::vector<Vec2> f;
    const Vec2 fc{c.real("drift_fx"), c.real("drift_fy")};
    if (fc.x != 0.0 || fc.y != 0.0) f.assign(rho0.size(), fc);
    const double d_t = c.real("d_t");
    const HydroParams needle{d_t, needle_coefficient(phi), f};
    const HydroParams disk_eff{d_t, disk_coefficient(n, effective_diameter(eps)), f};
    const HydroParams disk_same{d_t, disk_coefficient(n, eps), f};
    HydroEvolveOptions opt;
    opt.dt = c.real("dt");
    opt.output_times = c.real_list("output_times");
    if (opt.dt <= 0.0) {
        // one step size for all three runs, limited by the stiffest
        const double h = std::min(rho0.dx(), rho0.dy());
        const double rmax = *std::max_element(rho0.values.begin(), rho0.values.end());
        opt.dt = h * h / (2.0 * d_t * (1.0 + disk_same.c * rmax));
    }
    const double t_end = c.real("t_end");
    const auto a = evolve(rho0, needle, t_end, opt);
    const auto b = evolve(rho0, disk_eff, t_end, opt);
    const auto d = evolve(rho0, disk_same, t_end, opt);

    auto csv = o.open("hydro.csv", {"time", "x", "y", "rho_needle", "rho_disk_effective", "rho_disk_same_diameter"});
    double diff_eff = 0.0, diff_same = 0.0;
    for (std::size_t k = 0; k < a.states.size(); ++k) {
        const auto& sa = a.states[k];
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < ny; ++j) {
                const std::size_t s = sa.index(i, j);
                csv.row({sa.time, sa.x(i), sa.y(j), sa.values[s], b.states[k].values[s], d.states[k].values[s]});
                diff_eff = std::max(diff_eff, std::abs(sa.values[s] - b.states[k].values[s]));
                diff_same = std::max(diff_same, std::abs(sa.values[s] - d.states[k].values[s]));
            }
    }
    csv.close();
    r.results["phi"] = phi;
    r.results["effective_diameter"] = effective_diameter(eps);
    r.results["coefficient_needle"] = needle.c;
    r.results["coefficient_disk_effective"] = disk_eff.c;
    r.results["coefficient_disk_same_diameter"] = disk_same.c;
    r.results["max_abs_diff_disk_effective"] = diff_eff;
    r.results["max_abs_diff_disk_same_diameter"] = diff_same;
    r.results["steps"] = a.steps;
}

}  // namespace

CommandOutput execute(const std::string& sub, const ResolvedConfig& config, const RunContext& ctx) {
    std::error_code ec;
    std::filesystem::create_directories(ctx.out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + ctx.out_dir + ": " + ec.message());
    CommandOutput out;
    Outputs o(ctx, out);
    if (sub == "tmatrix") {
        tmatrix(config, o, out);
    } else if (sub == "simulate") {
        simulate(config, o, out, ctx.threads);
    } else if (sub == "mkv-evolve") {
        mkv_evolve(config, o, out);
    } else if (sub == "mkv-stationary") {
        mkv_stationary(config, o, out);
    } else if (sub == "stability") {
        stability(config, o, out);
    } else if (sub == "pde3d") {
        pde3d(config, o, out);
    } else if (sub == "hydro") {
        hydro(config, o, out);
    } else {
        throw ValidationError("unknown subcommand '" + sub + "'");
    }
    return out;
}

}  // namespace needles::cli
