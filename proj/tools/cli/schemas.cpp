#include "cli/schemas.hpp"

#include <numbers>

#include "needles/csv.hpp"
#include "needles/error.hpp"

namespace needles::cli {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double phi_c = 1.5 * pi;

FieldSpec real(std::string name, double def, std::string help, double min = -1e308, bool exclusive = false) {
    FieldSpec f;
    f.name = std::move(name);
    f.kind = FieldKind::real;
    f.default_value = format_number(def);
    f.help = std::move(help);
    f.min = min;
    f.min_exclusive = exclusive;
    return f;
}

FieldSpec positive(std::string name, double def, std::string help) { return real(std::move(name), def, std::move(help), 0.0, true); }
FieldSpec non_negative(std::string name, double def, std::string help) { return real(std::move(name), def, std::move(help), 0.0); }

FieldSpec integer(std::string name, long def, std::string help, double min, double max = 1e15) {
    FieldSpec f;
    f.name = std::move(name);
    f.kind = FieldKind::integer;
    f.default_value = std::to_string(def);
    f.help = std::move(help);
    f.min = min;
    f.max = max;
    return f;
}

FieldSpec flag(std::string name, bool def, std::string help) {
    FieldSpec f;
    f.name = std::move(name);
    f.kind = FieldKind::flag;
    f.default_value = def ? "true" : "false";
    f.help = std::move(help);
    return f;
}

FieldSpec text(std::string name, std::string def, std::string help, std::vector<std::string> choices = {}) {
    FieldSpec f;
    f.name = std::move(name);
    f.kind = FieldKind::text;
    f.default_value = std::move(def);
    f.help = std::move(help);
    f.choices = std::move(choices);
    return f;
}

FieldSpec times(std::string name, std::string def, std::string help) {
    FieldSpec f;
    f.name = std::move(name);
    f.kind = FieldKind::real_list;
    f.default_value = std::move(def);
    f.help = std::move(help);
    f.min = 0.0;
    return f;
}

FieldSpec seed() {
    FieldSpec f;
    f.name = "seed";
    f.kind = FieldKind::seed;
    f.default_value = "1";
    f.help = "random seed (recorded for every subcommand, used by simulate)";
    return f;
}

void common(ConfigSchema& s) {
    s.add(text("out_dir", "needles-out", "output directory, created if missing"));
    s.add(seed());
}

void box(ConfigSchema& s) {
    s.add(positive("lx", pi, "box length in x"));
    s.add(positive("ly", pi, "box length in y"));
}

}  // namespace

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names = {"tmatrix", "simulate", "mkv-evolve", "mkv-stationary", "stability", "pde3d", "hydro"};
    return names;
}

std::string describe(const std::string& sub) {
    if (sub == "tmatrix") return "excluded-volume matrix T(theta) and SC constant a(theta) (fig2.csv, fig4b.csv)";
    if (sub == "simulate") return "Brownian hard-needle particle simulation";
    if (sub == "mkv-evolve") return "time evolution of the space-homogeneous equation (fig3b.csv)";
    if (sub == "mkv-stationary") return "stationary angular profiles by fixed-point iteration (fig3a.csv with --sweep)";
    if (sub == "stability") return "linear stability of the isotropic state";
    if (sub == "pde3d") return "kinetic equation in (x, y, theta)";
    if (sub == "hydro") return "high rotational diffusion limit and the hard-disk comparison";
    throw ValidationError("unknown subcommand '" + sub + "'");
}

ConfigSchema schema_for(const std::string& sub) {
    ConfigSchema s;
    common(s);
    if (sub == "tmatrix") {
        s.add(integer("points", 200, "number of sample angles (cell midpoints of (0, pi))", 2, 1e6));
        s.add(integer("table_size", 65, "nodes of the interpolation table reported alongside", 16, 4097));
        s.add(flag("oracle", false, "also solve the finite-element Neumann problem at pi/4, pi/2, 3pi/4"));
        s.add(positive("oracle_spacing", 0.02, "lattice spacing of the oracle near the rhombus"));
        s.add(real("oracle_truncation", 40.0, "radius where the oracle imposes u = x", 2.0));
    } else if (sub == "simulate") {
        s.add(integer("n", 200, "number of needles", 1, 1e7));
        s.add(non_negative("phi", 2 * phi_c, "reduced density (N - 1) eps^2 / |box|; fixes eps"));
        box(s);
        s.add(non_negative("d_t", 0.01, "translational diffusivity"));
        s.add(non_negative("d_r", 1.0, "rotational diffusivity"));
        s.add(positive("dt", 1e-3, "time step"));
        s.add(non_negative("t_end", 10.0, "final time"));
        s.add(positive("observe_every", 0.5, "time between observations"));
        s.add(real("drift_fx", 0.0, "constant force, x component"));
        s.add(real("drift_fy", 0.0, "constant force, y component"));
        s.add(real("drift_fr", 0.0, "constant torque"));
        s.add(integer("angular_bins", 18, "bins of the angular histogram on [0, pi)", 1, 1e6));
        s.add(integer("spatial_bins", 8, "bins per side of the spatial histogram", 1, 1e4));
        s.add(integer("realisations", 1, "independent runs with seeds seed, seed + 1, ...", 1, 1e6));
        s.add(text("search", "cells", "neighbour search", {"cells", "all_pairs"}));
    } else if (sub == "mkv-evolve") {
        s.add(non_negative("phi", 1.1 * phi_c, "reduced density"));
        s.add(positive("d_r", 1.0, "rotational diffusivity"));
        s.add(integer("m", 256, "grid points on [0, pi), even", 4, 1 << 20));
        s.add(non_negative("t_end", 20.0, "final time"));
        s.add(times("output_times", "0,4,6,8,10,12,20", "snapshot times"));
        s.add(real("amplitude", -0.01, "p0 = 1/pi + amplitude cos(2 mode theta)"));
        s.add(integer("mode", 1, "mode of the initial perturbation", 1, 1e6));
        s.add(non_negative("dt", 0.0, "time step, 0 selects 0.01 / d_r"));
    } else if (sub == "mkv-stationary") {
        s.add(non_negative("phi", phi_c + 1.0, "reduced density (ignored with sweep)"));
        s.add(integer("m", 256, "grid points on [0, pi), even", 4, 1 << 20));
        s.add(flag("sweep", false, "profiles at phi = 3pi/2 + k step, k = 0 .. sweep_count - 1"));
        s.add(integer("sweep_count", 11, "number of sweep values", 1, 1e4));
        s.add(positive("sweep_step", 0.5, "spacing of sweep values"));
        s.add(real("amplitude", 0.01, "initial guess 1/pi + amplitude cos 2 theta"));
        s.add(positive("tol", 1e-10, "sup-norm update tolerance"));
        s.add(integer("max_iter", 20000, "iteration cap", 1, 1e9));
        FieldSpec damping = real("damping", 0.5, "mixing parameter omega in (0, 1]", 0.0, true);
        damping.max = 1.0;
        s.add(damping);
        s.add(integer("anderson_depth", 5, "Anderson history length, 0 disables", 0, 100));
        s.add(positive("anderson_switch", 1e-3, "update size below which acceleration engages"));
    } else if (sub == "stability") {
        s.add(non_negative("phi", 1.1 * phi_c, "reduced density"));
        s.add(positive("d_r", 1.0, "rotational diffusivity"));
        s.add(integer("n_max", 20, "highest mode reported", 1, 1e6));
    } else if (sub == "pde3d") {
        s.add(integer("nx", 32, "grid points in x", 4, 4096));
        s.add(integer("ny", 32, "grid points in y", 4, 4096));
        s.add(integer("ntheta", 32, "grid points in theta, even", 4, 4096));
        box(s);
        s.add(positive("d_t", 1.0, "translational diffusivity"));
        s.add(positive("d_r", 1.0, "rotational diffusivity"));
        s.add(non_negative("phi", 1.0, "eps^2 (N - 1), p of unit mass"));
        s.add(non_negative("t_end", 1.0, "final time"));
        s.add(times("output_times", "", "extra snapshot times"));
        s.add(real("rho_amplitude", 0.3, "p0 ~ (1 + a cos(2 pi x / lx)) (1 + b cos 2 theta), a"));
        s.add(real("theta_amplitude", 0.3, "same, b"));
        s.add(real("drift_fx", 0.0, "constant force, x component"));
        s.add(real("drift_fy", 0.0, "constant force, y component"));
        s.add(text("quadrature", "spectral", "theta-integration of the collision terms", {"spectral", "trapezoid"}));
        s.add(non_negative("dt", 0.0, "time step, 0 selects min(dx^2 / (4 d_t), 0.1 / d_r) / 2"));
    } else if (sub == "hydro") {
        s.add(integer("nx", 32, "grid points in x", 4, 1 << 14));
        s.add(integer("ny", 32, "grid points in y", 4, 1 << 14));
        box(s);
        s.add(positive("d_t", 1.0, "translational diffusivity"));
        s.add(integer("n", 200, "number of needles", 1, 1e9));
        s.add(non_negative("eps", 0.1, "needle length"));
        s.add(non_negative("t_end", 1.0, "final time"));
        s.add(times("output_times", "", "extra snapshot times"));
        s.add(real("amplitude", 0.3, "rho0 ~ 1 + a cos(2 pi x / lx) cos(2 pi y / ly)"));
        s.add(real("drift_fx", 0.0, "constant force, x component"));
        s.add(real("drift_fy", 0.0, "constant force, y component"));
        s.add(non_negative("dt", 0.0, "time step, 0 selects h^2 / (2 d_t (1 + c max rho0))"));
    } else {
        throw ValidationError("unknown subcommand '" + sub + "'");
    }
    return s;
}

}  // namespace needles::cli
