#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "needles/geometry.hpp"

namespace needles {

/// Density on a periodic Nx x Ny grid over [0, Lx) x [0, Ly), row-major with
/// y fastest. Unit mass by convention.
struct SpatialDensity {
    int nx = 32;
    int ny = 32;
    double lx = 3.141592653589793;
    double ly = 3.141592653589793;
    std::vector<double> values;
    double time = 0.0;

    std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * static_cast<std::size_t>(ny) + static_cast<std::size_t>(j); }
    double dx() const { return lx / nx; }
    double dy() const { return ly / ny; }
    double x(int i) const { return dx() * i; }
    double y(int j) const { return dy() * j; }
    double mass() const;
    void validate() const;
};

/// rho sampled from f on the grid and normalised to unit mass.
SpatialDensity make_spatial_density(int nx, int ny, double lx, double ly, const std::function<double(double, double)>& f);

/// Nonlinear diffusion div(D_T [1 + c rho] grad rho - f rho).
struct HydroParams {
    double d_t = 1.0;
    double c = 0.0;       ///< density coefficient of the effective diffusivity
    std::vector<Vec2> f;  ///< per-node drift, empty = zero
};

/// c = (2 / pi) phi for rapidly rotating needles.
double needle_coefficient(double phi);
/// c = pi (N - 1) eps_d^2 for hard disks of diameter eps_d.
double disk_coefficient(int n, double eps_d);
/// Diameter of the disk with the same coefficient as a rapidly rotating needle of length eps.
double effective_diameter(double eps);

/// Spectral right-hand side, mean exactly zero.
std::vector<double> hydro_rhs(const SpatialDensity& rho, const HydroParams& params);
std::vector<double> needle_hydro_rhs(const SpatialDensity& rho, const std::vector<Vec2>& f_t, double phi, double d_t = 1.0);
std::vector<double> disk_rhs(const SpatialDensity& rho, const std::vector<Vec2>& f, int n, double eps_d, double d_t = 1.0);

struct HydroEvolveOptions {
    double dt = 0.0;                   ///< <= 0 selects h^2 / (2 D_T (1 + c max rho0))
    std::vector<double> output_times;  ///< snapshots besides t = 0 and t_end
    double negativity_tol = 1e-8;      ///< relative to max rho
};

struct HydroTrajectory {
    std::vector<SpatialDensity> states;
    std::size_t steps = 0;
};

/// Integrating-factor RK4 with the linear heat part exact.
HydroTrajectory evolve(const SpatialDensity& rho0, const HydroParams& params, double t_end,
                       const HydroEvolveOptions& options = {});

}  // namespace needles
