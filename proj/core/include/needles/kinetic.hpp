#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "needles/conformal.hpp"
#include "needles/geometry.hpp"

namespace needles {

/// Uniform periodic grid over [0, Lx) x [0, Ly) x [0, pi). Storage is
/// row-major with theta fastest: index (i * ny + j) * ntheta + k.
struct KineticGrid {
    int nx = 32;
    int ny = 32;
    int ntheta = 32;
    double lx = 3.141592653589793;
    double ly = 3.141592653589793;

    std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) * static_cast<std::size_t>(ntheta); }
    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * static_cast<std::size_t>(ny) + static_cast<std::size_t>(j)) * static_cast<std::size_t>(ntheta) +
               static_cast<std::size_t>(k);
    }
    double dx() const { return lx / nx; }
    double dy() const { return ly / ny; }
    double dtheta() const;
    double x(int i) const { return dx() * i; }
    double y(int j) const { return dy() * j; }
    double theta(int k) const { return dtheta() * k; }
    double cell_volume() const { return dx() * dy() * dtheta(); }
    void validate() const;
};

/// Gridded one-particle density p(x, y, theta) with unit total mass.
struct PhaseDensity {
    KineticGrid grid;
    std::vector<double> values;
    double time = 0.0;

    double mass() const;
    /// rho(x) = integral of p over theta, size nx * ny.
    std::vector<double> spatial_marginal() const;
    /// integral of p over space, size ntheta.
    std::vector<double> angular_marginal() const;
    /// |<exp(2 i theta)>| at each spatial node (0 where rho vanishes).
    std::vector<double> nematic_order() const;
};

/// p sampled from a function and normalised to unit mass.
PhaseDensity make_phase_density(const KineticGrid& grid, const std::function<double(double, double, double)>& f);

enum class CollisionQuadrature {
    spectral,   ///< theta-correlations with exact kernel moments (default)
    trapezoid,  ///< trapezoidal rule over the theta grid with index-shifted p+
};

/// Parameters of the kinetic equation. Drift tables are optional (empty =
/// zero) and live on the same grid as the density.
struct KineticParams {
    double d_t = 1.0;
    double d_r = 1.0;
    double phi = 0.0;                  ///< eps^2 (N - 1)
    std::vector<Vec2> f_t;             ///< translational drift per node
    std::vector<double> f_r;           ///< rotational drift per node
    std::shared_ptr<const TTable> table;  ///< null selects a shared default table
    CollisionQuadrature quadrature = CollisionQuadrature::spectral;
};

/// sin(theta_j) and M(theta1_k, theta_j) for every pair of grid angles,
/// index k * ntheta + j.
struct KernelSlices {
    int ntheta = 0;
    std::vector<double> sin_weight;  ///< size ntheta
    std::vector<Mat2> m;             ///< size ntheta^2
};
KernelSlices build_kernel_slices(int ntheta, const TTable& table);

/// State of one side of a pair at a spatial node.
struct PointState {
    double p = 0.0;
    Vec2 grad;  ///< spatial gradient of p
    Vec2 f;     ///< translational drift
};

struct KernelAB {
    Vec2 a;
    Vec2 b;
};

/// A = (grad(p p+) + p p+ (f+ - f) / D_T) / 2,
/// B = (p grad p+ - p+ grad p + p p+ (f - f+) / D_T) / 2.
KernelAB kernel_ab(const PointState& at, const PointState& plus, double d_t);

/// phi times the theta-integrals of Q_T = sin(theta) A + M B (per node, a
/// 2-vector) and Q_R = sin(theta) p d/dtheta p+ (per node).
struct CollisionFlux {
    std::vector<Vec2> spatial;
    std::vector<double> angular;
};
CollisionFlux collision_flux(const PhaseDensity& p, const KineticParams& params);

/// div_x (D_T grad p - f_T p + D_T F_T) + d_theta (D_R p_theta - f_R p + D_R F_R),
/// spectral in every direction. The mean of the result vanishes.
std::vector<double> rhs(const PhaseDensity& p, const KineticParams& params);

struct KineticEvolveOptions {
    double dt = 0.0;                   ///< <= 0 selects min(dx^2 / (4 D_T), 0.1 / D_R) / 2
    std::vector<double> output_times;  ///< snapshots besides t = 0 and t_end
    double negativity_tol = 1e-8;      ///< relative to max p
};

struct KineticTrajectory {
    std::vector<PhaseDensity> states;
    std::size_t steps = 0;
};

/// Integrating-factor RK4: linear diffusion exactly, drift and collision
/// explicitly. Throws NumericalError when p drops below -tol * max p or
/// becomes non-finite.
KineticTrajectory evolve(const PhaseDensity& p0, const KineticParams& params, double t_end,
                         const KineticEvolveOptions& options = {});

/// Default T table shared by kinetic solves (built on first use, thread-safe).
std::shared_ptr<const TTable> default_t_table();

}  // namespace needles
