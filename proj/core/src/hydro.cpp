#include "needles/hydro.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "needles/error.hpp"
#include "needles/spectral.hpp"

namespace needles {

namespace {

constexpr double pi = std::numbers::pi;
constexpr complex I{0.0, 1.0};

void validate_params(const HydroParams& p, const SpatialDensity& rho) {
    detail::require(std::isfinite(p.d_t) && p.d_t > 0.0, "D_T must be positive");
    detail::require(std::isfinite(p.c) && p.c >= 0.0, "density coefficient must be finite and non-negative");
    detail::require(p.f.empty() || p.f.size() == rho.size(), "drift table does not match the grid");
}

class HydroOperator {
public:
    HydroOperator(const SpatialDensity& grid, const HydroParams& params) : p_(params), fft_({grid.nx, grid.ny}), n_(grid.size()) {
        const std::size_t modes = static_cast<std::size_t>(grid.ny / 2 + 1);
        kx_.resize(fft_.spectral_size());
        ky_.resize(kx_.size());
        lin_.resize(kx_.size());
        for (int i = 0; i < grid.nx; ++i) {
            const double kx = 2.0 * pi * wavenumber(i, grid.nx) / grid.lx;
            const bool nyq_x = grid.nx % 2 == 0 && i == grid.nx / 2;
            for (std::size_t j = 0; j < modes; ++j) {
                const int jj = static_cast<int>(j);
                const double ky = 2.0 * pi * wavenumber(jj, grid.ny) / grid.ly;
                const bool nyq_y = grid.ny % 2 == 0 && jj == grid.ny / 2;
                const std::size_t s = static_cast<std::size_t>(i) * modes + j;
                kx_[s] = nyq_x ? 0.0 : kx;
                ky_[s] = nyq_y ? 0.0 : ky;
                lin_[s] = -p_.d_t * (kx * kx + ky * ky);
            }
        }
    }

    RealFft& fft() { return fft_; }
    const std::vector<double>& linear() const { return lin_; }

    /// div(D_T c rho grad rho - f rho) in spectral form.
    void nonlinear(const std::vector<complex>& u, std::vector<complex>& out) {
        std::vector<double> rho(n_), gx(n_), gy(n_);
        fft_.inverse(u, rho);
        std::vector<complex> tmp(u.size());
        for (std::size_t s = 0; s < u.size(); ++s) tmp[s] = I * kx_[s] * u[s];
        fft_.inverse(tmp, gx);
        for (std::size_t s = 0; s < u.size(); ++s) tmp[s] = I * ky_[s] * u[s];
        fft_.inverse(tmp, gy);
        for (std::size_t s = 0; s < n_; ++s) {
            const double a = p_.d_t * p_.c * rho[s];
            const Vec2 f = p_.f.empty() ? Vec2{} : p_.f[s];
            gx[s] = a * gx[s] - f.x * rho[s];
            gy[s] = a * gy[s] - f.y * rho[s];
        }
        out.assign(u.size(), 0.0);
        fft_.forward(gx, tmp);
        for (std::size_t s = 0; s < u.size(); ++s) out[s] += I * kx_[s] * tmp[s];
        fft_.forward(gy, tmp);
        for (std::size_t s = 0; s < u.size(); ++s) out[s] += I * ky_[s] * tmp[s];
        out[0] = 0.0;
    }

    std::vector<complex> spectrum(const std::vector<double>& v) {
        std::vector<complex> u(fft_.spectral_size());
        fft_.forward(v, u);
        return u;
    }

private:
    HydroParams p_;
    RealFft fft_;
    std::size_t n_;
    std::vector<double> kx_, ky_, lin_;
};

}  // namespace

double SpatialDensity::mass() const {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum * dx() * dy();
}

void SpatialDensity::validate() const {
    detail::require(nx >= 4 && ny >= 4, "grid: every dimension needs at least 4 points");
    detail::require(std::isfinite(lx) && std::isfinite(ly) && lx > 0.0 && ly > 0.0, "grid: box lengths must be positive");
    detail::require(values.size() == size(), "density does not match its grid");
}

SpatialDensity make_spatial_density(int nx, int ny, double lx, double ly, const std::function<double(double, double)>& f) {
    SpatialDensity rho;
    rho.nx = nx;
    rho.ny = ny;
    rho.lx = lx;
    rho.ly = ly;
    rho.values.resize(rho.size());
    rho.validate();
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) rho.values[rho.index(i, j)] = f(rho.x(i), rho.y(j));
    const double m = rho.mass();
    detail::require(std::isfinite(m) && m > 0.0, "make_spatial_density: density must have positive mass");
    for (double& v : rho.values) v /= m;
    return rho;
}

double needle_coefficient(double phi) {
    detail::require(std::isfinite(phi) && phi >= 0.0, "phi must be finite and non-negative");
    return 2.0 / pi * phi;
}

double disk_coefficient(int n, double eps_d) {
    detail::require(n >= 1, "N must be >= 1");
    detail::require(std::isfinite(eps_d) && eps_d >= 0.0, "eps_d must be finite and non-negative");
    return pi * (n - 1) * eps_d * eps_d;
}

double effective_diameter(double eps) {
    detail::require(std::isfinite(eps) && eps >= 0.0, "eps must be finite and non-negative");
    return std::numbers::sqrt2 / pi * eps;
}

std::vector<double> hydro_rhs(const SpatialDensity& rho, const HydroParams& params) {
    rho.validate();
    validate_params(params, rho);
    HydroOperator op(rho, params);
    const std::vector<complex> u = op.spectrum(rho.values);
    std::vector<complex> out;
    op.nonlinear(u, out);
    for (std::size_t s = 0; s < out.size(); ++s) out[s] += op.linear()[s] * u[s];
    std::vector<double> r(rho.size());
    op.fft().inverse(out, r);
    return r;
}

std::vector<double> needle_hydro_rhs(const SpatialDensity& rho, const std::vector<Vec2>& f_t, double phi, double d_t) {
    return hydro_rhs(rho, HydroParams{d_t, needle_coefficient(phi), f_t});
}

std::vector<double> disk_rhs(const SpatialDensity& rho, const std::vector<Vec2>& f, int n, double eps_d, double d_t) {
    return hydro_rhs(rho, HydroParams{d_t, disk_coefficient(n, eps_d), f});
}

HydroTrajectory evolve(const SpatialDensity& rho0, const HydroParams& params, double t_end, const HydroEvolveOptions& o) {
    rho0.validate();
    validate_params(params, rho0);
    detail::require(std::isfinite(t_end) && t_end >= 0.0, "evolve: t_end must be non-negative");
    const double h = std::min(rho0.dx(), rho0.dy());
    const double rho_max = *std::max_element(rho0.values.begin(), rho0.values.end());
    const double dt = o.dt > 0.0 ? o.dt : h * h / (2.0 * params.d_t * (1.0 + params.c * std::max(rho_max, 0.0)));

    std::vector<double> outputs;
    for (double t : o.output_times) {
        detail::require(t >= 0.0 && t <= t_end, "evolve: output time outside [0, t_end]");
        if (t > 0.0 && t < t_end) outputs.push_back(t);
    }
    std::sort(outputs.begin(), outputs.end());
    outputs.erase(std::unique(outputs.begin(), outputs.end()), outputs.end());
    outputs.push_back(t_end);

    HydroOperator op(rho0, params);
    std::vector<complex> u = op.spectrum(rho0.values);
    const complex mass_mode = u[0];
    auto nonlinear = [&](const std::vector<complex>& in, std::vector<complex>& out) { op.nonlinear(in, out); };

    HydroTrajectory traj;
    traj.states.push_back(rho0);
    double t = 0.0;
    for (double target : outputs) {
        while (t < target) {
            double step = std::min(dt, target - t);
            if (target - (t + step) < 1e-12 * std::max(1.0, target)) step = target - t;
            ifrk4_step(u, op.linear(), step, nonlinear);
            u[0] = mass_mode;
            t = (step == target - t) ? target : t + step;
            ++traj.steps;
        }
        SpatialDensity snap = rho0;
        snap.time = rho0.time + target;
        op.fft().inverse(u, snap.values);
        const auto [lo, hi] = std::minmax_element(snap.values.begin(), snap.values.end());
        if (!std::isfinite(*lo) || !std::isfinite(*hi) || *lo < -o.negativity_tol * std::abs(*hi)) {
            std::ostringstream msg;
            msg << "hydro evolve: density left the admissible range at t=" << snap.time << " (min " << *lo << ", max " << *hi << ")";
            throw NumericalError(msg.str());
        }
        traj.states.push_back(std::move(snap));
    }
    return traj;
}

}  // namespace needles
