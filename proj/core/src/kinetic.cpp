#include "needles/kinetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "needles/error.hpp"
#include "needles/quadrature.hpp"
#include "needles/spectral.hpp"

namespace needles {

namespace {

constexpr double pi = std::numbers::pi;
constexpr complex I{0.0, 1.0};

void validate_params(const KineticParams& params, const KineticGrid& grid) {
    detail::require(std::isfinite(params.d_t) && params.d_t > 0.0, "D_T must be positive");
    detail::require(std::isfinite(params.d_r) && params.d_r > 0.0, "D_R must be positive");
    detail::require(std::isfinite(params.phi) && params.phi >= 0.0, "phi must be finite and non-negative");
    detail::require(params.f_t.empty() || params.f_t.size() == grid.size(), "f_T table does not match the grid");
    detail::require(params.f_r.empty() || params.f_r.size() == grid.size(), "f_R table does not match the grid");
}

/// Fourier moments of the theta-kernels: kappa_K(n) = integral_0^pi K(theta) exp(2 i n theta).
struct KernelMoments {
    std::vector<complex> sin, t11, t12, t22;
};

KernelMoments kernel_moments(int ntheta, const TTable& table) {
    const std::size_t modes = static_cast<std::size_t>(ntheta / 2 + 1);
    KernelMoments km;
    km.sin.resize(modes);
    km.t11.resize(modes);
    km.t12.resize(modes);
    km.t22.resize(modes);
    const QuadratureRule rule = gauss_legendre(static_cast<std::size_t>(std::max(64, 4 * ntheta) + 64), 0.0, pi);
    std::vector<TMatrix> t(rule.nodes.size());
    for (std::size_t q = 0; q < t.size(); ++q) t[q] = table(rule.nodes[q]);
    for (std::size_t n = 0; n < modes; ++n) {
        const double nn = static_cast<double>(n);
        km.sin[n] = 2.0 / (1.0 - 4.0 * nn * nn);
        complex a11 = 0.0, a12 = 0.0, a22 = 0.0;
        for (std::size_t q = 0; q < t.size(); ++q) {
            const complex e = rule.weights[q] * std::polar(1.0, 2.0 * nn * rule.nodes[q]);
            a11 += t[q].t11 * e;
            a12 += t[q].t12 * e;
            a22 += t[q].t22 * e;
        }
        // T11, T22 are even about pi/2 and T12 is odd: keep the exact parity
        km.t11[n] = a11.real();
        km.t12[n] = complex(0.0, a12.imag());
        km.t22[n] = a22.real();
    }
    // the Nyquist mode has no odd partner
    km.t12[modes - 1] = 0.0;
    return km;
}

/// Spectral machinery for one grid: 3-D transforms for the state and
/// batched theta transforms for the angular correlations.
class KineticOperator {
public:
    KineticOperator(const KineticGrid& grid, const KineticParams& params)
        : g_(grid),
          p_(params),
          fft3_({grid.nx, grid.ny, grid.ntheta}),
          fft_theta_({grid.ntheta}, grid.nx * grid.ny),
          modes_(static_cast<std::size_t>(grid.ntheta / 2 + 1)) {
        if (!p_.table) p_.table = default_t_table();
        const std::size_t spec = fft3_.spectral_size();
        kx_.resize(spec);
        ky_.resize(spec);
        kt_.resize(spec);
        lin_.resize(spec);
        for (int i = 0; i < g_.nx; ++i) {
            const bool nyq_x = (g_.nx % 2 == 0 && i == g_.nx / 2);
            const double kx = 2.0 * pi * wavenumber(i, g_.nx) / g_.lx;
            for (int j = 0; j < g_.ny; ++j) {
                const bool nyq_y = (g_.ny % 2 == 0 && j == g_.ny / 2);
                const double ky = 2.0 * pi * wavenumber(j, g_.ny) / g_.ly;
                for (std::size_t n = 0; n < modes_; ++n) {
                    const std::size_t s = (static_cast<std::size_t>(i) * static_cast<std::size_t>(g_.ny) + static_cast<std::size_t>(j)) * modes_ + n;
                    const double kt = 2.0 * static_cast<double>(n);
                    kx_[s] = nyq_x ? 0.0 : kx;
                    ky_[s] = nyq_y ? 0.0 : ky;
                    kt_[s] = (n + 1 == modes_) ? 0.0 : kt;
                    lin_[s] = -p_.d_t * (kx * kx + ky * ky) - p_.d_r * kt * kt;
                }
            }
        }
        cos1_.resize(static_cast<std::size_t>(g_.ntheta));
        sin1_.resize(static_cast<std::size_t>(g_.ntheta));
        for (int k = 0; k < g_.ntheta; ++k) {
            cos1_[static_cast<std::size_t>(k)] = std::cos(g_.theta(k));
            sin1_[static_cast<std::size_t>(k)] = std::sin(g_.theta(k));
        }
        for (auto& w : work_) w.resize(g_.size());
        for (auto& h : hats_) h.resize(fft_theta_.spectral_size());
        spec3_.resize(spec);
        spec_theta_.resize(fft_theta_.spectral_size());
        if (p_.phi > 0.0) {
            if (p_.quadrature == CollisionQuadrature::spectral) {
                moments_ = kernel_moments(g_.ntheta, *p_.table);
            } else {
                slices_ = build_kernel_slices(g_.ntheta, *p_.table);
            }
        }
    }

    const std::vector<double>& linear() const { return lin_; }
    RealFft& fft3() { return fft3_; }

    struct Fields {
        std::vector<double> p, px, py, pt;
    };

    const Fields& fields(const std::vector<complex>& u) {
        inverse(u, nullptr, fields_.p);
        inverse(u, &kx_, fields_.px);
        inverse(u, &ky_, fields_.py);
        inverse(u, &kt_, fields_.pt);
        return fields_;
    }

    const CollisionFlux& collision(const Fields& f) {
        flux_.spatial.assign(g_.size(), Vec2{});
        flux_.angular.assign(g_.size(), 0.0);
        if (p_.phi == 0.0) return flux_;
        if (p_.quadrature == CollisionQuadrature::spectral) {
            spectral_collision(f, flux_);
        } else {
            trapezoid_collision(f, flux_);
        }
        return flux_;
    }

    /// Explicit part of the right-hand side in spectral form.
    void nonlinear(const std::vector<complex>& u, std::vector<complex>& out) {
        const Fields& f = fields(u);
        const CollisionFlux& c = collision(f);
        const std::size_t n = g_.size();
        auto& jx = work_[0];
        auto& jy = work_[1];
        auto& jt = work_[2];
        for (std::size_t s = 0; s < n; ++s) {
            const Vec2 ft = p_.f_t.empty() ? Vec2{} : p_.f_t[s];
            const double fr = p_.f_r.empty() ? 0.0 : p_.f_r[s];
            jx[s] = p_.d_t * c.spatial[s].x - ft.x * f.p[s];
            jy[s] = p_.d_t * c.spatial[s].y - ft.y * f.p[s];
            jt[s] = p_.d_r * c.angular[s] - fr * f.p[s];
        }
        out.assign(fft3_.spectral_size(), 0.0);
        const std::vector<double>* k[3] = {&kx_, &ky_, &kt_};
        for (int d = 0; d < 3; ++d) {
            fft3_.forward(work_[static_cast<std::size_t>(d)], spec3_);
            for (std::size_t s = 0; s < spec3_.size(); ++s) out[s] += I * (*k[d])[s] * spec3_[s];
        }
        out[0] = 0.0;
    }

private:
    void inverse(const std::vector<complex>& u, const std::vector<double>* mult, std::vector<double>& out) {
        out.resize(g_.size());
        if (!mult) {
            fft3_.inverse(u, out);
            return;
        }
        for (std::size_t s = 0; s < u.size(); ++s) spec3_[s] = I * (*mult)[s] * u[s];
        fft3_.inverse(spec3_, out);
    }

    /// integral_0^pi K(theta) G(theta1 + theta) d theta for every theta1.
    void correlate(const std::vector<complex>& g_hat, const std::vector<complex>& kappa, std::vector<double>& out) {
        for (std::size_t s = 0; s < g_hat.size(); ++s) {
            const std::size_t n = s % modes_;
            spec_theta_[s] = g_hat[s] * (n + 1 == modes_ ? complex(kappa[n].real()) : kappa[n]);
        }
        out.resize(g_.size());
        fft_theta_.inverse(spec_theta_, out);
    }

    void spectral_collision(const Fields& f, CollisionFlux& out) {
        const std::size_t n = g_.size();
        auto& hx = work_[3];
        auto& hy = work_[4];
        auto& kx = work_[5];
        auto& ky = work_[6];
        const double drift = 1.0 / p_.d_t;
        for (std::size_t s = 0; s < n; ++s) {
            const Vec2 ft = p_.f_t.empty() ? Vec2{} : p_.f_t[s];
            hx[s] = f.px[s] - ft.x * f.p[s] * drift;
            hy[s] = f.py[s] - ft.y * f.p[s] * drift;
            kx[s] = f.px[s] + ft.x * f.p[s] * drift;
            ky[s] = f.py[s] + ft.y * f.p[s] * drift;
        }
        const std::vector<double>* src[6] = {&f.p, &f.pt, &hx, &hy, &kx, &ky};
        for (std::size_t q = 0; q < 6; ++q) fft_theta_.forward(*src[q], hats_[q]);
        const auto& p_hat = hats_[0];
        const auto& pt_hat = hats_[1];
        const auto& hx_hat = hats_[2];
        const auto& hy_hat = hats_[3];

        const auto& m = moments_;
        auto& s_kx = corr_[0];
        auto& s_ky = corr_[1];
        auto& s_p = corr_[2];
        auto& s_pt = corr_[3];
        correlate(hats_[4], m.sin, s_kx);
        correlate(hats_[5], m.sin, s_ky);
        correlate(p_hat, m.sin, s_p);
        correlate(pt_hat, m.sin, s_pt);
        const std::vector<complex>* kernels[3] = {&m.t11, &m.t12, &m.t22};
        std::vector<double>* t_p[3] = {&corr_[4], &corr_[5], &corr_[6]};
        std::vector<double>* t_hx[3] = {&corr_[7], &corr_[8], &corr_[9]};
        std::vector<double>* t_hy[3] = {&corr_[10], &corr_[11], &corr_[12]};
        for (int q = 0; q < 3; ++q) {
            correlate(p_hat, *kernels[q], *t_p[q]);
            correlate(hx_hat, *kernels[q], *t_hx[q]);
            correlate(hy_hat, *kernels[q], *t_hy[q]);
        }

        const std::size_t nt = static_cast<std::size_t>(g_.ntheta);
        for (std::size_t s = 0; s < n; ++s) {
            const double p = f.p[s];
            const double c = cos1_[s % nt];
            const double sn = sin1_[s % nt];
            const Vec2 sin_a{0.5 * (p * s_kx[s] + hx[s] * s_p[s]), 0.5 * (p * s_ky[s] + hy[s] * s_p[s])};
            // v[q][c] = integral of T_q B_c
            double v[3][2];
            for (int q = 0; q < 3; ++q) {
                v[q][0] = 0.5 * (p * (*t_hx[q])[s] - hx[s] * (*t_p[q])[s]);
                v[q][1] = 0.5 * (p * (*t_hy[q])[s] - hy[s] * (*t_p[q])[s]);
            }
            // Y = integral of T R^T B, then M B = R Y
            const double y1 = (c * v[0][0] + sn * v[0][1]) + (-sn * v[1][0] + c * v[1][1]);
            const double y2 = (c * v[1][0] + sn * v[1][1]) + (-sn * v[2][0] + c * v[2][1]);
            const Vec2 mb{c * y1 - sn * y2, sn * y1 + c * y2};
            out.spatial[s] = p_.phi * (sin_a + mb);
            out.angular[s] = p_.phi * p * s_pt[s];
        }
    }

    void trapezoid_collision(const Fields& f, CollisionFlux& out) {
        const int nt = g_.ntheta;
        const double h = g_.dtheta();
        std::vector<PointState> column(static_cast<std::size_t>(nt));
        for (int i = 0; i < g_.nx; ++i) {
            for (int j = 0; j < g_.ny; ++j) {
                const std::size_t base = g_.index(i, j, 0);
                for (int k = 0; k < nt; ++k) {
                    const std::size_t s = base + static_cast<std::size_t>(k);
                    column[static_cast<std::size_t>(k)] = {f.p[s], {f.px[s], f.py[s]}, p_.f_t.empty() ? Vec2{} : p_.f_t[s]};
                }
                for (int k1 = 0; k1 < nt; ++k1) {
                    const PointState& at = column[static_cast<std::size_t>(k1)];
                    Vec2 qt;
                    double qr = 0.0;
                    // both endpoint contributions vanish
                    for (int jj = 1; jj < nt; ++jj) {
                        const std::size_t k2 = static_cast<std::size_t>((k1 + jj) % nt);
                        const KernelAB ab = kernel_ab(at, column[k2], p_.d_t);
                        const Mat2& m = slices_.m[static_cast<std::size_t>(k1 * nt + jj)];
                        const double w = slices_.sin_weight[static_cast<std::size_t>(jj)];
                        qt = qt + Vec2{w * ab.a.x + m.xx * ab.b.x + m.xy * ab.b.y, w * ab.a.y + m.yx * ab.b.x + m.yy * ab.b.y};
                        qr += w * at.p * f.pt[base + k2];
                    }
                    const std::size_t s = base + static_cast<std::size_t>(k1);
                    out.spatial[s] = (p_.phi * h) * qt;
                    out.angular[s] = p_.phi * h * qr;
                }
            }
        }
    }

    KineticGrid g_;
    KineticParams p_;
    RealFft fft3_;
    RealFft fft_theta_;
    std::size_t modes_;
    std::vector<double> kx_, ky_, kt_, lin_;
    std::vector<double> cos1_, sin1_;
    KernelMoments moments_;
    KernelSlices slices_;
    // scratch reused across evaluations
    Fields fields_;
    CollisionFlux flux_;
    std::array<std::vector<double>, 7> work_;
    std::array<std::vector<double>, 13> corr_;
    std::array<std::vector<complex>, 6> hats_;
    std::vector<complex> spec3_, spec_theta_;
};

std::vector<complex> to_spectrum(KineticOperator& op, const std::vector<double>& values) {
    std::vector<complex> u(op.fft3().spectral_size());
    op.fft3().forward(values, u);
    return u;
}

}  // namespace

double KineticGrid::dtheta() const { return pi / ntheta; }

void KineticGrid::validate() const {
    detail::require(nx >= 4 && ny >= 4 && ntheta >= 4, "grid: every dimension needs at least 4 points");
    detail::require(ntheta % 2 == 0, "grid: ntheta must be even");
    detail::require(std::isfinite(lx) && std::isfinite(ly) && lx > 0.0 && ly > 0.0, "grid: box lengths must be positive");
}

double PhaseDensity::mass() const {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum * grid.cell_volume();
}

std::vector<double> PhaseDensity::spatial_marginal() const {
    const std::size_t nt = static_cast<std::size_t>(grid.ntheta);
    std::vector<double> rho(values.size() / nt, 0.0);
    for (std::size_t s = 0; s < values.size(); ++s) rho[s / nt] += values[s] * grid.dtheta();
    return rho;
}

std::vector<double> PhaseDensity::angular_marginal() const {
    const std::size_t nt = static_cast<std::size_t>(grid.ntheta);
    std::vector<double> out(nt, 0.0);
    for (std::size_t s = 0; s < values.size(); ++s) out[s % nt] += values[s] * grid.dx() * grid.dy();
    return out;
}

std::vector<double> PhaseDensity::nematic_order() const {
    const std::size_t nt = static_cast<std::size_t>(grid.ntheta);
    std::vector<double> out(values.size() / nt, 0.0);
    for (std::size_t c = 0; c < out.size(); ++c) {
        complex z = 0.0;
        double mass = 0.0;
        for (std::size_t k = 0; k < nt; ++k) {
            const double v = values[c * nt + k];
            z += v * std::polar(1.0, 2.0 * grid.theta(static_cast<int>(k)));
            mass += v;
        }
        out[c] = mass > 0.0 ? std::abs(z) / mass : 0.0;
    }
    return out;
}

PhaseDensity make_phase_density(const KineticGrid& grid, const std::function<double(double, double, double)>& f) {
    grid.validate();
    PhaseDensity p;
    p.grid = grid;
    p.values.resize(grid.size());
    for (int i = 0; i < grid.nx; ++i) {
        for (int j = 0; j < grid.ny; ++j) {
            for (int k = 0; k < grid.ntheta; ++k) p.values[grid.index(i, j, k)] = f(grid.x(i), grid.y(j), grid.theta(k));
        }
    }
    const double m = p.mass();
    detail::require(std::isfinite(m) && m > 0.0, "make_phase_density: density must have positive mass");
    for (double& v : p.values) v /= m;
    return p;
}

KernelSlices build_kernel_slices(int ntheta, const TTable& table) {
    detail::require(ntheta >= 2, "build_kernel_slices: ntheta must be >= 2");
    KernelSlices ks;
    ks.ntheta = ntheta;
    ks.sin_weight.resize(static_cast<std::size_t>(ntheta));
    ks.m.resize(static_cast<std::size_t>(ntheta) * static_cast<std::size_t>(ntheta));
    std::vector<Mat2> t(static_cast<std::size_t>(ntheta));
    for (int j = 0; j < ntheta; ++j) {
        const double theta = pi * j / ntheta;
        ks.sin_weight[static_cast<std::size_t>(j)] = std::sin(theta);
        t[static_cast<std::size_t>(j)] = table(theta).as_matrix();
    }
    for (int k = 0; k < ntheta; ++k) {
        const Mat2 r = rotation_matrix(pi * k / ntheta);
        for (int j = 0; j < ntheta; ++j) {
            Mat2 m = r * t[static_cast<std::size_t>(j)] * transpose(r);
            m.xy = m.yx = 0.5 * (m.xy + m.yx);
            ks.m[static_cast<std::size_t>(k * ntheta + j)] = m;
        }
    }
    return ks;
}

KernelAB kernel_ab(const PointState& at, const PointState& plus, double d_t) {
    const double pp = at.p * plus.p / d_t;
    const Vec2 grad_pp = at.p * plus.grad + plus.p * at.grad;
    KernelAB r;
    r.a = 0.5 * (grad_pp + pp * (plus.f - at.f));
    r.b = 0.5 * (at.p * plus.grad - plus.p * at.grad + pp * (at.f - plus.f));
    return r;
}

CollisionFlux collision_flux(const PhaseDensity& p, const KineticParams& params) {
    p.grid.validate();
    validate_params(params, p.grid);
    detail::require(p.values.size() == p.grid.size(), "collision_flux: density does not match its grid");
    KineticOperator op(p.grid, params);
    return op.collision(op.fields(to_spectrum(op, p.values)));
}

std::vector<double> rhs(const PhaseDensity& p, const KineticParams& params) {
    p.grid.validate();
    validate_params(params, p.grid);
    detail::require(p.values.size() == p.grid.size(), "rhs: density does not match its grid");
    KineticOperator op(p.grid, params);
    const std::vector<complex> u = to_spectrum(op, p.values);
    std::vector<complex> out;
    op.nonlinear(u, out);
    for (std::size_t s = 0; s < out.size(); ++s) out[s] += op.linear()[s] * u[s];
    std::vector<double> r(p.grid.size());
    op.fft3().inverse(out, r);
    return r;
}

KineticTrajectory evolve(const PhaseDensity& p0, const KineticParams& params, double t_end, const KineticEvolveOptions& o) {
    p0.grid.validate();
    validate_params(params, p0.grid);
    detail::require(p0.values.size() == p0.grid.size(), "evolve: density does not match its grid");
    detail::require(std::isfinite(t_end) && t_end >= 0.0, "evolve: t_end must be non-negative");
    const double h = std::min(p0.grid.dx(), p0.grid.dy());
    const double dt = o.dt > 0.0 ? o.dt : 0.5 * std::min(h * h / (4.0 * params.d_t), 0.1 / params.d_r);

    std::vector<double> outputs;
    for (double t : o.output_times) {
        detail::require(t >= 0.0 && t <= t_end, "evolve: output time outside [0, t_end]");
        if (t > 0.0 && t < t_end) outputs.push_back(t);
    }
    std::sort(outputs.begin(), outputs.end());
    outputs.erase(std::unique(outputs.begin(), outputs.end()), outputs.end());
    outputs.push_back(t_end);

    KineticOperator op(p0.grid, params);
    std::vector<complex> u = to_spectrum(op, p0.values);
    const complex mass_mode = u[0];
    auto nonlinear = [&](const std::vector<complex>& in, std::vector<complex>& out) { op.nonlinear(in, out); };

    KineticTrajectory traj;
    traj.states.push_back(p0);
    double t = p0.time;
    for (double target_rel : outputs) {
        const double target = p0.time + target_rel;
        while (t < target) {
            double step = std::min(dt, target - t);
            if (target - (t + step) < 1e-12 * std::max(1.0, target)) step = target - t;
            ifrk4_step(u, op.linear(), step, nonlinear);
            u[0] = mass_mode;
            t = (step == target - t) ? target : t + step;
            ++traj.steps;
        }
        PhaseDensity snap;
        snap.grid = p0.grid;
        snap.time = target;
        snap.values.resize(p0.grid.size());
        op.fft3().inverse(u, snap.values);
        const auto [lo, hi] = std::minmax_element(snap.values.begin(), snap.values.end());
        if (!std::isfinite(*lo) || !std::isfinite(*hi) || *lo < -o.negativity_tol * std::abs(*hi)) {
            std::ostringstream msg;
            msg << "kinetic evolve: density left the admissible range at t=" << target << " (min " << *lo << ", max "
                << *hi << ")";
            throw NumericalError(msg.str());
        }
        traj.states.push_back(std::move(snap));
    }
    return traj;
}

std::shared_ptr<const TTable> default_t_table() {
    static const std::shared_ptr<const TTable> table = std::make_shared<const TTable>(65);
    return table;
}

}  // namespace needles
