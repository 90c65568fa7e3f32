#include "needles/homogeneous.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <sstream>

#include "needles/error.hpp"

namespace needles {

namespace {

constexpr double pi = std::numbers::pi;

/// Transforms for one grid size plus the mode index helpers.
class Spectrum {
public:
    explicit Spectrum(std::size_t m) : m_(m), fft_({static_cast<int>(m)}) {}

    std::size_t modes() const { return m_ / 2 + 1; }
    std::size_t nyquist() const { return m_ / 2; }

    std::vector<complex> coefficients(const std::vector<double>& p) {
        std::vector<complex> c(modes());
        fft_.forward(p, c);
        return c;
    }
    std::vector<double> values(const std::vector<complex>& c) {
        std::vector<double> p(m_);
        fft_.inverse(c, p);
        return p;
    }

private:
    std::size_t m_;
    RealFft fft_;
};

/// Multiplier of W' * on the mode exp(2 i n theta).
complex wprime_multiplier(std::size_t n) {
    const double nn = static_cast<double>(n);
    return {0.0, -4.0 * nn / (4.0 * nn * nn - 1.0)};
}

/// Applies an odd (purely imaginary) multiplier; the Nyquist mode has no
/// odd counterpart and is dropped.
template <class F>
void apply_odd(std::vector<complex>& c, std::size_t nyquist, F&& multiplier) {
    for (std::size_t n = 0; n < c.size(); ++n) c[n] *= (n == 0 || n == nyquist) ? complex{} : multiplier(n);
}

std::vector<double> wprime_field(Spectrum& s, const std::vector<complex>& c) {
    std::vector<complex> w = c;
    apply_odd(w, s.nyquist(), wprime_multiplier);
    return s.values(w);
}

std::vector<double> derivative_field(Spectrum& s, const std::vector<complex>& c) {
    std::vector<complex> d = c;
    apply_odd(d, s.nyquist(), [](std::size_t n) { return complex{0.0, 2.0 * static_cast<double>(n)}; });
    return s.values(d);
}

/// Nonlinear part D_R phi d/dtheta (p w) in spectral form.
void transport(Spectrum& s, const std::vector<complex>& c, double phi, double d_r, std::vector<complex>& out) {
    const std::vector<double> p = s.values(c);
    const std::vector<double> w = wprime_field(s, c);
    std::vector<double> flux(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) flux[j] = p[j] * w[j];
    out = s.coefficients(flux);
    const double scale = d_r * phi;
    apply_odd(out, s.nyquist(), [scale](std::size_t n) { return complex{0.0, 2.0 * scale * static_cast<double>(n)}; });
}

void require_params(double phi, double d_r) {
    detail::require(std::isfinite(phi) && phi >= 0.0, "phi must be finite and non-negative");
    detail::require(std::isfinite(d_r) && d_r > 0.0, "D_R must be positive");
}

}  // namespace

AngularDensity::AngularDensity(std::vector<double> values) : values_(std::move(values)) {
    detail::require(values_.size() >= 4 && values_.size() % 2 == 0, "AngularDensity: grid size must be even and >= 4");
    detail::require(std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); }),
                    "AngularDensity: non-finite value");
}

AngularDensity AngularDensity::uniform(std::size_t m) { return AngularDensity(std::vector<double>(m, 1.0 / pi)); }

AngularDensity AngularDensity::from_function(std::size_t m, const std::function<double(double)>& f) {
    std::vector<double> v(m);
    for (std::size_t j = 0; j < m; ++j) v[j] = f(pi * static_cast<double>(j) / static_cast<double>(m));
    return AngularDensity(std::move(v));
}

double AngularDensity::theta(std::size_t j) const { return pi * static_cast<double>(j) / static_cast<double>(size()); }

double AngularDensity::mass() const {
    double sum = 0.0;
    for (double v : values_) sum += v;
    return sum * pi / static_cast<double>(size());
}

double AngularDensity::max() const { return *std::max_element(values_.begin(), values_.end()); }
double AngularDensity::min() const { return *std::min_element(values_.begin(), values_.end()); }

complex fourier_coefficient(const AngularDensity& p, int n) {
    const auto m = static_cast<int>(p.size());
    detail::require(std::abs(n) <= m / 2, "fourier_coefficient: mode beyond Nyquist");
    Spectrum s(p.size());
    const std::vector<complex> c = s.coefficients(p.values());
    const complex v = c[static_cast<std::size_t>(std::abs(n))] / static_cast<double>(m);
    return n >= 0 ? v : std::conj(v);
}

double mode_amplitude(const AngularDensity& p, int n) { return std::abs(fourier_coefficient(p, n)); }

AngularDensity shifted(const AngularDensity& p, double delta) {
    Spectrum s(p.size());
    std::vector<complex> c = s.coefficients(p.values());
    for (std::size_t n = 0; n < c.size(); ++n) c[n] *= std::polar(1.0, -2.0 * static_cast<double>(n) * delta);
    c[s.nyquist()] = c[s.nyquist()].real();
    return AngularDensity(s.values(c));
}

std::vector<double> convolve_wprime(const AngularDensity& p) {
    Spectrum s(p.size());
    return wprime_field(s, s.coefficients(p.values()));
}

std::vector<double> mkv_rhs(const AngularDensity& p, double phi, double d_r) {
    require_params(phi, d_r);
    Spectrum s(p.size());
    std::vector<complex> c = s.coefficients(p.values());
    std::vector<complex> out;
    transport(s, c, phi, d_r, out);
    for (std::size_t n = 0; n < c.size(); ++n) {
        const double nn = static_cast<double>(n);
        out[n] -= 4.0 * nn * nn * d_r * c[n];
    }
    return s.values(out);
}

double growth_rate(int n, double phi, double d_r) {
    detail::require(n >= 1, "growth_rate: n must be >= 1");
    const double nn = n;
    return -4.0 * nn * nn * d_r * (1.0 - 2.0 * phi * nn / ((4.0 * nn * nn - 1.0) * pi));
}

double linearized_growth_rate(int n, double phi, double d_r) {
    detail::require(n >= 1, "linearized_growth_rate: n must be >= 1");
    const double nn = n;
    return -4.0 * nn * nn * d_r * (1.0 - 2.0 * phi / ((4.0 * nn * nn - 1.0) * pi));
}

CriticalPhi critical_phi(int n_max) {
    detail::require(n_max >= 1, "critical_phi: n_max must be >= 1");
    CriticalPhi best{INFINITY, 0};
    for (int n = 1; n <= n_max; ++n) {
        const double nn = n;
        const double threshold = (4.0 * nn * nn - 1.0) * pi / (2.0 * nn);
        if (threshold < best.phi) best = {threshold, n};
    }
    return best;
}

StabilityReport stability_report(double phi, double d_r, int n_max) {
    require_params(phi, d_r);
    detail::require(n_max >= 1, "stability_report: n_max must be >= 1");
    StabilityReport r;
    for (int n = 1; n <= n_max; ++n) {
        const double nn = n;
        r.modes.push_back(n);
        r.rates.push_back(growth_rate(n, phi, d_r));
        r.exact.push_back(linearized_growth_rate(n, phi, d_r));
        r.threshold.push_back((4.0 * nn * nn - 1.0) * pi / (2.0 * nn));
    }
    r.most_unstable = r.modes[static_cast<std::size_t>(std::max_element(r.rates.begin(), r.rates.end()) - r.rates.begin())];
    r.phi_c = critical_phi(n_max).phi;
    return r;
}

AngularTrajectory evolve(const AngularDensity& p0, double phi, double d_r, double t_end, const MkvEvolveOptions& o) {
    require_params(phi, d_r);
    detail::require(std::isfinite(t_end) && t_end >= 0.0, "evolve: t_end must be non-negative");
    const double dt = o.dt > 0.0 ? o.dt : 0.01 / d_r;
    detail::require(std::isfinite(dt), "evolve: dt must be finite");

    std::vector<double> outputs;
    for (double t : o.output_times) {
        detail::require(t >= 0.0 && t <= t_end, "evolve: output time outside [0, t_end]");
        if (t > 0.0 && t < t_end) outputs.push_back(t);
    }
    std::sort(outputs.begin(), outputs.end());
    outputs.erase(std::unique(outputs.begin(), outputs.end()), outputs.end());
    outputs.push_back(t_end);

    Spectrum s(p0.size());
    std::vector<complex> c = s.coefficients(p0.values());
    std::vector<double> lin(c.size());
    for (std::size_t n = 0; n < lin.size(); ++n) lin[n] = -4.0 * static_cast<double>(n * n) * d_r;
    auto nonlinear = [&](const std::vector<complex>& in, std::vector<complex>& out) { transport(s, in, phi, d_r, out); };
    const double bound = o.blowup_factor * std::max(std::abs(p0.max()), 1e-300);

    AngularTrajectory traj;
    traj.times.push_back(0.0);
    traj.states.push_back(p0);
    double t = 0.0;
    for (double target : outputs) {
        while (t < target) {
            double h = std::min(dt, target - t);
            // avoid a sliver step from rounding
            if (target - (t + h) < 1e-12 * std::max(1.0, target)) h = target - t;
            std::vector<complex> trial;
            std::vector<double> p;
            int halvings = 0;
            for (;;) {
                trial = c;
                ifrk4_step(trial, lin, h, nonlinear);
                trial[0] = c[0];
                p = s.values(trial);
                const double lo = *std::min_element(p.begin(), p.end());
                const double hi = *std::max_element(p.begin(), p.end());
                if (!std::isfinite(lo) || !std::isfinite(hi) || hi > bound) {
                    std::ostringstream msg;
                    msg << "evolve: blow-up at t=" << t << " (max p " << hi << ")";
                    throw NumericalError(msg.str());
                }
                if (lo >= -o.negativity_tol) break;
                if (++halvings > o.max_halvings) {
                    std::ostringstream msg;
                    msg << "evolve: negative density " << lo << " at t=" << t << " persists after step halving";
                    throw NumericalError(msg.str());
                }
                h *= 0.5;
                ++traj.dt_reductions;
            }
            c = std::move(trial);
            t = (h == target - t) ? target : t + h;
            ++traj.steps;
        }
        traj.times.push_back(target);
        traj.states.emplace_back(s.values(c));
    }
    return traj;
}

double stationary_residual(const AngularDensity& p, double phi) {
    Spectrum s(p.size());
    const std::vector<complex> c = s.coefficients(p.values());
    const std::vector<double> dp = derivative_field(s, c);
    const std::vector<double> w = wprime_field(s, c);
    double worst = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) worst = std::max(worst, std::abs(dp[j] + phi * p[j] * w[j]));
    return worst;
}

FixedPointResult stationary_fixed_point(const AngularDensity& p0, double phi, const FixedPointOptions& o) {
    detail::require(std::isfinite(phi) && phi >= 0.0, "phi must be finite and non-negative");
    detail::require(o.tol > 0.0 && o.max_iter >= 1, "stationary_fixed_point: tol > 0 and max_iter >= 1 required");
    detail::require(o.damping > 0.0 && o.damping <= 1.0, "stationary_fixed_point: damping must lie in (0, 1]");
    detail::require(o.anderson_depth >= 0, "stationary_fixed_point: anderson_depth must be >= 0");
    const std::size_t m = p0.size();
    Spectrum s(m);
    const double cell = pi / static_cast<double>(m);

    FixedPointResult r;
    // G(p) = normalised exp(-phi integral_0^theta W' * p); the primitive of
    // W' * p has Fourier multiplier -2 / (4 n^2 - 1) (up to a constant).
    auto map = [&](const std::vector<double>& p) {
        std::vector<complex> c = s.coefficients(p);
        const std::vector<double> w = wprime_field(s, c);
        double mean = 0.0;
        for (double v : w) mean += v;
        r.max_exponent_mean = std::max(r.max_exponent_mean, std::abs(mean * cell));
        c[0] = 0.0;
        for (std::size_t n = 1; n < c.size(); ++n) {
            const double nn = static_cast<double>(n);
            c[n] *= 2.0 * phi / (4.0 * nn * nn - 1.0);
        }
        std::vector<double> e = s.values(c);
        const double top = *std::max_element(e.begin(), e.end());
        double z = 0.0;
        for (double& v : e) {
            v = std::exp(v - top);
            z += v;
        }
        for (double& v : e) v /= z * cell;
        return e;
    };

    using Vec = Eigen::VectorXd;
    auto to_vec = [](const std::vector<double>& v) { return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())); };
    std::vector<double> x = p0.values();
    std::deque<Vec> xs, fs;
    const double beta = o.damping;
    for (int it = 1; it <= o.max_iter; ++it) {
        r.iterations = it;
        const std::vector<double> g = map(x);
        Vec f = to_vec(g) - to_vec(x);
        r.update = f.lpNorm<Eigen::Infinity>();
        if (r.update < o.tol) {
            x = g;
            r.converged = true;
            break;
        }
        Vec next = to_vec(x) + beta * f;
        if (o.anderson_depth > 0 && r.update <= o.anderson_switch) {
            xs.push_back(to_vec(x));
            fs.push_back(f);
            if (xs.size() > static_cast<std::size_t>(o.anderson_depth) + 1) {
                xs.pop_front();
                fs.pop_front();
            }
            const auto k = static_cast<Eigen::Index>(xs.size()) - 1;
            if (k >= 1) {
                Eigen::MatrixXd df(f.size(), k), dx(f.size(), k);
                for (Eigen::Index i = 0; i < k; ++i) {
                    df.col(i) = fs[static_cast<std::size_t>(i + 1)] - fs[static_cast<std::size_t>(i)];
                    dx.col(i) = xs[static_cast<std::size_t>(i + 1)] - xs[static_cast<std::size_t>(i)];
                }
                const Vec gamma = df.colPivHouseholderQr().solve(f);
                if (gamma.allFinite()) next -= (dx + beta * df) * gamma;
            }
        } else {
            xs.clear();
            fs.clear();
        }
        x.assign(next.data(), next.data() + next.size());
    }
    r.p = AngularDensity(x);
    r.residual = stationary_residual(r.p, phi);
    return r;
}

double l2_distance(const AngularDensity& p, const AngularDensity& q) {
    detail::require(p.size() == q.size(), "l2_distance: grid sizes differ");
    double sum = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) sum += (p[j] - q[j]) * (p[j] - q[j]);
    return std::sqrt(sum * pi / static_cast<double>(p.size()));
}

std::pair<double, double> shift_aligned_distance(const AngularDensity& p, const AngularDensity& q) {
    detail::require(p.size() == q.size(), "shift_aligned_distance: grid sizes differ");
    Spectrum s(p.size());
    const double m = static_cast<double>(p.size());
    std::vector<complex> a = s.coefficients(p.values()), b = s.coefficients(q.values());
    std::vector<complex> cross(a.size());
    std::vector<double> weight(a.size(), 2.0);
    weight[0] = 1.0;
    weight[s.nyquist()] = 1.0;
    double norms = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) {
        a[n] /= m;
        b[n] /= m;
        cross[n] = weight[n] * a[n] * std::conj(b[n]);
        norms += weight[n] * (std::norm(a[n]) + std::norm(b[n]));
    }
    // correlation(delta) = Re sum cross_n exp(-2 i n delta) and its derivatives
    auto corr = [&](double delta, int order) {
        double v = 0.0;
        for (std::size_t n = 0; n < cross.size(); ++n) {
            const double k = -2.0 * static_cast<double>(n);
            complex term = cross[n] * std::polar(1.0, k * delta);
            if (order >= 1) term *= complex(0.0, k);
            if (order >= 2) term *= complex(0.0, k);
            v += term.real();
        }
        return v;
    };
    const std::size_t samples = 16 * p.size();
    double best = 0.0, best_val = -INFINITY;
    for (std::size_t j = 0; j < samples; ++j) {
        const double d = pi * static_cast<double>(j) / static_cast<double>(samples);
        const double v = corr(d, 0);
        if (v > best_val) {
            best_val = v;
            best = d;
        }
    }
    const double bracket = pi / static_cast<double>(samples);
    double d = best;
    for (int it = 0; it < 20; ++it) {
        const double g1 = corr(d, 1), g2 = corr(d, 2);
        if (g2 >= 0.0) break;
        const double step = -g1 / g2;
        if (std::abs(d + step - best) > bracket) break;
        d += step;
        if (std::abs(step) < 1e-15) break;
    }
    if (corr(d, 0) < best_val) d = best;
    const double dist2 = std::max(0.0, pi * (norms - 2.0 * corr(d, 0)));
    double shift = std::fmod(d, pi);
    if (shift < 0.0) shift += pi;
    return {std::sqrt(dist2), shift};
}

}  // namespace needles
