#include "needles/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "needles/error.hpp"
#include "needles/quadrature.hpp"

namespace needles {

namespace {

constexpr double pi = std::numbers::pi;
const complex I{0.0, 1.0};

void require_open_angle(double theta, const char* who) {
    if (!(theta > 0.0 && theta < pi)) {
        std::ostringstream msg;
        msg << who << ": relative angle " << theta << " outside (0, pi)";
        throw ValidationError(msg.str());
    }
}

/// One evaluation of alpha / (beta - i gamma); singular exactly at pi/2.
complex closed_form_raw(double theta) {
    const double t = theta / pi;
    const double alpha = std::pow(2.0, 1.0 + 2.0 * t) / std::cos(theta);
    const double beta = std::tgamma(0.5 - t) * std::tgamma(1.0 + 2.0 * t) *
                        (detail::regularized_hyp2f1_at_minus_one(0.5, t, 1.5 + t) -
                         2.0 * detail::regularized_hyp2f1_at_minus_one(-0.5, t, 0.5 + t));
    const double gamma = std::pow(16.0, t) * std::tgamma(0.5 + t) * std::tgamma(1.0 - 2.0 * t) *
                         (detail::regularized_hyp2f1_at_minus_one(0.5, -t, 1.5 - t) +
                          2.0 * detail::regularized_hyp2f1_at_minus_one(-0.5, -t, 0.5 - t));
    return alpha / complex(beta, -gamma);
}

/// Integral of the SC integrand along the chord from -1 to -i, using an
/// n-point Gauss-Jacobi rule that absorbs the endpoint branch factors
/// s^tau (1 - s)^(1 - tau).
complex top_edge_integral(double theta, std::size_t n) {
    const double tau = theta / pi;
    const QuadratureRule rule = gauss_jacobi(n, 1.0 - tau, tau);
    const complex step{1.0, -1.0};  // zeta_B - zeta_A
    complex sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double s = 0.5 * (1.0 + rule.nodes[k]);
        const complex t = -1.0 + s * step;
        // (1 - t^2)/s and (1 + t^2)/(1 - s) with the vanishing factors divided out
        const complex near_a = step * (2.0 - s * step);
        const complex near_b = -step * (t - I);
        const complex smooth = std::pow(near_a, tau) * std::pow(near_b, 1.0 - tau) / (t * t);
        sum += rule.weights[k] * smooth;
    }
    return step * 0.25 * sum;
}

/// (q(t) - 1) / t^2 with q(t) = (1 - t^2)^tau (1 + t^2)^(1 - tau); analytic in the disk.
complex reduced_integrand(complex t, double tau) {
    const complex u = t * t;
    if (std::abs(u) < 1e-2) {
        // log q / u and expm1 series, free of cancellation near the origin
        complex log_q_over_u = 0.0;
        complex up = 1.0;
        for (int k = 1; k <= 12; ++k) {
            const double sign = (k % 2 == 1) ? 1.0 : -1.0;
            log_q_over_u += up * ((-tau + (1.0 - tau) * sign) / k);
            up *= u;
        }
        const complex L = log_q_over_u * u;
        complex series = 1.0;
        complex term = 1.0;
        for (int k = 2; k <= 12; ++k) {
            term *= L / static_cast<double>(k);
            series += term;
        }
        return log_q_over_u * series;
    }
    const complex q = std::pow(1.0 - u, tau) * std::pow(1.0 + u, 1.0 - tau);
    return (q - 1.0) / u;
}

/// G(zeta) = -1/zeta + integral_0^zeta (q - 1)/t^2 dt, so that g = a0 + a G.
complex primitive(complex zeta, double tau) {
    constexpr double vertex_tol = 1e-14;
    const complex prevertices[4] = {{-1.0, 0.0}, {0.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}};
    for (int k = 0; k < 4; ++k) {
        if (std::abs(zeta - prevertices[k]) > vertex_tol) continue;
        const complex z = prevertices[k];
        const bool real_axis = (k % 2 == 0);
        const double expo = real_axis ? tau : 1.0 - tau;
        // [0, 1/2]: smooth part of the ray
        complex inner = 0.0;
        const QuadratureRule gl = gauss_legendre(40, 0.0, 0.5);
        for (std::size_t j = 0; j < gl.nodes.size(); ++j) inner += gl.weights[j] * reduced_integrand(gl.nodes[j] * z, tau);
        inner *= z;
        // [1/2, 1]: q/t^2 carries (1 - s)^expo, the -1/t^2 part integrates to -1/zeta
        const QuadratureRule gj = gauss_jacobi(40, expo, 0.0);
        complex outer = 0.0;
        for (std::size_t j = 0; j < gj.nodes.size(); ++j) {
            const double s = 0.75 + 0.25 * gj.nodes[j];
            const double s2 = s * s;
            // q(s z) / (1 - s)^expo; on both axes t^2 = +-s^2 makes q real
            const double smooth = real_axis ? std::pow(1.0 + s, tau) * std::pow(1.0 + s2, 1.0 - tau)
                                            : std::pow(1.0 + s2, tau) * std::pow(1.0 + s, 1.0 - tau);
            const complex t = s * z;
            outer += gj.weights[j] * smooth / (t * t);
        }
        outer *= z * 0.25 * std::pow(0.25, expo);
        return -1.0 / zeta + inner + outer - 1.0 / z;
    }
    const std::size_t n = std::abs(zeta) < 0.999 ? 48 : 160;
    const QuadratureRule gl = gauss_legendre(n, 0.0, 1.0);
    complex sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) sum += gl.weights[j] * reduced_integrand(gl.nodes[j] * zeta, tau);
    return -1.0 / zeta + zeta * sum;
}

}  // namespace

std::pair<double, double> Mat2::symmetric_eigenvalues() const {
    const double mean = 0.5 * (xx + yy);
    const double half_diff = 0.5 * (xx - yy);
    const double offdiag = 0.5 * (xy + yx);
    const double radius = std::hypot(half_diff, offdiag);
    const double hi = mean + radius;
    const double det = xx * yy - offdiag * offdiag;
    const double lo = (hi > 0.0) ? det / hi : mean - radius;
    return {std::min(lo, hi), std::max(lo, hi)};
}

Mat2 rotation_matrix(double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c, -s, s, c};
}

Mat2 operator*(const Mat2& a, const Mat2& b) {
    return {a.xx * b.xx + a.xy * b.yx, a.xx * b.xy + a.xy * b.yy,
            a.yx * b.xx + a.yy * b.yx, a.yx * b.xy + a.yy * b.yy};
}

Mat2 transpose(const Mat2& a) { return {a.xx, a.yx, a.xy, a.yy}; }

namespace detail {

double regularized_hyp2f1_at_minus_one(double a, double b, double c) {
    require(c > -1.0, "regularized_hyp2f1_at_minus_one: requires c > -1");
    // Pfaff: 2F1(a, b; c; -1) = 2^-a 2F1(a, c - b; c; 1/2)
    const double bp = c - b;
    const double rgamma_c1 = 1.0 / std::tgamma(c + 1.0);  // 1/Gamma(c + 1), finite for c > -1
    double sum = c * rgamma_c1;                           // k = 0 term: 1/Gamma(c) = c/Gamma(c + 1)
    // k >= 1: term_k = (a)_k (b')_k / k! * 2^-k / Gamma(c + k)
    double poch = a * bp * 0.5;  // (a)_1 (b')_1 / 1! * 2^-1
    double rgamma = rgamma_c1;
    int quiet = 0;
    for (int k = 1; k < 2000; ++k) {
        const double term = poch * rgamma;
        sum += term;
        if (std::abs(term) <= 1e-16 * std::abs(sum)) {
            if (++quiet >= 3) break;
        } else {
            quiet = 0;
        }
        poch *= (a + k) * (bp + k) * 0.5 / (k + 1);
        rgamma /= (c + k);
    }
    return std::pow(2.0, -a) * sum;
}

SCConstant sc_constant_quadrature_closed(double theta, std::size_t nodes) {
    require(theta >= 0.0 && theta <= pi, "sc_constant: angle outside [0, pi]");
    const complex coarse = 1.0 / top_edge_integral(theta, nodes);
    const complex fine = 1.0 / top_edge_integral(theta, nodes + 16);
    const double err = std::abs(fine - coarse);
    if (!(err <= 1e-12 * std::max(1.0, std::abs(fine)))) {
        std::ostringstream msg;
        msg << "sc_constant_quadrature: no convergence at theta=" << theta << " (error estimate " << err << ")";
        throw NumericalError(msg.str());
    }
    return {fine.real(), fine.imag(), theta, err};
}

TMatrix t_matrix_unchecked(double a1, double a2, double theta) {
    const double a11 = a1 * a1;
    const double a22 = a2 * a2;
    return {4.0 * (a11 * (pi - theta) + a22 * theta), 4.0 * a1 * a2 * (pi - 2.0 * theta),
            4.0 * (a22 * (pi - theta) + a11 * theta)};
}

}  // namespace detail

SCConstant sc_constant(double theta) {
    require_open_angle(theta, "sc_constant");
    complex a;
    if (std::abs(theta - 0.5 * pi) < 1e-9) {
        // Removable singularity: even part of a(pi/2 +- d), Richardson in d^2.
        auto even = [](double d) { return 0.5 * (closed_form_raw(0.5 * pi + d) + closed_form_raw(0.5 * pi - d)); };
        constexpr double d = 2e-3;
        a = (4.0 * even(0.5 * d) - even(d)) / 3.0;
    } else {
        a = closed_form_raw(theta);
    }
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
        throw NumericalError("sc_constant: closed form not finite");
    }
    return {a.real(), a.imag(), theta, 0.0};
}

SCConstant sc_constant_quadrature(double theta) {
    require_open_angle(theta, "sc_constant_quadrature");
    return detail::sc_constant_quadrature_closed(theta, 40);
}

TMatrix t_matrix(const SCConstant& a) { return detail::t_matrix_unchecked(a.a1, a.a2, a.theta); }

TMatrix t_matrix(double theta) {
    require_open_angle(theta, "t_matrix");
    return t_matrix(sc_constant_quadrature(theta));
}

Mat2 m_matrix(double theta1, double theta) {
    const Mat2 r = rotation_matrix(theta1);
    return r * t_matrix(theta).as_matrix() * transpose(r);
}

complex w_solution(int k, complex zeta, double theta) {
    detail::require(k == 1 || k == 2, "w_solution: k must be 1 or 2");
    const double r = std::abs(zeta);
    detail::require(r > 0.0, "w_solution: zeta = 0 is the pole");
    detail::require(r <= 1.0 + 1e-14, "w_solution: |zeta| must not exceed 1");
    const complex a = sc_constant_quadrature(theta).value();
    if (k == 1) return -(std::conj(a) * zeta + a / zeta);
    return -I * (std::conj(a) * zeta - a / zeta);
}

complex sc_map(complex zeta, double theta) {
    require_open_angle(theta, "sc_map");
    detail::require(std::abs(zeta) > 0.0 && std::abs(zeta) <= 1.0 + 1e-14, "sc_map: need 0 < |zeta| <= 1");
    const double tau = theta / pi;
    const complex a = sc_constant_quadrature(theta).value();
    const complex z_a{0.5 * (-1.0 + std::cos(theta)), 0.5 * std::sin(theta)};
    const complex a0 = z_a - a * primitive({-1.0, 0.0}, tau);
    return a0 + a * primitive(zeta, tau);
}

SCResidues sc_residues_by_contour(double theta, double radius, std::size_t points) {
    require_open_angle(theta, "sc_residues_by_contour");
    detail::require(radius > 0.0 && radius < 1.0 && points >= 8, "sc_residues_by_contour: bad contour");
    const double tau = theta / pi;
    const complex a = sc_constant_quadrature(theta).value();
    SCResidues res{0.0, 0.0};
    for (std::size_t j = 0; j < points; ++j) {
        const double phase = 2.0 * pi * static_cast<double>(j) / static_cast<double>(points);
        const complex z = std::polar(radius, phase);
        const complex z2 = z * z;
        const complex dg = a * std::pow(1.0 - z2, tau) * std::pow(1.0 + z2, 1.0 - tau) / z2;
        // (1 / 2 pi i) closed integral of f dz with dz = i z dphi
        res.of_zeta_dg += z2 * dg;
        res.of_dg_over_zeta += dg;
    }
    res.of_zeta_dg /= static_cast<double>(points);
    res.of_dg_over_zeta /= static_cast<double>(points);
    return res;
}

TTable::TTable(std::size_t grid_size) {
    detail::require(grid_size >= 16, "build_t_table: grid_size must be at least 16");
    const std::size_t n = grid_size - 1;
    grid_.resize(grid_size);
    for (std::size_t k = 0; k <= n / 2; ++k) {
        grid_[k] = 0.5 * pi * (1.0 - std::cos(pi * static_cast<double>(k) / static_cast<double>(n)));
        grid_[n - k] = pi - grid_[k];
    }
    if (n % 2 == 0) grid_[n / 2] = 0.5 * pi;
    grid_[0] = 0.0;
    grid_[n] = pi;

    values_.reserve(grid_size);
    for (double theta : grid_) {
        const SCConstant a = detail::sc_constant_quadrature_closed(theta);
        values_.push_back(detail::t_matrix_unchecked(a.a1, a.a2, theta));
    }
    bary_weights_.resize(grid_size);
    for (std::size_t k = 0; k <= n; ++k) {
        bary_weights_[k] = (k % 2 == 0) ? 1.0 : -1.0;
        if (k == 0 || k == n) bary_weights_[k] *= 0.5;
    }
}

TMatrix TTable::operator()(double theta) const {
    detail::require(theta >= 0.0 && theta <= pi, "TTable: angle outside [0, pi]");
    double num11 = 0.0, num12 = 0.0, num22 = 0.0, den = 0.0;
    for (std::size_t k = 0; k < grid_.size(); ++k) {
        const double diff = theta - grid_[k];
        if (diff == 0.0) return values_[k];
        const double w = bary_weights_[k] / diff;
        num11 += w * values_[k].t11;
        num12 += w * values_[k].t12;
        num22 += w * values_[k].t22;
        den += w;
    }
    return {num11 / den, num12 / den, num22 / den};
}

TTable build_t_table(std::size_t grid_size) { return TTable(grid_size); }

}  // namespace needles
