#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/expm1.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/hypergeometric_pFq.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "needles/conformal.hpp"
#include "needles/error.hpp"
#include "needles/geometry.hpp"

using namespace needles;
using std::numbers::pi;

namespace {

/// a(theta) from a tanh-sinh integration of the SC integrand along the chord
/// -1 -> -i, independent of the Gauss-Jacobi machinery.
complex a_by_tanh_sinh(double theta) {
    const double tau = theta / pi;
    const complex step{1.0, -1.0};
    auto h = [&](double s) {
        const complex t = -1.0 + s * step;
        return std::pow(1.0 - t * t, tau) * std::pow(1.0 + t * t, 1.0 - tau) / (t * t) * step;
    };
    boost::math::quadrature::tanh_sinh<double> ts;
    const double re = ts.integrate([&](double s) { return h(s).real(); }, 0.0, 1.0);
    const double im = ts.integrate([&](double s) { return h(s).imag(); }, 0.0, 1.0);
    return 1.0 / complex(re, im);
}

void check_close(complex a, complex b, double tol) {
    CHECK(std::abs(a - b) <= tol * std::max(1.0, std::abs(b)));
}

void check_t(const TMatrix& t, double t11, double t12, double t22, double tol) {
    CHECK(t.t11 == doctest::Approx(t11).epsilon(tol));
    CHECK(t.t12 == doctest::Approx(t12).epsilon(tol));
    CHECK(t.t22 == doctest::Approx(t22).epsilon(tol));
}

}  // namespace

TEST_CASE("regularized 2F1 at -1 matches the defining series") {
    // direct series at z = -1 through Boost's generalized hypergeometric
    for (auto [a, b, c] : {std::array{0.5, 0.25, 1.75}, std::array{-0.5, 0.25, 0.75}, std::array{0.5, -0.3, 1.2},
                           std::array{-0.5, -0.3, 0.2}, std::array{0.5, 0.1, 1.6}}) {
        const double ref = boost::math::hypergeometric_pFq({a, b}, {c}, -1.0) / std::tgamma(c);
        CHECK(detail::regularized_hyp2f1_at_minus_one(a, b, c) == doctest::Approx(ref).epsilon(1e-12));
    }
}

TEST_CASE("quadrature route agrees with tanh-sinh oracle") {
    for (double theta : {pi / 6, pi / 4, pi / 3, pi / 2, 2 * pi / 3, 0.05, 3.1}) {
        check_close(sc_constant_quadrature(theta).value(), a_by_tanh_sinh(theta), 1e-10);
    }
}

TEST_CASE("reference values of a(theta)") {
    // high-precision reference values from an independent arbitrary-precision quadrature
    check_close(sc_constant_quadrature(pi / 4).value(), {-0.216965349204, 0.523800688614}, 1e-11);
    check_close(sc_constant_quadrature(pi / 6).value(), {-0.142147392034, 0.530501289233}, 1e-11);
    check_close(sc_constant_quadrature(pi / 3).value(), {-0.289898816741, 0.502119479649}, 1e-11);
    check_close(detail::sc_constant_quadrature_closed(0.0).value(), {0.0, 0.5}, 1e-13);
    check_close(detail::sc_constant_quadrature_closed(pi).value(), {-0.5, 0.0}, 1e-13);
}

TEST_CASE("closed form agrees with quadrature") {
    for (double theta : {pi / 6, pi / 4, pi / 3, 2 * pi / 3}) {
        check_close(sc_constant(theta).value(), sc_constant_quadrature(theta).value(), 1e-8);
    }
    for (int k = 1; k <= 50; ++k) {
        const double theta = pi * k / 51.0;
        check_close(sc_constant(theta).value(), sc_constant_quadrature(theta).value(), 1e-8);
    }
}

TEST_CASE("closed form is finite and continuous across pi/2") {
    const complex mid = sc_constant(pi / 2).value();
    const complex lo = sc_constant(pi / 2 - 1e-4).value();
    const complex hi = sc_constant(pi / 2 + 1e-4).value();
    CHECK(std::isfinite(mid.real()));
    CHECK(std::abs(lo - mid) < 1e-3);
    CHECK(std::abs(hi - mid) < 1e-3);
    check_close(mid, sc_constant_quadrature(pi / 2).value(), 1e-8);
    check_close(sc_constant(pi / 2 + 1e-10).value(), sc_constant_quadrature(pi / 2 + 1e-10).value(), 1e-8);
}

TEST_CASE("mu = 2 pi |a(pi/2)|^2 is about 2.18") {
    const SCConstant a = sc_constant(pi / 2);
    const double mu = 2 * pi * (a.a1 * a.a1 + a.a2 * a.a2);
    CHECK(std::abs(mu - 2.18) <= 0.01);
    const TMatrix t = t_matrix(pi / 2);
    CHECK(t.t12 == 0.0);
    CHECK(t.t11 == doctest::Approx(mu).epsilon(1e-10));
    CHECK(t.t22 == doctest::Approx(mu).epsilon(1e-10));
}

TEST_CASE("out-of-range angles are rejected") {
    CHECK_THROWS_AS(sc_constant(0.0), ValidationError);
    CHECK_THROWS_AS(sc_constant(pi), ValidationError);
    CHECK_THROWS_AS(sc_constant_quadrature(-0.1), ValidationError);
    CHECK_THROWS_AS(t_matrix(4.0), ValidationError);
    CHECK_THROWS_AS(w_solution(1, 0.0, 1.0), ValidationError);
    CHECK_THROWS_AS(w_solution(3, 0.5, 1.0), ValidationError);
    CHECK_THROWS_AS(build_t_table(8), ValidationError);
}

TEST_CASE("T matrix values, symmetry and limits") {
    check_t(t_matrix(pi / 4), 1.305611505, -0.714062643, 2.733736791, 1e-8);
    check_t(t_matrix(3 * pi / 4), 1.305611505, 0.714062643, 2.733736791, 1e-8);
    const TMatrix small = t_matrix(1e-3);
    CHECK(small.t11 < 2e-3);
    check_t(small, 0.001001226446, -0.001570488662, 3.141977504, 1e-7);
    // T(pi - theta) is the reflection of T(theta)
    for (double theta : {0.3, 1.0, 1.4}) {
        const TMatrix a = t_matrix(theta), b = t_matrix(pi - theta);
        CHECK(a.t11 == doctest::Approx(b.t11).epsilon(1e-12));
        CHECK(a.t22 == doctest::Approx(b.t22).epsilon(1e-12));
        CHECK(a.t12 == doctest::Approx(-b.t12).epsilon(1e-12));
    }
}

TEST_CASE("T is positive definite on a fine grid; T22 is largest near the ends") {
    const TTable table = build_t_table();
    const double t22_end = table.values().front().t22;
    CHECK(t22_end == doctest::Approx(pi).epsilon(1e-12));
    const int n = 10000;
    double t22_max = 0.0, theta_max = 0.0;
    for (int k = 1; k < n; ++k) {
        const double theta = pi * k / n;
        const TMatrix t = table(theta);
        const auto [lo, hi] = t.as_matrix().symmetric_eigenvalues();
        REQUIRE(lo > 0.0);
        REQUIRE(hi >= lo);
        if (t.t22 > t22_max) {
            t22_max = t.t22;
            theta_max = theta;
        }
    }
    // the maximum sits close to (not at) the endpoints and exceeds T22(0) by under 1%
    CHECK(std::min(theta_max, pi - theta_max) < 0.2);
    CHECK(t22_max < 1.01 * t22_end);
    CHECK(t22_end > 1.4 * table(pi / 2).t22);
    // spot-check the direct route too
    for (int k = 1; k < 100; ++k) {
        const auto [lo, hi] = t_matrix(pi * k / 100).as_matrix().symmetric_eigenvalues();
        REQUIRE(lo > 0.0);
    }
}

TEST_CASE("det T = 16 theta (pi - theta) |a|^4") {
    for (double theta : {0.2, 0.9, 2.2}) {
        const SCConstant a = sc_constant_quadrature(theta);
        const TMatrix t = t_matrix(a);
        const double r2 = a.a1 * a.a1 + a.a2 * a.a2;
        CHECK(t.t11 * t.t22 - t.t12 * t.t12 == doctest::Approx(16 * theta * (pi - theta) * r2 * r2).epsilon(1e-12));
    }
}

TEST_CASE("rotated matrix M") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, pi);
    for (int n = 0; n < 20; ++n) {
        const double t1 = u(rng), theta = 0.01 + 0.98 * u(rng), delta = u(rng);
        const Mat2 m0 = m_matrix(0.0, theta);
        const TMatrix t = t_matrix(theta);
        CHECK(m0.xx == doctest::Approx(t.t11));
        CHECK(m0.xy == doctest::Approx(t.t12));
        CHECK(m0.yy == doctest::Approx(t.t22));
        const Mat2 m = m_matrix(t1, theta);
        CHECK(m.xy == doctest::Approx(m.yx).epsilon(1e-12));
        const auto [l0, h0] = t.as_matrix().symmetric_eigenvalues();
        const auto [l1, h1] = m.symmetric_eigenvalues();
        CHECK(l1 == doctest::Approx(l0).epsilon(1e-10));
        CHECK(h1 == doctest::Approx(h0).epsilon(1e-10));
        const Mat2 rd = rotation_matrix(delta);
        const Mat2 lhs = m_matrix(t1 + delta, theta);
        const Mat2 rhs = rd * m * transpose(rd);
        CHECK(lhs.xx == doctest::Approx(rhs.xx).epsilon(1e-12));
        CHECK(lhs.xy == doctest::Approx(rhs.xy).epsilon(1e-12));
        CHECK(lhs.yy == doctest::Approx(rhs.yy).epsilon(1e-12));
    }
}

TEST_CASE("complex potentials are real on the unit circle") {
    const double theta = 1.1;
    const complex a = sc_constant_quadrature(theta).value();
    for (int j = 0; j < 100; ++j) {
        const complex z = std::polar(1.0, 2 * pi * j / 100.0);
        CHECK(std::abs(w_solution(1, z, theta).imag()) < 1e-14);
        CHECK(std::abs(w_solution(2, z, theta).imag()) < 1e-14);
    }
    const complex z = 1e-8 * complex(0.6, 0.8);
    check_close(z * w_solution(1, z, theta), -a, 1e-7);
}

TEST_CASE("map sends prevertices to rhombus vertices") {
    for (double theta : {pi / 2, pi / 5, 2.4}) {
        const Rhombus r = excluded_rhombus(NeedleConfig({0, 0}, 0.0, 1.0), theta);
        const complex pre[4] = {{-1, 0}, {0, -1}, {1, 0}, {0, 1}};
        for (int k = 0; k < 4; ++k) {
            const complex g = sc_map(pre[k], theta);
            CHECK(std::abs(g - complex(r.vertices[k].x, r.vertices[k].y)) < 1e-8);
        }
    }
}

TEST_CASE("map has the pole -a/zeta") {
    const double theta = 0.8;
    const complex a = sc_constant_quadrature(theta).value();
    const complex dir = std::polar(1.0, 0.3);
    double previous = 0.0;
    for (double r : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}) {
        const complex rem = sc_map(r * dir, theta) + a / (r * dir);
        if (previous != 0.0) CHECK(std::abs(std::abs(rem) - previous) < 0.1);
        previous = std::abs(rem);
        CHECK(previous < 2.0);
    }
}

TEST_CASE("residues of the map") {
    for (double theta : {0.3, pi / 2, 2.0}) {
        const complex a = sc_constant_quadrature(theta).value();
        const SCResidues res = sc_residues_by_contour(theta);
        check_close(res.of_zeta_dg, a, 1e-8);
        check_close(res.of_dg_over_zeta, (1 - 2 * theta / pi) * a, 1e-8);
    }
}

TEST_CASE("T table") {
    const TTable table = build_t_table(65);
    CHECK(table.order() == 64);
    const auto& grid = table.grid();
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) REQUIRE(grid[i] < grid[i + 1]);
    CHECK(grid[32] == pi / 2);
    const TMatrix mid = table(pi / 2);
    const TMatrix direct = t_matrix(pi / 2);
    CHECK(mid.t11 == direct.t11);
    CHECK(mid.t22 == direct.t22);
    CHECK(mid.t12 == 0.0);
    for (std::size_t k = 1; k + 1 < grid.size(); ++k) {
        const TMatrix t = table(grid[k]);
        CHECK(t.t11 == table.values()[k].t11);
    }

    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(1e-6, pi - 1e-6);
    double worst = 0.0;
    for (int n = 0; n < 1000; ++n) {
        const double theta = u(rng);
        const TMatrix a = table(theta), b = t_matrix(theta);
        worst = std::max({worst, std::abs(a.t11 - b.t11), std::abs(a.t12 - b.t12), std::abs(a.t22 - b.t22)});
    }
    CHECK(worst <= 1e-6);

    int sign_changes = 0;
    double last = table(1e-3).t12;
    for (int k = 1; k <= 2000; ++k) {
        const double v = table(1e-3 + (pi - 2e-3) * k / 2000.0).t12;
        if ((v > 0) != (last > 0) && v != 0.0) ++sign_changes;
        if (v != 0.0) last = v;
    }
    CHECK(sign_changes == 1);
}
