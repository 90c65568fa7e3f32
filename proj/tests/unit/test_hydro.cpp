#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "needles/error.hpp"
#include "needles/hydro.hpp"
#include "needles/kinetic.hpp"

using namespace needles;
using std::numbers::pi;

namespace {

double heat_gaussian(double x, double sigma, double l, double d, double t) {
    double sum = 1.0 / l;
    for (int m = 1; m < 200; ++m) {
        const double k = 2.0 * pi * m / l;
        sum += 2.0 / l * std::exp(-k * k * (0.5 * sigma * sigma + d * t)) * std::cos(k * (x - 0.5 * l));
    }
    return sum;
}

SpatialDensity random_density(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double a = 0.3 * u(rng), b = 0.3 * u(rng), c = 0.2 * u(rng);
    return make_spatial_density(n, n, 2 * pi, 2 * pi,
                                [&](double x, double y) { return 1.0 + a * std::cos(x) + b * std::sin(2 * y) + c * std::cos(x - y); });
}

double peak(const SpatialDensity& r) { return *std::max_element(r.values.begin(), r.values.end()); }

}  // namespace

TEST_CASE("effective diameter and coefficients") {
    CHECK(effective_diameter(1.0) == doctest::Approx(0.45016).epsilon(1e-5));
    CHECK(effective_diameter(0.0) == 0.0);
    for (double eps : {0.01, 0.1, 0.37, 1.0}) {
        const int n = 200;
        CHECK(disk_coefficient(n, effective_diameter(eps)) == doctest::Approx(needle_coefficient((n - 1) * eps * eps)).epsilon(1e-15));
    }
    CHECK_THROWS_AS(effective_diameter(-1.0), ValidationError);
    CHECK_THROWS_AS(needle_coefficient(-1.0), ValidationError);
}

TEST_CASE("uniform density is stationary and mass is conserved") {
    const SpatialDensity u = make_spatial_density(16, 16, 2.0, 3.0, [](double, double) { return 1.0; });
    for (double v : needle_hydro_rhs(u, {}, 3.0)) CHECK(std::abs(v) < 1e-14);
    std::mt19937_64 rng(5);
    const SpatialDensity r = random_density(rng, 16);
    std::vector<Vec2> f(r.size());
    for (int i = 0; i < r.nx; ++i)
        for (int j = 0; j < r.ny; ++j) f[r.index(i, j)] = {std::sin(r.y(j)), 0.5 * std::cos(r.x(i))};
    const auto d = needle_hydro_rhs(r, f, 2.0);
    double sum = 0.0, mx = 0.0;
    for (double v : d) {
        sum += v;
        mx = std::max(mx, std::abs(v));
    }
    CHECK(std::abs(sum) < 1e-13 * mx * static_cast<double>(d.size()));
}

TEST_CASE("nonlinear flux matches the analytic divergence") {
    const double a = 0.25;
    const SpatialDensity r = make_spatial_density(16, 8, 2 * pi, 2 * pi, [&](double x, double) { return 1.0 + a * std::cos(x); });
    const double c0 = r.values[0] / (1.0 + a);
    const double phi = 1.7, d_t = 0.6;
    const auto d = needle_hydro_rhs(r, {}, phi, d_t);
    for (int i = 0; i < r.nx; ++i) {
        const double x = r.x(i);
        const double expected = d_t * (-c0 * a * std::cos(x) + 2.0 / pi * phi * c0 * c0 * (-a * std::cos(x) - a * a * std::cos(2 * x)));
        CHECK(d[r.index(i, 3)] == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("phi = 0 is the heat equation") {
    const double sigma = 0.5, t_end = 0.4;
    const SpatialDensity r0 = make_spatial_density(32, 32, 2 * pi, 2 * pi, [&](double x, double y) {
        return heat_gaussian(x, sigma, 2 * pi, 1.0, 0.0) * heat_gaussian(y, sigma, 2 * pi, 1.0, 0.0);
    });
    const auto traj = evolve(r0, HydroParams{}, t_end);
    const SpatialDensity& r = traj.states.back();
    double err = 0.0;
    for (int i = 0; i < r.nx; ++i)
        for (int j = 0; j < r.ny; ++j)
            err = std::max(err, std::abs(r.values[r.index(i, j)] - heat_gaussian(r.x(i), sigma, 2 * pi, 1.0, t_end) *
                                                                    heat_gaussian(r.y(j), sigma, 2 * pi, 1.0, t_end)));
    CHECK(err < 1e-6);
    CHECK(disk_rhs(r0, {}, 50, 0.0) == needle_hydro_rhs(r0, {}, 0.0));
}

TEST_CASE("crowding speeds up the decay of a bump and the maximum never grows") {
    const SpatialDensity r0 = make_spatial_density(32, 32, 2 * pi, 2 * pi, [](double x, double y) {
        return 0.05 + std::exp(-((x - pi) * (x - pi) + (y - pi) * (y - pi)) / 0.5);
    });
    HydroEvolveOptions o;
    o.output_times = {0.02, 0.05, 0.1, 0.2};
    o.dt = 1e-3;
    const auto free = evolve(r0, HydroParams{}, 0.3, o);
    const auto crowd = evolve(r0, HydroParams{1.0, needle_coefficient(30.0), {}}, 0.3, o);
    for (std::size_t k = 1; k < free.states.size(); ++k) {
        CHECK(peak(crowd.states[k]) < peak(free.states[k]));
        CHECK(peak(crowd.states[k]) <= peak(crowd.states[k - 1]) * (1 + 1e-12));
        CHECK(crowd.states[k].mass() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("needle and disk operators agree at the effective diameter") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.01, 0.5);
    for (int trial = 0; trial < 20; ++trial) {
        const SpatialDensity r = random_density(rng, 16);
        const double eps = u(rng);
        const int n = 10 + trial * 13;
        const auto a = needle_hydro_rhs(r, {}, (n - 1) * eps * eps);
        const auto b = disk_rhs(r, {}, n, effective_diameter(eps));
        double scale = 0.0, err = 0.0;
        for (std::size_t s = 0; s < a.size(); ++s) {
            scale = std::max(scale, std::abs(a[s]));
            err = std::max(err, std::abs(a[s] - b[s]));
        }
        CHECK(err <= 1e-14 * scale);
    }
}

TEST_CASE("hydro rejects bad input") {
    SpatialDensity r = make_spatial_density(8, 8, 1.0, 1.0, [](double, double) { return 1.0; });
    CHECK_THROWS_AS(hydro_rhs(r, HydroParams{-1.0, 0.0, {}}), ValidationError);
    CHECK_THROWS_AS(hydro_rhs(r, HydroParams{1.0, 0.0, std::vector<Vec2>(3)}), ValidationError);
    CHECK_THROWS_AS(disk_rhs(r, {}, 0, 0.1), ValidationError);
    r.values.pop_back();
    CHECK_THROWS_AS(hydro_rhs(r, HydroParams{}), ValidationError);
    CHECK_THROWS_AS(make_spatial_density(2, 8, 1.0, 1.0, [](double, double) { return 1.0; }), ValidationError);
}
