#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>

#include "needles/quadrature.hpp"

using namespace needles;

namespace {

/// Moment of x^k against (1 - x)^alpha (1 + x)^beta by tanh-sinh.
double jacobi_moment(int k, double alpha, double beta) {
    boost::math::quadrature::tanh_sinh<double> ts;
    // xc is the distance to the nearer endpoint, kept exact by the integrator
    auto f = [&](double x, double xc) {
        const double lo = x < 0 ? -xc : 1 + x;
        const double hi = x < 0 ? 1 - x : xc;
        return std::pow(hi, alpha) * std::pow(lo, beta) * std::pow(x, k);
    };
    return ts.integrate(f, -1.0, 1.0);
}

}  // namespace

TEST_CASE("Gauss-Jacobi integrates polynomials exactly") {
    for (auto [alpha, beta] : {std::pair{0.0, 0.0}, std::pair{0.25, 0.75}, std::pair{0.9, 0.1}, std::pair{-0.5, 0.5},
                               std::pair{1.0, 0.0}, std::pair{0.0, 1.0}}) {
        const QuadratureRule r = gauss_jacobi(12, alpha, beta);
        for (int k = 0; k <= 23; ++k) {
            double sum = 0.0;
            for (std::size_t i = 0; i < r.nodes.size(); ++i) sum += r.weights[i] * std::pow(r.nodes[i], k);
            CHECK(std::abs(sum - jacobi_moment(k, alpha, beta)) < 1e-12);
        }
    }
}

TEST_CASE("Gauss-Legendre nodes are sorted and symmetric") {
    const QuadratureRule r = gauss_legendre(9);
    for (std::size_t i = 0; i + 1 < r.nodes.size(); ++i) CHECK(r.nodes[i] < r.nodes[i + 1]);
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
        CHECK(r.nodes[i] == doctest::Approx(-r.nodes[r.nodes.size() - 1 - i]).epsilon(1e-14));
    }
    const QuadratureRule m = gauss_legendre(10, 1.0, 3.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < m.nodes.size(); ++i) sum += m.weights[i] * std::exp(m.nodes[i]);
    CHECK(sum == doctest::Approx(std::exp(3.0) - std::exp(1.0)).epsilon(1e-14));
}

TEST_CASE("rejects invalid parameters") {
    CHECK_THROWS(gauss_jacobi(0, 0.0, 0.0));
    CHECK_THROWS(gauss_jacobi(4, -1.0, 0.0));
}
