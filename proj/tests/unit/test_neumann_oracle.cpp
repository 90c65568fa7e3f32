#include <doctest.h>

#include <cmath>
#include <numbers>

#include "needles/conformal.hpp"
#include "needles/error.hpp"
#include "needles/neumann_oracle.hpp"

using namespace needles;
using std::numbers::pi;

namespace {

double relative_error(const TMatrix& a, const TMatrix& b) {
    const double diff = std::hypot(a.t11 - b.t11, std::sqrt(2.0) * (a.t12 - b.t12), a.t22 - b.t22);
    return diff / std::hypot(b.t11, std::sqrt(2.0) * b.t12, b.t22);
}

}  // namespace

TEST_CASE("finite-element oracle reproduces the residue formula") {
    for (double theta : {pi / 4, pi / 2, 3 * pi / 4}) {
        const NeumannSolution sol = t_matrix_oracle(theta);
        const TMatrix exact = t_matrix(theta);
        CHECK(sol.t.t11 == doctest::Approx(exact.t11).epsilon(0.02));
        CHECK(sol.t.t22 == doctest::Approx(exact.t22).epsilon(0.02));
        CHECK(std::abs(sol.t.t12 - exact.t12) <= 0.02 * std::max(std::abs(exact.t12), 1e-3 * exact.t11));
        CHECK(relative_error(sol.t, exact) <= 2e-2);
        CHECK(relative_error(sol.t_energy, sol.t) < 1e-8);
        // Q-check: moments of x_i over the rhombus boundary
        CHECK(sol.q_check.xx == doctest::Approx(std::sin(theta)).epsilon(1e-12));
        CHECK(sol.q_check.yy == doctest::Approx(std::sin(theta)).epsilon(1e-12));
        CHECK(std::abs(sol.q_check.xy) < 1e-12);
        CHECK(std::abs(sol.q_check.yx) < 1e-12);
    }
}

TEST_CASE("oracle is isotropic for the square") {
    const NeumannSolution sol = t_matrix_oracle(pi / 2);
    CHECK(sol.t.t11 == doctest::Approx(sol.t.t22).epsilon(0.02));
    CHECK(std::abs(sol.t.t12) < 0.02 * sol.t.t11);
}

TEST_CASE("oracle error decreases under refinement") {
    const TMatrix exact = t_matrix(pi / 4);
    NeumannOracleOptions coarse;
    coarse.spacing = 0.05;
    const double e_coarse = relative_error(t_matrix_oracle(pi / 4, coarse).t, exact);
    const double e_fine = relative_error(t_matrix_oracle(pi / 4).t, exact);
    CHECK(e_fine < 0.6 * e_coarse);
}

TEST_CASE("oracle far field and added mass") {
    const NeumannSolution sol = t_matrix_oracle(pi / 3);
    const std::size_t n = sol.grid.size();
    // boundary data is the linear field
    const double c = std::cos(pi / 3), s = std::sin(pi / 3);
    CHECK(sol.u1[0] == doctest::Approx(sol.grid[0] + c * sol.grid[0]));
    CHECK(sol.u2[n - 1] == doctest::Approx(s * sol.grid[0]));
    // nodes strictly inside the rhombus carry no value
    CHECK(std::isnan(sol.u1[n / 2 + (n / 2) * n]));
    // T minus the rhombus area is the positive semidefinite added-mass matrix
    const Mat2 added{sol.t.t11 - s, sol.t.t12, sol.t.t12, sol.t.t22 - s};
    CHECK(added.symmetric_eigenvalues().first > 0.0);
}

TEST_CASE("oracle rejects bad input") {
    CHECK_THROWS_AS(t_matrix_oracle(0.0), ValidationError);
    NeumannOracleOptions bad;
    bad.spacing = 0.03;
    CHECK_THROWS_AS(t_matrix_oracle(1.0, bad), ValidationError);
}
