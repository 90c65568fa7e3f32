#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <tuple>

#include "needles/geometry.hpp"

using namespace needles;
using std::numbers::pi;

namespace {

/// Overlap of two needles checking all nine periodic images of the second
/// centre, without any minimum-image reduction.
bool overlap_all_images(const NeedleConfig& a, const NeedleConfig& b, const Torus2& dom) {
    const auto [p1, q1] = needle_endpoints(a);
    for (int i = -1; i <= 1; ++i) {
        for (int j = -1; j <= 1; ++j) {
            const Vec2 shift{i * dom.lx(), j * dom.ly()};
            const NeedleConfig img(b.centre() + shift, b.theta(), b.eps());
            const auto [p2, q2] = needle_endpoints(img);
            if (segments_intersect(p1, q1, p2, q2, kGrazingTolerance * a.eps())) return true;
        }
    }
    return false;
}

}  // namespace

TEST_CASE("needle endpoints") {
    auto [a, b] = needle_endpoints(NeedleConfig({0, 0}, 0.0, 1.0));
    CHECK(a.x == doctest::Approx(-0.5));
    CHECK(b.x == doctest::Approx(0.5));
    CHECK(a.y == 0.0);

    std::tie(a, b) = needle_endpoints(NeedleConfig({0, 0}, pi / 2, 1.0));
    CHECK(a.x == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(a.y == doctest::Approx(-0.5));
    CHECK(b.y == doctest::Approx(0.5));

    std::tie(a, b) = needle_endpoints(NeedleConfig({0, 0}, pi / 4, 1.0));
    CHECK(b.x == doctest::Approx(std::sqrt(2.0) / 4));
    CHECK(b.y == doctest::Approx(std::sqrt(2.0) / 4));
    CHECK(a.x == doctest::Approx(-std::sqrt(2.0) / 4));
}

TEST_CASE("angles are reduced at construction") {
    CHECK(NeedleConfig({0, 0}, pi + 0.25, 1.0).theta() == doctest::Approx(0.25));
    CHECK(NeedleConfig({0, 0}, -0.25, 1.0).theta() == doctest::Approx(pi - 0.25));
    CHECK(reduce_angle(-1e-300) < pi);
    CHECK_THROWS(NeedleConfig({0, 0}, 0.0, 0.0));
}

TEST_CASE("minimum image lies in [-L/2, L/2)") {
    const Torus2 dom(2.0, 3.0);
    const Vec2 d = dom.minimum_image({1.0, -1.5});
    CHECK(d.x == doctest::Approx(-1.0));
    CHECK(d.y == doctest::Approx(-1.5));
    const Vec2 e = dom.minimum_image({5.3, 7.4});
    CHECK(e.x == doctest::Approx(-0.7));
    CHECK(e.y == doctest::Approx(1.4));
}

TEST_CASE("overlap examples") {
    const Torus2 dom;
    CHECK(needles_overlap(NeedleConfig({0, 0}, 0.0, 1.0), NeedleConfig({0.5, 0}, 0.0, 1.0), dom));
    CHECK_FALSE(needles_overlap(NeedleConfig({1, 1}, 0.0, 0.5), NeedleConfig({2, 1}, pi / 2, 0.5), dom));
    // crossing at the midpoints
    CHECK(needles_overlap(NeedleConfig({1, 1}, 0.0, 1.0), NeedleConfig({1, 1}, pi / 2, 1.0), dom));
    // T-junction touching exactly counts as overlap
    CHECK(needles_overlap(NeedleConfig({0, 0}, 0.0, 1.0), NeedleConfig({0.5, 0.5}, pi / 2, 1.0), dom));
    // straddling the periodic boundary
    CHECK(needles_overlap(NeedleConfig({0.05, 1.0}, 0.0, 0.5), NeedleConfig({3.1, 1.0}, 0.3, 0.5), dom));
}

TEST_CASE("overlap agrees with nine-image oracle and is symmetric") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ux(0.0, pi), ut(0.0, pi);
    const Torus2 dom;
    int hits = 0;
    for (int n = 0; n < 20000; ++n) {
        const NeedleConfig a({ux(rng), ux(rng)}, ut(rng), 0.9);
        // bias the second centre towards the boundary region to exercise wrapping
        Vec2 c = a.centre() + Vec2{ux(rng) - pi / 2, ux(rng) - pi / 2};
        const NeedleConfig b(dom.wrap(c), ut(rng), 0.9);
        const bool fast = needles_overlap(a, b, dom);
        hits += fast;
        REQUIRE(fast == overlap_all_images(a, b, dom));
        REQUIRE(fast == needles_overlap(b, a, dom));
    }
    CHECK(hits > 100);
}

TEST_CASE("excluded rhombus vertices and area") {
    const Rhombus r = excluded_rhombus(NeedleConfig({0, 0}, 0.0, 1.0), pi / 2);
    const Vec2 expected[4] = {{-0.5, 0.5}, {0.5, 0.5}, {0.5, -0.5}, {-0.5, -0.5}};
    for (int i = 0; i < 4; ++i) {
        CHECK(r.vertices[i].x == doctest::Approx(expected[i].x));
        CHECK(r.vertices[i].y == doctest::Approx(expected[i].y));
    }
    CHECK(rhombus_area(r) == doctest::Approx(1.0));
    for (double t : {pi / 6, pi / 3, 3 * pi / 4}) {
        CHECK(rhombus_area(excluded_rhombus(NeedleConfig({0.3, 0.2}, 1.1, 1.0), t)) == doctest::Approx(std::sin(t)));
    }
    CHECK(rhombus_area(excluded_rhombus(NeedleConfig({0, 0}, 0.0, 2.0), pi / 4)) == doctest::Approx(2 * std::sqrt(2.0)));

    const Rhombus d = excluded_rhombus(NeedleConfig({0, 0}, 0.0, 1.0), 0.0);
    CHECK(d.degenerate);
    CHECK(rhombus_area(d) == 0.0);
    CHECK(norm(d.vertices[1] - d.vertices[3]) == doctest::Approx(2.0));

    Rhombus square{{Vec2{0, 0}, Vec2{0, 1}, Vec2{1, 1}, Vec2{1, 0}}, false};
    CHECK(rhombus_area(square) == doctest::Approx(1.0));
}

TEST_CASE("rhombus edges: AB and DC horizontal, opposite edges parallel") {
    for (double t : {0.2, 1.0, 2.5}) {
        const auto& v = excluded_rhombus(NeedleConfig({0, 0}, 0.0, 1.0), t).vertices;
        CHECK(v[1].y - v[0].y == doctest::Approx(0.0));
        CHECK(v[2].y - v[3].y == doctest::Approx(0.0));
        CHECK(cross(v[1] - v[0], v[2] - v[3]) == doctest::Approx(0.0));
        CHECK(cross(v[2] - v[1], v[3] - v[0]) == doctest::Approx(0.0));
    }
}

TEST_CASE("rhombus vertices rotate with the first needle") {
    const double t1 = 0.4, delta = 1.3, rel = 2.0;
    const Rhombus r0 = excluded_rhombus(NeedleConfig({0, 0}, t1, 1.0), rel);
    const Rhombus r1 = excluded_rhombus(NeedleConfig({0, 0}, t1 + delta, 1.0), rel);
    for (int i = 0; i < 4; ++i) {
        const Vec2 rot = rotate(r0.vertices[i], delta);
        CHECK(r1.vertices[i].x == doctest::Approx(rot.x));
        CHECK(r1.vertices[i].y == doctest::Approx(rot.y));
    }
}

TEST_CASE("overlap iff the second centre lies in the excluded rhombus") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.2, 1.2), ut(0.0, pi);
    const Torus2 dom(10.0, 10.0);
    int mismatches = 0, inside = 0;
    for (int n = 0; n < 100000; ++n) {
        const NeedleConfig a({5.0, 5.0}, ut(rng), 1.0);
        const NeedleConfig b(a.centre() + Vec2{u(rng), u(rng)}, ut(rng), 1.0);
        const bool o = needles_overlap(a, b, dom);
        const bool in = rhombus_contains(excluded_rhombus(a, b.theta() - a.theta()), b.centre(), 1e-12);
        inside += in;
        mismatches += (o != in);
    }
    CHECK(mismatches == 0);
    CHECK(inside > 10000);
}

TEST_CASE("overlap is invariant under torus translation") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ux(0.0, pi), ut(0.0, pi);
    const Torus2 dom;
    for (int n = 0; n < 2000; ++n) {
        const Vec2 c1{ux(rng), ux(rng)}, c2{ux(rng), ux(rng)}, s{ux(rng), ux(rng)};
        const double t1 = ut(rng), t2 = ut(rng);
        const bool before = needles_overlap(NeedleConfig(c1, t1, 1.2), NeedleConfig(c2, t2, 1.2), dom);
        const bool after =
            needles_overlap(NeedleConfig(dom.wrap(c1 + s), t1, 1.2), NeedleConfig(dom.wrap(c2 + s), t2, 1.2), dom);
        REQUIRE(before == after);
    }
}

TEST_CASE("Monte-Carlo excluded volume equals 2 eps^2") {
    std::mt19937_64 rng(5);
    const double eps = 0.8, half = 1.0;  // sample x2 in a square of side 2 around x1
    std::uniform_real_distribution<double> u(-half, half), ut(0.0, pi);
    const Torus2 dom(10.0, 10.0);
    const int n = 400000;
    int hits = 0;
    const NeedleConfig a({5.0, 5.0}, 0.7, eps);
    for (int i = 0; i < n; ++i) {
        hits += needles_overlap(a, NeedleConfig(a.centre() + Vec2{u(rng), u(rng)}, ut(rng), eps), dom);
    }
    const double p = static_cast<double>(hits) / n;
    const double box = 4.0 * half * half * pi;
    const double estimate = p * box;
    const double stderr_ = box * std::sqrt(p * (1 - p) / n);
    CHECK(std::abs(estimate - 2 * eps * eps) < 3 * stderr_);
}
