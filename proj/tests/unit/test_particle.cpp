#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "needles/error.hpp"
#include "needles/particle.hpp"
#include "needles/rng.hpp"

using namespace needles;
using std::numbers::pi;

namespace {

SimParams small_params(int n, double eps, double l = 5.0) {
    SimParams p;
    p.n = n;
    p.eps = eps;
    p.box = Torus2(l, l);
    p.dt = 1e-3;
    return p;
}

}  // namespace

TEST_CASE("counter generator streams are reproducible and distinct") {
    CounterRng a(3, 10, 4), b(3, 10, 4), c(3, 10, 5), d(4, 10, 4);
    const auto x = a();
    CHECK(x == b());
    CHECK(x != c());
    CHECK(x != d());
    CounterRng u(1, 2, 3);
    double sum = 0.0;
    for (int k = 0; k < 100000; ++k) {
        const double v = u.uniform();
        REQUIRE(v >= 0.0);
        REQUIRE(v < 1.0);
        sum += v;
    }
    CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("reduced density and its inverse") {
    SimParams p = small_params(200, 0.0, pi);
    p.eps = eps_for_phi(3 * pi, 200, p.box);
    CHECK(p.phi() == doctest::Approx(3 * pi).epsilon(1e-14));
    CHECK(p.eps == doctest::Approx(std::sqrt(3 * pi * pi * pi / 199)).epsilon(1e-14));
}

TEST_CASE("parameter validation names the field") {
    SimParams p = small_params(10, 0.1);
    p.dt = 0.0;
    CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("dt"), ValidationError);
    p = small_params(10, 3.0);
    CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("eps"), ValidationError);
    p = small_params(10, 0.1);
    p.d_r = -1.0;
    CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("D_R"), ValidationError);
    p = small_params(10, 0.1);
    p.drift = TabulatedDrift{2, 2, 2, std::vector<Vec2>(3), {}};
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = small_params(10, 0.01);
    p.dt = 1.0;
    CHECK(p.warnings().size() == 1);
    CHECK(small_params(10, 0.5).warnings().empty());
}

TEST_CASE("tabulated drift interpolates trilinearly and periodically") {
    TabulatedDrift t{4, 4, 4, {}, {}};
    t.f_t.resize(64);
    t.f_r.resize(64);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k) {
                const auto s = static_cast<std::size_t>((i * 4 + j) * 4 + k);
                t.f_t[s] = {static_cast<double>(i), static_cast<double>(j)};
                t.f_r[s] = k;
            }
    const Torus2 box(4.0, 8.0);
    const DriftSpec spec = t;
    const DriftValue v = evaluate_drift(spec, box, {1.5, 3.0}, 0.25 * pi * 2.5);
    CHECK(v.f_t.x == doctest::Approx(1.5));
    CHECK(v.f_t.y == doctest::Approx(1.5));
    CHECK(v.f_r == doctest::Approx(2.5));
    // between the last node and the wrapped first node
    CHECK(evaluate_drift(spec, box, {3.5, 0.0}, 0.0).f_t.x == doctest::Approx(1.5));
    CHECK(evaluate_drift(DriftSpec{UniformDrift{{1.0, 2.0}, 3.0}}, box, {}, 0.0).f_r == 3.0);
    CHECK(evaluate_drift(DriftSpec{}, box, {}, 0.0).f_t == Vec2{});
}

TEST_CASE("initial sampling") {
    SimParams one = small_params(1, 0.4);
    const ParticleState s1 = sample_admissible_initial(one);
    CHECK(s1.needles.size() == 1);

    SimParams p = small_params(100, 0.4);
    const ParticleState s = sample_admissible_initial(p);
    CHECK(s.needles.size() == 100);
    CHECK(is_admissible(s, p.box));
    CHECK(s.displacement.size() == 100);

    SimParams tiny = small_params(50, 1e-9);
    InitialStats st;
    sample_admissible_initial(tiny, &st);
    CHECK(st.rejections == 0);

    SimParams jammed = small_params(2000, 2.4);
    CHECK_THROWS_AS(sample_admissible_initial(jammed, nullptr, 20000), NumericalError);
}

TEST_CASE("two-needle insertion acceptance matches the excluded volume") {
    // P(reject) = 2 eps^2 / (pi |box|)
    SimParams p = small_params(2, 1.0, 4.0);
    const double expected = 1.0 - 2.0 / (pi * 16.0);
    std::uint64_t attempts = 0, rejections = 0;
    for (std::uint64_t d = 0; d < 100000; ++d) {
        p.seed = 1000 + d;
        InitialStats st;
        sample_admissible_initial(p, &st);
        attempts += st.attempts;
        rejections += st.rejections;
    }
    const double rate = 1.0 - static_cast<double>(rejections) / static_cast<double>(attempts);
    const double sd = std::sqrt(expected * (1 - expected) / static_cast<double>(attempts));
    CHECK(std::abs(rate - expected) < 3 * sd);
}

TEST_CASE("free needle diffuses with the prescribed constants") {
    SimParams p = small_params(1, 0.1, 100.0);
    p.d_t = 0.7;
    p.d_r = 1.3;
    p.dt = 0.01;
    const auto runs = run_ensemble(p, 10000, 1.0, 1.0, 2);
    double msd_t = 0.0, msd_r = 0.0;
    for (const auto& r : runs) {
        msd_t += r.msd_translation.back() / 10000.0;
        msd_r += r.msd_rotation.back() / 10000.0;
    }
    CHECK(msd_t == doctest::Approx(4 * p.d_t).epsilon(0.05));
    CHECK(msd_r == doctest::Approx(2 * p.d_r).epsilon(0.05));
}

TEST_CASE("constant drift shifts the mean displacement") {
    SimParams p = small_params(1, 0.1, 100.0);
    p.d_t = 0.0;
    p.d_r = 0.0;
    p.dt = 0.01;
    p.drift = UniformDrift{{0.5, -0.25}, 0.2};
    ParticleState s = sample_admissible_initial(p);
    for (int k = 0; k < 100; ++k) step(s, p);
    CHECK(s.displacement[0].x == doctest::Approx(0.5));
    CHECK(s.displacement[0].y == doctest::Approx(-0.25));
    CHECK(s.rotation[0] == doctest::Approx(0.2));
    CHECK(s.time == doctest::Approx(1.0));
}

TEST_CASE("needles in contact never overlap") {
    SimParams p = small_params(2, 1.0, 2.5);
    p.dt = 1e-3;
    ParticleState s;
    // crossing would require passing through each other
    s.needles = {NeedleConfig({1.0, 1.0}, 0.0, 1.0), NeedleConfig({1.0, 1.0 + 1e-6}, 0.0, 1.0)};
    s.displacement.assign(2, Vec2{});
    s.rotation.assign(2, 0.0);
    REQUIRE(is_admissible(s, p.box));
    std::uint64_t accepted = 0, bad = 0;
    for (int k = 0; k < 1000000; ++k) {
        accepted += static_cast<std::uint64_t>(step(s, p).accepted);
        if (needles_overlap(s.needles[0], s.needles[1], p.box)) ++bad;
    }
    CHECK(bad == 0);
    CHECK(accepted > 1000000);
    CHECK(accepted < 2000000);
}

TEST_CASE("cell list and all-pairs scan make identical decisions") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
        const double l = 3.0 + 3.0 * u(rng);
        const double eps = 0.2 + 0.6 * u(rng);
        const Torus2 box(l, l);
        const int n = 2 + static_cast<int>(62 * u(rng));
        std::vector<NeedleConfig> needles;
        for (int i = 0; i < n; ++i) needles.emplace_back(Vec2{l * u(rng), l * u(rng)}, pi * u(rng), eps);
        const NeighborGrid cells(box, eps, needles);
        const NeighborGrid scan(box, eps, needles, false);
        CHECK(cells.uses_cells());
        CHECK_FALSE(scan.uses_cells());
        for (int q = 0; q < 200; ++q) {
            const NeedleConfig c({l * u(rng), l * u(rng)}, pi * u(rng), eps);
            const int skip = static_cast<int>(n * u(rng));
            REQUIRE(cells.overlaps_any(c, skip, needles) == scan.overlaps_any(c, skip, needles));
        }
    }
    SimParams p = small_params(64, 0.6, 4.0);
    p.d_t = 0.5;
    ParticleState a = sample_admissible_initial(p);
    ParticleState b = a;
    SimParams q = p;
    q.search = NeighborSearch::all_pairs;
    for (int k = 0; k < 2000; ++k) {
        step(a, p);
        step(b, q);
    }
    bool same = true;
    for (std::size_t i = 0; i < a.needles.size(); ++i)
        same = same && a.needles[i].centre() == b.needles[i].centre() && a.needles[i].theta() == b.needles[i].theta();
    CHECK(same);
    CHECK(is_admissible(a, p.box));
}

TEST_CASE("runs are reproducible and histograms are normalised") {
    SimParams p = small_params(40, 0.5, 4.0);
    p.seed = 99;
    const auto r1 = run(p, 0.5, 0.1, {12, 4});
    const auto r2 = run(p, 0.5, 0.1, {12, 4});
    CHECK(r1.times.size() == 6);
    CHECK(r1.nematic_order == r2.nematic_order);
    CHECK(r1.msd_translation == r2.msd_translation);
    p.seed = 100;
    CHECK(run(p, 0.5, 0.1).nematic_order != r1.nematic_order);
    for (std::size_t k = 0; k < r1.times.size(); ++k) {
        double a = 0.0, s = 0.0;
        for (double v : r1.angular_hist[k]) a += v;
        for (double v : r1.spatial_hist[k]) s += v;
        CHECK(a == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(r1.nematic_order[k] >= 0.0);
        CHECK(r1.nematic_order[k] <= 1.0);
        CHECK(r1.acceptance[k] > 0.5);
    }
}

TEST_CASE("point-like needles decouple") {
    SimParams p = small_params(100, 1e-6, 2.0);
    p.d_r = 5.0;
    const auto r = run(p, 0.5, 0.5, {10, 4});
    CHECK(r.acceptance.back() == 1.0);
    // 100 independent uniform angles: chi^2 with 9 dof below its 99.9% point
    double chi2 = 0.0;
    for (double f : r.angular_hist.back()) chi2 += (100 * f - 10) * (100 * f - 10) / 10;
    CHECK(chi2 < 27.88);
}

TEST_CASE("excluded volume Monte Carlo") {
    std::mt19937_64 rng(8);
    const McEstimate v = estimate_excluded_volume(0.1, 1000000, rng);
    CHECK(std::abs(v.value - 0.02) < 3 * v.std_error);
    const McEstimate sq = estimate_excluded_area(0.3, pi / 2, 200000, rng);
    CHECK(std::abs(sq.value - 0.09) < 3 * sq.std_error);
    const McEstimate z = estimate_excluded_volume(0.0, 10000, rng);
    CHECK(z.value == 0.0);
    CHECK(z.std_error == 0.0);
    CHECK_THROWS_AS(estimate_excluded_volume(0.1, 10, rng), ValidationError);
}
