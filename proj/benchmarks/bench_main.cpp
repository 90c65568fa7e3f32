#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>

#include "needles/conformal.hpp"
#include "needles/geometry.hpp"
#include "needles/homogeneous.hpp"
#include "needles/hydro.hpp"
#include "needles/kinetic.hpp"
#include "needles/particle.hpp"

using namespace needles;
using std::numbers::pi;

static void BM_NeedlesOverlap(benchmark::State& state) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Torus2 box(pi, pi);
    std::vector<NeedleConfig> a, b;
    for (int k = 0; k < 1024; ++k) {
        a.emplace_back(Vec2{pi * u(rng), pi * u(rng)}, pi * u(rng), 0.5);
        b.emplace_back(Vec2{pi * u(rng), pi * u(rng)}, pi * u(rng), 0.5);
    }
    std::size_t k = 0, hits = 0;
    for (auto _ : state) {
        hits += needles_overlap(a[k & 1023], b[k & 1023], box);
        ++k;
    }
    benchmark::DoNotOptimize(hits);
}
BENCHMARK(BM_NeedlesOverlap);

static void BM_TMatrixQuadrature(benchmark::State& state) {
    double theta = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(t_matrix(theta));
        theta = theta < 3.0 ? theta + 0.01 : 0.1;
    }
}
BENCHMARK(BM_TMatrixQuadrature);

static void BM_TMatrixClosedForm(benchmark::State& state) {
    double theta = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(t_matrix(sc_constant(theta)));
        theta = theta < 3.0 ? theta + 0.01 : 0.1;
    }
}
BENCHMARK(BM_TMatrixClosedForm);

static void BM_TTableLookup(benchmark::State& state) {
    const TTable table(65);
    double theta = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(table(theta));
        theta = theta < 3.0 ? theta + 0.01 : 0.1;
    }
}
BENCHMARK(BM_TTableLookup);

static void BM_MkvRhs(benchmark::State& state) {
    const auto m = static_cast<std::size_t>(state.range(0));
    const AngularDensity p = AngularDensity::from_function(m, [](double t) { return 1.0 / pi + 0.05 * std::cos(2 * t); });
    for (auto _ : state) benchmark::DoNotOptimize(mkv_rhs(p, 6.0, 1.0));
}
BENCHMARK(BM_MkvRhs)->Arg(256)->Arg(1024);

static void BM_KineticRhs(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    KineticGrid g;
    g.nx = g.ny = g.ntheta = n;
    g.lx = g.ly = 2 * pi;
    const PhaseDensity p = make_phase_density(g, [](double x, double y, double t) {
        return (1.0 + 0.3 * std::cos(x) * std::sin(y)) * (1.0 + 0.3 * std::cos(2 * t));
    });
    KineticParams params;
    params.phi = 5.0;
    params.quadrature = state.range(1) ? CollisionQuadrature::spectral : CollisionQuadrature::trapezoid;
    for (auto _ : state) benchmark::DoNotOptimize(rhs(p, params));
}
BENCHMARK(BM_KineticRhs)->Args({16, 1})->Args({32, 1})->Args({16, 0})->Unit(benchmark::kMillisecond);

static void BM_HydroRhs(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const SpatialDensity rho = make_spatial_density(n, n, 2 * pi, 2 * pi, [](double x, double y) { return 1.0 + 0.3 * std::cos(x) * std::cos(y); });
    const HydroParams params{1.0, 1.2, {}};
    for (auto _ : state) benchmark::DoNotOptimize(hydro_rhs(rho, params));
}
BENCHMARK(BM_HydroRhs)->Arg(64)->Arg(256);

static void BM_ParticleStep(benchmark::State& state) {
    SimParams params;
    params.n = static_cast<int>(state.range(0));
    params.box = Torus2(pi, pi);
    params.eps = eps_for_phi(3.0 * pi, params.n, params.box);
    params.d_t = 0.01;
    params.seed = 3;
    params.search = state.range(1) ? NeighborSearch::cells : NeighborSearch::all_pairs;
    ParticleState s = sample_admissible_initial(params);
    for (auto _ : state) benchmark::DoNotOptimize(step(s, params));
    state.SetItemsProcessed(state.iterations() * params.n);
}
BENCHMARK(BM_ParticleStep)->Args({200, 1})->Args({200, 0})->Args({2000, 1})->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
