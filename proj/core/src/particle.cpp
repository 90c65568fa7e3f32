#include "needles/particle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <sstream>
#include <thread>

#include "needles/error.hpp"
#include "needles/rng.hpp"

namespace needles {

namespace {

constexpr double pi = std::numbers::pi;
// stream tags that never collide with a particle index
constexpr std::uint64_t kPermutationStream = ~0ULL;
constexpr std::uint64_t kInitialStream = ~0ULL - 1;

double periodic_fraction(double v, double period, int n, int& i0) {
    double u = v / period * n;
    u -= n * std::floor(u / n);
    i0 = std::min(static_cast<int>(u), n - 1);
    return u - i0;
}

}  // namespace

DriftValue evaluate_drift(const DriftSpec& drift, const Torus2& box, Vec2 x, double theta) {
    if (std::holds_alternative<NoDrift>(drift)) return {};
    if (const auto* u = std::get_if<UniformDrift>(&drift)) return {u->f_t, u->f_r};
    const auto& t = std::get<TabulatedDrift>(drift);
    int i0 = 0, j0 = 0, k0 = 0;
    const double fx = periodic_fraction(x.x, box.lx(), t.nx, i0);
    const double fy = periodic_fraction(x.y, box.ly(), t.ny, j0);
    const double ft = periodic_fraction(theta, pi, t.ntheta, k0);
    DriftValue out;
    for (int di = 0; di < 2; ++di) {
        for (int dj = 0; dj < 2; ++dj) {
            for (int dk = 0; dk < 2; ++dk) {
                const double w = (di ? fx : 1 - fx) * (dj ? fy : 1 - fy) * (dk ? ft : 1 - ft);
                const std::size_t s = (static_cast<std::size_t>((i0 + di) % t.nx) * static_cast<std::size_t>(t.ny) +
                                       static_cast<std::size_t>((j0 + dj) % t.ny)) *
                                          static_cast<std::size_t>(t.ntheta) +
                                      static_cast<std::size_t>((k0 + dk) % t.ntheta);
                if (!t.f_t.empty()) out.f_t = out.f_t + w * t.f_t[s];
                if (!t.f_r.empty()) out.f_r += w * t.f_r[s];
            }
        }
    }
    return out;
}

double SimParams::phi() const { return (n - 1) * eps * eps / box.area(); }

double eps_for_phi(double phi, int n, const Torus2& box) {
    detail::require(n >= 2, "N must be >= 2");
    detail::require(std::isfinite(phi) && phi >= 0.0, "phi must be finite and non-negative");
    return std::sqrt(phi * box.area() / (n - 1));
}

void SimParams::validate() const {
    detail::require(n >= 1, "N must be >= 1");
    detail::require(std::isfinite(eps) && eps >= 0.0, "eps must be finite and non-negative");
    detail::require(eps < 0.5 * std::min(box.lx(), box.ly()), "eps must be below half the box size");
    detail::require(std::isfinite(d_t) && d_t >= 0.0, "D_T must be finite and non-negative");
    detail::require(std::isfinite(d_r) && d_r >= 0.0, "D_R must be finite and non-negative");
    detail::require(std::isfinite(dt) && dt > 0.0, "dt must be positive");
    if (const auto* t = std::get_if<TabulatedDrift>(&drift)) {
        detail::require(t->nx >= 1 && t->ny >= 1 && t->ntheta >= 1, "drift: table dimensions must be positive");
        const std::size_t size = static_cast<std::size_t>(t->nx) * static_cast<std::size_t>(t->ny) * static_cast<std::size_t>(t->ntheta);
        detail::require(t->f_t.empty() || t->f_t.size() == size, "drift: f_T table size does not match its grid");
        detail::require(t->f_r.empty() || t->f_r.size() == size, "drift: f_R table size does not match its grid");
    }
}

std::vector<std::string> SimParams::warnings() const {
    std::vector<std::string> out;
    const double step_t = std::sqrt(2.0 * d_t * dt);
    if (eps > 0.0 && step_t > 0.25 * eps) {
        std::ostringstream msg;
        msg << "dt: translational step " << step_t << " exceeds eps/4 = " << 0.25 * eps;
        out.push_back(msg.str());
    }
    return out;
}

NeighborGrid::NeighborGrid(const Torus2& box, double eps, const std::vector<NeedleConfig>& needles, bool cells,
                           std::size_t expected)
    : box_(box) {
    // side >= eps with a margin for the grazing tolerance
    const double side = eps * (1.0 + 1e-9);
    nx_ = side > 0.0 ? static_cast<int>(std::floor(box.lx() / side)) : 1 << 20;
    ny_ = side > 0.0 ? static_cast<int>(std::floor(box.ly() / side)) : 1 << 20;
    // more cells than about 2 N only costs rebuild time
    const int cap = std::max(3, static_cast<int>(std::ceil(std::sqrt(2.0 * static_cast<double>(std::max<std::size_t>(needles.size(), expected))))));
    nx_ = std::min(nx_, cap);
    ny_ = std::min(ny_, cap);
    if (!cells) nx_ = ny_ = 1;
    if (uses_cells()) cells_.resize(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_));
    for (std::size_t i = 0; i < needles.size(); ++i) insert(static_cast<int>(i), needles[i].centre());
}

int NeighborGrid::cell_of(Vec2 p) const {
    const Vec2 w = box_.wrap(p);
    const int i = std::min(static_cast<int>(w.x / box_.lx() * nx_), nx_ - 1);
    const int j = std::min(static_cast<int>(w.y / box_.ly() * ny_), ny_ - 1);
    return i * ny_ + j;
}

void NeighborGrid::insert(int i, Vec2 p) {
    if (uses_cells()) cells_[static_cast<std::size_t>(cell_of(p))].push_back(i);
}

void NeighborGrid::move(int i, Vec2 before, Vec2 now) {
    if (!uses_cells()) return;
    const int a = cell_of(before), b = cell_of(now);
    if (a == b) return;
    auto& from = cells_[static_cast<std::size_t>(a)];
    const auto it = std::find(from.begin(), from.end(), i);
    detail::require(it != from.end(), "NeighborGrid::move: needle not in its cell");
    *it = from.back();
    from.pop_back();
    cells_[static_cast<std::size_t>(b)].push_back(i);
}

bool NeighborGrid::overlaps_any(const NeedleConfig& c, int skip, const std::vector<NeedleConfig>& needles) const {
    if (!uses_cells()) {
        for (std::size_t j = 0; j < needles.size(); ++j) {
            if (static_cast<int>(j) != skip && needles_overlap(c, needles[j], box_)) return true;
        }
        return false;
    }
    const int home = cell_of(c.centre());
    const int ci = home / ny_, cj = home % ny_;
    for (int di = -1; di <= 1; ++di) {
        const int ii = (ci + di + nx_) % nx_;
        for (int dj = -1; dj <= 1; ++dj) {
            const int jj = (cj + dj + ny_) % ny_;
            for (int j : cells_[static_cast<std::size_t>(ii * ny_ + jj)]) {
                if (j != skip && needles_overlap(c, needles[static_cast<std::size_t>(j)], box_)) return true;
            }
        }
    }
    return false;
}

ParticleState sample_admissible_initial(const SimParams& params, InitialStats* stats, std::uint64_t max_attempts) {
    params.validate();
    CounterRng rng(params.seed, kInitialStream);
    ParticleState state;
    state.needles.reserve(static_cast<std::size_t>(params.n));
    NeighborGrid grid(params.box, params.eps, {}, params.search == NeighborSearch::cells, static_cast<std::size_t>(params.n));
    InitialStats local;
    std::uint64_t total = 0;
    for (int k = 0; k < params.n; ++k) {
        for (;;) {
            if (++total > max_attempts) {
                std::ostringstream msg;
                msg << "sample_admissible_initial: saturated after " << max_attempts << " attempts with " << k << " of "
                    << params.n << " needles placed (phi = " << params.phi() << ")";
                throw NumericalError(msg.str());
            }
            const Vec2 x{rng.uniform() * params.box.lx(), rng.uniform() * params.box.ly()};
            const NeedleConfig c(x, rng.uniform() * pi, params.eps);
            if (k > 0) ++local.attempts;
            if (!grid.overlaps_any(c, -1, state.needles)) {
                grid.insert(k, x);
                state.needles.push_back(c);
                break;
            }
            ++local.rejections;
        }
    }
    state.displacement.assign(state.needles.size(), Vec2{});
    state.rotation.assign(state.needles.size(), 0.0);
    if (stats) *stats = local;
    return state;
}

bool is_admissible(const ParticleState& state, const Torus2& box) {
    for (std::size_t i = 0; i < state.needles.size(); ++i) {
        for (std::size_t j = i + 1; j < state.needles.size(); ++j) {
            if (needles_overlap(state.needles[i], state.needles[j], box)) return false;
        }
    }
    return true;
}

StepStats step(ParticleState& state, const SimParams& params) {
    const int n = static_cast<int>(state.needles.size());
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    CounterRng perm_rng(params.seed, state.steps, kPermutationStream);
    std::shuffle(order.begin(), order.end(), perm_rng);

    NeighborGrid grid(params.box, params.eps, state.needles, params.search == NeighborSearch::cells);
    const double st = std::sqrt(2.0 * params.d_t * params.dt);
    const double sr = std::sqrt(2.0 * params.d_r * params.dt);

    StepStats stats;
    for (int i : order) {
        const auto ui = static_cast<std::size_t>(i);
        CounterRng rng(params.seed, state.steps, ui);
        std::normal_distribution<double> normal;
        const double xi1 = normal(rng), xi2 = normal(rng), eta = normal(rng);
        const NeedleConfig& old = state.needles[ui];
        const DriftValue f = evaluate_drift(params.drift, params.box, old.centre(), old.theta());
        const Vec2 dx{st * xi1 + f.f_t.x * params.dt, st * xi2 + f.f_t.y * params.dt};
        const double dtheta = sr * eta + f.f_r * params.dt;
        const NeedleConfig cand(params.box.wrap(old.centre() + dx), old.theta() + dtheta, params.eps);
        ++stats.proposed;
        if (grid.overlaps_any(cand, i, state.needles)) continue;
        grid.move(i, old.centre(), cand.centre());
        state.needles[ui] = cand;
        state.displacement[ui] = state.displacement[ui] + dx;
        state.rotation[ui] += dtheta;
        ++stats.accepted;
    }
    ++state.steps;
    state.time += params.dt;
    return stats;
}

double nematic_order(const std::vector<NeedleConfig>& needles) {
    if (needles.empty()) return 0.0;
    std::complex<double> z = 0.0;
    for (const auto& c : needles) z += std::polar(1.0, 2.0 * c.theta());
    return std::abs(z) / static_cast<double>(needles.size());
}

namespace {

void record(ObservableSeries& s, const ParticleState& state, const Torus2& box, double acceptance) {
    const double n = static_cast<double>(state.needles.size());
    s.times.push_back(state.time);
    s.nematic_order.push_back(nematic_order(state.needles));
    std::vector<double> ang(static_cast<std::size_t>(s.angular_bins), 0.0);
    std::vector<double> sp(static_cast<std::size_t>(s.spatial_bins) * static_cast<std::size_t>(s.spatial_bins), 0.0);
    double msd_t = 0.0, msd_r = 0.0;
    for (std::size_t i = 0; i < state.needles.size(); ++i) {
        const NeedleConfig& c = state.needles[i];
        const int a = std::min(static_cast<int>(c.theta() / pi * s.angular_bins), s.angular_bins - 1);
        ang[static_cast<std::size_t>(a)] += 1.0 / n;
        const Vec2 w = box.wrap(c.centre());
        const int bx = std::min(static_cast<int>(w.x / box.lx() * s.spatial_bins), s.spatial_bins - 1);
        const int by = std::min(static_cast<int>(w.y / box.ly() * s.spatial_bins), s.spatial_bins - 1);
        sp[static_cast<std::size_t>(bx * s.spatial_bins + by)] += 1.0 / n;
        msd_t += dot(state.displacement[i], state.displacement[i]) / n;
        msd_r += state.rotation[i] * state.rotation[i] / n;
    }
    s.angular_hist.push_back(std::move(ang));
    s.spatial_hist.push_back(std::move(sp));
    s.msd_translation.push_back(msd_t);
    s.msd_rotation.push_back(msd_r);
    s.acceptance.push_back(acceptance);
}

}  // namespace

ObservableSeries run_from(ParticleState& state, const SimParams& params, double t_end, double observe_every, const RunOptions& o) {
    params.validate();
    detail::require(std::isfinite(t_end) && t_end >= 0.0, "t_end must be non-negative");
    detail::require(std::isfinite(observe_every) && observe_every > 0.0, "observe_every must be positive");
    detail::require(o.angular_bins >= 1 && o.spatial_bins >= 1, "histogram bin counts must be positive");
    detail::require(state.needles.size() == state.displacement.size() && state.needles.size() == state.rotation.size(),
                    "particle state arrays differ in length");
    const auto total = static_cast<std::uint64_t>(std::llround(t_end / params.dt));
    const auto every = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(observe_every / params.dt)));
    ObservableSeries s;
    s.angular_bins = o.angular_bins;
    s.spatial_bins = o.spatial_bins;
    // no proposals yet at the first sample
    record(s, state, params.box, 1.0);
    std::uint64_t proposed = 0, accepted = 0;
    for (std::uint64_t k = 1; k <= total; ++k) {
        const StepStats st = step(state, params);
        proposed += static_cast<std::uint64_t>(st.proposed);
        accepted += static_cast<std::uint64_t>(st.accepted);
        if (k % every == 0 || k == total) {
            record(s, state, params.box, proposed ? static_cast<double>(accepted) / static_cast<double>(proposed) : 1.0);
            proposed = accepted = 0;
        }
    }
    return s;
}

ObservableSeries run(const SimParams& params, double t_end, double observe_every, const RunOptions& options) {
    ParticleState state = sample_admissible_initial(params);
    return run_from(state, params, t_end, observe_every, options);
}

std::vector<ObservableSeries> run_ensemble(const SimParams& params, int realisations, double t_end, double observe_every,
                                           int threads, const RunOptions& options) {
    detail::require(realisations >= 1, "realisations must be >= 1");
    params.validate();
    std::vector<ObservableSeries> out(static_cast<std::size_t>(realisations));
    std::vector<std::exception_ptr> errors(out.size());
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int r = next++; r < realisations; r = next++) {
            try {
                SimParams p = params;
                p.seed = params.seed + static_cast<std::uint64_t>(r);
                out[static_cast<std::size_t>(r)] = run(p, t_end, observe_every, options);
            } catch (...) {
                errors[static_cast<std::size_t>(r)] = std::current_exception();
            }
        }
    };
    const int workers = std::clamp(threads, 1, realisations);
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

McEstimate estimate_excluded_volume(double eps, std::size_t n_samples, std::mt19937_64& rng) {
    detail::require(std::isfinite(eps) && eps >= 0.0, "eps must be finite and non-negative");
    detail::require(n_samples >= 10000, "n_samples must be >= 1e4");
    if (eps == 0.0) return {};
    // overlapping centres lie within eps of each other
    std::uniform_real_distribution<double> off(-eps, eps), ang(0.0, pi);
    std::size_t hits = 0;
    for (std::size_t k = 0; k < n_samples; ++k) {
        const Vec2 d{off(rng), off(rng)};
        if (needles_overlap_offset(d, ang(rng), ang(rng), eps)) ++hits;
    }
    const double f = static_cast<double>(hits) / static_cast<double>(n_samples);
    const double box = 4.0 * eps * eps * pi;
    return {box * f, box * std::sqrt(f * (1.0 - f) / static_cast<double>(n_samples))};
}

McEstimate estimate_excluded_area(double eps, double theta_rel, std::size_t n_samples, std::mt19937_64& rng) {
    detail::require(std::isfinite(eps) && eps >= 0.0, "eps must be finite and non-negative");
    detail::require(std::isfinite(theta_rel), "theta_rel must be finite");
    detail::require(n_samples >= 10000, "n_samples must be >= 1e4");
    if (eps == 0.0) return {};
    std::uniform_real_distribution<double> off(-eps, eps), ang(0.0, pi);
    std::size_t hits = 0;
    for (std::size_t k = 0; k < n_samples; ++k) {
        const Vec2 d{off(rng), off(rng)};
        const double t1 = ang(rng);
        if (needles_overlap_offset(d, t1, t1 + theta_rel, eps)) ++hits;
    }
    const double f = static_cast<double>(hits) / static_cast<double>(n_samples);
    const double box = 4.0 * eps * eps;
    return {box * f, box * std::sqrt(f * (1.0 - f) / static_cast<double>(n_samples))};
}

}  // namespace needles
