#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "needles/geometry.hpp"

namespace needles {

/// No external force.
struct NoDrift {};

/// Constant force on every needle.
struct UniformDrift {
    Vec2 f_t;
    double f_r = 0.0;
};

/// Force tabulated on a periodic (x, y, theta) grid over the box x [0, pi),
/// index (i * ny + j) * ntheta + k, trilinear interpolation.
struct TabulatedDrift {
    int nx = 0;
    int ny = 0;
    int ntheta = 0;
    std::vector<Vec2> f_t;
    std::vector<double> f_r;
};

using DriftSpec = std::variant<NoDrift, UniformDrift, TabulatedDrift>;

struct DriftValue {
    Vec2 f_t;
    double f_r = 0.0;
};

/// Force at a needle configuration; depends on that needle alone.
DriftValue evaluate_drift(const DriftSpec& drift, const Torus2& box, Vec2 x, double theta);

enum class NeighborSearch {
    cells,      ///< cell list, all-pairs fallback for fewer than 3 cells per side
    all_pairs,  ///< O(N) scan per move
};

struct SimParams {
    int n = 200;
    double eps = 0.1;
    double d_t = 1.0;
    double d_r = 1.0;
    double dt = 1e-4;
    Torus2 box;
    DriftSpec drift = NoDrift{};
    std::uint64_t seed = 1;
    NeighborSearch search = NeighborSearch::cells;

    /// (N - 1) eps^2 / |box|, the reduced density of the mean-field theory.
    double phi() const;
    /// Throws ValidationError naming the offending field.
    void validate() const;
    /// Soft problems, e.g. a translational step larger than eps / 4.
    std::vector<std::string> warnings() const;
};

/// eps that gives reduced density phi for N needles in `box`.
double eps_for_phi(double phi, int n, const Torus2& box);

struct ParticleState {
    std::vector<NeedleConfig> needles;
    std::vector<Vec2> displacement;  ///< unwrapped centre displacement since t = 0
    std::vector<double> rotation;    ///< unwrapped angle change since t = 0
    double time = 0.0;
    std::uint64_t steps = 0;
};

struct InitialStats {
    std::uint64_t attempts = 0;    ///< insertion attempts after the first needle
    std::uint64_t rejections = 0;
};

/// Sequential insertion: needle k is drawn uniformly until it overlaps none
/// of needles 0..k-1. Throws NumericalError after `max_attempts` draws in
/// total (saturation).
ParticleState sample_admissible_initial(const SimParams& params, InitialStats* stats = nullptr,
                                        std::uint64_t max_attempts = 1000000);

/// True when no pair of needles overlaps (O(N^2) scan).
bool is_admissible(const ParticleState& state, const Torus2& box);

/// Spatial hash with square cells of side >= eps: any overlapping pair sits
/// in the same or adjacent cells.
class NeighborGrid {
public:
    /// Stores every needle in `needles`. `cells = false` forces the all-pairs
    /// scan; `expected` sizes the grid when needles are inserted later.
    NeighborGrid(const Torus2& box, double eps, const std::vector<NeedleConfig>& needles, bool cells = true,
                 std::size_t expected = 0);

    bool uses_cells() const { return nx_ >= 3 && ny_ >= 3; }
    /// Does `c` overlap any stored needle other than `skip`?
    bool overlaps_any(const NeedleConfig& c, int skip, const std::vector<NeedleConfig>& needles) const;
    /// Registers needle `i` at position `p`.
    void insert(int i, Vec2 p);
    /// Keeps the cell of needle `i` in sync after it moved to `now`.
    void move(int i, Vec2 before, Vec2 now);

private:
    int cell_of(Vec2 p) const;

    Torus2 box_;
    int nx_ = 0;
    int ny_ = 0;
    std::vector<std::vector<int>> cells_;
};

struct StepStats {
    int proposed = 0;
    int accepted = 0;
};

/// One Euler-Maruyama sweep over a random permutation. Each proposal that
/// would overlap another needle is rejected. Deterministic in
/// (state, seed, state.steps).
StepStats step(ParticleState& state, const SimParams& params);

struct ObservableSeries {
    std::vector<double> times;
    std::vector<double> nematic_order;                 ///< |<exp(2 i theta)>|
    std::vector<std::vector<double>> angular_hist;     ///< fractions per bin on [0, pi)
    std::vector<std::vector<double>> spatial_hist;     ///< fractions, row-major bins x bins
    std::vector<double> msd_translation;               ///< <|dX|^2>, unwrapped
    std::vector<double> msd_rotation;                  ///< <dTheta^2>, unwrapped
    std::vector<double> acceptance;                    ///< since the previous sample
    int angular_bins = 0;
    int spatial_bins = 0;
};

struct RunOptions {
    int angular_bins = 18;
    int spatial_bins = 8;
};

double nematic_order(const std::vector<NeedleConfig>& needles);

/// Samples an initial state, then records observables every
/// `observe_every` time units up to t_end.
ObservableSeries run(const SimParams& params, double t_end, double observe_every, const RunOptions& options = {});

/// Same, continuing from a given admissible state (updated in place).
ObservableSeries run_from(ParticleState& state, const SimParams& params, double t_end, double observe_every,
                          const RunOptions& options = {});

/// Independent realisations with seeds seed, seed + 1, ... on `threads` workers.
std::vector<ObservableSeries> run_ensemble(const SimParams& params, int realisations, double t_end, double observe_every,
                                           int threads, const RunOptions& options = {});

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// Monte Carlo estimate of the configuration-space volume of needles
/// overlapping a fixed needle, integral over theta of the rhombus area.
McEstimate estimate_excluded_volume(double eps, std::size_t n_samples, std::mt19937_64& rng);

/// Same for one relative angle: the area of the excluded rhombus.
McEstimate estimate_excluded_area(double eps, double theta_rel, std::size_t n_samples, std::mt19937_64& rng);

}  // namespace needles
