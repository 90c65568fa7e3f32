#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "needles/spectral.hpp"

namespace needles {

/// Probability density on orientations [0, pi), sampled at theta_j = j pi / M
/// with M even.
class AngularDensity {
public:
    AngularDensity() = default;
    explicit AngularDensity(std::vector<double> values);

    static AngularDensity uniform(std::size_t m);
    static AngularDensity from_function(std::size_t m, const std::function<double(double)>& f);

    std::size_t size() const { return values_.size(); }
    double theta(std::size_t j) const;
    double operator[](std::size_t j) const { return values_[j]; }
    const std::vector<double>& values() const { return values_; }
    double mass() const;
    double max() const;
    double min() const;

private:
    std::vector<double> values_;
};

/// Coefficient c_n of p = sum_n c_n exp(2 i n theta).
complex fourier_coefficient(const AngularDensity& p, int n);
/// |c_n|.
double mode_amplitude(const AngularDensity& p, int n);
/// p(theta - delta), exact on resolved modes.
AngularDensity shifted(const AngularDensity& p, double delta);

/// (W' * p)(theta1) = integral_0^pi cos(theta) p(theta1 - theta) d theta,
/// evaluated with the exact Fourier multipliers -4 i n / (4 n^2 - 1).
std::vector<double> convolve_wprime(const AngularDensity& p);

/// D_R [p'' + phi (p (W' * p))'] on the grid. The mean of the result is zero.
std::vector<double> mkv_rhs(const AngularDensity& p, double phi, double d_r);

/// Growth rate of mode n about 1/pi as printed:
/// -4 n^2 D_R (1 - 2 phi n / ((4 n^2 - 1) pi)).
double growth_rate(int n, double phi, double d_r);
/// Exact eigenvalue of the linearisation of mkv_rhs about 1/pi:
/// -4 n^2 D_R (1 - 2 phi / ((4 n^2 - 1) pi)). Coincides with growth_rate at n = 1.
double linearized_growth_rate(int n, double phi, double d_r);

struct CriticalPhi {
    double phi = 0.0;
    int n = 0;
};
/// Minimises the per-mode threshold (4 n^2 - 1) pi / (2 n) over 1 <= n <= n_max.
CriticalPhi critical_phi(int n_max = 100);

struct StabilityReport {
    std::vector<int> modes;
    std::vector<double> rates;     ///< growth_rate per mode
    std::vector<double> exact;     ///< linearized_growth_rate per mode
    std::vector<double> threshold; ///< per-mode critical phi
    int most_unstable = 1;         ///< argmax of rates
    double phi_c = 0.0;
};
StabilityReport stability_report(double phi, double d_r, int n_max);

struct MkvEvolveOptions {
    double dt = 0.0;                   ///< time step; <= 0 selects 0.01 / D_R
    std::vector<double> output_times;  ///< snapshots besides t = 0 and t_end
    double negativity_tol = 1e-8;      ///< min p below -tol halves the step
    double blowup_factor = 1e6;        ///< max p above factor * max p0 is an error
    int max_halvings = 20;
};

struct AngularTrajectory {
    std::vector<double> times;
    std::vector<AngularDensity> states;
    std::size_t steps = 0;
    std::size_t dt_reductions = 0;
};

/// Integrating-factor RK4: diffusion exactly, transport explicitly. Mass is
/// conserved to round-off. Throws NumericalError on blow-up or when step
/// halving cannot restore positivity.
AngularTrajectory evolve(const AngularDensity& p0, double phi, double d_r, double t_end,
                         const MkvEvolveOptions& options = {});

struct FixedPointOptions {
    double tol = 1e-10;           ///< sup-norm of the update
    int max_iter = 20000;
    double damping = 0.5;         ///< omega of the damped map
    int anderson_depth = 5;       ///< 0 disables acceleration
    double anderson_switch = 1e-3;///< acceleration engages once the update is below this
};

struct FixedPointResult {
    AngularDensity p;
    int iterations = 0;
    bool converged = false;
    double update = 0.0;             ///< last sup-norm update
    double residual = 0.0;           ///< sup |p' + phi p (W' * p)|
    double max_exponent_mean = 0.0;  ///< max over iterations of |integral_0^pi W' * p_k|
};

/// p <- C exp(-phi integral_0^theta (W' * p)), damped, optionally with
/// Anderson acceleration. Returns the last iterate with converged = false
/// when max_iter is reached.
FixedPointResult stationary_fixed_point(const AngularDensity& p0, double phi, const FixedPointOptions& options = {});

/// sup |p' + phi p (W' * p)| on the grid.
double stationary_residual(const AngularDensity& p, double phi);

/// min over delta of the L2 distance between p(. - delta) and q; the second
/// member is the optimal delta in [0, pi).
std::pair<double, double> shift_aligned_distance(const AngularDensity& p, const AngularDensity& q);

/// Plain L2 distance on [0, pi).
double l2_distance(const AngularDensity& p, const AngularDensity& q);

}  // namespace needles
