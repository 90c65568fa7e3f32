#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace needles {

using complex = std::complex<double>;

/// Real-to-complex FFT over a row-major grid of rank 1 to 3, optionally
/// repeated over `batch` contiguous copies of that grid. The last dimension is
/// halved in the spectrum (n_last / 2 + 1 entries). The forward transform is
/// unnormalised, the inverse divides by the number of points per transform.
/// Plans are created once; execute calls on distinct objects may run
/// concurrently.
class RealFft {
public:
    explicit RealFft(std::vector<int> dims, int batch = 1);
    ~RealFft();
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;
    RealFft(RealFft&&) noexcept;
    RealFft& operator=(RealFft&&) noexcept;

    const std::vector<int>& dims() const { return dims_; }
    int batch() const { return batch_; }
    /// Totals over all batch copies.
    std::size_t real_size() const { return real_size_; }
    std::size_t spectral_size() const { return spectral_size_; }

    void forward(std::span<const double> in, std::span<complex> out);
    void inverse(std::span<const complex> in, std::span<double> out);

private:
    struct Plans;
    std::vector<int> dims_;
    int batch_ = 1;
    std::size_t real_size_ = 0;
    std::size_t spectral_size_ = 0;
    double scale_ = 1.0;
    std::unique_ptr<Plans> plans_;
};

/// Signed integer wavenumber of FFT index k on an axis of n points.
inline int wavenumber(int k, int n) { return k <= n / 2 ? k : k - n; }

/// One integrating-factor RK4 (Lawson) step for u' = L u + N(u) with L
/// diagonal in the spectral basis. `nonlinear(in, out)` writes N(in).
template <class Nonlinear>
void ifrk4_step(std::vector<complex>& u, const std::vector<double>& lin, double dt, Nonlinear&& nonlinear) {
    const std::size_t n = u.size();
    std::vector<double> half(n), full(n);
    for (std::size_t i = 0; i < n; ++i) {
        half[i] = std::exp(0.5 * dt * lin[i]);
        full[i] = half[i] * half[i];
    }
    std::vector<complex> k1(n), k2(n), k3(n), k4(n), stage(n);
    nonlinear(u, k1);
    for (std::size_t i = 0; i < n; ++i) stage[i] = half[i] * (u[i] + 0.5 * dt * k1[i]);
    nonlinear(stage, k2);
    for (std::size_t i = 0; i < n; ++i) stage[i] = half[i] * u[i] + 0.5 * dt * k2[i];
    nonlinear(stage, k3);
    for (std::size_t i = 0; i < n; ++i) stage[i] = full[i] * u[i] + dt * half[i] * k3[i];
    nonlinear(stage, k4);
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = full[i] * u[i] + dt / 6.0 * (full[i] * k1[i] + 2.0 * half[i] * (k2[i] + k3[i]) + k4[i]);
    }
}

}  // namespace needles
