#include "needles/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

#include "needles/error.hpp"

namespace needles {

namespace {
// FFTW's planner is not reentrant.
std::mutex planner_mutex;
}  // namespace

struct RealFft::Plans {
    double* real = nullptr;
    fftw_complex* spec = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;

    ~Plans() {
        std::lock_guard lock(planner_mutex);
        if (fwd) fftw_destroy_plan(fwd);
        if (inv) fftw_destroy_plan(inv);
        fftw_free(real);
        fftw_free(spec);
    }
};

RealFft::RealFft(std::vector<int> dims, int batch) : dims_(std::move(dims)), batch_(batch) {
    detail::require(!dims_.empty() && dims_.size() <= 3, "RealFft: rank must be 1, 2 or 3");
    detail::require(std::all_of(dims_.begin(), dims_.end(), [](int d) { return d >= 1; }),
                    "RealFft: dimensions must be positive");
    detail::require(batch_ >= 1, "RealFft: batch must be positive");
    std::size_t points = 1;
    for (int d : dims_) points *= static_cast<std::size_t>(d);
    const std::size_t modes = points / static_cast<std::size_t>(dims_.back()) * static_cast<std::size_t>(dims_.back() / 2 + 1);
    real_size_ = points * static_cast<std::size_t>(batch_);
    spectral_size_ = modes * static_cast<std::size_t>(batch_);
    scale_ = 1.0 / static_cast<double>(points);

    plans_ = std::make_unique<Plans>();
    plans_->real = fftw_alloc_real(real_size_);
    plans_->spec = fftw_alloc_complex(spectral_size_);
    if (!plans_->real || !plans_->spec) throw NumericalError("RealFft: allocation failed");
    std::lock_guard lock(planner_mutex);
    const int rank = static_cast<int>(dims_.size());
    const int real_dist = static_cast<int>(points);
    const int spec_dist = static_cast<int>(modes);
    plans_->fwd = fftw_plan_many_dft_r2c(rank, dims_.data(), batch_, plans_->real, nullptr, 1, real_dist, plans_->spec,
                                         nullptr, 1, spec_dist, FFTW_ESTIMATE);
    plans_->inv = fftw_plan_many_dft_c2r(rank, dims_.data(), batch_, plans_->spec, nullptr, 1, spec_dist, plans_->real,
                                         nullptr, 1, real_dist, FFTW_ESTIMATE);
    if (!plans_->fwd || !plans_->inv) throw NumericalError("RealFft: planning failed");
}

RealFft::~RealFft() = default;
RealFft::RealFft(RealFft&&) noexcept = default;
RealFft& RealFft::operator=(RealFft&&) noexcept = default;

void RealFft::forward(std::span<const double> in, std::span<complex> out) {
    detail::require(in.size() == real_size_ && out.size() == spectral_size_, "RealFft::forward: size mismatch");
    std::copy(in.begin(), in.end(), plans_->real);
    fftw_execute(plans_->fwd);
    const auto* spec = reinterpret_cast<const complex*>(plans_->spec);
    std::copy(spec, spec + spectral_size_, out.begin());
}

void RealFft::inverse(std::span<const complex> in, std::span<double> out) {
    detail::require(in.size() == spectral_size_ && out.size() == real_size_, "RealFft::inverse: size mismatch");
    // c2r overwrites its input, so it always works on the private buffer
    std::copy(in.begin(), in.end(), reinterpret_cast<complex*>(plans_->spec));
    fftw_execute(plans_->inv);
    for (std::size_t i = 0; i < real_size_; ++i) out[i] = plans_->real[i] * scale_;
}

}  // namespace needles
