#include "bec/transforms.hpp"

#include "bec/error.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <string>

namespace bec {

namespace {

// The FFTW planner is not re-entrant; execution with the new-array interface is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

template <typename T>
void scale_batch(std::span<T> data, const Batch& b, std::size_t length, double scale) {
    if (b.count * length == data.size()) {
        for (auto& x : data) x *= scale;
        return;
    }
    for (std::size_t s = 0; s < b.count; ++s)
        for (std::size_t i = 0; i < length; ++i) data[s * b.dist + i * b.stride] *= scale;
}

Batch normalized(Batch b, std::size_t length) {
    require(b.count >= 1 && b.stride >= 1, "transform batch needs count >= 1 and stride >= 1");
    if (b.dist == 0) b.dist = length * b.stride;
    return b;
}

std::size_t extent_of(const Batch& b, std::size_t length) {
    return (b.count - 1) * b.dist + (length - 1) * b.stride + 1;
}

}  // namespace

struct FourierPlan::Impl {
    fftw_plan plan = nullptr;
    double scale = 1.0;
    ~Impl() {
        std::lock_guard lock(planner_mutex());
        if (plan) fftw_destroy_plan(plan);
    }
};

FourierPlan::FourierPlan(std::size_t length, FourierDirection direction, Batch batch)
    : length_(length), direction_(direction), batch_(normalized(batch, length)) {
    require(length >= 1, "FourierPlan length must be positive");
    auto impl = std::make_shared<Impl>();
    impl->scale = 1.0 / std::sqrt(static_cast<double>(length));

    const std::size_t n = extent();
    auto* scratch = fftw_alloc_complex(n);
    const int len = static_cast<int>(length);
    const int sign = direction == FourierDirection::Forward ? FFTW_FORWARD : FFTW_BACKWARD;
    {
        std::lock_guard lock(planner_mutex());
        impl->plan = fftw_plan_many_dft(1, &len, static_cast<int>(batch_.count), scratch, nullptr,
                                        static_cast<int>(batch_.stride), static_cast<int>(batch_.dist),
                                        scratch, nullptr, static_cast<int>(batch_.stride),
                                        static_cast<int>(batch_.dist), sign,
                                        FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    fftw_free(scratch);
    if (!impl->plan) throw SolverError("FFTW failed to create a Fourier plan of length " + std::to_string(length));
    impl_ = std::move(impl);
}

std::size_t FourierPlan::extent() const noexcept { return extent_of(batch_, length_); }

void FourierPlan::apply(std::span<cplx> data) const {
    require(data.size() == extent(), "fft_apply: length mismatch (expected " + std::to_string(extent()) +
                                         ", got " + std::to_string(data.size()) + ")");
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(impl_->plan, p, p);
    scale_batch(data, batch_, length_, impl_->scale);
}

std::vector<cplx> FourierPlan::operator()(std::span<const cplx> v) const {
    std::vector<cplx> out(v.begin(), v.end());
    apply(out);
    return out;
}

struct SinePlan::Impl {
    fftw_plan plan = nullptr;
    double scale = 1.0;
    ~Impl() {
        std::lock_guard lock(planner_mutex());
        if (plan) fftw_destroy_plan(plan);
    }
};

SinePlan::SinePlan(std::size_t length, Batch batch) : length_(length), batch_(normalized(batch, length)) {
    require(length >= 1, "SinePlan length must be positive");
    auto impl = std::make_shared<Impl>();
    // FFTW's RODFT00 is 2 * sum x_j sin(pi (j+1)(k+1)/(m+1)).
    impl->scale = 1.0 / std::sqrt(2.0 * static_cast<double>(length + 1));

    const std::size_t n = extent();
    auto* scratch = fftw_alloc_real(n);
    const int len = static_cast<int>(length);
    const fftw_r2r_kind kind = FFTW_RODFT00;
    {
        std::lock_guard lock(planner_mutex());
        impl->plan = fftw_plan_many_r2r(1, &len, static_cast<int>(batch_.count), scratch, nullptr,
                                        static_cast<int>(batch_.stride), static_cast<int>(batch_.dist),
                                        scratch, nullptr, static_cast<int>(batch_.stride),
                                        static_cast<int>(batch_.dist), &kind,
                                        FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    fftw_free(scratch);
    if (!impl->plan) throw SolverError("FFTW failed to create a sine plan of length " + std::to_string(length));
    impl_ = std::move(impl);
}

std::size_t SinePlan::extent() const noexcept { return extent_of(batch_, length_); }

void SinePlan::apply(std::span<double> data) const {
    require(data.size() == extent(), "dst1_apply: length mismatch (expected " + std::to_string(extent()) +
                                         ", got " + std::to_string(data.size()) + ")");
    fftw_execute_r2r(impl_->plan, data.data(), data.data());
    scale_batch(data, batch_, length_, impl_->scale);
}

std::vector<double> SinePlan::operator()(std::span<const double> v) const {
    std::vector<double> out(v.begin(), v.end());
    apply(out);
    return out;
}

std::vector<cplx> fft_apply(const FourierPlan& plan, std::span<const cplx> v) { return plan(v); }

std::vector<double> dst1_apply(const SinePlan& plan, std::span<const double> v) { return plan(v); }

}  // namespace bec
