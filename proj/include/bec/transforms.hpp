#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace bec {

using cplx = std::complex<double>;

/// Layout of a batch of 1D sequences inside one buffer: sequence b, element i lives
/// at offset b*dist + i*stride. A zero dist means "contiguous sequences" (dist = length).
struct Batch {
    std::size_t count = 1;
    std::size_t stride = 1;
    std::size_t dist = 0;
};

enum class FourierDirection {
    Forward,  ///< applies F_m^*, i.e. exp(-2 pi i jk/m) / sqrt(m)
    Inverse,  ///< applies F_m,   i.e. exp(+2 pi i jk/m) / sqrt(m)
};

/// Unitary discrete Fourier transform of length m, optionally batched.
///
/// The matrix F_m has entries theta^(jk)/sqrt(m) with theta = exp(2 pi i/m) (positive
/// exponent); Forward applies its adjoint. Planning happens once at construction,
/// apply() works in place on caller storage and does not allocate. Plans are
/// immutable and can be shared across threads.
class FourierPlan {
public:
    FourierPlan(std::size_t length, FourierDirection direction, Batch batch = {});

    std::size_t length() const noexcept { return length_; }
    FourierDirection direction() const noexcept { return direction_; }
    const Batch& batch() const noexcept { return batch_; }
    /// Number of scalars apply() expects.
    std::size_t extent() const noexcept;

    void apply(std::span<cplx> data) const;
    std::vector<cplx> operator()(std::span<const cplx> v) const;

private:
    struct Impl;
    std::size_t length_;
    FourierDirection direction_;
    Batch batch_;
    std::shared_ptr<const Impl> impl_;
};

/// Orthonormal DST-I: S_m(i,j) = sqrt(2/(m+1)) sin(ij pi/(m+1)), i,j = 1..m.
/// S_m is symmetric and involutory, and diagonalizes tridiag(-1,2,-1) and tridiag(1,4,1).
class SinePlan {
public:
    explicit SinePlan(std::size_t length, Batch batch = {});

    std::size_t length() const noexcept { return length_; }
    const Batch& batch() const noexcept { return batch_; }
    std::size_t extent() const noexcept;

    void apply(std::span<double> data) const;
    std::vector<double> operator()(std::span<const double> v) const;

private:
    struct Impl;
    std::size_t length_;
    Batch batch_;
    std::shared_ptr<const Impl> impl_;
};

/// Single-vector conveniences.
std::vector<cplx> fft_apply(const FourierPlan& plan, std::span<const cplx> v);
std::vector<double> dst1_apply(const SinePlan& plan, std::span<const double> v);

}  // namespace bec
