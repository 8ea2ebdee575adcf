#include "bec/operators.hpp"

#include <algorithm>
#include <cmath>

namespace bec {

SparseMatrix::SparseMatrix(Storage s) : a_(std::move(s)) { a_.makeCompressed(); }

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, const std::vector<Triplet>& entries)
    : a_(static_cast<int>(rows), static_cast<int>(cols)) {
    a_.setFromTriplets(entries.begin(), entries.end());
    a_.prune(0.0);
    a_.makeCompressed();
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
    Storage s(static_cast<int>(n), static_cast<int>(n));
    s.setIdentity();
    return SparseMatrix(std::move(s));
}

SparseMatrix SparseMatrix::zero(std::size_t rows, std::size_t cols) {
    return SparseMatrix(Storage(static_cast<int>(rows), static_cast<int>(cols)));
}

std::vector<double> SparseMatrix::diagonal() const {
    std::vector<double> d(std::min(rows(), cols()), 0.0);
    for (int i = 0; i < a_.outerSize(); ++i)
        for (Storage::InnerIterator it(a_, i); it; ++it)
            if (it.row() == it.col()) d[static_cast<std::size_t>(i)] = it.value();
    return d;
}

SparseMatrix SparseMatrix::transpose() const { return SparseMatrix(Storage(a_.transpose())); }

Eigen::MatrixXd SparseMatrix::to_dense() const { return Eigen::MatrixXd(a_); }

double SparseMatrix::asymmetry() const {
    if (rows() != cols()) return INFINITY;
    const Storage diff = a_ - Storage(a_.transpose());
    double worst = 0.0;
    for (int k = 0; k < diff.nonZeros(); ++k) worst = std::max(worst, std::abs(diff.valuePtr()[k]));
    return worst;
}

SparseMatrix operator*(const SparseMatrix& a, const SparseMatrix& b) {
    require(a.cols() == b.rows(), "sparse product: dimension mismatch");
    return SparseMatrix(SparseMatrix::Storage(a.a_ * b.a_));
}

SparseMatrix operator+(const SparseMatrix& a, const SparseMatrix& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols(), "sparse sum: dimension mismatch");
    return SparseMatrix(SparseMatrix::Storage(a.a_ + b.a_));
}

SparseMatrix operator*(double s, const SparseMatrix& a) { return SparseMatrix(SparseMatrix::Storage(s * a.a_)); }

std::vector<double> spmv(const SparseMatrix& a, std::span<const double> v) {
    std::vector<double> out(a.rows());
    a.multiply<double>(v, out);
    return out;
}

std::vector<cplx> spmv(const SparseMatrix& a, std::span<const cplx> v) {
    std::vector<cplx> out(a.rows());
    a.multiply<cplx>(v, out);
    return out;
}

LinearAction LinearAction::identity(std::size_t n) {
    return {n, [](std::span<const cplx> in, std::span<cplx> out) { std::copy(in.begin(), in.end(), out.begin()); }};
}

LinearAction LinearAction::dense(const Eigen::MatrixXcd& a) {
    require(a.rows() == a.cols(), "LinearAction::dense needs a square matrix");
    return {static_cast<std::size_t>(a.rows()), [a](std::span<const cplx> in, std::span<cplx> out) {
                Eigen::Map<const Eigen::VectorXcd> x(in.data(), static_cast<Eigen::Index>(in.size()));
                Eigen::Map<Eigen::VectorXcd> y(out.data(), static_cast<Eigen::Index>(out.size()));
                y.noalias() = a * x;
            }};
}

LinearAction LinearAction::sparse(const SparseMatrix& a) {
    require(a.rows() == a.cols(), "LinearAction::sparse needs a square matrix");
    return {a.rows(), [a](std::span<const cplx> in, std::span<cplx> out) { a.multiply<cplx>(in, out); }};
}

std::vector<cplx> kron_matvec(const LinearAction& b, const LinearAction& c, std::span<const cplx> v) {
    const std::size_t n = b.dim;
    const std::size_t j = c.dim;
    require(v.size() == n * j, "kron_matvec: vector length " + std::to_string(v.size()) + " is not " +
                                   std::to_string(n) + " x " + std::to_string(j));
    std::vector<cplx> w(v.size());
    for (std::size_t col = 0; col < n; ++col) c.apply(v.subspan(col * j, j), std::span(w).subspan(col * j, j));

    std::vector<cplx> row_in(n), row_out(n);
    for (std::size_t r = 0; r < j; ++r) {
        for (std::size_t col = 0; col < n; ++col) row_in[col] = w[r + col * j];
        b.apply(row_in, row_out);
        for (std::size_t col = 0; col < n; ++col) w[r + col * j] = row_out[col];
    }
    return w;
}

Eigen::MatrixXd ToeplitzSpec::to_dense() const {
    const auto n = static_cast<Eigen::Index>(size());
    Eigen::MatrixXd g(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k < n; ++k)
            g(i, k) = i >= k ? first_column[static_cast<std::size_t>(i - k)] : first_row[static_cast<std::size_t>(k - i)];
    return g;
}

ToeplitzOperator::ToeplitzOperator(ToeplitzSpec spec)
    : n_(spec.size()),
      forward_(2 * std::max<std::size_t>(spec.size(), 1), FourierDirection::Forward),
      inverse_(2 * std::max<std::size_t>(spec.size(), 1), FourierDirection::Inverse) {
    require(n_ >= 1, "Toeplitz matrix must be non-empty");
    require(spec.first_row.size() == n_, "Toeplitz first row and first column differ in length");
    require(spec.first_row[0] == spec.first_column[0], "Toeplitz first row and column disagree at (0,0)");

    // First column of the 2N circulant: [c_0 .. c_{N-1}, 0, r_{N-1} .. r_1].
    const std::size_t m = 2 * n_;
    std::vector<cplx> c(m, 0.0);
    for (std::size_t i = 0; i < n_; ++i) c[i] = spec.first_column[i];
    for (std::size_t i = 1; i < n_; ++i) c[m - i] = spec.first_row[i];
    // C = F diag(sqrt(m) F^* c) F^*
    forward_.apply(c);
    const double root_m = std::sqrt(static_cast<double>(m));
    for (auto& x : c) x *= root_m;
    symbol_ = std::move(c);
}

std::vector<double> ToeplitzOperator::apply(std::span<const double> v) const {
    require(v.size() == n_, "toeplitz_matvec: length mismatch");
    std::vector<cplx> work(2 * n_, 0.0);
    std::copy(v.begin(), v.end(), work.begin());
    forward_.apply(work);
    for (std::size_t i = 0; i < work.size(); ++i) work[i] *= symbol_[i];
    inverse_.apply(work);
    std::vector<double> out(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = work[i].real();
    return out;
}

std::vector<double> toeplitz_matvec(const ToeplitzSpec& spec, std::span<const double> v) {
    return ToeplitzOperator(spec).apply(v);
}

}  // namespace bec
