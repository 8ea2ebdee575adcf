#pragma once

#include "bec/error.hpp"
#include "bec/transforms.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace bec {

/// Real sparse matrix in compressed-row storage. Matvecs accept real or complex vectors.
class SparseMatrix {
public:
    using Storage = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;
    using Triplet = Eigen::Triplet<double, int>;

    SparseMatrix() = default;
    explicit SparseMatrix(Storage s);
    SparseMatrix(std::size_t rows, std::size_t cols, const std::vector<Triplet>& entries);

    static SparseMatrix identity(std::size_t n);
    static SparseMatrix zero(std::size_t rows, std::size_t cols);

    std::size_t rows() const noexcept { return static_cast<std::size_t>(a_.rows()); }
    std::size_t cols() const noexcept { return static_cast<std::size_t>(a_.cols()); }
    std::size_t nnz() const noexcept { return static_cast<std::size_t>(a_.nonZeros()); }
    const Storage& storage() const noexcept { return a_; }

    /// out = alpha * A v + beta * out. beta == 0 overwrites out regardless of its contents.
    template <typename T>
    void multiply(std::span<const T> v, std::span<T> out, T alpha = T(1), T beta = T(0)) const {
        require(v.size() == cols() && out.size() == rows(),
                "spmv: dimension mismatch (" + std::to_string(rows()) + "x" + std::to_string(cols()) +
                    " matrix, vector " + std::to_string(v.size()) + ", output " + std::to_string(out.size()) + ")");
        const int* outer = a_.outerIndexPtr();
        const int* inner = a_.innerIndexPtr();
        const double* val = a_.valuePtr();
        const bool overwrite = beta == T(0);
        for (int i = 0; i < a_.rows(); ++i) {
            T acc(0);
            for (int k = outer[i]; k < outer[i + 1]; ++k) acc += val[k] * v[inner[k]];
            out[i] = overwrite ? alpha * acc : alpha * acc + beta * out[i];
        }
    }

    std::vector<double> diagonal() const;
    SparseMatrix transpose() const;
    Eigen::MatrixXd to_dense() const;
    /// Largest |a_ij - a_ji|.
    double asymmetry() const;

    friend SparseMatrix operator*(const SparseMatrix& a, const SparseMatrix& b);
    friend SparseMatrix operator+(const SparseMatrix& a, const SparseMatrix& b);
    friend SparseMatrix operator*(double s, const SparseMatrix& a);

private:
    Storage a_;
};

std::vector<double> spmv(const SparseMatrix& a, std::span<const double> v);
std::vector<cplx> spmv(const SparseMatrix& a, std::span<const cplx> v);

/// Action of a square n x n operator on complex vectors: apply(in, out), out fully overwritten.
struct LinearAction {
    std::size_t dim = 0;
    std::function<void(std::span<const cplx>, std::span<cplx>)> apply;

    static LinearAction identity(std::size_t n);
    static LinearAction dense(const Eigen::MatrixXcd& a);
    static LinearAction sparse(const SparseMatrix& a);
};

/// (B kron C) v without forming the product.
///
/// v is viewed column-major as the J x N matrix Y whose columns are the time blocks
/// (J = C.dim, N = B.dim); the result is vec(C Y B^T). C is applied to each column,
/// then B along each row.
std::vector<cplx> kron_matvec(const LinearAction& b, const LinearAction& c, std::span<const cplx> v);

/// First column and first row of an N x N Toeplitz matrix (first_row[0] must equal first_column[0]).
struct ToeplitzSpec {
    std::vector<double> first_column;
    std::vector<double> first_row;

    std::size_t size() const noexcept { return first_column.size(); }
    Eigen::MatrixXd to_dense() const;
};

/// Toeplitz matvec in O(N log N) through the 2N circulant embedding.
class ToeplitzOperator {
public:
    explicit ToeplitzOperator(ToeplitzSpec spec);

    std::size_t size() const noexcept { return n_; }
    std::vector<double> apply(std::span<const double> v) const;

private:
    std::size_t n_;
    std::vector<cplx> symbol_;  // eigenvalues of the embedding circulant
    FourierPlan forward_;
    FourierPlan inverse_;
};

std::vector<double> toeplitz_matvec(const ToeplitzSpec& spec, std::span<const double> v);

}  // namespace bec
