#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include <cblas.h>
#include <lapacke.h>

namespace dirac1d {

/// Column-major complex matrix, the layout LAPACK expects.
class CMatrix {
  public:
    CMatrix() = default;
    CMatrix(int rows, int cols)
        : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::complex<double>& operator()(int i, int j) {
        return a_[static_cast<std::size_t>(j) * rows_ + i];
    }
    const std::complex<double>& operator()(int i, int j) const {
        return a_[static_cast<std::size_t>(j) * rows_ + i];
    }
    std::complex<double>* data() { return a_.data(); }
    const std::complex<double>* data() const { return a_.data(); }
    std::complex<double>* col(int j) { return a_.data() + static_cast<std::size_t>(j) * rows_; }
    const std::complex<double>* col(int j) const {
        return a_.data() + static_cast<std::size_t>(j) * rows_;
    }

  private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<std::complex<double>> a_;
};

/// Eigenvalues of a Hermitian matrix, ascending. A is overwritten.
inline std::vector<double> hermitian_eigenvalues(CMatrix& a) {
    if (a.rows() != a.cols())
        throw std::invalid_argument("hermitian_eigenvalues: matrix must be square");
    std::vector<double> w(a.rows());
    const int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', a.rows(),
                                    reinterpret_cast<lapack_complex_double*>(a.data()),
                                    a.rows(), w.data());
    if (info != 0)
        throw std::runtime_error("zheevd (values) failed, info=" + std::to_string(info));
    return w;
}

/// Full eigendecomposition of a Hermitian matrix. On return the columns of A
/// hold the eigenvectors; eigenvalues come back ascending.
inline std::vector<double> hermitian_eigensystem(CMatrix& a) {
    if (a.rows() != a.cols())
        throw std::invalid_argument("hermitian_eigensystem: matrix must be square");
    std::vector<double> w(a.rows());
    const int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', a.rows(),
                                    reinterpret_cast<lapack_complex_double*>(a.data()),
                                    a.rows(), w.data());
    if (info != 0)
        throw std::runtime_error("zheevd (vectors) failed, info=" + std::to_string(info));
    return w;
}

namespace detail {
inline CMatrix gemm(CBLAS_TRANSPOSE ta, CBLAS_TRANSPOSE tb, const CMatrix& a, const CMatrix& b) {
    const int m = ta == CblasNoTrans ? a.rows() : a.cols();
    const int k = ta == CblasNoTrans ? a.cols() : a.rows();
    const int kb = tb == CblasNoTrans ? b.rows() : b.cols();
    const int n = tb == CblasNoTrans ? b.cols() : b.rows();
    if (k != kb)
        throw std::invalid_argument("gemm: inner dimensions disagree");
    CMatrix c(m, n);
    const std::complex<double> one(1.0, 0.0), zero(0.0, 0.0);
    cblas_zgemm(CblasColMajor, ta, tb, m, n, k, &one, a.data(), a.rows(), b.data(), b.rows(),
                &zero, c.data(), c.rows());
    return c;
}
}  // namespace detail

/// C = A * B.
inline CMatrix matmul(const CMatrix& a, const CMatrix& b) {
    return detail::gemm(CblasNoTrans, CblasNoTrans, a, b);
}

/// C = A^H * B.
inline CMatrix matmul_adjoint_left(const CMatrix& a, const CMatrix& b) {
    return detail::gemm(CblasConjTrans, CblasNoTrans, a, b);
}

/// C = A * B^H.
inline CMatrix matmul_adjoint_right(const CMatrix& a, const CMatrix& b) {
    return detail::gemm(CblasNoTrans, CblasConjTrans, a, b);
}

}  // namespace dirac1d
