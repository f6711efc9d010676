#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace chronon {

using cplx = std::complex<double>;

/// Dense row-major complex matrix. Object spaces here are tiny (dim <= ~16),
/// so plain loops beat any BLAS dispatch overhead.
class CMatrix {
public:
    CMatrix() = default;
    CMatrix(int rows, int cols)
        : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols) {
        if (rows < 0 || cols < 0) throw std::invalid_argument("CMatrix: negative dimension");
    }

    static CMatrix identity(int n) {
        CMatrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
    static CMatrix zero(int rows, int cols) { return CMatrix(rows, cols); }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool empty() const { return a_.empty(); }

    cplx& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
    const cplx& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

    const std::vector<cplx>& data() const { return a_; }
    std::vector<cplx>& data() { return a_; }

    CMatrix& operator+=(const CMatrix& o) {
        check_same_shape(o);
        for (size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
        return *this;
    }
    CMatrix& operator-=(const CMatrix& o) {
        check_same_shape(o);
        for (size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
        return *this;
    }
    CMatrix& operator*=(cplx s) {
        for (auto& v : a_) v *= s;
        return *this;
    }

    friend CMatrix operator+(CMatrix a, const CMatrix& b) { a += b; return a; }
    friend CMatrix operator-(CMatrix a, const CMatrix& b) { a -= b; return a; }
    friend CMatrix operator*(cplx s, CMatrix a) { a *= s; return a; }
    friend CMatrix operator*(CMatrix a, cplx s) { a *= s; return a; }

    friend CMatrix operator*(const CMatrix& a, const CMatrix& b) {
        if (a.cols_ != b.rows_) throw std::invalid_argument("CMatrix: shape mismatch in product");
        CMatrix c(a.rows_, b.cols_);
        for (int i = 0; i < a.rows_; ++i) {
            for (int k = 0; k < a.cols_; ++k) {
                const cplx aik = a(i, k);
                if (aik == cplx{}) continue;
                for (int j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        }
        return c;
    }

    CMatrix adjoint() const {
        CMatrix m(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
        return m;
    }

    std::vector<cplx> apply(const std::vector<cplx>& v) const {
        if (static_cast<int>(v.size()) != cols_)
            throw std::invalid_argument("CMatrix: vector length mismatch");
        std::vector<cplx> out(rows_);
        for (int i = 0; i < rows_; ++i) {
            cplx s{};
            for (int j = 0; j < cols_; ++j) s += (*this)(i, j) * v[j];
            out[i] = s;
        }
        return out;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& v : a_) m = std::max(m, std::abs(v));
        return m;
    }

private:
    void check_same_shape(const CMatrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw std::invalid_argument("CMatrix: shape mismatch");
    }

    int rows_ = 0;
    int cols_ = 0;
    std::vector<cplx> a_;
};

/// Max-entry norm of a - b; the defect norm used throughout.
double max_abs_diff(const CMatrix& a, const CMatrix& b);

/// Hermiticity defect ||m - m^*|| in the max-entry norm.
double hermiticity_defect(const CMatrix& m);

/// Power-iteration estimate of the operator (spectral) norm.
double op_norm_estimate(const CMatrix& m, int iterations = 60);

// small vector helpers
double vec_norm(const std::vector<cplx>& v);
cplx vec_dot(const std::vector<cplx>& a, const std::vector<cplx>& b);  // conj(a).b
void vec_axpy(std::vector<cplx>& y, cplx alpha, const std::vector<cplx>& x);
double vec_max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b);

}  // namespace chronon
