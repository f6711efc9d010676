#include "chronon/complex_matrix.hpp"

#include <cmath>

namespace chronon {

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("max_abs_diff: shape mismatch");
    double m = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

double hermiticity_defect(const CMatrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("hermiticity_defect: not square");
    double d = 0.0;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            d = std::max(d, std::abs(m(i, j) - std::conj(m(j, i))));
    return d;
}

double op_norm_estimate(const CMatrix& m, int iterations) {
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    std::vector<cplx> v(m.cols());
    for (size_t i = 0; i < v.size(); ++i) v[i] = cplx(1.0 / std::sqrt(double(i + 1)), 0.13 * double(i + 1));
    double norm = vec_norm(v);
    for (auto& x : v) x /= norm;
    const CMatrix mm = m.adjoint() * m;
    double lambda = 0.0;
    for (int it = 0; it < iterations; ++it) {
        std::vector<cplx> w = mm.apply(v);
        double wn = vec_norm(w);
        if (wn == 0.0) return 0.0;
        lambda = wn;
        for (auto& x : w) x /= wn;
        v = std::move(w);
    }
    return std::sqrt(lambda);
}

double vec_norm(const std::vector<cplx>& v) {
    double s = 0.0;
    for (const auto& x : v) s += std::norm(x);
    return std::sqrt(s);
}

cplx vec_dot(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("vec_dot: length mismatch");
    cplx s{};
    for (size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

void vec_axpy(std::vector<cplx>& y, cplx alpha, const std::vector<cplx>& x) {
    if (x.size() != y.size()) throw std::invalid_argument("vec_axpy: length mismatch");
    for (size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

double vec_max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("vec_max_abs_diff: length mismatch");
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace chronon
