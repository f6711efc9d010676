#pragma once

// Single-clock Minkowski machinery: the two temporal-spin degrees of freedom,
// the non-diagonal metric q = sigma_1, the dagger involution it induces, the
// nilpotent matrix representation of the time increment, and Lorentz boosts.

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "chronon/complex_matrix.hpp"

namespace chronon {

/// Clock state in C^2. First component is the past amplitude xi^-, second the
/// future amplitude xi^+. The dual row pairs them crosswise, so the square
/// xi^dag xi = 2 Re(conj(xi^+) xi^-) is always real and both pure past and
/// pure future states are null.
struct TemporalVector {
    cplx minus{};  // xi^-
    cplx plus{};   // xi^+

    static TemporalVector past() { return {1.0, 0.0}; }
    static TemporalVector future() { return {0.0, 1.0}; }
};

inline TemporalVector operator*(cplx s, const TemporalVector& v) { return {s * v.minus, s * v.plus}; }
inline TemporalVector operator+(const TemporalVector& a, const TemporalVector& b) {
    return {a.minus + b.minus, a.plus + b.plus};
}

/// Dual (row) components (xi_-, xi_+) = (conj xi^+, conj xi^-).
struct DualTemporalVector {
    cplx lo_minus{};  // xi_-
    cplx lo_plus{};   // xi_+
};

inline DualTemporalVector dual(const TemporalVector& v) {
    return {std::conj(v.plus), std::conj(v.minus)};
}
inline TemporalVector dual(const DualTemporalVector& r) {
    return {std::conj(r.lo_plus), std::conj(r.lo_minus)};
}

/// a_- b^- + a_+ b^+, the indefinite pairing induced by q = sigma_1.
inline cplx pseudo_inner(const TemporalVector& a, const TemporalVector& b) {
    const DualTemporalVector ad = dual(a);
    return ad.lo_minus * b.minus + ad.lo_plus * b.plus;
}

inline bool is_null(const TemporalVector& v, double tol = 1e-12) {
    return std::abs(pseudo_inner(v, v)) <= tol;
}

/// 2x2 complex matrix acting on the clock spin alone.
struct ClockMatrix {
    // row-major entries
    std::array<cplx, 4> e{};

    cplx& operator()(int i, int j) { return e[2 * i + j]; }
    const cplx& operator()(int i, int j) const { return e[2 * i + j]; }

    static ClockMatrix identity() { return {{1.0, 0.0, 0.0, 1.0}}; }
    /// Matrix form of the differential time increment; maps future to past
    /// and squares to zero.
    static ClockMatrix increment() { return {{0.0, 1.0, 0.0, 0.0}}; }
    /// The metric q = sigma_1.
    static ClockMatrix metric() { return {{0.0, 1.0, 1.0, 0.0}}; }
};

inline ClockMatrix operator*(const ClockMatrix& a, const ClockMatrix& b) {
    ClockMatrix c;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) c(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j);
    return c;
}
inline ClockMatrix operator*(cplx s, const ClockMatrix& m) {
    ClockMatrix c = m;
    for (auto& v : c.e) v *= s;
    return c;
}
inline ClockMatrix operator+(const ClockMatrix& a, const ClockMatrix& b) {
    ClockMatrix c;
    for (int k = 0; k < 4; ++k) c.e[k] = a.e[k] + b.e[k];
    return c;
}
inline ClockMatrix operator-(const ClockMatrix& a, const ClockMatrix& b) {
    ClockMatrix c;
    for (int k = 0; k < 4; ++k) c.e[k] = a.e[k] - b.e[k];
    return c;
}

inline TemporalVector apply(const ClockMatrix& m, const TemporalVector& v) {
    return {m(0, 0) * v.minus + m(0, 1) * v.plus, m(1, 0) * v.minus + m(1, 1) * v.plus};
}

inline double max_abs(const ClockMatrix& m) {
    double r = 0.0;
    for (const auto& v : m.e) r = std::max(r, std::abs(v));
    return r;
}

/// Involution q^-1 m^* q with m^* the conjugate transpose. For
/// m = [[a,b],[c,e]] this is [[conj e, conj b],[conj c, conj a]]; the
/// increment matrix is a fixed point.
inline ClockMatrix dag(const ClockMatrix& m) {
    ClockMatrix r;
    r(0, 0) = std::conj(m(1, 1));
    r(0, 1) = std::conj(m(0, 1));
    r(1, 0) = std::conj(m(1, 0));
    r(1, 1) = std::conj(m(0, 0));
    return r;
}

inline bool is_pseudo_unitary(const ClockMatrix& m, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("is_pseudo_unitary: tol must be positive");
    return max_abs(dag(m) * m - ClockMatrix::identity()) <= tol;
}

/// Boost v_lambda = diag(1/sqrt(lambda), sqrt(lambda)); its dagger is
/// diag(sqrt(lambda), 1/sqrt(lambda)), so dag(v) v = I exactly.
inline ClockMatrix lorentz_boost(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("lorentz_boost: lambda must be positive and finite");
    const double r = std::sqrt(lambda);
    ClockMatrix m;
    m(0, 0) = 1.0 / r;
    m(1, 1) = r;
    return m;
}

/// Product in the nilpotent algebra spanned by the time increment: always 0.
inline cplx nilpotent_algebra_product(cplx /*a*/, cplx /*b*/) { return cplx{}; }

/// Monoidal product of increment coefficients, a . a' = a + a', unit 0.
inline cplx monoidal_product(cplx a, cplx b) { return a + b; }

/// Compression xi^dag (alpha d) xi of a scalar increment against a clock
/// state; recovers alpha when xi = (nu, 1) with real nu.
inline cplx state_compression(const TemporalVector& xi, cplx alpha) {
    const ClockMatrix m = alpha * ClockMatrix::increment();
    const TemporalVector mv = apply(m, xi);
    const DualTemporalVector xd = dual(xi);
    return xd.lo_minus * mv.minus + xd.lo_plus * mv.plus;
}

/// Basic clock state with intensity-like parameter nu and momentum mu:
/// components exp(-i mu x) (nu, 1) at clock coordinate x.
struct BasicVector {
    cplx nu{};
    double mu = 0.0;

    TemporalVector at(double x) const {
        const cplx phase = std::exp(cplx(0.0, -mu * x));
        return {phase * nu, phase};
    }
};

}  // namespace chronon
