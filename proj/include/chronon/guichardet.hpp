#pragma once

// Chains of interaction times, the ordered-simplex measure and its iterated
// Gauss-Legendre quadrature, inhomogeneous Poisson chain sampling by
// thinning, and the truncated product-vector calculus of the clock's second
// quantization (embeddings, coherent vectors, creation/annihilation on a
// shared-node sector grid).

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "chronon/complex_matrix.hpp"
#include "chronon/intensity.hpp"
#include "chronon/minkowski_clock.hpp"

namespace chronon {

/// Strictly increasing finite set of interaction times in [0, horizon).
/// The empty chain is valid.
class Chain {
public:
    Chain() = default;
    explicit Chain(std::vector<double> times);

    static Chain empty() { return Chain(); }

    const std::vector<double>& times() const { return times_; }
    size_t size() const { return times_.size(); }
    double max_time() const { return times_.empty() ? 0.0 : times_.back(); }

private:
    std::vector<double> times_;
};

/// Gauss-Legendre nodes (ascending) and weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

/// Nodes and weights rescaled to [a, b].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre_on(int n, double a, double b);

namespace detail {

template <class T, class F>
T simplex_recurse(F& f, std::vector<double>& chain, int level, double upper, int nodes,
                  const std::vector<double>& ref_x, const std::vector<double>& ref_w,
                  const T& zero) {
    if (level == 0) return f(const_cast<const std::vector<double>&>(chain));
    T acc = zero;
    const double mid = 0.5 * upper;
    for (int i = 0; i < nodes; ++i) {
        const double x = mid + mid * ref_x[i];
        chain[level - 1] = x;
        T inner = simplex_recurse(f, chain, level - 1, x, nodes, ref_x, ref_w, zero);
        inner *= cplx(mid * ref_w[i], 0.0);
        acc += inner;
    }
    return acc;
}

inline void scale_in_place(cplx& v, cplx s) { v *= s; }

}  // namespace detail

/// Integral of f over the ordered n-simplex {0 < x_1 < ... < x_n < t} by
/// iterated Gauss-Legendre with `nodes` points per axis. n = 0 returns
/// f(empty chain) exactly (the atomic measure of the empty chain is 1).
/// T must support += and *= cplx; use CMatrix::zero(...) or cplx{} as `zero`.
namespace detail {

inline bool all_finite(const cplx& v) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
}
inline bool all_finite(const CMatrix& m) {
    for (const auto& v : m.data())
        if (!all_finite(v)) return false;
    return true;
}

}  // namespace detail

template <class T, class F>
T simplex_integrate(F&& f, int n, double t, int nodes, const T& zero) {
    if (n < 0) throw std::invalid_argument("simplex_integrate: negative sector");
    auto fn = [&](const std::vector<double>& tau) -> T {
        T v = std::forward<F>(f)(tau);
        if (!detail::all_finite(v))
            throw std::domain_error("simplex_integrate: non-finite integrand value");
        return v;
    };
    if (n == 0) {
        const std::vector<double> empty;
        return fn(empty);
    }
    if (!(t > 0.0)) throw std::invalid_argument("simplex_integrate: t must be positive");
    if (nodes < 2) throw std::invalid_argument("simplex_integrate: need >= 2 nodes per axis");
    auto [x, w] = gauss_legendre(nodes);
    std::vector<double> chain(n);
    return detail::simplex_recurse<T>(fn, chain, n, t, nodes, x, w, zero);
}

/// One draw of the inhomogeneous Poisson chain with rate
/// rate_multiplier * nu(x) on [0, t), sampled exactly by thinning against
/// nu_max. Deterministic for a fixed seed. The default multiplier 2 is the
/// counting measure of the two-dimensional clock.
Chain sample_poisson_chain(const IntensityProfile& intensity, double t, std::uint64_t seed,
                           double rate_multiplier = 2.0);

/// Density of the chain under the Poisson law with rate rate_multiplier * nu:
/// prod_x (mult nu(x)) * exp(-int_0^t mult nu).
double poisson_weight(const Chain& chain, const IntensityProfile& intensity,
                      double rate_multiplier, double t);

/// Probability that the chain has exactly n points: Lambda^n/n! e^-Lambda
/// with Lambda = int_0^t mult nu.
double poisson_sector_mass(const IntensityProfile& intensity, double rate_multiplier, double t,
                           int n);

/// Product function tau -> prefactor * tensor of per-point clock states.
/// The base is either a fixed C^2 state or (nu(x), 1) from an intensity.
class ProductVector {
public:
    static ProductVector constant_base(TemporalVector base, cplx prefactor = 1.0);
    static ProductVector coherent_base(IntensityProfile nu, cplx prefactor = 1.0);
    /// All points in the future null state; the pseudo-vacuum.
    static ProductVector pseudo_vacuum();

    TemporalVector at(double x) const;
    cplx prefactor() const { return prefactor_; }
    int truncation() const { return truncation_; }
    void set_truncation(int n) { truncation_ = n; }

    /// int_0^t <xi(x), xi(x)> dx, exact for both base kinds: the coherent
    /// base (nu(x), 1) has pseudo-square 2 nu(x).
    double square_integral(double t) const;

    /// Tensor of per-point values on the chain, flattened to length 2^n with
    /// bit j of the index selecting the past (0) or future (1) component of
    /// point j. Prefactor included.
    std::vector<cplx> value_on(const Chain& chain) const;
    /// Same without the prefactor.
    std::vector<cplx> base_on(const Chain& chain) const;

private:
    bool coherent_ = false;
    TemporalVector base_{};
    std::optional<IntensityProfile> nu_;
    cplx prefactor_ = 1.0;
    int truncation_ = 20;
};

/// Partial sum over sectors n <= n_max of the squared pseudo-norm
/// sum_n int_{ordered simplex} prod_x <xi(x), xi(x)> dtau. The product
/// integrals collapse to s^n/n! with s = int_0^t <xi(x), xi(x)> dx, which is
/// evaluated by Gauss-Legendre; converges to exp(s) as n_max grows.
double fock_pseudo_norm_sq(const ProductVector& v, double t, int n_max);

/// Object vector paired with the pseudo-vacuum product state.
struct VacuumEmbedded {
    std::vector<cplx> eta;
    ProductVector vacuum;

    /// Compound pseudo-norm ||eta|| * ||vacuum part||; the embedding is
    /// isometric because the pseudo-vacuum has norm one.
    double pseudo_norm(double t, int n_max) const;
};

/// Embed eta alongside the pseudo-vacuum. Warns on stderr if eta is not
/// normalized.
VacuumEmbedded vacuum_embedding(std::vector<cplx> eta);

/// Closed-form action of the displacement generated by the past-directed
/// state (nu, 0): the coherent vector with base (nu(x), 1) and prefactor
/// exp(-int_0^t nu).
ProductVector weyl_on_vacuum(const IntensityProfile& nu, double t);

/// Fock vector truncated at sector n_grid, represented on all ascending
/// combinations of a shared pool of Gauss-Legendre nodes on [0, t]. Sector n
/// values live in (C^2)^{tensor n}, flattened as in ProductVector::value_on.
class TruncatedSectorGrid {
public:
    explicit TruncatedSectorGrid(double t, int nodes = 8, int n_grid = 3);

    static TruncatedSectorGrid from_product(const ProductVector& v, double t, int nodes = 8,
                                            int n_grid = 3);

    double horizon() const { return t_; }
    int nodes() const { return static_cast<int>(ys_.size()); }
    int max_sector() const { return n_grid_; }
    const std::vector<double>& node_points() const { return ys_; }
    const std::vector<double>& node_weights() const { return ws_; }

    /// Value on the combination `combo` (ascending node indices).
    std::vector<cplx>& at(const std::vector<int>& combo);
    const std::vector<cplx>& at(const std::vector<int>& combo) const;

    void for_each(const std::function<void(const std::vector<int>&, const std::vector<cplx>&)>& fn) const;

    TruncatedSectorGrid& operator+=(const TruncatedSectorGrid& o);
    TruncatedSectorGrid& operator*=(cplx s);

private:
    friend TruncatedSectorGrid creation_apply(const std::function<TemporalVector(double)>&,
                                              const TruncatedSectorGrid&);
    friend TruncatedSectorGrid annihilation_apply(const std::function<TemporalVector(double)>&,
                                                  const TruncatedSectorGrid&);
    friend cplx grid_pseudo_inner(const TruncatedSectorGrid&, const TruncatedSectorGrid&);

    double t_;
    int n_grid_;
    std::vector<double> ys_, ws_;
    // sector -> combination of node indices -> flattened tensor value
    std::vector<std::map<std::vector<int>, std::vector<cplx>>> sectors_;
};

/// Raising operator: inserts xi(y) into every chain slot; output truncated at
/// the grid's top sector.
TruncatedSectorGrid creation_apply(const std::function<TemporalVector(double)>& xi,
                                   const TruncatedSectorGrid& grid);

/// Lowering operator: contracts the dual of xi against one inserted point,
/// integrating over the node pool with its quadrature weights.
TruncatedSectorGrid annihilation_apply(const std::function<TemporalVector(double)>& xi,
                                       const TruncatedSectorGrid& grid);

/// Indefinite pairing of two flattened clock tensors of equal sector:
/// sum_i conj(u_i) v_{~i} with ~ the bitwise complement (the metric swaps
/// past and future in every slot).
cplx tensor_pseudo_inner(const std::vector<cplx>& u, const std::vector<cplx>& v);

/// Discrete pairing sum_n sum_combos W_combo <u(combo), v(combo)>; adjoint to
/// the creation/annihilation pair above without quadrature error.
cplx grid_pseudo_inner(const TruncatedSectorGrid& u, const TruncatedSectorGrid& v);

}  // namespace chronon
