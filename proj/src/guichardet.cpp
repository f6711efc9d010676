#include "chronon/guichardet.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <random>

namespace chronon {

Chain::Chain(std::vector<double> times) : times_(std::move(times)) {
    for (size_t i = 0; i < times_.size(); ++i) {
        if (!std::isfinite(times_[i]) || times_[i] < 0.0)
            throw std::invalid_argument("Chain: times must be finite and >= 0");
        if (i > 0 && !(times_[i] > times_[i - 1]))
            throw std::invalid_argument("Chain: times must be strictly increasing");
    }
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1");
    std::vector<double> x(n), w(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Newton iteration from the Chebyshev estimate
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    return {x, w};
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre_on(int n, double a, double b) {
    auto [x, w] = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < n; ++i) {
        x[i] = mid + half * x[i];
        w[i] *= half;
    }
    return {x, w};
}

namespace {

// mt19937 started from structured seeds (sequential integers) produces
// correlated first outputs; scramble before seeding
std::uint64_t scramble_seed(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace

Chain sample_poisson_chain(const IntensityProfile& intensity, double t, std::uint64_t seed,
                           double rate_multiplier) {
    if (!(t > 0.0)) throw std::invalid_argument("sample_poisson_chain: t must be positive");
    if (!(rate_multiplier > 0.0))
        throw std::invalid_argument("sample_poisson_chain: rate multiplier must be positive");
    if (intensity.domain_end() < t)
        throw std::invalid_argument("sample_poisson_chain: intensity domain shorter than t");

    std::mt19937_64 rng(scramble_seed(seed));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double rate_cap = rate_multiplier * intensity.nu_max();

    std::vector<double> pts;
    double x = 0.0;
    for (;;) {
        const double u = unif(rng);
        x += -std::log1p(-u) / rate_cap;
        if (x >= t) break;
        const double accept = intensity.value(x) / intensity.nu_max();
        if (unif(rng) < accept) pts.push_back(x);
    }
    return Chain(std::move(pts));
}

double poisson_weight(const Chain& chain, const IntensityProfile& intensity,
                      double rate_multiplier, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("poisson_weight: t must be positive");
    if (!chain.times().empty() && chain.max_time() >= t)
        throw std::invalid_argument("poisson_weight: chain not contained in [0, t)");
    double w = std::exp(-rate_multiplier * intensity.integral_to(t));
    for (double x : chain.times()) w *= rate_multiplier * intensity.value(x);
    return w;
}

double poisson_sector_mass(const IntensityProfile& intensity, double rate_multiplier, double t,
                           int n) {
    if (n < 0) throw std::invalid_argument("poisson_sector_mass: n >= 0");
    const double lambda = rate_multiplier * intensity.integral_to(t);
    double log_mass = -lambda + n * std::log(lambda) - std::lgamma(n + 1.0);
    return n == 0 ? std::exp(-lambda) : std::exp(log_mass);
}

ProductVector ProductVector::constant_base(TemporalVector base, cplx prefactor) {
    ProductVector v;
    v.coherent_ = false;
    v.base_ = base;
    v.prefactor_ = prefactor;
    return v;
}

ProductVector ProductVector::coherent_base(IntensityProfile nu, cplx prefactor) {
    ProductVector v;
    v.coherent_ = true;
    v.nu_ = std::move(nu);
    v.prefactor_ = prefactor;
    return v;
}

ProductVector ProductVector::pseudo_vacuum() {
    return constant_base(TemporalVector::future(), 1.0);
}

TemporalVector ProductVector::at(double x) const {
    if (!coherent_) return base_;
    return {cplx(nu_->value(x), 0.0), cplx(1.0, 0.0)};
}

std::vector<cplx> ProductVector::base_on(const Chain& chain) const {
    const size_t n = chain.size();
    std::vector<cplx> out(size_t(1) << n, cplx(1.0, 0.0));
    for (size_t j = 0; j < n; ++j) {
        const TemporalVector v = at(chain.times()[j]);
        const size_t bit = size_t(1) << j;
        for (size_t idx = 0; idx < out.size(); ++idx) out[idx] *= (idx & bit) ? v.plus : v.minus;
    }
    return out;
}

std::vector<cplx> ProductVector::value_on(const Chain& chain) const {
    std::vector<cplx> out = base_on(chain);
    for (auto& v : out) v *= prefactor_;
    return out;
}

double ProductVector::square_integral(double t) const {
    if (coherent_) return 2.0 * nu_->integral_to(t);
    return t * std::real(pseudo_inner(base_, base_));
}

double fock_pseudo_norm_sq(const ProductVector& v, double t, int n_max) {
    if (n_max < 0) throw std::invalid_argument("fock_pseudo_norm_sq: n_max >= 0");
    const double s = v.square_integral(t);
    double sum = 0.0, term = 1.0;
    for (int n = 0; n <= n_max; ++n) {
        if (n > 0) term *= s / n;
        sum += term;
    }
    return std::norm(v.prefactor()) * sum;
}

VacuumEmbedded vacuum_embedding(std::vector<cplx> eta) {
    const double n = vec_norm(eta);
    if (std::abs(n - 1.0) > 1e-9 && n != 0.0)
        std::cerr << "vacuum_embedding: warning: input object vector has norm " << n << "\n";
    return VacuumEmbedded{std::move(eta), ProductVector::pseudo_vacuum()};
}

double VacuumEmbedded::pseudo_norm(double t, int n_max) const {
    return vec_norm(eta) * std::sqrt(fock_pseudo_norm_sq(vacuum, t, n_max));
}

ProductVector weyl_on_vacuum(const IntensityProfile& nu, double t) {
    const double total = nu.integral_to(t);
    return ProductVector::coherent_base(nu, std::exp(cplx(-total, 0.0)));
}

TruncatedSectorGrid::TruncatedSectorGrid(double t, int nodes, int n_grid) : t_(t), n_grid_(n_grid) {
    if (!(t > 0.0)) throw std::invalid_argument("TruncatedSectorGrid: t must be positive");
    if (nodes < 1 || n_grid < 1 || n_grid > nodes)
        throw std::invalid_argument("TruncatedSectorGrid: need 1 <= n_grid <= nodes");
    auto [x, w] = gauss_legendre_on(nodes, 0.0, t);
    ys_ = std::move(x);
    ws_ = std::move(w);
    sectors_.resize(n_grid + 1);

    // enumerate ascending combinations per sector, zero-initialized
    for (int n = 0; n <= n_grid; ++n) {
        std::vector<int> combo(n);
        std::function<void(int, int)> rec = [&](int pos, int start) {
            if (pos == n) {
                sectors_[n].emplace(combo, std::vector<cplx>(size_t(1) << n));
                return;
            }
            for (int i = start; i < nodes; ++i) {
                combo[pos] = i;
                rec(pos + 1, i + 1);
            }
        };
        rec(0, 0);
    }
}

TruncatedSectorGrid TruncatedSectorGrid::from_product(const ProductVector& v, double t, int nodes,
                                                      int n_grid) {
    TruncatedSectorGrid g(t, nodes, n_grid);
    for (int n = 0; n <= n_grid; ++n) {
        for (auto& [combo, val] : g.sectors_[n]) {
            std::vector<double> times;
            times.reserve(combo.size());
            for (int i : combo) times.push_back(g.ys_[i]);
            val = v.value_on(Chain(std::move(times)));
        }
    }
    return g;
}

std::vector<cplx>& TruncatedSectorGrid::at(const std::vector<int>& combo) {
    return sectors_.at(combo.size()).at(combo);
}
const std::vector<cplx>& TruncatedSectorGrid::at(const std::vector<int>& combo) const {
    return sectors_.at(combo.size()).at(combo);
}

void TruncatedSectorGrid::for_each(
    const std::function<void(const std::vector<int>&, const std::vector<cplx>&)>& fn) const {
    for (const auto& sector : sectors_)
        for (const auto& [combo, val] : sector) fn(combo, val);
}

TruncatedSectorGrid& TruncatedSectorGrid::operator+=(const TruncatedSectorGrid& o) {
    for (size_t n = 0; n < sectors_.size(); ++n)
        for (auto& [combo, val] : sectors_[n]) {
            const auto& other = o.sectors_[n].at(combo);
            for (size_t k = 0; k < val.size(); ++k) val[k] += other[k];
        }
    return *this;
}

TruncatedSectorGrid& TruncatedSectorGrid::operator*=(cplx s) {
    for (auto& sector : sectors_)
        for (auto& [combo, val] : sector)
            for (auto& v : val) v *= s;
    return *this;
}

namespace {

// Insert a single-slot value `point` at slot `slot` of the 2^(n-1)-tensor
// `rest`, producing a 2^n tensor.
std::vector<cplx> insert_slot(const TemporalVector& point, int slot, const std::vector<cplx>& rest,
                              int n) {
    std::vector<cplx> out(size_t(1) << n);
    const size_t lo_mask = (size_t(1) << slot) - 1;
    for (size_t idx = 0; idx < out.size(); ++idx) {
        const size_t bit = (idx >> slot) & 1;
        const size_t rest_idx = (idx & lo_mask) | ((idx >> (slot + 1)) << slot);
        out[idx] = (bit ? point.plus : point.minus) * rest[rest_idx];
    }
    return out;
}

// Contract the dual of `point` against slot `slot` of the 2^n tensor,
// producing a 2^(n-1) tensor.
std::vector<cplx> contract_slot(const TemporalVector& point, int slot,
                                const std::vector<cplx>& big, int n) {
    const DualTemporalVector d = dual(point);
    std::vector<cplx> out(size_t(1) << (n - 1));
    const size_t lo_mask = (size_t(1) << slot) - 1;
    for (size_t idx = 0; idx < out.size(); ++idx) {
        const size_t base = (idx & lo_mask) | ((idx >> slot) << (slot + 1));
        out[idx] = d.lo_minus * big[base] + d.lo_plus * big[base | (size_t(1) << slot)];
    }
    return out;
}

}  // namespace

TruncatedSectorGrid creation_apply(const std::function<TemporalVector(double)>& xi,
                                   const TruncatedSectorGrid& grid) {
    TruncatedSectorGrid out(grid.t_, grid.nodes(), grid.n_grid_);
    for (int n = 1; n <= grid.n_grid_; ++n) {
        for (auto& [combo, val] : out.sectors_[n]) {
            // sum over the point that was created
            for (size_t slot = 0; slot < combo.size(); ++slot) {
                std::vector<int> rest;
                rest.reserve(combo.size() - 1);
                for (size_t j = 0; j < combo.size(); ++j)
                    if (j != slot) rest.push_back(combo[j]);
                const auto& psi = grid.sectors_[n - 1].at(rest);
                const TemporalVector pt = xi(grid.ys_[combo[slot]]);
                const auto term = insert_slot(pt, static_cast<int>(slot), psi, n);
                for (size_t k = 0; k < val.size(); ++k) val[k] += term[k];
            }
        }
    }
    return out;
}

TruncatedSectorGrid annihilation_apply(const std::function<TemporalVector(double)>& xi,
                                       const TruncatedSectorGrid& grid) {
    TruncatedSectorGrid out(grid.t_, grid.nodes(), grid.n_grid_);
    for (int n = 0; n < grid.n_grid_; ++n) {
        for (auto& [combo, val] : out.sectors_[n]) {
            for (int i = 0; i < grid.nodes(); ++i) {
                // skip pool points already in the chain
                if (std::binary_search(combo.begin(), combo.end(), i)) continue;
                std::vector<int> bigger = combo;
                bigger.insert(std::upper_bound(bigger.begin(), bigger.end(), i), i);
                const int slot =
                    static_cast<int>(std::lower_bound(bigger.begin(), bigger.end(), i) -
                                     bigger.begin());
                const auto& psi = grid.sectors_[n + 1].at(bigger);
                const TemporalVector pt = xi(grid.ys_[i]);
                const auto term = contract_slot(pt, slot, psi, n + 1);
                for (size_t k = 0; k < val.size(); ++k) val[k] += grid.ws_[i] * term[k];
            }
        }
    }
    return out;
}

cplx tensor_pseudo_inner(const std::vector<cplx>& u, const std::vector<cplx>& v) {
    if (u.size() != v.size()) throw std::invalid_argument("tensor_pseudo_inner: size mismatch");
    const size_t mask = u.size() - 1;
    cplx s{};
    for (size_t i = 0; i < u.size(); ++i) s += std::conj(u[i]) * v[i ^ mask];
    return s;
}

cplx grid_pseudo_inner(const TruncatedSectorGrid& u, const TruncatedSectorGrid& v) {
    if (u.nodes() != v.nodes() || u.n_grid_ != v.n_grid_)
        throw std::invalid_argument("grid_pseudo_inner: grid mismatch");
    cplx s{};
    for (size_t n = 0; n < u.sectors_.size(); ++n) {
        for (const auto& [combo, uval] : u.sectors_[n]) {
            double wprod = 1.0;
            for (int i : combo) wprod *= u.ws_[i];
            s += wprod * tensor_pseudo_inner(uval, v.sectors_[n].at(combo));
        }
    }
    return s;
}

}  // namespace chronon
