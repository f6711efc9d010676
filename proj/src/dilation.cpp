#include "chronon/dilation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace chronon {

BlockMatrix2 BlockMatrix2::identity(int dim) {
    return {CMatrix::identity(dim), CMatrix::zero(dim, dim), CMatrix::zero(dim, dim),
            CMatrix::identity(dim)};
}

BlockMatrix2 BlockMatrix2::canonical_sigma(const CMatrix& g) {
    if (g.rows() != g.cols()) throw std::invalid_argument("canonical_sigma: G must be square");
    const int n = g.rows();
    return {CMatrix::identity(n), g, CMatrix::zero(n, n), CMatrix::identity(n)};
}

BlockMatrix2 BlockMatrix2::dag() const {
    return {d.adjoint(), b.adjoint(), c.adjoint(), a.adjoint()};
}

bool BlockMatrix2::is_pseudo_unitary(double tol) const {
    if (!(tol > 0.0)) throw std::invalid_argument("is_pseudo_unitary: tol must be positive");
    const BlockMatrix2 p = dag() * (*this);
    const BlockMatrix2 id = identity(dim());
    const double defect = std::max(std::max(max_abs_diff(p.a, id.a), max_abs_diff(p.b, id.b)),
                                   std::max(max_abs_diff(p.c, id.c), max_abs_diff(p.d, id.d)));
    return defect <= tol;
}

CMatrix BlockMatrix2::to_dense() const {
    const int n = dim();
    CMatrix m(2 * n, 2 * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            m(i, j) = a(i, j);
            m(i, j + n) = b(i, j);
            m(i + n, j) = c(i, j);
            m(i + n, j + n) = d(i, j);
        }
    return m;
}

BlockMatrix2 operator*(const BlockMatrix2& x, const BlockMatrix2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c,
            x.c * y.b + x.d * y.d};
}

BlockMatrix2 operator-(const BlockMatrix2& x, const BlockMatrix2& y) {
    return {x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d};
}

BlockMatrix2 boost_conjugate(const BlockMatrix2& m, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("boost_conjugate: lambda must be positive and finite");
    return {m.a, (1.0 / lambda) * m.b, lambda * m.c, m.d};
}

CMatrix vacuum_compression(const BlockMatrix2& m) { return m.b; }

CMatrix poisson_compression(const BlockMatrix2& m) {
    CMatrix s = m.a;
    s += m.b;
    s += m.c;
    s += m.d;
    return 0.5 * s;
}

BlockMatrix2 sigma_at(const HamiltonianSchedule& schedule, double x) {
    return BlockMatrix2::canonical_sigma(schedule.generator(x));
}

ObjectSpinor ObjectSpinor::future_input(std::vector<cplx> eta) {
    ObjectSpinor s;
    s.past.assign(eta.size(), cplx{});
    s.future = std::move(eta);
    return s;
}

ObjectSpinor apply_single_interaction(const HamiltonianSchedule& schedule, double x,
                                      const ObjectSpinor& in) {
    const CMatrix g = schedule.generator(x);
    ObjectSpinor out = in;
    const std::vector<cplx> gain = g.apply(in.future);
    for (size_t i = 0; i < out.past.size(); ++i) out.past[i] += gain[i];
    return out;
}

DilatedState::DilatedState(Chain chain, int dim) : chain_(std::move(chain)), dim_(dim) {
    if (chain_.size() > 12) throw std::invalid_argument("DilatedState: chain longer than 12");
    amps_.assign(size_t(1) << chain_.size(), std::vector<cplx>(dim_));
}

DilatedState DilatedState::vacuum_input(Chain chain, std::vector<cplx> eta) {
    DilatedState s(std::move(chain), static_cast<int>(eta.size()));
    s.amps_.back() = std::move(eta);  // all-future mask
    return s;
}

void DilatedState::apply_sigma_at_slot(const CMatrix& g, size_t slot) {
    const size_t bit = size_t(1) << slot;
    for (size_t mask = 0; mask < amps_.size(); ++mask) {
        if (mask & bit) continue;  // visit past-spin components once
        const std::vector<cplx> gain = g.apply(amps_[mask | bit]);
        for (size_t i = 0; i < amps_[mask].size(); ++i) amps_[mask][i] += gain[i];
    }
}

double DilatedState::max_abs_diff(const DilatedState& o) const {
    if (amps_.size() != o.amps_.size()) throw std::invalid_argument("DilatedState: shape mismatch");
    double m = 0.0;
    for (size_t k = 0; k < amps_.size(); ++k)
        m = std::max(m, vec_max_abs_diff(amps_[k], o.amps_[k]));
    return m;
}

ChainPropagator::ChainPropagator(const HamiltonianSchedule& schedule, Chain chain, double t)
    : schedule_(&schedule), chain_(std::move(chain)), t_(t) {
    if (chain_.size() > 12) throw std::invalid_argument("ChainPropagator: chain longer than 12");
}

void ChainPropagator::apply(DilatedState& state) const {
    const auto& xs = chain_.times();
    for (size_t j = 0; j < xs.size(); ++j) {
        if (xs[j] > t_) break;
        state.apply_sigma_at_slot(schedule_->generator(xs[j]), j);
    }
}

CMatrix ChainPropagator::dense() const {
    const int d = schedule_->dim();
    const size_t spin_dim = size_t(1) << chain_.size();
    const int total = static_cast<int>(spin_dim) * d;
    CMatrix m(total, total);
    for (size_t mask = 0; mask < spin_dim; ++mask) {
        for (int i = 0; i < d; ++i) {
            DilatedState basis(chain_, d);
            basis.amp(mask)[i] = 1.0;
            apply(basis);
            const int col = static_cast<int>(mask) * d + i;
            for (size_t m2 = 0; m2 < spin_dim; ++m2)
                for (int r = 0; r < d; ++r) m(static_cast<int>(m2) * d + r, col) = basis.amp(m2)[r];
        }
    }
    return m;
}

JumpTrajectory jump_evolution(const HamiltonianSchedule& schedule, const Chain& chain,
                              const std::vector<double>& t_grid, std::vector<cplx> eta) {
    for (size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1]))
            throw std::invalid_argument("jump_evolution: t_grid must be increasing");

    JumpTrajectory traj;
    DilatedState state = DilatedState::vacuum_input(chain, std::move(eta));
    size_t next = 0;  // next chain point to apply
    const auto& xs = chain.times();
    for (double t : t_grid) {
        while (next < xs.size() && xs[next] <= t) {
            state.apply_sigma_at_slot(schedule.generator(xs[next]), next);
            ++next;
        }
        traj.times.push_back(t);
        traj.states.push_back(state);
        traj.counts.push_back({t, static_cast<int>(next)});
    }
    return traj;
}

namespace {

CMatrix ordered_generator_product(const HamiltonianSchedule& schedule,
                                  const std::vector<double>& tau) {
    CMatrix m = schedule.generator(tau[0]);
    for (size_t i = 1; i < tau.size(); ++i) m = schedule.generator(tau[i]) * m;
    return m;
}

// RK4 on the coupled family dT_n/dx = G(x) T_{n-1}, T_0 = I, returning the
// values of all T_n at x = t.
std::vector<CMatrix> dyson_terms_by_recursion(const HamiltonianSchedule& schedule, double t,
                                              int order, int steps) {
    const int d = schedule.dim();
    std::vector<CMatrix> terms(order + 1, CMatrix::zero(d, d));
    terms[0] = CMatrix::identity(d);
    if (order == 0 || t == 0.0) return terms;

    const double h = t / steps;
    auto deriv = [&](const CMatrix& g, const std::vector<CMatrix>& y) {
        std::vector<CMatrix> dy(order + 1, CMatrix::zero(d, d));
        for (int n = 1; n <= order; ++n) dy[n] = g * y[n - 1];
        return dy;
    };
    auto shifted = [&](const std::vector<CMatrix>& y, double c, const std::vector<CMatrix>& k) {
        std::vector<CMatrix> out = y;
        for (int n = 1; n <= order; ++n) out[n] += c * k[n];
        return out;
    };

    for (int i = 0; i < steps; ++i) {
        const double x = h * i;
        const CMatrix g1 = schedule.generator(x);
        const CMatrix g2 = schedule.generator(x + 0.5 * h);
        const CMatrix g3 = schedule.generator(x + h);
        const auto k1 = deriv(g1, terms);
        const auto k2 = deriv(g2, shifted(terms, 0.5 * h, k1));
        const auto k3 = deriv(g2, shifted(terms, 0.5 * h, k2));
        const auto k4 = deriv(g3, shifted(terms, h, k3));
        for (int n = 1; n <= order; ++n) {
            CMatrix incr = k1[n];
            incr += 2.0 * k2[n];
            incr += 2.0 * k3[n];
            incr += k4[n];
            terms[n] += (h / 6.0) * incr;
        }
    }
    return terms;
}

}  // namespace

PropagatorEstimate vacuum_expectation_dyson(const HamiltonianSchedule& schedule, double t,
                                            int order, int nodes, int quad_sector_cap,
                                            int tail_steps) {
    if (order < 0) throw std::invalid_argument("vacuum_expectation_dyson: order >= 0");
    const int d = schedule.dim();
    CMatrix sum = CMatrix::identity(d);

    const int quad_cap = std::min(order, quad_sector_cap);
    for (int n = 1; n <= quad_cap; ++n) {
        auto f = [&](const std::vector<double>& tau) {
            return ordered_generator_product(schedule, tau);
        };
        sum += simplex_integrate<CMatrix>(f, n, t, nodes, CMatrix::zero(d, d));
    }
    if (order > quad_cap) {
        const auto terms = dyson_terms_by_recursion(schedule, t, order, tail_steps);
        for (int n = quad_cap + 1; n <= order; ++n) sum += terms[n];
    }

    PropagatorEstimate est;
    est.matrix = std::move(sum);
    est.method = PropagatorMethod::dyson;
    est.truncation_order = order;
    return est;
}

PropagatorEstimate picard_propagator(const HamiltonianSchedule& schedule, double t, int order,
                                     int steps) {
    if (order < 0) throw std::invalid_argument("picard_propagator: order >= 0");
    if (steps < 2) throw std::invalid_argument("picard_propagator: steps >= 2");
    const int d = schedule.dim();
    const int m = steps;
    const double h = t / m;

    std::vector<CMatrix> gs(m + 1, CMatrix::zero(d, d));
    for (int j = 0; j <= m; ++j) gs[j] = schedule.generator(h * j);

    std::vector<CMatrix> v(m + 1, CMatrix::identity(d));
    std::vector<CMatrix> f(m + 1, CMatrix::zero(d, d));
    for (int k = 1; k <= order; ++k) {
        for (int j = 0; j <= m; ++j) f[j] = gs[j] * v[j];
        // cumulative integral with a third-order three-point rule
        std::vector<CMatrix> integral(m + 1, CMatrix::zero(d, d));
        if (m >= 2) {
            CMatrix first = 5.0 * f[0];
            first += 8.0 * f[1];
            first -= f[2];
            integral[1] = (h / 12.0) * first;
            for (int j = 2; j <= m; ++j) {
                CMatrix panel = 5.0 * f[j];
                panel += 8.0 * f[j - 1];
                panel -= f[j - 2];
                integral[j] = integral[j - 1] + (h / 12.0) * panel;
            }
        }
        for (int j = 0; j <= m; ++j) {
            v[j] = CMatrix::identity(d);
            v[j] += integral[j];
        }
    }

    PropagatorEstimate est;
    est.matrix = v[m];
    est.method = PropagatorMethod::picard;
    est.truncation_order = order;
    return est;
}

CMatrix compressed_chain_weight(const HamiltonianSchedule& schedule,
                                const IntensityProfile& intensity, const Chain& chain, double t) {
    if (!chain.times().empty() && chain.max_time() >= t)
        throw std::invalid_argument("compressed_chain_weight: chain not contained in [0, t)");
    const int d = schedule.dim();
    CMatrix w = CMatrix::identity(d);
    for (double x : chain.times()) {
        const double nu = intensity.value(x);
        CMatrix factor = CMatrix::identity(d);
        factor += cplx(1.0 / (2.0 * nu), 0.0) * schedule.generator(x);
        w = factor * w;  // later factors to the left
    }
    return w;
}

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// In-order pairwise sum of per-sample weights over [lo, hi); the shape
// depends only on the index range, never on the thread layout.
CMatrix pairwise_weight_sum(const HamiltonianSchedule& schedule, const IntensityProfile& intensity,
                            double t, std::uint64_t seed, long long lo, long long hi) {
    if (hi - lo <= 64) {
        CMatrix acc = CMatrix::zero(schedule.dim(), schedule.dim());
        for (long long i = lo; i < hi; ++i) {
            const std::uint64_t si = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(i)));
            const Chain chain = sample_poisson_chain(intensity, t, si);
            acc += compressed_chain_weight(schedule, intensity, chain, t);
        }
        return acc;
    }
    const long long mid = lo + (hi - lo) / 2;
    CMatrix left = pairwise_weight_sum(schedule, intensity, t, seed, lo, mid);
    left += pairwise_weight_sum(schedule, intensity, t, seed, mid, hi);
    return left;
}

}  // namespace

PropagatorEstimate poisson_expectation_mc(const HamiltonianSchedule& schedule,
                                          const IntensityProfile& intensity, double t,
                                          long long samples, std::uint64_t seed, int threads,
                                          int batches) {
    if (samples < 1) throw std::invalid_argument("poisson_expectation_mc: samples >= 1");
    if (batches < 2) throw std::invalid_argument("poisson_expectation_mc: batches >= 2");
    if (threads < 1) throw std::invalid_argument("poisson_expectation_mc: threads >= 1");
    batches = static_cast<int>(std::min<long long>(batches, samples));

    const int d = schedule.dim();
    std::vector<CMatrix> batch_sum(batches, CMatrix::zero(d, d));
    std::vector<long long> batch_lo(batches + 1, 0);
    for (int b = 0; b <= batches; ++b) batch_lo[b] = samples * b / batches;

    auto run_batch = [&](int b) {
        batch_sum[b] =
            pairwise_weight_sum(schedule, intensity, t, seed, batch_lo[b], batch_lo[b + 1]);
    };

    if (threads == 1) {
        for (int b = 0; b < batches; ++b) run_batch(b);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        for (int w = 0; w < std::min(threads, batches); ++w)
            pool.emplace_back([&] {
                for (;;) {
                    const int b = next.fetch_add(1);
                    if (b >= batches) return;
                    run_batch(b);
                }
            });
        for (auto& th : pool) th.join();
    }

    CMatrix total = CMatrix::zero(d, d);
    for (int b = 0; b < batches; ++b) total += batch_sum[b];
    CMatrix mean = (1.0 / double(samples)) * total;

    // entrywise batch-means standard error
    std::vector<CMatrix> batch_mean(batches, CMatrix::zero(d, d));
    for (int b = 0; b < batches; ++b)
        batch_mean[b] = (1.0 / double(batch_lo[b + 1] - batch_lo[b])) * batch_sum[b];
    std::vector<double> se(static_cast<size_t>(d) * d, 0.0);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double s = 0.0;
            for (int b = 0; b < batches; ++b) s += std::norm(batch_mean[b](i, j) - mean(i, j));
            se[static_cast<size_t>(i) * d + j] = std::sqrt(s / (double(batches) * (batches - 1)));
        }

    PropagatorEstimate est;
    est.matrix = std::move(mean);
    est.method = PropagatorMethod::poisson_mc;
    est.mc_samples = samples;
    est.mc_stderr = *std::max_element(se.begin(), se.end());
    est.seed = seed;
    est.mc_stderr_entries = std::move(se);
    return est;
}

CMatrix compressed_via_tensor(const HamiltonianSchedule& schedule, const Chain& chain, double t) {
    const int d = schedule.dim();
    const ChainPropagator prop(schedule, chain, t);
    CMatrix out(d, d);
    for (int j = 0; j < d; ++j) {
        std::vector<cplx> eta(d);
        eta[j] = 1.0;
        DilatedState state = DilatedState::vacuum_input(chain, std::move(eta));
        prop.apply(state);
        // compress every slot against the pseudo-vacuum: its dual picks the
        // past component, so the compressed column is the all-past amplitude
        const std::vector<cplx>& col = state.amp(0);
        for (int i = 0; i < d; ++i) out(i, j) = col[i];
    }
    return out;
}

double earth_projection_defect(const HamiltonianSchedule& schedule, double t, int order,
                               int nodes, int ref_steps) {
    const int d = schedule.dim();
    CMatrix sum = CMatrix::identity(d);
    for (int n = 1; n <= order; ++n) {
        auto f = [&](const std::vector<double>& tau) {
            return compressed_via_tensor(schedule, Chain(tau), t);
        };
        sum += simplex_integrate<CMatrix>(f, n, t, nodes, CMatrix::zero(d, d));
    }
    const CMatrix ref = reference_propagator(schedule, 0.0, t, ref_steps).matrix;
    return max_abs_diff(sum, ref);
}

double max_compression_defect(const HamiltonianSchedule& schedule, const std::vector<Chain>& chains,
                              double t) {
    double worst = 0.0;
    for (const auto& chain : chains) {
        const CMatrix tensor_route = compressed_via_tensor(schedule, chain, t);
        CMatrix product = CMatrix::identity(schedule.dim());
        if (!chain.times().empty()) product = ordered_generator_product(schedule, chain.times());
        worst = std::max(worst, max_abs_diff(tensor_route, product));
    }
    return worst;
}

}  // namespace chronon
