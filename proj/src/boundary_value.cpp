#include "chronon/boundary_value.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

namespace chronon {

ExtendedLattice::ExtendedLattice(double delta_, int half_extent_)
    : delta(delta_), half_extent(half_extent_) {
    if (!(delta > 0.0)) throw std::invalid_argument("ExtendedLattice: delta must be positive");
    if (half_extent < 1) throw std::invalid_argument("ExtendedLattice: extent too small");
}

double ExtendedLattice::position(int a) const {
    if (a < 0 || a >= n_sites()) throw std::out_of_range("ExtendedLattice: site out of range");
    return a >= origin_in() ? (a - origin_in()) * delta : (a - origin_out()) * delta;
}

int ExtendedLattice::site_of_positive(double x) const {
    if (!(x > 0.0)) throw std::invalid_argument("ExtendedLattice: expected positive coordinate");
    const int s = static_cast<int>(std::lround(x / delta));
    if (s < 1 || origin_in() + s >= n_sites())
        throw std::out_of_range("ExtendedLattice: coordinate outside extent");
    return origin_in() + s;
}

std::string ExtendedLattice::site_label(int a) const {
    if (a == origin_out()) return "0~";
    if (a == origin_in()) return "0";
    if (a > origin_in()) return std::to_string(a - origin_in());
    return std::to_string(a - origin_out());
}

SectorWave::SectorWave(ExtendedLattice lattice, int k, int dim)
    : lat_(lattice), k_(k), dim_(dim) {
    if (k < 0 || k > 2) throw std::invalid_argument("SectorWave: k must be 0, 1 or 2");
    if (dim < 1) throw std::invalid_argument("SectorWave: dim >= 1");
}

SectorWave SectorWave::chain_wave(const ExtendedLattice& lat, const Chain& chain,
                                  std::vector<cplx> eta) {
    SectorWave w(lat, static_cast<int>(chain.size()), static_cast<int>(eta.size()));
    std::vector<int> key;
    for (double x : chain.times()) key.push_back(lat.site_of_positive(x));
    for (size_t i = 1; i < key.size(); ++i)
        if (key[i] - key[i - 1] < 2)
            throw std::invalid_argument("SectorWave: chain gaps must be at least 2*delta");
    w.amps_[key] = std::move(eta);  // the empty key carries the 0-particle amplitude
    return w;
}

SectorWave SectorWave::packet_wave(const ExtendedLattice& lat,
                                   const std::function<double(double)>& profile,
                                   std::vector<cplx> eta) {
    SectorWave w(lat, 1, static_cast<int>(eta.size()));
    for (int a = lat.origin_in() + 1; a < lat.n_sites(); ++a) {
        const double f = profile(lat.position(a));
        if (f == 0.0) continue;
        std::vector<cplx> v = eta;
        for (auto& c : v) c *= f;
        w.amps_[{a}] = std::move(v);
    }
    return w;
}

std::vector<cplx> SectorWave::value(const std::vector<int>& key) const {
    const auto it = amps_.find(key);
    if (it == amps_.end()) return std::vector<cplx>(dim_);
    return it->second;
}

void SectorWave::add(const std::vector<int>& key, const std::vector<cplx>& v) {
    auto it = amps_.find(key);
    if (it == amps_.end())
        amps_.emplace(key, v);
    else
        for (size_t i = 0; i < v.size(); ++i) it->second[i] += v[i];
}

double SectorWave::max_abs() const {
    double m = 0.0;
    for (const auto& [key, v] : amps_)
        for (const auto& c : v) m = std::max(m, std::abs(c));
    return m;
}

double SectorWave::max_abs_diff(const SectorWave& o) const {
    double m = 0.0;
    for (const auto& [key, v] : amps_) m = std::max(m, vec_max_abs_diff(v, o.value(key)));
    for (const auto& [key, v] : o.amps_)
        if (!amps_.contains(key)) m = std::max(m, vec_max_abs_diff(v, value(key)));
    return m;
}

void free_shift_step(SectorWave& wave) {
    std::map<std::vector<int>, std::vector<cplx>> shifted;
    for (auto& [key, v] : wave.amps()) {
        std::vector<int> nk = key;
        for (int& a : nk) {
            if (a == 0)
                throw std::runtime_error(
                    "free_shift_step: support reached the lattice edge; extent too small");
            --a;
        }
        shifted.emplace(std::move(nk), std::move(v));
    }
    wave.amps() = std::move(shifted);
}

void boundary_step(SectorWave& wave, const HamiltonianSchedule& schedule, double t) {
    const int in = wave.lattice().origin_in();
    const int out = wave.lattice().origin_out();

    std::vector<std::pair<std::vector<int>, std::vector<cplx>>> crossings;
    for (const auto& [key, v] : wave.amps()) {
        const auto it = std::find(key.begin(), key.end(), in);
        if (it == key.end()) continue;
        std::vector<int> img = key;
        img[it - key.begin()] = out;
        if (std::count(img.begin(), img.end(), out) > 1)
            throw std::runtime_error(
                "boundary_step: origin collision; chain resolution finer than the lattice");
        std::sort(img.begin(), img.end());
        crossings.emplace_back(std::move(img), v);
    }
    if (crossings.empty()) return;

    const CMatrix g = schedule.generator(t);
    for (auto& [img, v] : crossings) {
        const std::vector<cplx> gain = g.apply(v);
        if (vec_norm(gain) == 0.0) continue;  // nothing to deposit
        wave.add(img, gain);
    }
}

void evolve(SectorWave& wave, const HamiltonianSchedule& schedule, double t0, int steps,
            bool with_boundary) {
    for (int j = 1; j <= steps; ++j) {
        free_shift_step(wave);
        if (with_boundary) boundary_step(wave, schedule, t0 + j * wave.lattice().delta);
    }
}

cplx compound_pseudo_pairing(const SectorWave& u, const SectorWave& v,
                             const std::vector<cplx>& u0, const std::vector<cplx>& v0) {
    cplx s = vec_dot(u0, v0);
    // occupied sectors pair through the per-point characters, which the
    // domain convention fixes to null states on both sides
    for (const auto& [key, uval] : u.amps()) {
        cplx character(1.0, 0.0);
        for (int a : key) {
            const TemporalVector chi = a <= u.lattice().origin_out() ? TemporalVector::past()
                                                                     : TemporalVector::future();
            character *= pseudo_inner(chi, chi);
        }
        s += character * vec_dot(uval, v.value(key));
    }
    return s;
}

namespace {

std::vector<cplx> generic_eta(int dim) {
    std::vector<cplx> eta(dim);
    for (int i = 0; i < dim; ++i) eta[i] = cplx(1.0 + 0.5 * i, 0.25 - 0.1 * i);
    const double n = vec_norm(eta);
    for (auto& c : eta) c /= n;
    return eta;
}

}  // namespace

double equivalence_defect(const HamiltonianSchedule& schedule, const Chain& chain, double t,
                          double delta, bool reversed_reference) {
    if (chain.size() > 2) throw std::invalid_argument("equivalence_defect: at most 2 particles");
    if (!(t > 0.0) || !(delta > 0.0))
        throw std::invalid_argument("equivalence_defect: t and delta must be positive");
    for (double x : chain.times())
        if (std::abs(x - t) < delta)
            throw std::invalid_argument(
                "equivalence_defect: t must be at least one step from every chain point");

    const int n_steps = static_cast<int>(std::lround(t / delta));
    std::vector<int> s_sites;
    for (double x : chain.times()) {
        const int s = static_cast<int>(std::lround(x / delta));
        if (s < 1) throw std::invalid_argument("equivalence_defect: chain point below resolution");
        s_sites.push_back(s);
    }
    int max_s = 0, min_s = n_steps;
    for (int s : s_sites) {
        max_s = std::max(max_s, s);
        min_s = std::min(min_s, s);
    }
    const int half = std::max({max_s, n_steps - std::min(min_s, n_steps) + 2, 2}) + 2;
    const ExtendedLattice lat(delta, half);

    const int dim = schedule.dim();
    const std::vector<cplx> eta = generic_eta(dim);

    SectorWave wave = SectorWave::chain_wave(lat, chain, eta);
    evolve(wave, schedule, 0.0, n_steps);

    const JumpTrajectory traj = jump_evolution(schedule, chain, {t}, eta);
    const DilatedState& jump_state = traj.states.front();

    // lattice-crossed particles (origin hop at step s_i)
    std::vector<size_t> crossed;
    for (size_t i = 0; i < s_sites.size(); ++i)
        if (s_sites[i] <= n_steps) crossed.push_back(i);

    double defect = 0.0;
    const size_t n = chain.size();
    for (size_t pick = 0; pick < (size_t(1) << crossed.size()); ++pick) {
        std::vector<bool> hopped(n, false);
        for (size_t b = 0; b < crossed.size(); ++b)
            if (pick & (size_t(1) << b)) hopped[crossed[b]] = true;

        std::vector<int> key(n);
        size_t mask = 0;
        for (size_t i = 0; i < n; ++i) {
            key[i] = lat.origin_in() + s_sites[i] - n_steps - (hopped[i] ? 1 : 0);
            if (!hopped[i]) mask |= size_t(1) << i;
        }

        std::vector<cplx> expected;
        if (!reversed_reference) {
            expected = jump_state.amp(mask);
        } else {
            // anti-chronological target: latest point applied first
            expected = eta;
            for (size_t i = n; i-- > 0;)
                if (hopped[i]) expected = schedule.generator(chain.times()[i]).apply(expected);
        }
        defect = std::max(defect, vec_max_abs_diff(wave.value(key), expected));
    }
    return defect;
}

double cocycle_defect(const HamiltonianSchedule& schedule, double r, double t, double delta,
                      double probe_x) {
    if (!(r >= 0.0) || !(t >= 0.0))
        throw std::invalid_argument("cocycle_defect: r and t must be >= 0");
    const int n_t = static_cast<int>(std::lround(t / delta));
    const int n_r = static_cast<int>(std::lround(r / delta));
    if (n_r == 0 && r == 0.0) return 0.0;
    if (probe_x <= 0.0) probe_x = t + 0.45 * r;

    const int s_probe = static_cast<int>(std::lround(probe_x / delta));
    if (s_probe < 1) throw std::invalid_argument("cocycle_defect: probe below resolution");
    const int total = n_t + n_r;
    const int half = std::max({s_probe, total - std::min(s_probe, total) + 2, 2}) + 2;
    const ExtendedLattice lat(delta, half);

    const std::vector<cplx> eta = generic_eta(schedule.dim());
    const Chain probe({s_probe * delta});

    SectorWave composed = SectorWave::chain_wave(lat, probe, eta);
    evolve(composed, schedule, 0.0, n_t);
    evolve(composed, schedule, t, n_r);  // boundary clock restarts at the exact t

    SectorWave direct = SectorWave::chain_wave(lat, probe, eta);
    evolve(direct, schedule, 0.0, total);

    return composed.max_abs_diff(direct);
}

WaveHistory evolve_with_history(SectorWave wave, const HamiltonianSchedule& schedule, double t0,
                                int steps) {
    if (wave.k() != 1) throw std::invalid_argument("evolve_with_history: one-particle sector only");
    WaveHistory h;
    h.lattice = wave.lattice();
    h.dim = wave.dim();
    h.t0 = t0;

    auto dense = [&](const SectorWave& w) {
        std::vector<std::vector<cplx>> frame(w.lattice().n_sites(), std::vector<cplx>(w.dim()));
        for (const auto& [key, v] : w.amps()) frame[key[0]] = v;
        return frame;
    };

    h.frames.push_back(dense(wave));
    for (int j = 1; j <= steps; ++j) {
        const double tj = t0 + j * wave.lattice().delta;
        free_shift_step(wave);
        WaveHistory::BoundaryRow row;
        row.t = tj;
        row.incoming = wave.value({wave.lattice().origin_in()});
        row.out_before = wave.value({wave.lattice().origin_out()});
        boundary_step(wave, schedule, tj);
        row.out_after = wave.value({wave.lattice().origin_out()});
        h.rows.push_back(std::move(row));
        h.frames.push_back(dense(wave));
    }
    return h;
}

double dirac_residual(const WaveHistory& history) {
    if (history.frames.size() < 4)
        throw std::invalid_argument("dirac_residual: need a history of at least 3 steps");
    const ExtendedLattice& lat = history.lattice;
    const double dt = lat.delta;
    const int in = lat.origin_in();
    const int out = lat.origin_out();

    double res = 0.0;
    const int steps = static_cast<int>(history.frames.size()) - 1;
    for (int m = 0; m < steps; ++m) {
        const auto& f0 = history.frames[m];
        const auto& f1 = history.frames[m + 1];
        // input channel psi_+(j) at site in + j, transport (d_t - d_tau)
        for (int j = 2; in + j + 1 < lat.n_sites(); ++j) {
            for (int c = 0; c < history.dim; ++c) {
                const cplx dtv = (f1[in + j][c] - f0[in + j][c]) / dt;
                const cplx dx = (f0[in + j + 1][c] - f0[in + j - 1][c]) / (2.0 * dt);
                res = std::max(res, std::abs(dtv - dx));
            }
        }
        // reflected output channel psi_-(j) at site out - j, (d_t + d_tau)
        for (int j = 2; out - j - 1 >= 0; ++j) {
            for (int c = 0; c < history.dim; ++c) {
                const cplx dtv = (f1[out - j][c] - f0[out - j][c]) / dt;
                const cplx dx = (f0[out - (j + 1)][c] - f0[out - (j - 1)][c]) / (2.0 * dt);
                res = std::max(res, std::abs(dtv + dx));
            }
        }
    }
    return res;
}

double boundary_row_defect(const WaveHistory& history, const HamiltonianSchedule& schedule) {
    double d = 0.0;
    for (const auto& row : history.rows) {
        const std::vector<cplx> gain = schedule.generator(row.t).apply(row.incoming);
        for (int c = 0; c < history.dim; ++c)
            d = std::max(d, std::abs(row.out_after[c] - row.out_before[c] - gain[c]));
    }
    return d;
}

GaugeProfile::GaugeProfile(IntensityProfile nu) : nu_(std::move(nu)) {
    if (nu_.kind() == IntensityProfile::Kind::tabulated) {
        // crude smoothness guard: reject wild slope jumps of ln(nu)
        const auto& xs = nu_.knots();
        const auto& vs = nu_.knot_values();
        double prev_slope = 0.0;
        for (size_t i = 1; i < xs.size(); ++i) {
            const double slope = (std::log(vs[i]) - std::log(vs[i - 1])) / (xs[i] - xs[i - 1]);
            if (i > 1 && std::abs(slope - prev_slope) > 50.0)
                throw std::invalid_argument("GaugeProfile: intensity table is not smooth enough");
            prev_slope = slope;
        }
    }
}

double GaugeProfile::nu_at(double x) const { return nu_.value(std::abs(x)); }
double GaugeProfile::theta(double x) const { return 0.5 * std::log(nu_at(x)); }
double GaugeProfile::phi(double x, double h) const {
    return (theta(x + h) - theta(x - h)) / (2.0 * h);
}

namespace {

double gauge_horizon_integral(const SectorWave& wave, const GaugeProfile& gauge) {
    const double span = std::min(wave.lattice().half_extent * wave.lattice().delta,
                                 gauge.intensity().domain_end());
    return 2.0 * gauge.intensity().integral_to(span);
}

}  // namespace

void gauge_transform(SectorWave& wave, const GaugeProfile& gauge, GaugeDirection direction) {
    const double e = gauge_horizon_integral(wave, gauge);
    const double sign = direction == GaugeDirection::to_poisson ? 1.0 : -1.0;
    const double global = std::exp(sign * e);
    for (auto& [key, v] : wave.amps()) {
        double factor = global;
        for (int a : key) {
            const double nu2 = 2.0 * gauge.nu_at(wave.lattice().position(a));
            factor *= direction == GaugeDirection::to_poisson ? 1.0 / std::sqrt(nu2)
                                                              : std::sqrt(nu2);
        }
        for (auto& c : v) c *= factor;
    }
}

void gauged_shift_step(SectorWave& wave, const GaugeProfile& gauge) {
    free_shift_step(wave);
    for (auto& [key, v] : wave.amps()) {
        double factor = 1.0;
        for (int a : key) {
            const double nu_new = gauge.nu_at(wave.lattice().position(a));
            // value arrived from one site to the right
            const double nu_old = gauge.nu_at(wave.lattice().position(a + 1));
            factor *= std::sqrt(nu_new / nu_old);
        }
        for (auto& c : v) c *= factor;
    }
}

void export_csv(const SectorWave& wave, int step, std::ostream& os, bool header) {
    if (header) {
        os << "step";
        if (wave.k() == 1)
            os << ",site";
        else
            for (int i = 0; i < wave.k(); ++i) os << ",site" << (i + 1);
        os << ",basis,re,im\n";
    }
    char buf[64];
    for (const auto& [key, v] : wave.amps()) {
        for (int c = 0; c < wave.dim(); ++c) {
            os << step;
            for (int a : key) os << ',' << wave.lattice().site_label(a);
            std::snprintf(buf, sizeof buf, ",%d,%.17g,%.17g", c, v[c].real(), v[c].imag());
            os << buf << '\n';
        }
    }
}

}  // namespace chronon
