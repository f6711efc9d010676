#include "chronon/object_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace chronon {

namespace {
constexpr double kHermTol = 1e-12;

void require_square(const CMatrix& m, const char* what) {
    if (m.rows() != m.cols() || m.rows() < 1)
        throw std::invalid_argument(std::string(what) + ": matrix must be square, dim >= 1");
}
}  // namespace

HamiltonianSchedule HamiltonianSchedule::constant(CMatrix h0) {
    require_square(h0, "HamiltonianSchedule::constant");
    HamiltonianSchedule s;
    s.kind_ = ScheduleKind::constant;
    s.dim_ = h0.rows();
    s.horizon_ = std::numeric_limits<double>::infinity();
    s.h0_ = std::move(h0);
    s.validate_hermitian();
    return s;
}

HamiltonianSchedule HamiltonianSchedule::harmonic(CMatrix h0, CMatrix h1, double omega) {
    require_square(h0, "HamiltonianSchedule::harmonic");
    require_square(h1, "HamiltonianSchedule::harmonic");
    if (h0.rows() != h1.rows())
        throw std::invalid_argument("HamiltonianSchedule::harmonic: h0/h1 dim mismatch");
    if (!std::isfinite(omega)) throw std::invalid_argument("HamiltonianSchedule::harmonic: omega");
    HamiltonianSchedule s;
    s.kind_ = ScheduleKind::harmonic;
    s.dim_ = h0.rows();
    s.horizon_ = std::numeric_limits<double>::infinity();
    s.h0_ = std::move(h0);
    s.h1_ = std::move(h1);
    s.omega_ = omega;
    s.validate_hermitian();
    return s;
}

HamiltonianSchedule HamiltonianSchedule::separable(CMatrix h, IntensityProfile nu) {
    require_square(h, "HamiltonianSchedule::separable");
    HamiltonianSchedule s;
    s.kind_ = ScheduleKind::separable;
    s.dim_ = h.rows();
    s.horizon_ = nu.domain_end();
    s.h0_ = std::move(h);
    s.nu_ = std::move(nu);
    s.validate_hermitian();
    return s;
}

HamiltonianSchedule HamiltonianSchedule::piecewise_constant(
    std::vector<std::pair<double, CMatrix>> pieces) {
    if (pieces.empty())
        throw std::invalid_argument("HamiltonianSchedule::piecewise_constant: no pieces");
    double prev = 0.0;
    for (const auto& [end, m] : pieces) {
        require_square(m, "HamiltonianSchedule::piecewise_constant");
        if (m.rows() != pieces.front().second.rows())
            throw std::invalid_argument("HamiltonianSchedule::piecewise_constant: dim mismatch");
        if (!(end > prev))
            throw std::invalid_argument(
                "HamiltonianSchedule::piecewise_constant: piece ends must increase from 0");
        prev = end;
    }
    HamiltonianSchedule s;
    s.kind_ = ScheduleKind::piecewise_constant;
    s.dim_ = pieces.front().second.rows();
    s.horizon_ = pieces.back().first;
    s.pieces_ = std::move(pieces);
    s.validate_hermitian();
    return s;
}

void HamiltonianSchedule::validate_hermitian() const {
    const double span = std::isfinite(horizon_) ? horizon_ : 8.0;
    const int n = 33;
    for (int i = 0; i < n; ++i) {
        const double t = span * double(i) / double(n - 1);
        if (hermiticity_defect(hamiltonian(t)) > kHermTol)
            throw std::invalid_argument("HamiltonianSchedule: H(t) is not Hermitian");
    }
}

void HamiltonianSchedule::check_time(double t) const {
    if (!(t >= 0.0) || t > horizon_ * (1.0 + 1e-12) + 1e-15)
        throw std::out_of_range("HamiltonianSchedule: t outside [0, horizon]");
}

CMatrix HamiltonianSchedule::hamiltonian(double t) const {
    check_time(t);
    switch (kind_) {
        case ScheduleKind::constant:
            return h0_;
        case ScheduleKind::harmonic: {
            CMatrix m = h0_;
            m += std::cos(omega_ * t) * h1_;
            return m;
        }
        case ScheduleKind::separable:
            return nu_->value(std::min(t, nu_->domain_end())) * h0_;
        case ScheduleKind::piecewise_constant: {
            for (const auto& [end, m] : pieces_)
                if (t < end) return m;
            return pieces_.back().second;  // t == horizon
        }
    }
    throw std::logic_error("HamiltonianSchedule: unknown kind");
}

CMatrix HamiltonianSchedule::generator(double t) const {
    return cplx(0.0, -1.0) * hamiltonian(t);
}

std::vector<double> HamiltonianSchedule::breakpoints() const {
    std::vector<double> bp;
    if (kind_ == ScheduleKind::piecewise_constant) {
        for (size_t i = 0; i + 1 < pieces_.size(); ++i) bp.push_back(pieces_[i].first);
    } else if (kind_ == ScheduleKind::separable &&
               nu_->kind() == IntensityProfile::Kind::tabulated) {
        const auto& xs = nu_->knots();
        bp.assign(xs.begin() + 1, xs.end() - 1);
    }
    return bp;
}

double HamiltonianSchedule::norm_bound(int samples) const {
    const double span = std::isfinite(horizon_) ? horizon_ : 8.0;
    double b = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double t = span * double(i) / double(std::max(1, samples - 1));
        b = std::max(b, op_norm_estimate(hamiltonian(t)));
    }
    return b;
}

std::string method_name(PropagatorMethod m) {
    switch (m) {
        case PropagatorMethod::reference: return "reference";
        case PropagatorMethod::dyson: return "dyson";
        case PropagatorMethod::picard: return "picard";
        case PropagatorMethod::poisson_mc: return "poisson_mc";
    }
    return "unknown";
}

namespace {

// RK4 sweep of dV/dx = G(x) V over [a, b] with n steps, in place. The right
// endpoint of the final step is nudged one ulp inward so that a breakpoint
// sitting exactly at b is evaluated from the left piece.
void rk4_span(const HamiltonianSchedule& sched, double a, double b, int n, CMatrix& v) {
    if (b <= a) return;
    const double h = (b - a) / n;
    for (int i = 0; i < n; ++i) {
        const double x = a + h * i;
        const double xe = (i == n - 1) ? std::nextafter(b, a) : x + h;
        const CMatrix g1 = sched.generator(x);
        const CMatrix g2 = sched.generator(x + 0.5 * h);
        const CMatrix g3 = sched.generator(xe);
        const CMatrix k1 = g1 * v;
        const CMatrix k2 = g2 * (v + (0.5 * h) * k1);
        const CMatrix k3 = g2 * (v + (0.5 * h) * k2);
        const CMatrix k4 = g3 * (v + h * k3);
        CMatrix incr = k1;
        incr += 2.0 * k2;
        incr += 2.0 * k3;
        incr += k4;
        v += (h / 6.0) * incr;
    }
}

}  // namespace

PropagatorEstimate reference_propagator(const HamiltonianSchedule& schedule, double s, double t,
                                        int steps) {
    if (!(0.0 <= s && s <= t)) throw std::invalid_argument("reference_propagator: need 0 <= s <= t");
    if (steps < 1) throw std::invalid_argument("reference_propagator: steps >= 1");
    if (t > schedule.horizon() * (1.0 + 1e-12) + 1e-15)
        throw std::out_of_range("reference_propagator: t beyond schedule horizon");

    // split [s, t] at breakpoints; distribute steps by sub-interval length
    std::vector<double> cuts{s};
    for (double bp : schedule.breakpoints())
        if (bp > s + 1e-15 && bp < t - 1e-15) cuts.push_back(bp);
    cuts.push_back(t);
    std::sort(cuts.begin(), cuts.end());

    CMatrix v = CMatrix::identity(schedule.dim());
    const double total = t - s;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double len = cuts[i + 1] - cuts[i];
        if (len <= 0.0) continue;
        const int n = std::max(1, static_cast<int>(std::ceil(steps * len / std::max(total, 1e-300))));
        rk4_span(schedule, cuts[i], cuts[i + 1], n, v);
    }

    PropagatorEstimate est;
    est.matrix = std::move(v);
    est.method = PropagatorMethod::reference;
    return est;
}

double hemigroup_defect(const HamiltonianSchedule& schedule, double r, double s, double t,
                        int steps) {
    if (!(r <= s && s <= t)) throw std::invalid_argument("hemigroup_defect: need r <= s <= t");
    const CMatrix v_sr = reference_propagator(schedule, r, s, steps).matrix;
    const CMatrix v_ts = reference_propagator(schedule, s, t, steps).matrix;
    const CMatrix v_tr = reference_propagator(schedule, r, t, steps).matrix;
    return max_abs_diff(v_ts * v_sr, v_tr);
}

double unitarity_defect(const CMatrix& v) {
    return max_abs_diff(v.adjoint() * v, CMatrix::identity(v.rows()));
}

}  // namespace chronon
