#pragma once

// Finite-dimensional object space: time-dependent Hermitian generator
// schedules and the time-ordered-exponential reference propagator that the
// series and Monte Carlo routes are checked against.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chronon/complex_matrix.hpp"
#include "chronon/intensity.hpp"

namespace chronon {

enum class ScheduleKind { constant, harmonic, separable, piecewise_constant };

/// Time-dependent Hamiltonian H(t) on a small object space. Hermiticity is
/// checked by sampling at construction (tolerance 1e-12). Evaluation outside
/// [0, horizon] throws.
class HamiltonianSchedule {
public:
    static HamiltonianSchedule constant(CMatrix h0);
    static HamiltonianSchedule harmonic(CMatrix h0, CMatrix h1, double omega);
    /// H(t) = nu(t) * h; the generator is then nu(t) * (-i h) exactly.
    static HamiltonianSchedule separable(CMatrix h, IntensityProfile nu);
    /// Pieces given as (end_time, matrix); piece i applies on
    /// [end_{i-1}, end_i). Horizon is the last end time.
    static HamiltonianSchedule piecewise_constant(std::vector<std::pair<double, CMatrix>> pieces);

    ScheduleKind kind() const { return kind_; }
    int dim() const { return dim_; }
    double horizon() const { return horizon_; }

    CMatrix hamiltonian(double t) const;
    /// G(t) = -i H(t), anti-Hermitian by construction.
    CMatrix generator(double t) const;

    /// Interior times where H is not smooth (piece boundaries, table knots).
    /// Integrators split at these points.
    std::vector<double> breakpoints() const;

    /// sup over sampled t of the spectral norm of H(t); crude but adequate
    /// for truncation-bound bookkeeping.
    double norm_bound(int samples = 64) const;

    const IntensityProfile* intensity() const {
        return kind_ == ScheduleKind::separable ? &nu_.value() : nullptr;
    }

private:
    HamiltonianSchedule() = default;
    void validate_hermitian() const;
    void check_time(double t) const;

    ScheduleKind kind_ = ScheduleKind::constant;
    int dim_ = 0;
    double horizon_ = 0.0;
    CMatrix h0_, h1_;
    double omega_ = 0.0;
    std::optional<IntensityProfile> nu_;
    std::vector<std::pair<double, CMatrix>> pieces_;
};

enum class PropagatorMethod { reference, dyson, picard, poisson_mc };

std::string method_name(PropagatorMethod m);

/// Propagator approximation plus the metadata of whichever method produced
/// it; only that method's fields are set.
struct PropagatorEstimate {
    CMatrix matrix;
    PropagatorMethod method = PropagatorMethod::reference;
    std::optional<int> truncation_order;
    std::optional<long long> mc_samples;
    std::optional<double> mc_stderr;          // max over entries
    std::optional<std::uint64_t> seed;
    std::vector<double> mc_stderr_entries;    // row-major, empty unless poisson_mc
};

/// Solve dV/dx = G(x) V from V(s) = I with fixed-step classical RK4,
/// splitting at schedule breakpoints so each sub-interval is smooth.
/// Global error O(steps^-4).
PropagatorEstimate reference_propagator(const HamiltonianSchedule& schedule, double s, double t,
                                        int steps);

/// || V^t_s V^s_r - V^t_r || in the max-entry norm.
double hemigroup_defect(const HamiltonianSchedule& schedule, double r, double s, double t,
                        int steps);

/// || V^* V - I ||, the unitarity defect of an estimate.
double unitarity_defect(const CMatrix& v);

}  // namespace chronon
