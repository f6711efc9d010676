#pragma once

// Lattice simulator of the Schrodinger-picture boundary value problem: clock
// waves translate toward the past over an extended time axis with a
// degenerate origin, and every crossing of the origin applies the
// object-clock interaction. Time step equals lattice spacing, so the free
// shift is an exact translation and all discretization error sits in the
// quantization of crossing times.

#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "chronon/complex_matrix.hpp"
#include "chronon/dilation.hpp"
#include "chronon/guichardet.hpp"
#include "chronon/object_space.hpp"

namespace chronon {

/// Sites are addressed by array index a in [0, 2*half_extent + 1], left to
/// right. Index half_extent is the output origin (written 0~), index
/// half_extent + 1 the input origin (written 0); both sit at coordinate 0.
struct ExtendedLattice {
    double delta = 0.0;
    int half_extent = 0;

    ExtendedLattice() = default;
    ExtendedLattice(double delta_, int half_extent_);

    int n_sites() const { return 2 * half_extent + 2; }
    int origin_out() const { return half_extent; }
    int origin_in() const { return half_extent + 1; }

    /// Coordinate of a site; both origin sites map to 0.
    double position(int a) const;
    /// Site on the input side holding coordinate x > 0 (rounded).
    int site_of_positive(double x) const;
    /// Human-readable site label: ..., "-1", "0~", "0", "1", ...
    std::string site_label(int a) const;
};

/// k-particle wave on the extended lattice, k <= 2. One object vector per
/// ascending tuple of occupied sites; the temporal character of each particle
/// is implicit in its domain (output side past, input side future).
class SectorWave {
public:
    SectorWave(ExtendedLattice lattice, int k, int dim);

    /// Delta-supported k-particle state at the input-side sites holding the
    /// chain coordinates, object factor eta.
    static SectorWave chain_wave(const ExtendedLattice& lat, const Chain& chain,
                                 std::vector<cplx> eta);
    /// Smooth one-particle packet profile(x) * eta on the input side.
    static SectorWave packet_wave(const ExtendedLattice& lat,
                                  const std::function<double(double)>& profile,
                                  std::vector<cplx> eta);

    const ExtendedLattice& lattice() const { return lat_; }
    int k() const { return k_; }
    int dim() const { return dim_; }

    std::map<std::vector<int>, std::vector<cplx>>& amps() { return amps_; }
    const std::map<std::vector<int>, std::vector<cplx>>& amps() const { return amps_; }

    /// Value at a configuration; zeros if unoccupied.
    std::vector<cplx> value(const std::vector<int>& key) const;
    void add(const std::vector<int>& key, const std::vector<cplx>& v);

    double max_abs() const;
    double max_abs_diff(const SectorWave& o) const;

private:
    ExtendedLattice lat_;
    int k_;
    int dim_;
    std::map<std::vector<int>, std::vector<cplx>> amps_;
};

/// Translate every particle one site toward the past domain. Pure relabel,
/// exactly norm preserving. Throws if support would fall off the left edge.
void free_shift_step(SectorWave& wave);

/// Interaction at the degenerate origin at step time t: every configuration
/// with a particle at the input origin deposits the increment
/// G(t) * amplitude onto the configuration with that particle relabelled to
/// the output origin. Together with the shift's relabel this realizes the
/// full interaction sigma(t) = I + gamma(t): the identity part keeps the
/// source amplitude, the gamma part creates the transformed image. All other
/// amplitudes are untouched.
void boundary_step(SectorWave& wave, const HamiltonianSchedule& schedule, double t);

/// steps iterations of shift-then-boundary; boundary at absolute times
/// t0 + j*delta, j = 1..steps.
void evolve(SectorWave& wave, const HamiltonianSchedule& schedule, double t0, int steps,
            bool with_boundary = true);

/// Literal Minkowski pairing of two implicit-character waves. Occupied
/// sectors carry null per-point characters, so only the k = 0 component can
/// contribute; conserved exactly by both step operations.
cplx compound_pseudo_pairing(const SectorWave& u, const SectorWave& v,
                             const std::vector<cplx>& u0, const std::vector<cplx>& v0);

/// Run the lattice from particles at the chain coordinates to time t and
/// compare every spin branch against the jump evolution at parameter t.
/// Branches are identified by which particles took the origin hop; their
/// lattice configurations are disjoint provided chain gaps are at least
/// 2*delta. Requires t at least one step away from every chain point.
/// The defect is O(delta) through the quantization of crossing times.
/// With reversed_reference the comparison targets use the reversed
/// chronological order; for non-commuting generators this does not converge.
double equivalence_defect(const HamiltonianSchedule& schedule, const Chain& chain, double t,
                          double delta, bool reversed_reference = false);

/// Compare running the lattice to time t and continuing by r against the
/// single run to r + t, for a one-particle probe crossing in the second leg.
/// The composed run restarts its boundary clock at the exact (generally
/// off-grid) time t, so the defect measures the semigroup property under
/// grid-incommensurate composition and is O(distance of t from the grid).
/// probe_x <= 0 places the probe at t + 0.45 r automatically.
double cocycle_defect(const HamiltonianSchedule& schedule, double r, double t, double delta,
                      double probe_x = 0.0);

/// Dense history of a one-particle run, for finite-difference consistency
/// checks of the two-channel transport form.
struct WaveHistory {
    ExtendedLattice lattice;
    int dim = 0;
    double t0 = 0.0;
    // frames[m][a] = object vector at site a after m steps
    std::vector<std::vector<std::vector<cplx>>> frames;
    struct BoundaryRow {
        double t;
        std::vector<cplx> incoming;    // input-origin value after the shift
        std::vector<cplx> out_before;  // output-origin value before the increment
        std::vector<cplx> out_after;   // output-origin value after the increment
    };
    std::vector<BoundaryRow> rows;
};

WaveHistory evolve_with_history(SectorWave wave, const HamiltonianSchedule& schedule, double t0,
                                int steps);

/// Max finite-difference residual of (d_t + d_tau) on the reflected output
/// channel and (d_t - d_tau) on the input channel, away from the origin.
/// Forward time difference against centered space difference: O(delta) for
/// smooth data.
double dirac_residual(const WaveHistory& history);

/// Residual of the boundary rows: output-origin increment minus
/// G(t) * incoming value; zero by construction of boundary_step.
double boundary_row_defect(const WaveHistory& history, const HamiltonianSchedule& schedule);

/// Hyperbolic gauge data of an intensity: theta = ln(nu)/2 and its lattice
/// finite-difference derivative. The profile is extended evenly to the
/// negative domain.
class GaugeProfile {
public:
    explicit GaugeProfile(IntensityProfile nu);

    const IntensityProfile& intensity() const { return nu_; }
    double nu_at(double x) const;
    double theta(double x) const;
    /// Central finite difference of theta with spacing h.
    double phi(double x, double h) const;

private:
    IntensityProfile nu_;
};

enum class GaugeDirection { to_poisson, to_hilbert };

/// Pointwise gauge map: per particle (2 nu(x))^(-1/2) toward the Poisson
/// picture and the reciprocal back, with a fixed global exponential factor
/// over the lattice horizon. Round trip is the identity.
void gauge_transform(SectorWave& wave, const GaugeProfile& gauge, GaugeDirection direction);

/// Transport step in the gauged picture: free shift followed by the factor
/// sqrt(nu(x) / nu(x + delta)) per particle (= e^{-phi delta} to first
/// order); equals the plain shift conjugated by the gauge maps.
void gauged_shift_step(SectorWave& wave, const GaugeProfile& gauge);

/// CSV rows: step, site label(s), object basis index, re, im.
void export_csv(const SectorWave& wave, int step, std::ostream& os, bool header = false);

}  // namespace chronon
